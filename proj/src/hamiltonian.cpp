#include "triwell/hamiltonian.hpp"

#include "triwell/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace triwell {

namespace {

void check_basis(const FockBasis& basis, const ModelParams& params) {
    if (basis.particle_number() != params.n) {
        throw DomainError("basis has N=" + std::to_string(basis.particle_number()) +
                          " but parameters have N=" + std::to_string(params.n));
    }
}

} // namespace

void ModelParams::validate() const {
    if (n < 1 || n > kMaxParticles) {
        throw DomainError("particle number " + std::to_string(n) + " outside [1, " +
                          std::to_string(kMaxParticles) + "]");
    }
    if (!(eps[0] <= eps[1] && eps[1] <= eps[2])) {
        throw DomainError("on-site energies must be ascending");
    }
    if (!(eps[2] > 0.0)) {
        throw DomainError("eps3 must be positive");
    }
    if (!(g >= 0.0) || !std::isfinite(g)) {
        throw DomainError("coupling g must be finite and non-negative");
    }
    if (!std::isfinite(u)) {
        throw DomainError("interaction u must be finite");
    }
}

RampValue ramp(double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        std::ostringstream msg;
        msg << "ramp time s=" << s << " outside [0,1]";
        throw DomainError(msg.str());
    }
    return {s, s, 1.0 - s};
}

RampHamiltonian::RampHamiltonian(const FockBasis& basis, const ModelParams& params)
    : params_(params) {
    params.validate();
    check_basis(basis, params);
    pair_count_.resize(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto& st = basis[k];
        pair_count_(static_cast<Eigen::Index>(k)) =
            0.5 * (st.n1 * (st.n1 - 1) + st.n2 * (st.n2 - 1) + st.n3 * (st.n3 - 1));
    }
    const Eigen::MatrixXd b1b2 = hop_matrix(basis, 2, 1);
    const Eigen::MatrixXd b2b3 = hop_matrix(basis, 3, 2);
    hop12_ = b1b2 + b1b2.transpose();
    hop23_ = b2b3 + b2b3.transpose();
}

Eigen::MatrixXd RampHamiltonian::at(double s) const {
    const RampValue w = ramp(s);
    Eigen::MatrixXd h = (params_.g * w.w12) * hop12_ + (params_.g * w.w23) * hop23_;
    h.diagonal() += params_.u * pair_count_;
    return h;
}

Eigen::MatrixXd RampHamiltonian::derivative() const { return params_.g * (hop12_ - hop23_); }

Eigen::MatrixXd h_int(const FockBasis& basis, const ModelParams& params, double s) {
    return RampHamiltonian(basis, params).at(s);
}

Eigen::VectorXd h_self(const FockBasis& basis, const ModelParams& params) {
    check_basis(basis, params);
    return params.eps[0] * number_diag(basis, 1) + params.eps[1] * number_diag(basis, 2) +
           params.eps[2] * number_diag(basis, 3);
}

double charge(const StateVector& state, const FockBasis& basis, const ModelParams& params) {
    check_basis(basis, params);
    if (state.size() != static_cast<Eigen::Index>(basis.size())) {
        throw DomainError("state dimension does not match the basis");
    }
    const double norm = state.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "state is not normalized: norm = " << norm;
        throw DomainError(msg.str());
    }
    return state.cwiseAbs2().dot(h_self(basis, params));
}

} // namespace triwell
