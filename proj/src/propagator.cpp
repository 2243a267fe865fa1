#include "triwell/propagator.hpp"

#include "triwell/errors.hpp"
#include "triwell/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

namespace triwell {

namespace {

// Advances psi from s_begin to s_end in `steps` midpoint steps.
void advance(const RampHamiltonian& ham, StateVector& psi, double s_begin, double s_end,
             long steps, double& max_drift) {
    using namespace std::complex_literals;
    const double ds = (s_end - s_begin) / static_cast<double>(steps);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham.dim());
    Eigen::VectorXcd coeff(ham.dim());
    for (long k = 0; k < steps; ++k) {
        const double s_mid = std::min(1.0, s_begin + (static_cast<double>(k) + 0.5) * ds);
        solver.compute(ham.at(s_mid));
        const Eigen::MatrixXd& v = solver.eigenvectors();
        coeff.noalias() = v.transpose() * psi;
        for (Eigen::Index j = 0; j < coeff.size(); ++j) {
            coeff(j) *= std::exp(-1i * (ds * solver.eigenvalues()(j)));
        }
        psi.noalias() = v * coeff;
        max_drift = std::max(max_drift, std::abs(psi.norm() - 1.0));
    }
}

} // namespace

StateVector initial_state(const FockBasis& basis, int particle_number) {
    if (basis.particle_number() != particle_number) {
        throw DomainError("initial_state: basis has N=" + std::to_string(basis.particle_number()) +
                          ", requested N=" + std::to_string(particle_number));
    }
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(basis.size()));
    psi(static_cast<Eigen::Index>(basis.index({particle_number, 0, 0}))) = 1.0;
    return psi;
}

EvolutionResult propagate(const FockBasis& basis, const ModelParams& params, long steps,
                          int sample_count) {
    if (steps < 1) throw DomainError("propagate: steps must be positive");
    if (sample_count < 0) throw DomainError("propagate: negative sample count");
    const RampHamiltonian ham(basis, params);

    EvolutionResult out;
    StateVector psi = initial_state(basis, params.n);
    double drift = 0.0;

    if (sample_count >= 2) {
        const long segments = sample_count - 1;
        const long per_segment = std::max<long>(1, (steps + segments - 1) / segments);
        out.trajectory.reserve(static_cast<std::size_t>(sample_count));
        out.trajectory.push_back({0.0, psi});
        for (long seg = 0; seg < segments; ++seg) {
            const double a = static_cast<double>(seg) / static_cast<double>(segments);
            const double b = seg + 1 == segments
                                 ? 1.0
                                 : static_cast<double>(seg + 1) / static_cast<double>(segments);
            advance(ham, psi, a, b, per_segment, drift);
            out.trajectory.push_back({b, psi});
        }
        out.steps_used = per_segment * segments;
    } else {
        advance(ham, psi, 0.0, 1.0, steps, drift);
        if (sample_count == 1) out.trajectory.push_back({1.0, psi});
        out.steps_used = steps;
    }

    out.final_state = std::move(psi);
    out.max_norm_drift = drift;
    out.charge = charge(out.final_state, basis, params);
    out.normalized_charge = out.charge / params.max_charge();
    return out;
}

EvolutionResult evolve(const FockBasis& basis, const ModelParams& params,
                       const EvolveSettings& settings) {
    if (settings.steps < 16) {
        throw DomainError("evolve: at least 16 initial steps required, got " +
                          std::to_string(settings.steps));
    }
    if (!(settings.rel_tol > 0.0)) throw DomainError("evolve: rel_tol must be positive");

    long steps = settings.steps;
    EvolutionResult previous = propagate(basis, params, steps, settings.sample_count);
    double drift = previous.max_norm_drift;
    double older = previous.normalized_charge;
    for (int doubling = 1; doubling <= settings.max_doublings; ++doubling) {
        steps *= 2;
        EvolutionResult next = propagate(basis, params, steps, settings.sample_count);
        drift = std::max(drift, next.max_norm_drift);
        const double change = std::abs(next.normalized_charge - previous.normalized_charge);
        if (change < settings.rel_tol) {
            next.max_norm_drift = drift;
            next.doublings = doubling;
            return next;
        }
        older = previous.normalized_charge;
        previous = std::move(next);
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "evolve: final charge not converged after " << settings.max_doublings
        << " doublings (N=" << params.n << ", g=" << params.g << ", u=" << params.u << ")";
    throw ConvergenceError(msg.str(), older, previous.normalized_charge);
}

Eigen::MatrixXd populations_on_eigenbasis(const EvolutionResult& result,
                                          const SpectrumGrid& spectrum) {
    if (result.trajectory.empty()) {
        throw DomainError("populations_on_eigenbasis: result carries no trajectory");
    }
    const auto rows = static_cast<Eigen::Index>(result.trajectory.size());
    const Eigen::Index bands = spectrum.band_count();
    Eigen::MatrixXd pop(rows, bands);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& sample = result.trajectory[static_cast<std::size_t>(r)];
        const auto node = spectrum.node_at(sample.s);
        if (!node) {
            std::ostringstream msg;
            msg << "populations_on_eigenbasis: sample time s=" << sample.s
                << " is not a spectrum grid node";
            throw DomainError(msg.str());
        }
        const Eigen::MatrixXd& vecs = spectrum.vectors[*node];
        if (vecs.rows() != sample.state.size()) {
            throw DomainError("populations_on_eigenbasis: dimension mismatch");
        }
        pop.row(r) = (vecs.transpose() * sample.state).cwiseAbs2().transpose();
    }
    return pop;
}

} // namespace triwell
