#include "triwell/models.hpp"

#include "triwell/errors.hpp"
#include "triwell/parallel.hpp"

#include <cmath>
#include <sstream>

namespace triwell {

double two_particle_beta(const std::array<double, 3>& eps) {
    return 4.0 * (2.0 * eps[2] - eps[0] - eps[1]) / (9.0 * eps[2]);
}

double analytic_charge_n2(double u, const std::array<double, 3>& eps) {
    const double s = std::sin(kTwoParticlePhaseRate * u);
    return 1.0 - two_particle_beta(eps) * s * s;
}

Eigen::Vector2cd manifold_final_amplitudes(double u) {
    using namespace std::complex_literals;
    Eigen::Vector2cd out;
    out(0) = std::sqrt(1.0 / 3.0);
    out(1) = std::sqrt(2.0 / 3.0) * std::exp(-1i * (2.0 * kTwoParticlePhaseRate * u));
    return out;
}

TwoParticleManifold two_particle_manifold(const FockBasis& basis) {
    if (basis.particle_number() != 2) {
        throw DomainError("two_particle_manifold: needs the N=2 basis");
    }
    const auto dim = static_cast<Eigen::Index>(basis.size());
    auto ket = [&](int n1, int n2, int n3) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v(static_cast<Eigen::Index>(basis.index({n1, n2, n3}))) = 1.0;
        return v;
    };
    TwoParticleManifold m;
    // annihilated by both hopping terms, so an eigenstate with energy u at every s
    m.phi0 = (ket(2, 0, 0) - ket(0, 2, 0) + ket(0, 0, 2)) / std::sqrt(3.0);
    auto complement = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd w = v - m.phi0.dot(v) * m.phi0;
        return Eigen::VectorXd(w / w.norm());
    };
    m.phi1_start = complement(ket(2, 0, 0));
    m.phi1_end = complement(ket(0, 0, 2));
    return m;
}

double manifold_charge_n2(double u, const std::array<double, 3>& eps) {
    const FockBasis basis(2);
    ModelParams params;
    params.n = 2;
    params.eps = eps;
    params.validate();
    const auto m = two_particle_manifold(basis);
    const Eigen::VectorXd h0 = h_self(basis, params);
    Eigen::Matrix2d h;
    h(0, 0) = m.phi0.dot(h0.cwiseProduct(m.phi0));
    h(1, 1) = m.phi1_end.dot(h0.cwiseProduct(m.phi1_end));
    h(0, 1) = h(1, 0) = m.phi0.dot(h0.cwiseProduct(m.phi1_end));
    const Eigen::Vector2cd amp = manifold_final_amplitudes(u);
    const std::complex<double> c = amp.adjoint() * h.cast<std::complex<double>>() * amp;
    return c.real() / params.max_charge();
}

TwoLevelPrediction two_level_charge(double c, double probability, double phase) {
    using namespace std::complex_literals;
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError("two_level_charge: c outside [0,1]");
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw DomainError("two_level_charge: probability outside [0,1]");
    }
    const double p = probability;
    const std::complex<double> rotation = std::exp(-1i * (2.0 * phase));
    TwoLevelPrediction out;
    out.a0 = p + (1.0 - p) * rotation;
    out.a1 = std::sqrt(p * (1.0 - p)) * (1.0 - rotation);
    const double s = std::sin(phase);
    out.charge = 1.0 - 4.0 * c * p * (1.0 - p) * s * s;
    return out;
}

ModelPoint predict_charge(const FockBasis& basis, const ModelParams& params,
                          const ModelOptions& options) {
    ModelPoint point;
    point.u = params.u;
    const auto s_grid = uniform_grid(options.grid_points);
    const SpectrumGrid grid = instantaneous_spectrum(basis, params, s_grid);
    ModelParams control_params = params;
    control_params.g = 2.0 * params.g;
    const SpectrumGrid control = instantaneous_spectrum(basis, control_params, s_grid);
    const auto manifold = central_manifold(grid, control, options.shift_fraction);
    const int ground = manifold[0];
    const int excited = manifold[1];

    const Crossings x = find_crossings(grid, ground, excited);
    point.s0 = x.s0;
    point.s1 = x.s1;
    point.fit = lz_fit(grid, ground, excited, x.s0, options.fit);
    point.probability = lz_probability(point.fit);
    point.phase = phase_integral(grid, ground, excited, x.s0, x.s1);

    const auto node = grid.node_at(options.contrast_time);
    if (!node) throw DomainError("predict_charge: contrast time is not a grid node");
    const Eigen::VectorXd h0 = h_self(basis, params);
    const Eigen::VectorXd& v0 = grid.vectors[*node].col(ground);
    const Eigen::VectorXd& v1 = grid.vectors[*node].col(excited);
    const double e0 = v0.dot(h0.cwiseProduct(v0));
    const double e1 = v1.dot(h0.cwiseProduct(v1));
    if (e0 == 0.0) {
        throw AnalysisError("predict_charge: <Phi0|H0|Phi0> vanishes at the contrast time");
    }
    point.contrast = 1.0 - e1 / e0;
    point.charge = two_level_charge(point.contrast, point.probability, point.phase).charge;
    return point;
}

std::vector<ModelPoint> predict_charge_curve(const FockBasis& basis,
                                             const ModelParams& params_template,
                                             const std::vector<double>& u_values,
                                             const ModelOptions& options) {
    std::vector<ModelPoint> out(u_values.size());
    parallel_for(u_values.size(), [&](std::size_t i) {
        ModelParams params = params_template;
        params.u = u_values[i];
        try {
            out[i] = predict_charge(basis, params, options);
        } catch (const std::exception& e) {
            out[i] = ModelPoint{};
            out[i].u = u_values[i];
            out[i].diagnostic = e.what();
        }
    });
    return out;
}

} // namespace triwell
