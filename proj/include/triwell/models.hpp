// models.hpp: analytic charge predictions
//
// Two particles: the exact large-coupling result
//   C/C_max = 1 - beta sin^2(3 (pi - 4) u / 16),  beta = 4 (2 eps3 - eps1 - eps2) / (9 eps3).
// More particles: a two-level model of the central manifold with Landau-Zener
// transitions at the two avoided crossings,
//   C/C_max = 1 - 4 c P (1 - P) sin^2(phase).

#pragma once

#include "triwell/fock.hpp"
#include "triwell/hamiltonian.hpp"
#include "triwell/spectrum.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace triwell {

// Relative phase accumulated per unit u between the two N=2 manifold states is
// twice this rate.
inline constexpr double kTwoParticlePhaseRate = 3.0 * (std::numbers::pi - 4.0) / 16.0;

double two_particle_beta(const std::array<double, 3>& eps);

double analytic_charge_n2(double u, const std::array<double, 3>& eps);

// Amplitudes on (phi0, phi1) at the end of the ramp for N=2.
Eigen::Vector2cd manifold_final_amplitudes(double u);

// The N=2 central-manifold states written in the Fock basis. phi0 is the
// ramp-independent state; phi1 at s=0 and s=1 complete the degenerate pair there
// with the signs fixed by parallel transport.
struct TwoParticleManifold {
    Eigen::VectorXd phi0;
    Eigen::VectorXd phi1_start;
    Eigen::VectorXd phi1_end;
};

TwoParticleManifold two_particle_manifold(const FockBasis& basis);

// C/C_max of the two-particle manifold final state, evaluated through the 2x2 matrix of H0 in
// the (phi0, phi1) basis at s=1.
double manifold_charge_n2(double u, const std::array<double, 3>& eps);

struct TwoLevelPrediction {
    double charge;             // C/C_max
    std::complex<double> a0;   // amplitude on Phi0 after the second crossing
    std::complex<double> a1;   // amplitude on Phi1
};

// `phase` is half the integral of (E0 - E1) between the crossings.
TwoLevelPrediction two_level_charge(double c, double probability, double phase);

struct ModelOptions {
    int grid_points{2001};
    double shift_fraction{0.05};
    LZFitOptions fit{};
    double contrast_time{1.0};  // node where c is evaluated (1 or 0)
};

struct ModelPoint {
    double u{0.0};
    std::optional<double> charge;  // C/C_max; empty when the model was inapplicable
    std::string diagnostic;
    double s0{0.0};
    double s1{0.0};
    LZFit fit{};
    double probability{0.0};
    double phase{0.0};
    double contrast{0.0};
};

// Full pipeline at a single u; analysis errors propagate.
ModelPoint predict_charge(const FockBasis& basis, const ModelParams& params,
                          const ModelOptions& options = {});

// predict_charge for each u; failures are recorded in the point's diagnostic.
std::vector<ModelPoint> predict_charge_curve(const FockBasis& basis,
                                             const ModelParams& params_template,
                                             const std::vector<double>& u_values,
                                             const ModelOptions& options = {});

} // namespace triwell
