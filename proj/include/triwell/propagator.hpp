// propagator.hpp: unitary evolution across the ramp
//
// Each step applies exp(-i ds h(s_mid)) exactly through the eigendecomposition of
// the real-symmetric midpoint Hamiltonian (second-order exponential midpoint rule).

#pragma once

#include "triwell/fock.hpp"
#include "triwell/hamiltonian.hpp"

#include <Eigen/Dense>

#include <vector>

namespace triwell {

struct SpectrumGrid;

struct EvolveSettings {
    int steps{256};          // initial step count, doubled until converged
    double rel_tol{1e-8};    // on the final charge, relative to C_max
    int max_doublings{22};
    int sample_count{0};     // trajectory samples uniform in s, 0 = none
};

struct TrajectorySample {
    double s;
    StateVector state;
};

struct EvolutionResult {
    StateVector final_state;
    std::vector<TrajectorySample> trajectory;
    long steps_used{0};
    double max_norm_drift{0.0};
    double charge{0.0};             // <psi(1)|H0|psi(1)>
    double normalized_charge{0.0};  // charge / C_max
    int doublings{0};
};

// Unit amplitude on (N,0,0).
StateVector initial_state(const FockBasis& basis, int particle_number);

// One fixed-step run. With sample_count >= 2 the interval is split into
// sample_count - 1 equal segments, each integrated with ceil(steps / segments) steps.
EvolutionResult propagate(const FockBasis& basis, const ModelParams& params, long steps,
                          int sample_count = 0);

// Step doubling from settings.steps until the final charge moves by less than
// rel_tol * C_max. Throws ConvergenceError after max_doublings.
EvolutionResult evolve(const FockBasis& basis, const ModelParams& params,
                       const EvolveSettings& settings = {});

// |<Phi_band(s)|psi(s)>|^2 for every trajectory sample (rows) and band (columns).
// Every sample time must be a node of the spectrum grid.
Eigen::MatrixXd populations_on_eigenbasis(const EvolutionResult& result,
                                          const SpectrumGrid& spectrum);

} // namespace triwell
