// hamiltonian.hpp: dimensionless three-well Hamiltonian along the linear ramp
//
// Time is s = t/tau in [0,1]; energies are in units of hbar/tau, so the model is
// fixed by g = tau*Omega/hbar and u = tau*U/hbar.

#pragma once

#include "triwell/fock.hpp"

#include <Eigen/Dense>

#include <array>

namespace triwell {

using StateVector = Eigen::VectorXcd;

struct ModelParams {
    int n{2};
    double g{1.0};
    double u{0.0};
    // on-site energies, ascending; default is (0,1,2) in units of eps3/2
    std::array<double, 3> eps{0.0, 1.0, 2.0};

    // Throws DomainError when eps is not ascending, eps3 <= 0 or g < 0.
    void validate() const;
    double max_charge() const { return n * eps[2]; }
};

struct RampValue {
    double s;
    double w12;
    double w23;
};

RampValue ramp(double s);

// Operator pieces of h(s), assembled once per (basis, params).
class RampHamiltonian {
public:
    RampHamiltonian(const FockBasis& basis, const ModelParams& params);

    // h(s) = (u/2) sum n_i(n_i - 1) + g [ s (b1+b2 + h.c.) + (1-s) (b2+b3 + h.c.) ]
    Eigen::MatrixXd at(double s) const;
    // dh/ds, independent of s for the linear ramp
    Eigen::MatrixXd derivative() const;

    Eigen::Index dim() const noexcept { return pair_count_.size(); }
    const ModelParams& params() const noexcept { return params_; }
    // sum_i n_i (n_i - 1) / 2 per basis state
    const Eigen::VectorXd& pair_count() const noexcept { return pair_count_; }

private:
    ModelParams params_;
    Eigen::VectorXd pair_count_;
    Eigen::MatrixXd hop12_;
    Eigen::MatrixXd hop23_;
};

Eigen::MatrixXd h_int(const FockBasis& basis, const ModelParams& params, double s);

// Diagonal of H0 = sum_i eps_i n_i.
Eigen::VectorXd h_self(const FockBasis& basis, const ModelParams& params);

// <psi|H0|psi>; throws DomainError if psi is not normalized within 1e-9.
double charge(const StateVector& state, const FockBasis& basis, const ModelParams& params);

} // namespace triwell
