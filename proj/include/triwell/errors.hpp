// errors.hpp: exception types shared by the triwell library

#pragma once

#include <stdexcept>
#include <string>

namespace triwell {

// Invalid argument or precondition violation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Step doubling did not settle the final charge within the refinement budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double previous, double last)
        : std::runtime_error(what), previous_(previous), last_(last) {}

    double previous() const noexcept { return previous_; }
    double last() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

// Band tracking lost continuity even after local grid refinement.
class RefinementError : public std::runtime_error {
public:
    RefinementError(const std::string& what, double s_left, double s_right)
        : std::runtime_error(what), s_left_(s_left), s_right_(s_right) {}

    double s_left() const noexcept { return s_left_; }
    double s_right() const noexcept { return s_right_; }

private:
    double s_left_;
    double s_right_;
};

// A spectral analysis step found a structure the two-level model cannot use.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Least-squares fit residual above its acceptance threshold.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace triwell
