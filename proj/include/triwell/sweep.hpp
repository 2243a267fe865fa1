// sweep.hpp: parameter sweeps of the final charge
//
// Cells are independent evolutions run data-parallel; results are written in grid
// order, so output does not depend on scheduling.

#pragma once

#include "triwell/hamiltonian.hpp"
#include "triwell/propagator.hpp"
#include "triwell/run_config.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace triwell {

std::vector<double> linspace(double lo, double hi, int points);
// lo and hi must share a sign; spacing is geometric in |value|
std::vector<double> logspace(double lo, double hi, int points);

struct SweepSettings {
    std::array<double, 3> eps{0.0, 1.0, 2.0};
    EvolveSettings evolve{};
};

struct ChargeMap {
    int n{2};
    std::vector<double> g_values;
    std::vector<double> u_values;
    Eigen::MatrixXd charge;               // g x u, C/C_max; NaN marks a missing cell
    std::vector<std::string> diagnostics; // row-major g x u, empty when the cell is fine
    std::array<double, 3> eps{0.0, 1.0, 2.0};
    double reference_ratio{0.1};          // guide line |u| = reference_ratio * g
    std::string code_version{kVersion};

    bool complete(std::size_t gi, std::size_t ui) const;
    std::size_t missing_count() const;
};

// Called after each finished g row with the map so far and the row index.
using RowCallback = std::function<void(const ChargeMap&, std::size_t)>;

// Evolves every (g, u) cell. Cells already present in `resume` (same N, eps, and
// exactly equal g and u) are copied instead of recomputed. Failed cells become NaN
// with a diagnostic; they never abort the sweep.
ChargeMap charge_map(int n, const std::vector<double>& g_values,
                     const std::vector<double>& u_values, const SweepSettings& settings,
                     const ChargeMap* resume = nullptr, const RowCallback& on_row = {});

struct CurvePoint {
    double u{0.0};
    std::optional<double> charge;  // C/C_max
    std::string diagnostic;
    long steps_used{0};
    double max_norm_drift{0.0};
};

// Numeric C/C_max at fixed g for each u (output in the given u order).
std::vector<CurvePoint> charge_curve(int n, double g, const std::vector<double>& u_values,
                                     const SweepSettings& settings);

// Long-form CSV: g_index,u_index,g,u,charge_norm,status
void write_charge_map_csv(std::ostream& os, const ChargeMap& map, const RunConfig& config);
// Reads a file written by write_charge_map_csv (e.g. a partial checkpoint).
ChargeMap read_charge_map_csv(std::istream& is);

} // namespace triwell
