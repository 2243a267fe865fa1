// spectrum.hpp: instantaneous spectrum along the ramp, band tracking, the
// coupling-independent central manifold and Landau-Zener analysis of its
// avoided crossings.

#pragma once

#include "triwell/fock.hpp"
#include "triwell/hamiltonian.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace triwell {

struct SpectrumOptions {
    double min_overlap{0.7};     // adjacent-node overlap floor per band
    double min_interval{1e-9};   // refinement stops below this node spacing
};

// Eigen-decomposition at every node. Columns are band-ordered: band b at the first
// node is the b-th lowest level, and is followed by maximal eigenvector overlap.
struct SpectrumGrid {
    ModelParams params;
    std::vector<double> s;                 // includes nodes inserted by refinement
    Eigen::MatrixXd energies;              // node x band
    std::vector<Eigen::MatrixXd> vectors;  // per node, column b is band b
    std::vector<std::vector<int>> band_map;  // per node, band -> ascending eigen index
    double min_adjacent_overlap{1.0};

    Eigen::Index band_count() const { return energies.cols(); }
    std::size_t node_count() const { return s.size(); }
    std::optional<std::size_t> node_at(double time, double tol = 1e-12) const;
    std::size_t nearest_node(double time) const;
};

// n points uniform on [0,1].
std::vector<double> uniform_grid(int points);

// Throws DomainError for an unsorted or short (< 64 points) grid, RefinementError
// when band continuity cannot be restored by bisection.
SpectrumGrid instantaneous_spectrum(const FockBasis& basis, const ModelParams& params,
                                    const std::vector<double>& s_grid,
                                    const SpectrumOptions& options = {});

// Energy of a tracked band at an arbitrary time, by fresh diagonalization and
// overlap matching against the nearest grid node.
class BandEvaluator {
public:
    explicit BandEvaluator(const SpectrumGrid& grid);

    double energy(int band, double time) const;
    // energy(hi) - energy(lo) from a single diagonalization
    double gap(int band_lo, int band_hi, double time) const;

private:
    const SpectrumGrid& grid_;
    FockBasis basis_;
    RampHamiltonian ham_;

    Eigen::Index match(int band, double time, const Eigen::MatrixXd& vecs) const;
};

// Bands whose energies move by at most shift_fraction * g between the run at g and
// the control run at 2g. Ordered outward from the manifold ground state (the band
// holding (N,0,0) at s=0). Throws AnalysisError unless floor(N/2) + 1 bands qualify.
std::vector<int> central_manifold(const SpectrumGrid& grid, const SpectrumGrid& control,
                                  double shift_fraction = 0.05);

struct GapMinimum {
    double s;
    double gap;
};

// Smallest |E_hi - E_lo| over the grid range, golden-section refined around the
// best node.
GapMinimum min_gap(const SpectrumGrid& grid, int band_lo, int band_hi);

struct Crossings {
    double s0;
    double s1;
};

// The two interior minima of |E_hi - E_lo|, golden-section refined to 1e-5 in s.
Crossings find_crossings(const SpectrumGrid& grid, int band_lo, int band_hi);

// Hyperbolic two-level fit of the bands around one avoided crossing:
// E(t) = e0 + ((k1 + k2) t +- sqrt(4 a^2 + (k1 - k2)^2 t^2)) / 2, t = s - s_star.
struct LZFit {
    double s_star{0.0};
    double a{0.0};
    double k1{0.0};
    double k2{0.0};
    double alpha{0.0};   // k1 - k2
    double e0{0.0};
    double rms{0.0};     // residual over both branches
    double min_gap{0.0}; // smallest sampled gap in the window
    double window{0.0};
    int points{0};

    double branch(double time, bool upper) const;
};

struct LZFitOptions {
    double window{0.05};
    int min_points{15};
    double max_relative_rms{0.02};  // of the minimal gap
};

// Fit on sampled branches; t is measured from the crossing. Throws FitError if the
// residual RMS exceeds max_relative_rms times the smallest gap.
LZFit fit_lz_branches(std::span<const double> t, std::span<const double> lower,
                      std::span<const double> upper, double max_relative_rms = 0.02);

// Grid nodes within options.window of s_star; the window is halved while the fit
// misses the residual bound and at least min_points remain.
LZFit lz_fit(const SpectrumGrid& grid, int band_lo, int band_hi, double s_star,
             const LZFitOptions& options = {});

// exp(-2 pi a^2 / |alpha|); throws DomainError when alpha == 0.
double lz_probability(double a, double alpha);
double lz_probability(const LZFit& fit);

// Trapezoid rule on uniform subdivisions, doubled until the relative change falls
// below rel_tol. Throws ConvergenceError after max_doublings.
double adaptive_trapezoid(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-6, int max_doublings = 20);

// Integral over [s0, s1] of (E_lo - E_hi) / 2.
double phase_integral(const SpectrumGrid& grid, int band_lo, int band_hi, double s0, double s1,
                      double rel_tol = 1e-6);

} // namespace triwell
