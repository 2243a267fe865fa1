#include "triwell/spectrum.hpp"

#include "triwell/errors.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>

namespace triwell {

namespace {

struct RawNode {
    double s;
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns match values
};

RawNode decompose(const RampHamiltonian& ham, double s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham.at(s));
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "instantaneous_spectrum: eigensolver failed at s=" << s;
        throw AnalysisError(msg.str());
    }
    return {s, solver.eigenvalues(), solver.eigenvectors()};
}

// Within each cluster of (numerically) degenerate levels the eigensolver basis is
// arbitrary; rotate it onto the reference columns it overlaps most (orthogonal
// Procrustes), so bands continue smoothly through exact degeneracies.
void align_degenerate(RawNode& node, const Eigen::MatrixXd& reference) {
    const Eigen::Index dim = node.values.size();
    const double scale = std::max(1.0, node.values.cwiseAbs().maxCoeff());
    const double tol = 1e-10 * scale;
    Eigen::Index begin = 0;
    while (begin < dim) {
        Eigen::Index end = begin + 1;
        while (end < dim && node.values(end) - node.values(end - 1) <= tol) ++end;
        const Eigen::Index m = end - begin;
        if (m > 1) {
            const Eigen::MatrixXd cluster = node.vectors.middleCols(begin, m);
            const Eigen::MatrixXd w = cluster.transpose() * reference;  // m x dim
            std::vector<Eigen::Index> cols(static_cast<std::size_t>(dim));
            std::iota(cols.begin(), cols.end(), Eigen::Index{0});
            std::partial_sort(cols.begin(), cols.begin() + m, cols.end(),
                              [&](Eigen::Index a, Eigen::Index b) {
                                  return w.col(a).squaredNorm() > w.col(b).squaredNorm();
                              });
            std::sort(cols.begin(), cols.begin() + m);
            Eigen::MatrixXd wm(m, m);
            for (Eigen::Index j = 0; j < m; ++j) wm.col(j) = w.col(cols[static_cast<std::size_t>(j)]);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(wm, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Eigen::MatrixXd q = svd.matrixU() * svd.matrixV().transpose();
            node.vectors.middleCols(begin, m) = cluster * q;
            // levels agree within tol; keep one shared value
            node.values.segment(begin, m).setConstant(node.values.segment(begin, m).mean());
        }
        begin = end;
    }
}

// Greedy assignment of bands (columns of `labelled`) to eigenvectors of `node` by
// decreasing |overlap|. Returns the smallest accepted overlap.
double match_bands(const Eigen::MatrixXd& labelled, const RawNode& node, std::vector<int>& perm) {
    const Eigen::Index dim = labelled.cols();
    const Eigen::MatrixXd overlap = (labelled.transpose() * node.vectors).cwiseAbs();
    std::vector<std::tuple<double, int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(dim * dim));
    for (int b = 0; b < dim; ++b) {
        for (int e = 0; e < dim; ++e) pairs.emplace_back(overlap(b, e), b, e);
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
    perm.assign(static_cast<std::size_t>(dim), -1);
    std::vector<char> used(static_cast<std::size_t>(dim), 0);
    double worst = 1.0;
    int assigned = 0;
    for (const auto& [ov, b, e] : pairs) {
        if (perm[static_cast<std::size_t>(b)] >= 0 || used[static_cast<std::size_t>(e)]) continue;
        perm[static_cast<std::size_t>(b)] = e;
        used[static_cast<std::size_t>(e)] = 1;
        worst = std::min(worst, ov);
        if (++assigned == dim) break;
    }
    return worst;
}

Eigen::MatrixXd relabel(const Eigen::MatrixXd& labelled, const RawNode& node,
                        const std::vector<int>& perm) {
    Eigen::MatrixXd out(node.vectors.rows(), node.vectors.cols());
    for (Eigen::Index b = 0; b < out.cols(); ++b) {
        Eigen::VectorXd v = node.vectors.col(perm[static_cast<std::size_t>(b)]);
        if (labelled.col(b).dot(v) < 0.0) v = -v;
        out.col(b) = v;
    }
    return out;
}

template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

void check_band(const SpectrumGrid& grid, int band, const char* op) {
    if (band < 0 || band >= grid.band_count()) {
        throw DomainError(std::string(op) + ": band " + std::to_string(band) + " out of range");
    }
}

} // namespace

std::optional<std::size_t> SpectrumGrid::node_at(double time, double tol) const {
    const std::size_t k = nearest_node(time);
    if (std::abs(s[k] - time) <= tol) return k;
    return std::nullopt;
}

std::size_t SpectrumGrid::nearest_node(double time) const {
    auto it = std::lower_bound(s.begin(), s.end(), time);
    if (it == s.end()) return s.size() - 1;
    const auto k = static_cast<std::size_t>(it - s.begin());
    if (k > 0 && time - s[k - 1] < *it - time) return k - 1;
    return k;
}

std::vector<double> uniform_grid(int points) {
    if (points < 2) throw DomainError("uniform_grid: need at least 2 points");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = static_cast<double>(k) / (points - 1);
    out.back() = 1.0;
    return out;
}

SpectrumGrid instantaneous_spectrum(const FockBasis& basis, const ModelParams& params,
                                    const std::vector<double>& s_grid,
                                    const SpectrumOptions& options) {
    if (s_grid.size() < 64) {
        throw DomainError("instantaneous_spectrum: need at least 64 grid points, got " +
                          std::to_string(s_grid.size()));
    }
    for (std::size_t k = 0; k < s_grid.size(); ++k) {
        if (!(s_grid[k] >= 0.0 && s_grid[k] <= 1.0) || (k > 0 && !(s_grid[k] > s_grid[k - 1]))) {
            throw DomainError("instantaneous_spectrum: grid must be strictly increasing within [0,1]");
        }
    }
    const RampHamiltonian ham(basis, params);

    SpectrumGrid grid;
    grid.params = params;

    RawNode first = decompose(ham, s_grid.front());
    {
        const RawNode probe = decompose(ham, s_grid[1]);
        align_degenerate(first, probe.vectors);
    }
    Eigen::MatrixXd labelled = first.vectors;
    std::vector<int> identity(static_cast<std::size_t>(labelled.cols()));
    std::iota(identity.begin(), identity.end(), 0);

    std::vector<double> nodes{first.s};
    std::vector<Eigen::VectorXd> node_energies{first.values};
    std::vector<Eigen::MatrixXd> node_vectors{labelled};
    std::vector<std::vector<int>> maps{identity};
    double worst_overlap = 1.0;

    // pending targets, nearest last
    std::vector<double> pending(s_grid.rbegin(), s_grid.rend() - 1);
    std::vector<int> perm;
    while (!pending.empty()) {
        const double target = pending.back();
        const double current = nodes.back();
        RawNode node = decompose(ham, target);
        align_degenerate(node, labelled);
        const double worst = match_bands(labelled, node, perm);
        if (worst < options.min_overlap) {
            if (target - current < options.min_interval) {
                std::ostringstream msg;
                msg << "instantaneous_spectrum: band continuity lost on [" << current << ", "
                    << target << "] (overlap " << worst << ")";
                throw RefinementError(msg.str(), current, target);
            }
            pending.push_back(0.5 * (current + target));
            continue;
        }
        pending.pop_back();
        labelled = relabel(labelled, node, perm);
        Eigen::VectorXd e(labelled.cols());
        for (Eigen::Index b = 0; b < e.size(); ++b) e(b) = node.values(perm[static_cast<std::size_t>(b)]);
        worst_overlap = std::min(worst_overlap, worst);
        nodes.push_back(target);
        node_energies.push_back(std::move(e));
        node_vectors.push_back(labelled);
        maps.push_back(perm);
    }

    grid.s = std::move(nodes);
    grid.energies.resize(static_cast<Eigen::Index>(grid.s.size()), labelled.cols());
    for (std::size_t k = 0; k < grid.s.size(); ++k) {
        grid.energies.row(static_cast<Eigen::Index>(k)) = node_energies[k].transpose();
    }
    grid.vectors = std::move(node_vectors);
    grid.band_map = std::move(maps);
    grid.min_adjacent_overlap = worst_overlap;
    return grid;
}

BandEvaluator::BandEvaluator(const SpectrumGrid& grid)
    : grid_(grid), basis_(grid.params.n), ham_(basis_, grid.params) {}

Eigen::Index BandEvaluator::match(int band, double time, const Eigen::MatrixXd& vecs) const {
    const Eigen::VectorXd& ref = grid_.vectors[grid_.nearest_node(time)].col(band);
    Eigen::Index best = 0;
    (vecs.transpose() * ref).cwiseAbs().maxCoeff(&best);
    return best;
}

double BandEvaluator::energy(int band, double time) const {
    check_band(grid_, band, "BandEvaluator::energy");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham_.at(time));
    return solver.eigenvalues()(match(band, time, solver.eigenvectors()));
}

double BandEvaluator::gap(int band_lo, int band_hi, double time) const {
    check_band(grid_, band_lo, "BandEvaluator::gap");
    check_band(grid_, band_hi, "BandEvaluator::gap");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham_.at(time));
    const auto lo = match(band_lo, time, solver.eigenvectors());
    const auto hi = match(band_hi, time, solver.eigenvectors());
    return solver.eigenvalues()(hi) - solver.eigenvalues()(lo);
}

std::vector<int> central_manifold(const SpectrumGrid& grid, const SpectrumGrid& control,
                                  double shift_fraction) {
    if (grid.params.n != control.params.n || grid.band_count() != control.band_count()) {
        throw DomainError("central_manifold: grid and control describe different systems");
    }
    if (std::abs(control.params.g - 2.0 * grid.params.g) > 1e-12 * std::max(1.0, grid.params.g) ||
        control.params.u != grid.params.u) {
        throw DomainError("central_manifold: control grid must use coupling 2g and the same u");
    }
    const Eigen::Index bands = grid.band_count();
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(bands);
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t common = 0;
    while (i < grid.s.size() && j < control.s.size()) {
        if (grid.s[i] == control.s[j]) {
            const Eigen::VectorXd d = (grid.energies.row(static_cast<Eigen::Index>(i)) -
                                       control.energies.row(static_cast<Eigen::Index>(j)))
                                          .cwiseAbs()
                                          .transpose();
            shift = shift.cwiseMax(d);
            ++i;
            ++j;
            ++common;
        } else if (grid.s[i] < control.s[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    if (common < 2) throw DomainError("central_manifold: grids share fewer than two nodes");

    const double threshold = shift_fraction * grid.params.g;
    std::vector<int> found;
    for (Eigen::Index b = 0; b < bands; ++b) {
        if (shift(b) <= threshold) found.push_back(static_cast<int>(b));
    }
    // outward from the state holding (N,0,0) at s=0: lowest first for u < 0
    const double u = grid.params.u;
    std::stable_sort(found.begin(), found.end(), [&](int a, int b) {
        const double ea = grid.energies(0, a);
        const double eb = grid.energies(0, b);
        return u > 0.0 ? ea > eb : ea < eb;
    });

    const auto expected = static_cast<std::size_t>(grid.params.n / 2 + 1);
    if (found.size() != expected) {
        std::ostringstream msg;
        msg << "central_manifold: found " << found.size() << " bands {";
        for (std::size_t k = 0; k < found.size(); ++k) msg << (k ? "," : "") << found[k];
        msg << "} with shift threshold " << threshold << ", expected " << expected;
        throw AnalysisError(msg.str());
    }
    return found;
}

GapMinimum min_gap(const SpectrumGrid& grid, int band_lo, int band_hi) {
    check_band(grid, band_lo, "min_gap");
    check_band(grid, band_hi, "min_gap");
    Eigen::Index best = 0;
    (grid.energies.col(band_hi) - grid.energies.col(band_lo)).cwiseAbs().minCoeff(&best);
    const auto k = static_cast<std::size_t>(best);
    const BandEvaluator eval(grid);
    auto gap_at = [&](double t) { return std::abs(eval.gap(band_lo, band_hi, t)); };
    const double lo = grid.s[k == 0 ? 0 : k - 1];
    const double hi = grid.s[std::min(k + 1, grid.node_count() - 1)];
    double s = golden_section_min(gap_at, lo, hi, 1e-6);
    double g = gap_at(s);
    if (gap_at(grid.s[k]) < g) {
        s = grid.s[k];
        g = gap_at(s);
    }
    return {s, g};
}

Crossings find_crossings(const SpectrumGrid& grid, int band_lo, int band_hi) {
    check_band(grid, band_lo, "find_crossings");
    check_band(grid, band_hi, "find_crossings");
    const std::size_t n = grid.node_count();
    const Eigen::VectorXd gap =
        (grid.energies.col(band_hi) - grid.energies.col(band_lo)).cwiseAbs();
    const double floor = 1e-10 * std::max(1.0, gap.maxCoeff());

    std::vector<std::size_t> minima;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        if (gap(ki) < gap(ki - 1) - floor && gap(ki) <= gap(ki + 1)) {
            // walk across a flat bottom before deciding
            std::size_t r = k;
            while (r + 1 < n && std::abs(gap(static_cast<Eigen::Index>(r + 1)) - gap(ki)) <= floor) ++r;
            if (r + 1 < n && gap(static_cast<Eigen::Index>(r + 1)) > gap(ki) + floor) {
                minima.push_back(k);
            }
            k = r;
        }
    }
    if (minima.size() != 2) {
        std::ostringstream msg;
        msg << "find_crossings: found " << minima.size()
            << " interior gap minima between bands " << band_lo << " and " << band_hi
            << "; the two-crossing model is inapplicable";
        throw AnalysisError(msg.str());
    }

    const BandEvaluator eval(grid);
    auto gap_at = [&](double t) { return std::abs(eval.gap(band_lo, band_hi, t)); };
    Crossings out{};
    for (int c = 0; c < 2; ++c) {
        const std::size_t k = minima[static_cast<std::size_t>(c)];
        const double s_min =
            golden_section_min(gap_at, grid.s[k - 1], grid.s[k + 1], 1e-6);
        (c == 0 ? out.s0 : out.s1) = s_min;
    }
    return out;
}

double LZFit::branch(double time, bool upper) const {
    const double t = time - s_star;
    const double root = std::sqrt(4.0 * a * a + alpha * alpha * t * t);
    return e0 + 0.5 * ((k1 + k2) * t + (upper ? root : -root));
}

namespace {

// Residuals of both hyperbola branches for x = (a, k1, k2, e0).
struct HyperbolaResidual {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    std::span<const double> t;
    std::span<const double> lower;
    std::span<const double> upper;

    int inputs() const { return 4; }
    int values() const { return static_cast<int>(2 * t.size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
        const double a = x(0), k1 = x(1), k2 = x(2), e0 = x(3);
        const auto n = static_cast<Eigen::Index>(t.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ti = t[static_cast<std::size_t>(i)];
            const double root = std::sqrt(4.0 * a * a + (k1 - k2) * (k1 - k2) * ti * ti);
            const double mid = e0 + 0.5 * (k1 + k2) * ti;
            f(i) = mid - 0.5 * root - lower[static_cast<std::size_t>(i)];
            f(n + i) = mid + 0.5 * root - upper[static_cast<std::size_t>(i)];
        }
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
        const double a = x(0), k1 = x(1), k2 = x(2);
        const double d = k1 - k2;
        const auto n = static_cast<Eigen::Index>(t.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ti = t[static_cast<std::size_t>(i)];
            const double root = std::max(std::sqrt(4.0 * a * a + d * d * ti * ti), 1e-300);
            const double dr_da = 4.0 * a / root;
            const double dr_dd = d * ti * ti / root;
            for (int sign : {-1, 1}) {
                const Eigen::Index row = sign < 0 ? i : n + i;
                jac(row, 0) = 0.5 * sign * dr_da;
                jac(row, 1) = 0.5 * ti + 0.5 * sign * dr_dd;
                jac(row, 2) = 0.5 * ti - 0.5 * sign * dr_dd;
                jac(row, 3) = 1.0;
            }
        }
        return 0;
    }
};

} // namespace

LZFit fit_lz_branches(std::span<const double> t, std::span<const double> lower,
                      std::span<const double> upper, double max_relative_rms) {
    const std::size_t n = t.size();
    if (n < 4 || lower.size() != n || upper.size() != n) {
        throw DomainError("fit_lz_branches: need at least 4 samples per branch of equal length");
    }
    std::size_t centre = 0;
    double min_gap = upper[0] - lower[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (upper[i] - lower[i] < min_gap) {
            min_gap = upper[i] - lower[i];
            centre = i;
        }
    }
    if (!(min_gap > 0.0)) throw DomainError("fit_lz_branches: branches touch or cross");

    // start from the asymptotic slopes of the lower branch on either side
    auto slope = [&](std::size_t i0, std::size_t i1) {
        return (lower[i1] - lower[i0]) / (t[i1] - t[i0]);
    };
    const double left = slope(0, 1);
    const double right = slope(n - 2, n - 1);
    Eigen::VectorXd x(4);
    x << 0.5 * min_gap, left, right, 0.5 * (lower[centre] + upper[centre]);
    if (left == right) x(1) += 1.0;

    HyperbolaResidual residual{t, lower, upper};
    Eigen::LevenbergMarquardt<HyperbolaResidual> lm(residual);
    lm.parameters.ftol = 1e-15;
    lm.parameters.xtol = 1e-15;
    lm.parameters.maxfev = 2000;
    lm.minimize(x);

    Eigen::VectorXd f(2 * static_cast<Eigen::Index>(n));
    residual(x, f);

    LZFit fit;
    fit.a = std::abs(x(0));
    fit.k1 = x(1);
    fit.k2 = x(2);
    fit.alpha = x(1) - x(2);
    fit.e0 = x(3);
    fit.rms = std::sqrt(f.squaredNorm() / static_cast<double>(f.size()));
    fit.min_gap = min_gap;
    fit.points = static_cast<int>(n);
    if (fit.rms > max_relative_rms * min_gap) {
        std::ostringstream msg;
        msg << "lz_fit: residual rms " << fit.rms << " exceeds " << max_relative_rms
            << " of the minimal gap " << min_gap;
        throw FitError(msg.str(), fit.rms);
    }
    return fit;
}

LZFit lz_fit(const SpectrumGrid& grid, int band_lo, int band_hi, double s_star,
             const LZFitOptions& options) {
    check_band(grid, band_lo, "lz_fit");
    check_band(grid, band_hi, "lz_fit");
    double window = options.window;
    std::optional<FitError> last_error;
    while (true) {
        std::vector<double> t, lower, upper;
        for (std::size_t k = 0; k < grid.node_count(); ++k) {
            const double dt = grid.s[k] - s_star;
            if (std::abs(dt) > window) continue;
            const double e_lo = grid.energies(static_cast<Eigen::Index>(k), band_lo);
            const double e_hi = grid.energies(static_cast<Eigen::Index>(k), band_hi);
            t.push_back(dt);
            lower.push_back(std::min(e_lo, e_hi));
            upper.push_back(std::max(e_lo, e_hi));
        }
        if (static_cast<int>(t.size()) < options.min_points) {
            if (last_error) throw *last_error;
            std::ostringstream msg;
            msg << "lz_fit: only " << t.size() << " grid points within " << window << " of s="
                << s_star;
            throw FitError(msg.str(), std::numeric_limits<double>::quiet_NaN());
        }
        try {
            LZFit fit = fit_lz_branches(t, lower, upper, options.max_relative_rms);
            fit.s_star = s_star;
            fit.window = window;
            return fit;
        } catch (const FitError& e) {
            last_error = e;
        }
        window *= 0.5;
    }
}

double lz_probability(double a, double alpha) {
    if (alpha == 0.0) throw DomainError("lz_probability: alpha must be non-zero");
    return std::exp(-2.0 * std::numbers::pi * a * a / std::abs(alpha));
}

double lz_probability(const LZFit& fit) { return lz_probability(fit.a, fit.alpha); }

double adaptive_trapezoid(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_doublings) {
    if (!(a < b)) throw DomainError("adaptive_trapezoid: need a < b");
    long intervals = 64;
    double h = (b - a) / static_cast<double>(intervals);
    double sum = 0.5 * (f(a) + f(b));
    for (long k = 1; k < intervals; ++k) sum += f(a + static_cast<double>(k) * h);
    double estimate = sum * h;
    double older = estimate;
    for (int d = 0; d < max_doublings; ++d) {
        // add midpoints of the current subdivision
        for (long k = 0; k < intervals; ++k) sum += f(a + (static_cast<double>(k) + 0.5) * h);
        intervals *= 2;
        h *= 0.5;
        const double next = sum * h;
        const double change = std::abs(next - estimate);
        if (change <= rel_tol * std::abs(next) || change == 0.0) return next;
        older = estimate;
        estimate = next;
    }
    throw ConvergenceError("adaptive_trapezoid: no convergence after " +
                               std::to_string(max_doublings) + " doublings",
                           older, estimate);
}

double phase_integral(const SpectrumGrid& grid, int band_lo, int band_hi, double s0, double s1,
                      double rel_tol) {
    check_band(grid, band_lo, "phase_integral");
    check_band(grid, band_hi, "phase_integral");
    if (!(s0 < s1) || s0 < grid.s.front() || s1 > grid.s.back()) {
        throw DomainError("phase_integral: need s0 < s1 inside the grid range");
    }
    const BandEvaluator eval(grid);
    return adaptive_trapezoid([&](double s) { return -0.5 * eval.gap(band_lo, band_hi, s); }, s0,
                              s1, rel_tol);
}

} // namespace triwell
