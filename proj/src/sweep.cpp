#include "triwell/sweep.hpp"

#include "triwell/errors.hpp"
#include "triwell/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace triwell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest representation that parses back to the same double.
std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& text) {
    if (text == "nan" || text == "-nan") return kNaN;
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw DomainError("malformed number '" + text + "'");
    return v;
}

std::string sanitize(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

std::optional<double> evolve_cell(int n, double g, double u, const SweepSettings& settings,
                                  std::string& diagnostic, long* steps, double* drift) {
    try {
        ModelParams params;
        params.n = n;
        params.g = g;
        params.u = u;
        params.eps = settings.eps;
        const FockBasis basis(n);
        const EvolutionResult r = evolve(basis, params, settings.evolve);
        if (steps) *steps = r.steps_used;
        if (drift) *drift = r.max_norm_drift;
        return r.normalized_charge;
    } catch (const std::exception& e) {
        diagnostic = std::string("propagator.evolve: ") + e.what();
        return std::nullopt;
    }
}

} // namespace

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) throw DomainError("linspace: need at least one point");
    if (points == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
    }
    out.back() = hi;
    return out;
}

std::vector<double> logspace(double lo, double hi, int points) {
    if (!(lo * hi > 0.0)) throw DomainError("logspace: bounds must be non-zero with equal sign");
    const double sign = lo < 0.0 ? -1.0 : 1.0;
    auto exps = linspace(std::log10(std::abs(lo)), std::log10(std::abs(hi)), points);
    for (auto& e : exps) e = sign * std::pow(10.0, e);
    exps.front() = lo;
    if (points > 1) exps.back() = hi;
    return exps;
}

bool ChargeMap::complete(std::size_t gi, std::size_t ui) const {
    return std::isfinite(charge(static_cast<Eigen::Index>(gi), static_cast<Eigen::Index>(ui)));
}

std::size_t ChargeMap::missing_count() const {
    std::size_t missing = 0;
    for (Eigen::Index i = 0; i < charge.size(); ++i) {
        if (!std::isfinite(charge.data()[i])) ++missing;
    }
    return missing;
}

ChargeMap charge_map(int n, const std::vector<double>& g_values,
                     const std::vector<double>& u_values, const SweepSettings& settings,
                     const ChargeMap* resume, const RowCallback& on_row) {
    if (g_values.empty() || u_values.empty()) throw DomainError("charge_map: empty grid");
    for (double g : g_values) {
        if (!(g > 0.0)) throw DomainError("charge_map: g values must be positive");
    }
    ChargeMap map;
    map.n = n;
    map.g_values = g_values;
    map.u_values = u_values;
    map.eps = settings.eps;
    map.charge = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(g_values.size()),
                                           static_cast<Eigen::Index>(u_values.size()), kNaN);
    map.diagnostics.assign(g_values.size() * u_values.size(), {});

    std::map<std::pair<double, double>, double> done;
    if (resume && resume->n == n && resume->eps == settings.eps) {
        for (std::size_t i = 0; i < resume->g_values.size(); ++i) {
            for (std::size_t j = 0; j < resume->u_values.size(); ++j) {
                if (resume->complete(i, j)) {
                    done[{resume->g_values[i], resume->u_values[j]}] = resume->charge(
                        static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
            }
        }
    }

    const std::size_t cols = u_values.size();
    for (std::size_t i = 0; i < g_values.size(); ++i) {
        std::vector<std::size_t> todo;
        for (std::size_t j = 0; j < cols; ++j) {
            auto it = done.find({g_values[i], u_values[j]});
            if (it != done.end()) {
                map.charge(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second;
            } else {
                todo.push_back(j);
            }
        }
        parallel_for(todo.size(), [&](std::size_t k) {
            const std::size_t j = todo[k];
            std::string diag;
            const auto c = evolve_cell(n, g_values[i], u_values[j], settings, diag, nullptr, nullptr);
            map.charge(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c ? *c : kNaN;
            map.diagnostics[i * cols + j] = std::move(diag);
        });
        if (on_row) on_row(map, i);
    }
    return map;
}

std::vector<CurvePoint> charge_curve(int n, double g, const std::vector<double>& u_values,
                                     const SweepSettings& settings) {
    if (u_values.empty()) throw DomainError("charge_curve: empty u grid");
    std::vector<CurvePoint> out(u_values.size());
    parallel_for(u_values.size(), [&](std::size_t k) {
        CurvePoint& p = out[k];
        p.u = u_values[k];
        p.charge = evolve_cell(n, g, p.u, settings, p.diagnostic, &p.steps_used, &p.max_norm_drift);
    });
    return out;
}

void write_charge_map_csv(std::ostream& os, const ChargeMap& map, const RunConfig& config) {
    write_csv_preamble(os, config);
    os << "# reference_line: |u| = " << format_double(map.reference_ratio) << " * g\n";
    os << "g_index,u_index,g,u,charge_norm,status\n";
    const std::size_t cols = map.u_values.size();
    for (std::size_t i = 0; i < map.g_values.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double c = map.charge(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            os << i << ',' << j << ',' << format_double(map.g_values[i]) << ','
               << format_double(map.u_values[j]) << ',';
            if (std::isfinite(c)) {
                os << format_double(c) << ",ok\n";
            } else {
                const std::string& d = map.diagnostics[i * cols + j];
                os << "nan," << (d.empty() ? "pending" : "failed: " + sanitize(d)) << "\n";
            }
        }
    }
}

ChargeMap read_charge_map_csv(std::istream& is) {
    ChargeMap map;
    std::string line;
    std::vector<std::tuple<std::size_t, std::size_t, double, double, double>> rows;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            constexpr std::string_view tag = "# config: ";
            if (line.rfind(tag, 0) == 0) {
                const auto cfg = nlohmann::json::parse(line.substr(tag.size())).get<RunConfig>();
                map.n = cfg.n;
                map.eps = cfg.eps;
            }
            continue;
        }
        if (!header_seen) {
            if (line != "g_index,u_index,g,u,charge_norm,status") {
                throw DomainError("chargemap CSV: unexpected column header '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() < 6) throw DomainError("chargemap CSV: short row '" + line + "'");
        rows.emplace_back(std::stoul(f[0]), std::stoul(f[1]), parse_double(f[2]),
                          parse_double(f[3]), parse_double(f[4]));
    }
    std::size_t ng = 0, nu = 0;
    for (const auto& [i, j, g, u, c] : rows) {
        ng = std::max(ng, i + 1);
        nu = std::max(nu, j + 1);
    }
    map.g_values.assign(ng, kNaN);
    map.u_values.assign(nu, kNaN);
    map.charge = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(ng),
                                           static_cast<Eigen::Index>(nu), kNaN);
    map.diagnostics.assign(ng * nu, {});
    for (const auto& [i, j, g, u, c] : rows) {
        map.g_values[i] = g;
        map.u_values[j] = u;
        map.charge(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
    }
    return map;
}

} // namespace triwell
