#include "triwell/cli.hpp"

#include "triwell/errors.hpp"
#include "triwell/fock.hpp"
#include "triwell/hamiltonian.hpp"
#include "triwell/models.hpp"
#include "triwell/propagator.hpp"
#include "triwell/run_config.hpp"
#include "triwell/spectrum.hpp"
#include "triwell/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace triwell::cli {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest representation that parses back to the same double.
std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

// JSON has no NaN; missing values become null.
json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string field(std::string text) {
    for (char& c : text) {
        if (c == ',') c = ';';
        if (c == '\n') c = ' ';
    }
    return text;
}

// Module operation currently running; named in error messages.
struct Stage {
    std::string name{"cli.run"};
};

json config_json(const RunConfig& cfg) { return json(cfg); }

json json_document(const RunConfig& cfg) {
    return json{{"config", config_json(cfg)}, {"version", kVersion}, {"units", kUnitsNote}};
}

ModelParams params_of(const RunConfig& cfg) {
    ModelParams p;
    p.n = cfg.n;
    p.g = cfg.g;
    p.u = cfg.u;
    p.eps = cfg.eps;
    p.validate();
    return p;
}

SweepSettings sweep_settings(const RunConfig& cfg) {
    SweepSettings s;
    s.eps = cfg.eps;
    s.evolve.steps = cfg.steps;
    s.evolve.rel_tol = cfg.tol;
    return s;
}

// Resolves --out: "-" means the caller's stream, otherwise a file opened up front so
// an unwritable path fails before any computation.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path == "-") return;
        file_.open(path, std::ios::out | std::ios::trunc);
        if (!file_) throw DomainError("cli.open_output: cannot write '" + path + "'");
        stream_ = &file_;
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void check_writable(const std::string& path) {
    const std::string probe = path + ".tmp";
    std::ofstream f(probe, std::ios::out | std::ios::trunc);
    if (!f) throw DomainError("cli.open_output: cannot write '" + path + "'");
    f.close();
    std::filesystem::remove(probe);
}

// evolve ---------------------------------------------------------------------

int cmd_evolve(const RunConfig& cfg, std::ostream& fallback, Stage& stage) {
    const ModelParams params = params_of(cfg);
    const FockBasis basis(cfg.n);
    EvolveSettings settings;
    settings.steps = cfg.steps;
    settings.rel_tol = cfg.tol;
    settings.sample_count = cfg.samples;
    if (cfg.samples == 1) throw DomainError("cli.evolve: --samples must be 0 or at least 2");
    Output out(cfg.out, fallback);

    stage.name = "propagator.evolve";
    const EvolutionResult r = evolve(basis, params, settings);
    const json result{{"charge", r.charge},
                      {"charge_norm", r.normalized_charge},
                      {"steps_used", r.steps_used},
                      {"doublings", r.doublings},
                      {"max_norm_drift", r.max_norm_drift}};

    Eigen::MatrixXd pops;
    std::optional<SpectrumGrid> grid;
    if (cfg.samples >= 2) {
        std::vector<double> times;
        for (const auto& t : r.trajectory) times.push_back(t.s);
        stage.name = "spectrum.instantaneous_spectrum";
        grid = instantaneous_spectrum(basis, params, times);
        stage.name = "propagator.populations_on_eigenbasis";
        pops = populations_on_eigenbasis(r, *grid);
    }

    std::ostream& os = out.stream();
    if (cfg.format == "json") {
        json doc = json_document(cfg);
        doc["result"] = result;
        if (grid) {
            json rows = json::array();
            for (Eigen::Index i = 0; i < pops.rows(); ++i) {
                for (Eigen::Index b = 0; b < pops.cols(); ++b) {
                    rows.push_back({{"s", grid->s[i]},
                                    {"band", b},
                                    {"energy", grid->energies(i, b)},
                                    {"population", pops(i, b)}});
                }
            }
            doc["populations"] = rows;
        }
        os << doc.dump(2) << "\n";
        return kExitOk;
    }
    write_csv_preamble(os, cfg);
    os << "# result: " << result.dump() << "\n";
    if (grid) {
        os << "s,band,energy,population\n";
        for (Eigen::Index i = 0; i < pops.rows(); ++i) {
            for (Eigen::Index b = 0; b < pops.cols(); ++b) {
                os << num(grid->s[i]) << ',' << b << ',' << num(grid->energies(i, b)) << ','
                   << num(pops(i, b)) << '\n';
            }
        }
    } else {
        os << "charge,charge_norm,steps_used,doublings,max_norm_drift\n";
        os << num(r.charge) << ',' << num(r.normalized_charge) << ',' << r.steps_used << ','
           << r.doublings << ',' << num(r.max_norm_drift) << '\n';
    }
    return kExitOk;
}

// spectrum -------------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg, std::ostream& fallback, Stage& stage) {
    const ModelParams params = params_of(cfg);
    const FockBasis basis(cfg.n);
    Output out(cfg.out, fallback);
    stage.name = "spectrum.instantaneous_spectrum";
    const SpectrumGrid grid =
        instantaneous_spectrum(basis, params, uniform_grid(cfg.grid_points));

    std::ostream& os = out.stream();
    if (cfg.format == "json") {
        json doc = json_document(cfg);
        doc["s"] = grid.s;
        json energies = json::array();
        for (int b = 0; b < grid.band_count(); ++b) {
            std::vector<double> col(grid.energies.col(b).data(),
                                    grid.energies.col(b).data() + grid.energies.rows());
            energies.push_back(col);
        }
        doc["energies"] = energies;  // energies[band][node]
        doc["min_adjacent_overlap"] = grid.min_adjacent_overlap;
        os << doc.dump(2) << "\n";
        return kExitOk;
    }
    write_csv_preamble(os, cfg);
    os << "s,band,energy\n";
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        for (int b = 0; b < grid.band_count(); ++b) {
            os << num(grid.s[i]) << ',' << b << ','
               << num(grid.energies(static_cast<Eigen::Index>(i), b)) << '\n';
        }
    }
    return kExitOk;
}

// manifold -------------------------------------------------------------------

int cmd_manifold(const RunConfig& cfg, std::ostream& fallback, Stage& stage) {
    const ModelParams params = params_of(cfg);
    const FockBasis basis(cfg.n);
    Output out(cfg.out, fallback);
    const auto s_grid = uniform_grid(cfg.grid_points);
    stage.name = "spectrum.instantaneous_spectrum";
    const SpectrumGrid grid = instantaneous_spectrum(basis, params, s_grid);
    ModelParams control_params = params;
    control_params.g = 2.0 * params.g;
    const SpectrumGrid control = instantaneous_spectrum(basis, control_params, s_grid);
    stage.name = "spectrum.central_manifold";
    const auto bands = central_manifold(grid, control);

    struct Row {
        int rank;
        int band;
        double e_start;
        double e_end;
        double gap{kNaN};
        double s_gap{kNaN};
    };
    std::vector<Row> rows;
    const auto last = static_cast<Eigen::Index>(grid.node_count() - 1);
    stage.name = "spectrum.min_gap";
    for (std::size_t k = 0; k < bands.size(); ++k) {
        Row row{static_cast<int>(k), bands[k], grid.energies(0, bands[k]),
                grid.energies(last, bands[k])};
        if (k > 0) {
            const GapMinimum m = min_gap(grid, bands[0], bands[k]);
            row.gap = m.gap;
            row.s_gap = m.s;
        }
        rows.push_back(row);
    }
    std::optional<Crossings> crossings;
    std::string crossing_note;
    if (bands.size() >= 2) {
        try {
            crossings = find_crossings(grid, bands[0], bands[1]);
        } catch (const AnalysisError& e) {
            crossing_note = std::string("spectrum.") + e.what();
        }
    }
    const double abs_u = std::abs(cfg.u);
    auto ratio = [&](double gap) { return abs_u > 0.0 ? gap / abs_u : kNaN; };

    std::ostream& os = out.stream();
    if (cfg.format == "json") {
        json doc = json_document(cfg);
        json list = json::array();
        for (const Row& r : rows) {
            list.push_back({{"rank", r.rank},
                            {"band", r.band},
                            {"energy_s0", r.e_start},
                            {"energy_s1", r.e_end},
                            {"min_gap", jnum(r.gap)},
                            {"s_min_gap", jnum(r.s_gap)},
                            {"min_gap_over_abs_u", jnum(ratio(r.gap))}});
        }
        doc["manifold"] = list;
        doc["expected_size"] = cfg.n / 2 + 1;
        if (crossings) {
            doc["crossings"] = {{"s0", crossings->s0}, {"s1", crossings->s1}};
        } else {
            doc["crossings"] = nullptr;
            doc["crossings_diagnostic"] = crossing_note;
        }
        os << doc.dump(2) << "\n";
        return kExitOk;
    }
    write_csv_preamble(os, cfg);
    if (crossings) {
        os << "# crossings: s0=" << num(crossings->s0) << " s1=" << num(crossings->s1) << "\n";
    } else {
        os << "# crossings: none (" << field(crossing_note) << ")\n";
    }
    os << "rank,band,energy_s0,energy_s1,min_gap,s_min_gap,min_gap_over_abs_u\n";
    for (const Row& r : rows) {
        os << r.rank << ',' << r.band << ',' << num(r.e_start) << ',' << num(r.e_end) << ','
           << num(r.gap) << ',' << num(r.s_gap) << ',' << num(ratio(r.gap)) << '\n';
    }
    return kExitOk;
}

// chargemap ------------------------------------------------------------------

json map_json(const ChargeMap& map, const RunConfig& cfg) {
    json doc = json_document(cfg);
    doc["n"] = map.n;
    doc["eps"] = map.eps;
    doc["g_values"] = map.g_values;
    doc["u_values"] = map.u_values;
    doc["reference_ratio"] = map.reference_ratio;
    doc["code_version"] = map.code_version;
    json rows = json::array();
    json diags = json::array();
    for (Eigen::Index i = 0; i < map.charge.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < map.charge.cols(); ++j) row.push_back(jnum(map.charge(i, j)));
        rows.push_back(row);
    }
    for (const auto& d : map.diagnostics) diags.push_back(d);
    doc["charge_norm"] = rows;  // charge_norm[g_index][u_index], null = missing
    doc["diagnostics"] = diags;
    return doc;
}

ChargeMap map_from_json(const json& doc) {
    ChargeMap map;
    doc.at("n").get_to(map.n);
    doc.at("eps").get_to(map.eps);
    doc.at("g_values").get_to(map.g_values);
    doc.at("u_values").get_to(map.u_values);
    doc.at("reference_ratio").get_to(map.reference_ratio);
    const auto& rows = doc.at("charge_norm");
    map.charge = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(map.g_values.size()),
                                           static_cast<Eigen::Index>(map.u_values.size()), kNaN);
    for (std::size_t i = 0; i < rows.size() && i < map.g_values.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size() && j < map.u_values.size(); ++j) {
            if (!rows[i][j].is_null()) {
                map.charge(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    rows[i][j].get<double>();
            }
        }
    }
    map.diagnostics.assign(map.g_values.size() * map.u_values.size(), "");
    const auto& diags = doc.at("diagnostics");
    for (std::size_t k = 0; k < diags.size() && k < map.diagnostics.size(); ++k) {
        map.diagnostics[k] = diags[k].get<std::string>();
    }
    return map;
}

void write_map(std::ostream& os, const ChargeMap& map, const RunConfig& cfg) {
    if (cfg.format == "json") {
        os << map_json(map, cfg).dump(2) << "\n";
    } else {
        write_charge_map_csv(os, map, cfg);
    }
}

std::optional<ChargeMap> load_checkpoint(const RunConfig& cfg) {
    if (cfg.out == "-" || !std::filesystem::exists(cfg.out)) return std::nullopt;
    std::ifstream in(cfg.out);
    if (!in) throw DomainError("cli.chargemap: cannot read existing '" + cfg.out + "'");
    try {
        if (cfg.format == "json") return map_from_json(json::parse(in));
        return read_charge_map_csv(in);
    } catch (const std::exception& e) {
        throw DomainError("cli.chargemap: existing '" + cfg.out +
                          "' is not a resumable charge map (" + e.what() + ")");
    }
}

// Whole-file rewrite through a temporary so an interrupted run leaves either the
// old or the new checkpoint.
void checkpoint(const ChargeMap& map, const RunConfig& cfg) {
    const std::string tmp = cfg.out + ".tmp";
    {
        std::ofstream f(tmp, std::ios::out | std::ios::trunc);
        if (!f) throw DomainError("cli.open_output: cannot write '" + tmp + "'");
        write_map(f, map, cfg);
        if (!f) throw DomainError("cli.open_output: write to '" + tmp + "' failed");
    }
    std::filesystem::rename(tmp, cfg.out);
}

int cmd_chargemap(const RunConfig& cfg, std::ostream& fallback, Stage& stage) {
    if (cfg.u_sign != 1.0 && cfg.u_sign != -1.0) {
        throw DomainError("cli.chargemap: --u-sign must be 1 or -1");
    }
    params_of(cfg);
    stage.name = "sweep.logspace";
    const auto g_values = logspace(cfg.g_min, cfg.g_max, cfg.g_points);
    auto u_values = logspace(cfg.u_min, cfg.u_max, cfg.u_points);
    for (double& u : u_values) u *= cfg.u_sign;
    const SweepSettings settings = sweep_settings(cfg);

    if (cfg.out != "-") check_writable(cfg.out);
    const auto resume = load_checkpoint(cfg);
    RowCallback on_row;
    if (cfg.out != "-") {
        on_row = [&](const ChargeMap& partial, std::size_t) { checkpoint(partial, cfg); };
    }
    stage.name = "sweep.charge_map";
    const ChargeMap map = charge_map(cfg.n, g_values, u_values, settings,
                                     resume ? &*resume : nullptr, on_row);
    if (cfg.out == "-") {
        write_map(fallback, map, cfg);
    } else {
        checkpoint(map, cfg);
    }
    return kExitOk;
}

// curve ----------------------------------------------------------------------

int cmd_curve(const RunConfig& cfg, std::ostream& fallback, Stage& stage) {
    params_of(cfg);
    const auto u_values = linspace(cfg.u_min, cfg.u_max, cfg.u_points);
    Output out(cfg.out, fallback);
    stage.name = "sweep.charge_curve";
    const auto points = charge_curve(cfg.n, cfg.g, u_values, sweep_settings(cfg));

    std::ostream& os = out.stream();
    if (cfg.format == "json") {
        json doc = json_document(cfg);
        json list = json::array();
        for (const auto& p : points) {
            list.push_back({{"u", p.u},
                            {"charge_norm", p.charge ? json(*p.charge) : json(nullptr)},
                            {"steps_used", p.steps_used},
                            {"max_norm_drift", p.max_norm_drift},
                            {"status", p.charge ? "ok" : "failed: " + p.diagnostic}});
        }
        doc["points"] = list;
        os << doc.dump(2) << "\n";
        return kExitOk;
    }
    write_csv_preamble(os, cfg);
    os << "u,charge_norm,steps_used,max_norm_drift,status\n";
    for (const auto& p : points) {
        os << num(p.u) << ',' << num(p.charge.value_or(kNaN)) << ',' << p.steps_used << ','
           << num(p.max_norm_drift) << ','
           << (p.charge ? std::string("ok") : "failed: " + field(p.diagnostic)) << '\n';
    }
    return kExitOk;
}

// lzmodel --------------------------------------------------------------------

json point_json(const ModelPoint& p) {
    const bool ok = p.charge.has_value();
    return json{{"u", p.u},
                {"s0", ok ? jnum(p.s0) : json(nullptr)},
                {"s1", ok ? jnum(p.s1) : json(nullptr)},
                {"a", ok ? jnum(p.fit.a) : json(nullptr)},
                {"k1", ok ? jnum(p.fit.k1) : json(nullptr)},
                {"k2", ok ? jnum(p.fit.k2) : json(nullptr)},
                {"alpha", ok ? jnum(p.fit.alpha) : json(nullptr)},
                {"e0", ok ? jnum(p.fit.e0) : json(nullptr)},
                {"fit_rms", ok ? jnum(p.fit.rms) : json(nullptr)},
                {"fit_window", ok ? jnum(p.fit.window) : json(nullptr)},
                {"min_gap", ok ? jnum(p.fit.min_gap) : json(nullptr)},
                {"probability", ok ? jnum(p.probability) : json(nullptr)},
                {"phase", ok ? jnum(p.phase) : json(nullptr)},
                {"contrast", ok ? jnum(p.contrast) : json(nullptr)},
                {"charge_norm", ok ? json(*p.charge) : json(nullptr)},
                {"status", ok ? "ok" : "inapplicable: " + p.diagnostic}};
}

int cmd_lzmodel(const RunConfig& cfg, bool curve_mode, std::ostream& fallback, Stage& stage) {
    const ModelParams params = params_of(cfg);
    const FockBasis basis(cfg.n);
    ModelOptions options;
    options.grid_points = cfg.grid_points;
    options.fit.window = cfg.window;
    Output out(cfg.out, fallback);

    std::vector<ModelPoint> points;
    stage.name = "models.predict_charge";
    if (curve_mode) {
        points = predict_charge_curve(basis, params, linspace(cfg.u_min, cfg.u_max, cfg.u_points),
                                      options);
    } else {
        points.push_back(predict_charge(basis, params, options));
    }

    std::ostream& os = out.stream();
    if (cfg.format == "json") {
        json doc = json_document(cfg);
        json list = json::array();
        for (const auto& p : points) list.push_back(point_json(p));
        doc["points"] = list;
        if (!curve_mode) {
            // Fitted hyperbola branches over the fit window, for spectrum overlays.
            const LZFit& fit = points.front().fit;
            json branches = json::array();
            const int samples = 101;
            for (int k = 0; k < samples; ++k) {
                const double s = fit.s_star - fit.window + 2.0 * fit.window * k / (samples - 1);
                branches.push_back({{"s", s},
                                    {"lower", fit.branch(s, false)},
                                    {"upper", fit.branch(s, true)}});
            }
            doc["fit_branches"] = branches;
        }
        os << doc.dump(2) << "\n";
        return kExitOk;
    }
    write_csv_preamble(os, cfg);
    static const char* columns[] = {"u",     "s0",     "s1",         "a",        "k1",
                                    "k2",    "alpha",  "e0",         "fit_rms",  "fit_window",
                                    "min_gap", "probability", "phase", "contrast", "charge_norm",
                                    "status"};
    for (std::size_t k = 0; k < std::size(columns); ++k) os << (k ? "," : "") << columns[k];
    os << '\n';
    for (const auto& p : points) {
        const json row = point_json(p);
        for (std::size_t k = 0; k + 1 < std::size(columns); ++k) {
            const json& v = row.at(columns[k]);
            os << (k ? "," : "") << (v.is_null() ? std::string("nan") : num(v.get<double>()));
        }
        os << ',' << field(row.at("status").get<std::string>()) << '\n';
    }
    return kExitOk;
}

// analytic2 ------------------------------------------------------------------

int cmd_analytic2(const RunConfig& cfg, std::ostream& fallback, Stage& stage) {
    ModelParams check;
    check.eps = cfg.eps;
    check.validate();
    const auto u_values = linspace(cfg.u_min, cfg.u_max, cfg.u_points);
    Output out(cfg.out, fallback);
    stage.name = "models.analytic_charge_n2";
    std::ostream& os = out.stream();
    if (cfg.format == "json") {
        json doc = json_document(cfg);
        doc["beta"] = two_particle_beta(cfg.eps);
        json list = json::array();
        for (double u : u_values) {
            list.push_back({{"u", u}, {"charge_norm", analytic_charge_n2(u, cfg.eps)}});
        }
        doc["points"] = list;
        os << doc.dump(2) << "\n";
        return kExitOk;
    }
    write_csv_preamble(os, cfg);
    os << "# beta: " << num(two_particle_beta(cfg.eps)) << "\n";
    os << "u,charge_norm\n";
    for (double u : u_values) os << num(u) << ',' << num(analytic_charge_n2(u, cfg.eps)) << '\n';
    return kExitOk;
}

std::array<double, 3> parse_eps(const std::string& text) {
    std::array<double, 3> eps{};
    std::stringstream ss(text);
    std::string part;
    int k = 0;
    while (std::getline(ss, part, ',')) {
        if (k >= 3) throw CLI::ValidationError("--eps", "expected three values a,b,c");
        std::size_t used = 0;
        try {
            eps[k] = std::stod(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size()) {
            throw CLI::ValidationError("--eps", "malformed number '" + part + "'");
        }
        ++k;
    }
    if (k != 3) throw CLI::ValidationError("--eps", "expected three values a,b,c");
    return eps;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Three-well bosonic quantum battery: ramp simulations and models", "triwell"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    RunConfig cfg;
    std::string eps_text = "0,1,2";

    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {
        {"evolve", "final charge of one ramp, optional eigenbasis populations"},
        {"spectrum", "instantaneous spectrum as (s, band, energy)"},
        {"manifold", "central manifold bands and their minimal gaps"},
        {"chargemap", "charge over a log grid of g and |u|"},
        {"curve", "numeric charge versus u at fixed g"},
        {"lzmodel", "two-level Landau-Zener model at one u or over a u range"},
        {"analytic2", "closed-form two-particle charge versus u"},
    };
    for (const auto& spec : specs) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->add_option("--n", cfg.n, "particle number")->capture_default_str();
        sub->add_option("--g", cfg.g, "coupling tau*Omega/hbar")->capture_default_str();
        sub->add_option("--u", cfg.u, "interaction tau*U/hbar")->capture_default_str();
        sub->add_option("--eps", eps_text, "on-site energies a,b,c (hbar/tau)")
            ->capture_default_str();
        sub->add_option("--u-min", cfg.u_min, "lower u (|u| for chargemap)");
        sub->add_option("--u-max", cfg.u_max, "upper u (|u| for chargemap)");
        sub->add_option("--u-points", cfg.u_points, "number of u values");
        sub->add_option("--g-min", cfg.g_min, "lower g (chargemap)")->capture_default_str();
        sub->add_option("--g-max", cfg.g_max, "upper g (chargemap)")->capture_default_str();
        sub->add_option("--g-points", cfg.g_points, "number of g values")->capture_default_str();
        sub->add_option("--u-sign", cfg.u_sign, "sign applied to the chargemap |u| axis")
            ->capture_default_str();
        sub->add_option("--steps", cfg.steps, "initial propagator steps")->capture_default_str();
        sub->add_option("--tol", cfg.tol, "relative charge tolerance of step doubling")
            ->capture_default_str();
        sub->add_option("--samples", cfg.samples, "trajectory samples (evolve)")
            ->capture_default_str();
        sub->add_option("--window", cfg.window, "half-width of the LZ fit window")
            ->capture_default_str();
        sub->add_option("--grid-points", cfg.grid_points, "spectrum grid points")
            ->capture_default_str();
        sub->add_option("--out", cfg.out, "output path, - for stdout")->capture_default_str();
        sub->add_option("--format", cfg.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    }

    Stage stage;
    try {
        try {
            std::vector<std::string> args;
            for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
            app.parse(args);
            cfg.eps = parse_eps(eps_text);
        } catch (const CLI::ParseError& e) {
            std::ostringstream o, r;
            const int code = app.exit(e, o, r);
            out << o.str();
            err << r.str();
            return code == 0 ? kExitOk : kExitUsage;
        }

        CLI::App* sub = app.get_subcommands().front();
        cfg.command = sub->get_name();
        const bool u_range = sub->count("--u-min") + sub->count("--u-max") +
                                 sub->count("--u-points") > 0;
        if (cfg.command == "chargemap") {
            if (!sub->count("--u-min")) cfg.u_min = 0.1;
            if (!sub->count("--u-max")) cfg.u_max = 3000.0;
            if (!sub->count("--u-points")) cfg.u_points = 25;
        }

        if (cfg.command == "evolve") return cmd_evolve(cfg, out, stage);
        if (cfg.command == "spectrum") return cmd_spectrum(cfg, out, stage);
        if (cfg.command == "manifold") return cmd_manifold(cfg, out, stage);
        if (cfg.command == "chargemap") return cmd_chargemap(cfg, out, stage);
        if (cfg.command == "curve") return cmd_curve(cfg, out, stage);
        if (cfg.command == "lzmodel") return cmd_lzmodel(cfg, u_range, out, stage);
        return cmd_analytic2(cfg, out, stage);
    } catch (const DomainError& e) {
        err << "triwell " << cfg.command << ": usage error in " << stage.name << ": " << e.what()
            << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "triwell " << cfg.command << ": " << stage.name << " failed: " << e.what() << "\n";
        return kExitSolver;
    }
}

} // namespace triwell::cli
