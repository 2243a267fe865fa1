#include <doctest.h>

#include "triwell/errors.hpp"
#include "triwell/sweep.hpp"

#include <cmath>
#include <sstream>

using namespace triwell;

namespace {

RunConfig map_config() {
    RunConfig cfg;
    cfg.command = "chargemap";
    cfg.g_min = 10.0;
    cfg.g_max = 200.0;
    cfg.g_points = 3;
    cfg.u_min = 1.0;
    cfg.u_max = 300.0;
    cfg.u_points = 3;
    return cfg;
}

std::string csv_of(const ChargeMap& map, const RunConfig& cfg) {
    std::ostringstream os;
    write_charge_map_csv(os, map, cfg);
    return os.str();
}

} // namespace

TEST_CASE("grids") {
    const auto lin = linspace(0.0, 100.0, 201);
    CHECK(lin.size() == 201);
    CHECK(lin.front() == 0.0);
    CHECK(lin.back() == 100.0);
    CHECK(lin[100] == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(linspace(3.0, 7.0, 1) == std::vector<double>{3.0});

    const auto lg = logspace(1.0, 1e4, 5);
    CHECK(lg.front() == 1.0);
    CHECK(lg.back() == 1e4);
    CHECK(lg[2] == doctest::Approx(100.0).epsilon(1e-13));
    const auto neg = logspace(-0.1, -1000.0, 5);
    CHECK(neg[2] == doctest::Approx(-10.0).epsilon(1e-13));
    CHECK_THROWS_AS(logspace(0.0, 10.0, 4), DomainError);
    CHECK_THROWS_AS(logspace(-1.0, 10.0, 4), DomainError);
    CHECK_THROWS_AS(linspace(0.0, 1.0, 0), DomainError);
}

TEST_CASE("charge map: range, determinism, csv round trip") {
    const RunConfig cfg = map_config();
    const auto g = logspace(cfg.g_min, cfg.g_max, cfg.g_points);
    const auto u = logspace(-cfg.u_min, -cfg.u_max, cfg.u_points);
    const SweepSettings settings;
    const ChargeMap a = charge_map(2, g, u, settings);
    const ChargeMap b = charge_map(2, g, u, settings);
    REQUIRE(a.missing_count() == 0);
    for (Eigen::Index i = 0; i < a.charge.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.charge.cols(); ++j) {
            CHECK(a.charge(i, j) >= -1e-9);
            CHECK(a.charge(i, j) <= 1.0 + 1e-9);
        }
    }
    CHECK(a.reference_ratio == 0.1);
    const std::string text = csv_of(a, cfg);
    CHECK(text == csv_of(b, cfg));
    CHECK(text.find("# reference_line: |u| = 0.1 * g") != std::string::npos);
    CHECK(text.find("g_index,u_index,g,u,charge_norm,status") != std::string::npos);

    std::istringstream in(text);
    const ChargeMap back = read_charge_map_csv(in);
    CHECK(back.n == 2);
    CHECK(back.g_values == a.g_values);
    CHECK(back.u_values == a.u_values);
    CHECK(back.charge == a.charge);  // shortest round-trip formatting is exact

    std::istringstream again(text);
    CHECK(read_config_header(again) == cfg);
}

TEST_CASE("charge map: resume fills only missing cells") {
    const RunConfig cfg = map_config();
    const auto g = logspace(cfg.g_min, cfg.g_max, cfg.g_points);
    const auto u = logspace(-cfg.u_min, -cfg.u_max, cfg.u_points);
    const SweepSettings settings;
    const ChargeMap full = charge_map(2, g, u, settings);

    // A partial checkpoint whose finished cells hold marker values: a recomputed cell
    // would lose its marker.
    ChargeMap partial = full;
    partial.charge.setConstant(std::nan(""));
    partial.charge(0, 0) = 0.125;
    partial.charge(1, 2) = 0.25;
    partial.charge(2, 1) = 0.5;
    std::istringstream in(csv_of(partial, cfg));
    const ChargeMap checkpoint = read_charge_map_csv(in);
    CHECK(checkpoint.missing_count() == 6);

    int rows_seen = 0;
    const ChargeMap resumed = charge_map(2, g, u, settings, &checkpoint,
                                         [&](const ChargeMap&, std::size_t) { ++rows_seen; });
    CHECK(rows_seen == 3);
    CHECK(resumed.missing_count() == 0);
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            if (std::isnan(partial.charge(i, j))) {
                CHECK(resumed.charge(i, j) == full.charge(i, j));
            } else {
                CHECK(resumed.charge(i, j) == partial.charge(i, j));
            }
        }
    }

    // A checkpoint for another system is ignored entirely.
    ChargeMap other = checkpoint;
    other.n = 3;
    const ChargeMap fresh = charge_map(2, g, u, settings, &other);
    CHECK(fresh.charge == full.charge);
}

TEST_CASE("charge map: u parity") {
    const auto g = logspace(5.0, 500.0, 3);
    const auto u_pos = logspace(0.5, 200.0, 4);
    std::vector<double> u_neg;
    for (double x : u_pos) u_neg.push_back(-x);
    for (int n : {2, 3}) {
        const ChargeMap p = charge_map(n, g, u_pos, {});
        const ChargeMap m = charge_map(n, g, u_neg, {});
        CHECK((p.charge - m.charge).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("charge map: failures become missing cells") {
    SweepSettings bad;
    bad.evolve.steps = 4;  // below the propagator minimum
    const ChargeMap map = charge_map(2, {10.0, 20.0}, {-1.0}, bad);
    CHECK(map.missing_count() == 2);
    CHECK(map.diagnostics[0].find("propagator.evolve") != std::string::npos);
    RunConfig cfg = map_config();
    const std::string text = csv_of(map, cfg);
    CHECK(text.find(",nan,failed: propagator.evolve") != std::string::npos);
    CHECK_THROWS_AS(charge_map(2, {}, {1.0}, {}), DomainError);
    CHECK_THROWS_AS(charge_map(2, {-1.0}, {1.0}, {}), DomainError);
}

TEST_CASE("charge curve") {
    const std::vector<double> u{1000.0, 0.0, 50.0};
    const auto pts = charge_curve(2, 10.0, u, {});
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].u == 1000.0);
    REQUIRE(pts[0].charge);
    CHECK(*pts[0].charge <= 0.05);
    CHECK(pts[0].max_norm_drift <= 1e-9);
    CHECK(pts[0].steps_used >= 256);
    for (const auto& p : pts) {
        REQUIRE(p.charge);
        CHECK(*p.charge >= -1e-9);
        CHECK(*p.charge <= 1.0 + 1e-9);
    }
    CHECK_THROWS_AS(charge_curve(2, 10.0, {}, {}), DomainError);
}
