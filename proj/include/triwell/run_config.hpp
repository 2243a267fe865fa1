// run_config.hpp: the serializable description of one CLI run
//
// Every output file embeds its RunConfig: CSV files as a "# config: {...}" header
// line, JSON files as a top-level "config" object.

#pragma once

#include <json.hpp>

#include <array>
#include <iosfwd>
#include <string>

namespace triwell {

inline constexpr const char* kVersion = "triwell 1.0.0";
inline constexpr const char* kUnitsNote =
    "energies in hbar/tau; g = tau*Omega/hbar; u = tau*U/hbar; charge_norm = C/C_max";

struct RunConfig {
    std::string command;
    int n{2};
    double g{1000.0};
    double u{-20.0};
    std::array<double, 3> eps{0.0, 1.0, 2.0};
    double u_min{0.0};
    double u_max{100.0};
    int u_points{201};
    double g_min{1.0};
    double g_max{3e4};
    int g_points{25};
    double u_sign{-1.0};   // sign applied to the |u| axis of charge maps
    int steps{256};
    double tol{1e-8};
    int samples{0};
    double window{0.05};
    int grid_points{2001};
    std::string out{"-"};
    std::string format{"csv"};

    bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

// "# triwell <command>", "# version: ...", "# config: {...}", "# units: ..."
void write_csv_preamble(std::ostream& os, const RunConfig& config);

// Reads the "# config:" line from a CSV preamble. Throws DomainError if absent.
RunConfig read_config_header(std::istream& is);

} // namespace triwell
