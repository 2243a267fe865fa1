#include "triwell/run_config.hpp"

#include "triwell/errors.hpp"

#include <istream>
#include <ostream>
#include <string_view>

namespace triwell {

void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"command", c.command},   {"n", c.n},
                       {"g", c.g},               {"u", c.u},
                       {"eps", c.eps},           {"u_min", c.u_min},
                       {"u_max", c.u_max},       {"u_points", c.u_points},
                       {"g_min", c.g_min},       {"g_max", c.g_max},
                       {"g_points", c.g_points}, {"u_sign", c.u_sign},
                       {"steps", c.steps},       {"tol", c.tol},
                       {"samples", c.samples},   {"window", c.window},
                       {"grid_points", c.grid_points},
                       {"out", c.out},           {"format", c.format}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
    j.at("command").get_to(c.command);
    j.at("n").get_to(c.n);
    j.at("g").get_to(c.g);
    j.at("u").get_to(c.u);
    j.at("eps").get_to(c.eps);
    j.at("u_min").get_to(c.u_min);
    j.at("u_max").get_to(c.u_max);
    j.at("u_points").get_to(c.u_points);
    j.at("g_min").get_to(c.g_min);
    j.at("g_max").get_to(c.g_max);
    j.at("g_points").get_to(c.g_points);
    j.at("u_sign").get_to(c.u_sign);
    j.at("steps").get_to(c.steps);
    j.at("tol").get_to(c.tol);
    j.at("samples").get_to(c.samples);
    j.at("window").get_to(c.window);
    j.at("grid_points").get_to(c.grid_points);
    j.at("out").get_to(c.out);
    j.at("format").get_to(c.format);
}

void write_csv_preamble(std::ostream& os, const RunConfig& config) {
    os << "# triwell " << config.command << "\n";
    os << "# version: " << kVersion << "\n";
    os << "# config: " << nlohmann::json(config).dump() << "\n";
    os << "# units: " << kUnitsNote << "\n";
}

RunConfig read_config_header(std::istream& is) {
    constexpr std::string_view tag = "# config: ";
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] != '#') break;
        if (line.rfind(tag, 0) == 0) {
            return nlohmann::json::parse(line.substr(tag.size())).get<RunConfig>();
        }
    }
    throw DomainError("no '# config:' header line found");
}

} // namespace triwell
