#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfred/system.hpp"

namespace tfred {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Everything a CLI run depends on. Serialized as key = value lines under
/// [run], [params], [sweep] and [tolerances] headers.
struct RunConfig {
    std::string system;
    ParamMap overrides;
    std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4};
    double tau0 = 0.1;
    double T = 50.0;
    std::size_t grid = 512;
    bool record_timing = false;
    double rtol = 1e-8;
    double atol = 1e-10;
    std::size_t samples = 200;
    std::string out_dir;
    std::uint64_t seed = 1;
    bool force = false;

    bool operator==(const RunConfig&) const = default;
};

std::string write_config(const RunConfig& cfg);
RunConfig read_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// "a=1.5" -> {"a", 1.5}
std::pair<std::string, double> parse_assignment(const std::string& text);
std::vector<double> parse_eps_list(const std::string& text);

}  // namespace tfred
