#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mnls/evolution.hpp"

namespace mnls {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    int dim = 3;
    double box = 8.0;
    int points = 32;
    Obstacle obstacle;
    int shells = 32;
};

struct FunctionalsSpec {
    std::vector<double> r_list = {4.0};
    double eps_exp = 0.1;
    std::string smoothing = "auto";     // none | n_ge_4 | n_eq_3 | weighted | linear | auto
    std::string interaction = "none";   // none | kernel | l4 | auto
    int interaction_stride = 5;
    std::vector<double> report_times;   // horizons; default {t_max}
    double virial_time = 0.0;           // 0 = off
    double virial_morawetz_scale = 3.0;
    double virial_sigma = 1.0;
};

struct SweepSpec {
    std::string axis = "none";  // none | T | amplitude | coeff-scale | dt | h
    std::vector<double> values;
};

struct RunConfig {
    std::string preset = "free";
    CoeffParams coeff;
    GridSpec grid;
    Scenario scenario;
    FunctionalsSpec functionals;
    SweepSpec sweep;

    std::string canonical() const;   // round-trip serialization
    std::uint64_t hash() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// resolved objects
CoefficientSet make_coefficient_set(const RunConfig& cfg);
Grid make_grid(const RunConfig& cfg);

}  // namespace mnls
