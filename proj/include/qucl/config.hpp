#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qucl/constants.hpp"
#include "qucl/core.hpp"
#include "qucl/quadrature.hpp"

namespace qucl {

/// One `[experiment.<name>]` section. Parameters stay as text; each kind validates its own keys.
struct ExperimentConfig {
    std::string name;
    std::string kind;
    std::map<std::string, std::string> params;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Fully resolved run configuration. Every field has a default, so an empty file is valid.
struct RunConfig {
    // [run]
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out = "qucl-out";
    std::string mode = "fit";

    // [domain]: an axis-aligned box
    Vec lengths{1.0, 1.0, 1.0};
    Vec origin{0.0, 0.0, 0.0};
    double h = 1.0 / 32.0;

    // [potential]
    std::string potential = "constant";  // constant | two_level | radial_power
    double value = 0.0;      // constant value, or the low value of two_level
    double high = 1.0;       // two_level
    Vec sub_lo{0.25, 0.25, 0.25}, sub_hi{0.75, 0.75, 0.75};
    Vec center{0.5, 0.5, 0.5};  // radial_power
    double power = 0.5;          // radial_power
    double s = kInf;

    // [drift]
    std::string drift = "none";  // none | constant
    Vec drift_value{0.0, 0.0, 0.0};
    double m = kInf;

    // [solver]
    double tol = 1e-10;
    long max_iterations = 0;

    // [constants]
    UniversalConstants universal;
    double sigma = talenti_constant(3);

    // [quadrature]
    QuadratureSpec quadrature;

    std::vector<ExperimentConfig> experiments;

    bool operator==(const RunConfig& o) const;
};

/// Experiment kinds and the parameter keys each accepts.
const std::vector<std::string>& experiment_kinds();
const std::vector<std::string>& experiment_keys(const std::string& kind);

/// Parses the line-oriented `key = value` format with `[section]` headers and `#` or `;` comments.
/// Unknown sections or keys, duplicates and malformed values throw ConfigError with the line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text; parse_config(serialize_config(c)) == c. Without `runtime` the workers and out lines are
/// dropped, which is the form embedded in reports so that report bodies do not depend on them.
std::string serialize_config(const RunConfig& config, bool runtime = true);

/// Experiment parameter accessors; they throw ConfigError naming the experiment and key.
double param_number(const ExperimentConfig& e, const std::string& key, double fallback);
long param_integer(const ExperimentConfig& e, const std::string& key, long fallback);
std::string param_text(const ExperimentConfig& e, const std::string& key, const std::string& fallback);
Vec param_vec(const ExperimentConfig& e, const std::string& key, const Vec& fallback);
std::vector<double> param_list(const ExperimentConfig& e, const std::string& key, const std::vector<double>& fallback);

/// Value parsers shared with the command line.
double parse_number(const std::string& text);
Vec parse_vec(const std::string& text);
std::vector<double> parse_list(const std::string& text);

}  // namespace qucl
