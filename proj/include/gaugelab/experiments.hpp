#pragma once

// Named, reproducible experiments driven by a JSON run configuration, and
// their CSV / JSON output.

#include "gaugelab/lattice.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gaugelab::run {

/// Invalid configuration; `field` is the dotted path of the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class ParamKind { number, integer, number_list, integer_list, vector3, matrix3 };
enum class Bound { none, positive, non_negative };

struct ParamSpec {
    std::string name;
    ParamKind kind;
    nlohmann::json default_value;
    Bound bound = Bound::none;
    std::string doc;
};

struct Constants {
    double c_s = 1.0;
    double g0 = 0.1;     // time-sector coupling, c_s * g
    double g = 0.1;
    double m_star = 1.0;
    double m = 1.0;      // bare mass of the spin-orbit terms
    double mu_b = 1.0;
    double rho = 1.0;
};

struct ExperimentInfo {
    std::string name;
    std::string summary;
    Index n_sites;  // grid defaults
    double length;
    Constants constants;  // defaults for this experiment
    std::vector<ParamSpec> params;
};

const std::vector<ExperimentInfo>& list_experiments();

/// Human-readable schema listing for `list`.
std::string describe_experiments();

struct RunConfig {
    std::string experiment;
    Index n_sites = 0;
    double length = 0.0;
    Constants constants;
    nlohmann::json params;  // every schema key present after parsing
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;

    /// Strict parse: unknown keys, wrong types and out-of-range values throw ConfigError
    /// before anything is computed. Omitted keys take the experiment defaults.
    static RunConfig parse(const nlohmann::json& doc);
    static RunConfig load(const std::filesystem::path& path);

    /// Fully resolved configuration, suitable for parse() again.
    nlohmann::json to_json() const;
};

/// Default output directory: $GAUGELAB_OUT/<experiment>, or gaugelab-out/<experiment>.
std::filesystem::path default_output_dir(const std::string& experiment);

struct Table {
    std::string file;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Assertion {
    std::string name;
    bool passed;
    std::string detail;
};

struct RunReport {
    std::string experiment;
    nlohmann::json config;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<Table> tables;
    std::vector<Assertion> assertions;
    std::vector<std::string> files;  // filled by emit_report
    double wall_seconds = 0.0;

    bool passed() const;
    double scalar(const std::string& name) const;
};

RunReport run_experiment(const RunConfig& config);

/// Writes summary.json and one CSV per non-empty table into `dir`, records them
/// in report.files and returns the paths. Wall-clock time is left out of the
/// files so identical runs give identical bytes.
std::vector<std::filesystem::path> emit_report(RunReport& report, const std::filesystem::path& dir);

/// Shortest round-trip decimal form, locale independent.
std::string format_number(double v);

}  // namespace gaugelab::run
