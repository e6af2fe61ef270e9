#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace arraymem {

/// Resolved run configuration. Every field has a default; see README for the
/// file schema (JSON with sections geometry, mode, study, output, tolerances).
struct RunConfig {
    std::string command = "efficiency";

    struct Geometry {
        int N = 10;
        double d = 0.6;
        std::string model = "two-level";
        std::vector<int> holes;
        double sigma = 0.0;  ///< in-plane position disorder, wavelengths (seeded by study.seed)
    } geometry;

    struct Mode {
        double w0 = 1.5;
        bool two_sided = true;
        bool optimize_waist = false;
    } mode;

    struct Study {
        std::vector<double> w0_list;  ///< empty: w0_min..w0_max in w0_steps points
        double w0_min = 1.0;
        double w0_max = 4.0;
        int w0_steps = 25;
        std::vector<int> hole_counts;  ///< empty: 1..20% of the sites
        int samples = 100;
        std::uint64_t seed = 20170901;
        std::vector<int> sizes;           ///< disorder / isotropic sizes; empty: command default
        std::vector<double> sigma_over_d; ///< empty: 6 log-spaced values in [0.01, 0.1]
        double Td = 10.0;
        std::vector<double> Td_list;      ///< extra windows for the finite-time curve
        std::string contraction = "full";
        int workers = 0;
        bool allow_large = false;
    } study;

    struct Output {
        std::string directory = ".";
        bool write_files = true;
    } output;

    struct Tolerances {
        double quadrature = 1e-10;
        double waist = 1e-3;
        double fit_clip_fraction = 0.1;
    } tolerances;
};

/// Strict reader: unknown keys and type mismatches raise ConfigError with the
/// offending path. Fields absent from `j` keep their value from `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
void to_json(nlohmann::json& j, const RunConfig& config);

/// Range and consistency checks (ConfigError).
void validate(const RunConfig& config);

struct RunOutcome {
    int exit_code = 0;
    std::string summary;
    std::vector<std::string> artifacts;
};

/// Executes the command. Writes the human summary line to `out`. Numerical
/// failures are reported through exit_code 1 rather than exceptions.
RunOutcome run(const RunConfig& config, std::ostream& out);

/// Full command-line entry point: exit code 0 success, 1 numerical failure,
/// 2 configuration error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace arraymem
