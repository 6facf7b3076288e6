#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anderson/disorder.hpp"

namespace anderson {

enum class ExperimentKind { Ids, Dos, FreeIds, BoundCert, Spacing, Verify };

std::string kind_name(ExperimentKind kind);

/// One experiment per config file. Numeric constraints are validated up
/// front; violations raise ConfigError naming the offending key path.
struct RunConfig {
    ExperimentKind kind = ExperimentKind::Verify;

    // model
    int dimension = 1;
    int side = 64;
    int ell = 8; ///< finite cube side for free-ids runs

    SingleSiteDensity density = SingleSiteDensity::uniform(0.0, 1.0);

    // energy grid; when absent, ids/dos default to the padded deterministic
    // spectrum and free-ids to [-2d, 2d], both at the default step
    std::optional<double> grid_min;
    std::optional<double> grid_max;
    double grid_step = 0.01;

    // Monte Carlo
    int realizations = 50;
    std::uint64_t seed = 1;

    // algorithm knobs
    double bin_width = 0.05;            ///< h for the DOS difference quotient
    double switch_width = 0.1;          ///< epsilon for switch-function checks
    double delta = 0.1;                 ///< certificate window parameter
    double d_rank = -1.0;               ///< negative selects the 4d default
    int ell_max = 0;                    ///< zero selects the size-budget default
    double window = 10.0;               ///< X for spacing collection
    double ks_threshold = 0.15;
    std::optional<double> energy;       ///< spacing reference; default band center

    std::string out_dir = "out";

    /// Parses and validates. `subcommand` (possibly empty) must agree with
    /// the config's "experiment" entry when both are present.
    static RunConfig from_json(const nlohmann::json& j, const std::string& subcommand);
    static RunConfig from_file(const std::string& path, const std::string& subcommand);

    /// Normalized form used for the manifest's config digest.
    nlohmann::json canonical_json() const;

    /// Resolved energy grid for the experiment kind.
    std::vector<double> resolve_grid() const;
};

/// Executes the experiment and writes its outputs plus manifest.json into
/// the output directory. Returns the list of files written (manifest last).
/// Throws ConfigError / SolverError / CheckError; the CLI maps these to
/// exit codes 2 / 3 / 4.
std::vector<std::string> run_experiment(const RunConfig& config, int workers,
                                        std::ostream& log);

/// Fast property battery over all modules; prints one line per check.
bool verify_all(std::ostream& log);

/// FNV-1a 64-bit digest, rendered as fnv1a64:<hex>.
std::string fnv1a64_hex(const void* data, std::size_t size);
std::string digest_file(const std::string& path);

} // namespace anderson
