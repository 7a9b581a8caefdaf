#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>

namespace sectorfhc::cli {

enum ExitCode : int {
    kOk = 0,
    kError = 1,
    kNecessaryFail = 2,
    kInconclusive = 3,
    kConstructionFailed = 4,
    kVerificationFailed = 5,
};

/// Command-line values that override fields of the config document.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::optional<double> p;
    std::optional<std::string> h;
    std::optional<double> horizon;
    std::optional<unsigned> workers;
};

/// One command invocation: the merged config document and the report directory.
struct RunConfig {
    nlohmann::json doc = nlohmann::json::object();
    std::filesystem::path out_dir = ".";
    unsigned workers = 0;
    /// --horizon: construction horizon for construct, single estimation
    /// horizon for density and orbit.
    std::optional<double> horizon;

    /// Reads the JSON document at `path` (empty path: empty document) and
    /// applies the overrides, which take precedence over the file.
    static RunConfig load(const std::filesystem::path& path, const Overrides& overrides,
                          const std::filesystem::path& out_dir);
};

/// Weight verdict report check.json. Exit 2 on a failed necessary condition,
/// else 0 when the sufficient condition holds, else 3.
int cmd_check(const RunConfig& config, std::ostream& log);

/// Density curve density.csv for a set description.
int cmd_density(const RunConfig& config, std::ostream& log);

/// Criterion plan and truncated series: vector.json and ledger.json.
int cmd_construct(const RunConfig& config, std::ostream& log);

/// Return-bound, orbit-density and transition experiments on a stored vector:
/// orbit.json. Exit 5 when an asserted bound fails.
int cmd_orbit(const RunConfig& config, std::ostream& log);

/// Parses argv, dispatches the command and maps library errors to exit codes.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace sectorfhc::cli
