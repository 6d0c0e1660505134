#pragma once

/*======================================================================================================================
 * Command-line front end: one run of one mode against input files, reported as text or JSON.
 *====================================================================================================================*/

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace mtpdb {

enum class Mode { Analyze, Eval, Interval, Exact, Greedy, Oracle, Demo3dm, Verify };
enum class OutputFormat { Text, Json };

std::optional<Mode> parse_mode(std::string_view name);
const char *to_string(Mode mode);

struct RunConfig
{
    Mode mode = Mode::Eval;
    std::string db_dir;
    std::string query;
    std::string query_file;
    /// Overrides `lambda=` in constraints.txt.
    std::optional<double> lambda;
    /// Overrides the constraints file.  The mean may be omitted when a budget override is given.
    std::optional<std::string> mtp_relation;
    std::optional<double> mtp_mean;
    std::optional<std::size_t> budget_override;
    OutputFormat output = OutputFormat::Text;
    std::uint64_t seed = 1;
    /// Property-suite trials for `verify`.
    std::size_t trials = 100;
    /// 3DM instance file for `demo3dm`; a built-in instance otherwise.
    std::string instance_file;
    std::uint64_t cap_worlds = std::uint64_t(1) << 24;
    std::uint64_t cap_subsets = 200'000;
    /// Run greedy on queries with self-joins (no guarantee reported).
    bool force = false;
    bool timings = true;
};

/// Exit codes of `run`.
enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,       ///< parse or validation error
    kExitUnsafe = 2,      ///< unsafe query and no fallback for the mode
    kExitResource = 3,    ///< resource cap hit
    kExitCheckFailed = 4, ///< `verify` or `demo3dm` found a failing check
};

/// Executes `config`, writing the report to `out` and notices and errors to `err`.
int run(const RunConfig &config, std::ostream &out, std::ostream &err);

}
