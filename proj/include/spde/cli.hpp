#pragma once

#include "spde/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace spde {

inline constexpr std::string_view kSubcommands[] = {"simulate", "estimate", "bench-tau",
                                                    "bench-h",  "oracle",   "poisson-check"};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

struct RunOptions {
    /// Directory for <subcommand>.csv; without it the CSV goes to `out`.
    std::optional<std::filesystem::path> out_dir;
    unsigned threads = 0;
};

/// Runs one subcommand. Returns 0 on success, 1 on invalid input, 2 on numerical
/// failure; diagnostics go to `err`.
int run(std::string_view subcommand, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out,
        std::ostream& err);

/// Full command line: spde-cli <subcommand> --config PATH [--seed N] [--out DIR] [--threads N].
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spde
