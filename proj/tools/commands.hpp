#pragma once

#include "config.hpp"

#include <iosfwd>

namespace bodyfield::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct RunOptions {
    std::optional<std::filesystem::path> config;
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;  // 0: hardware concurrency
    bool json = false;
    // Subcommand inputs that are not part of the scene.
    std::optional<std::filesystem::path> image, reference, mask;  // img-metrics
    std::optional<std::filesystem::path> pred, gt;                // recon-eval
    std::optional<std::filesystem::path> mesh;                    // bench-cp without a config
    std::optional<int> queries;                                   // bench-cp
};

/// Subcommands in dispatch order.
const std::vector<std::string>& command_names();

/// Validates, runs one subcommand and writes artifacts under options.out.
/// Returns kExitOk, kExitValidation or kExitRuntime. Progress and errors go
/// to `err`; `out` receives the JSON summary when options.json is set.
int run(const std::string& command, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace bodyfield::cli
