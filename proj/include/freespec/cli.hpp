#pragma once

// Command dispatch behind the freespec executable. Kept in a library so the
// tests can drive it without spawning processes.

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace freespec::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,         // bad flags, unreadable or malformed input
    kNumerical = 2,     // non-convergence, conditioning, Herglotz loss
    kPrecondition = 3,  // e.g. locate without outliers
};

struct RunConfig {
    std::string command;  // simulate, mp-check, asd, detect, locate, product
    std::vector<std::filesystem::path> input_paths;
    std::filesystem::path output_path;  // empty: command default
    /// eta, repetitions, margin_eps, grid_points, smoothing_offset,
    /// corner_eps, delta, seed, polynomial, window_stride, ratio.
    std::map<std::string, std::string> params;
};

/// Documented default of every accepted parameter.
const std::map<std::string, std::string>& default_params();

/// Cache directory: $FREESPEC_CACHE_DIR, else $XDG_CACHE_HOME/freespec,
/// else $HOME/.cache/freespec, else ./.freespec-cache.
std::filesystem::path cache_dir();

std::string sha256_hex(const std::string& text);

/// Runs one command; diagnostics go to `err`, short summaries to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace freespec::cli
