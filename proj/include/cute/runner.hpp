#pragma once

// Pipeline orchestration: turns a RunConfig into a result bundle on disk.

#include <cstddef>
#include <string>
#include <vector>

#include "cute/config.hpp"

namespace cute {

enum class Stage { SolveVib, Build, Propagate, Spectrum, Populations, Rates, OracleCompare, All };

std::string to_string(Stage s);

struct RunOptions {
    /// Overrides config.output_dir when non-empty.
    std::string output_dir;
    /// Worker threads for independent sweep points (rates, bare spectra).
    std::size_t jobs = 1;
};

struct RunResult {
    std::string output_dir;
    std::vector<std::string> files; // relative to output_dir, in write order
    std::string summary;            // contents of summary.json
};

/// Runs one stage (or everything the config requests) and writes
/// manifest.json and summary.json next to the stage outputs. Module errors
/// are rethrown with the stage name prepended.
RunResult run(const RunConfig& config, Stage stage, const RunOptions& options = {});

} // namespace cute
