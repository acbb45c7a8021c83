// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

// Subprocess execution for external backends (SR models, segmentation,
// learned metrics).

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace purikit {

struct ProcessResult {
    int exit_code = -1;  // -1 when killed by a signal
    bool timed_out = false;
    std::string out;
    std::string err;
};

/// Runs `command` through /bin/sh with `args` appended as separate,
/// unquoted-safe positional parameters. On timeout the whole process group
/// is killed. Blocks while the global process cap is exhausted.
///
/// Throws BackendUnavailable when the shell cannot be spawned.
ProcessResult run_process(const std::string& command, const std::vector<std::string>& args,
                          std::optional<double> timeout_s = std::nullopt);

/// Maximum number of concurrently running external processes (default 4).
void set_process_cap(int cap);
int process_cap();

/// Last `max_len` bytes of a captured stream, for error messages.
std::string tail_excerpt(const std::string& text, std::size_t max_len = 400);

}  // namespace purikit
