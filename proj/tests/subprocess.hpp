#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "test_util.hpp"

namespace testutil {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs a shell command with stdout/stderr captured into scratch files.
/// Paths used in tests contain no shell metacharacters.
inline CommandResult run_command(const std::string& command,
                                 const std::filesystem::path& scratch) {
    const auto out_path = scratch / "cmd_stdout.txt";
    const auto err_path = scratch / "cmd_stderr.txt";
    const std::string full =
        command + " > " + out_path.string() + " 2> " + err_path.string();
    const int status = std::system(full.c_str());

    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

}  // namespace testutil
