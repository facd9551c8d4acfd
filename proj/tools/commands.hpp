#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace fracfund::cli {

struct Invocation {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
};

// Each returns the process exit code: 0 success, 1 configuration, 2 numerical failure.
int cmd_solve(const Invocation& inv);
int cmd_fundamental(const Invocation& inv);
int cmd_verify(const std::string& suite, const Invocation& inv);

}  // namespace fracfund::cli
