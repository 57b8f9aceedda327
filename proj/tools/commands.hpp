#pragma once

#include "config.hpp"

#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace nlsw::cli {

struct Context {
    std::filesystem::path out = "out";
    int jobs = 1;
    int snapshot_stride = 0;
    std::optional<std::filesystem::path> field;
};

enum ExitCode { exit_ok = 0, exit_config = 2, exit_precondition = 3, exit_solver = 4 };

// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

int cmd_groundstate(const RunConfig& c, const Context& ctx);
int cmd_glue(const RunConfig& c, const Context& ctx);
int cmd_spectrum(const RunConfig& c, const Context& ctx);
int cmd_evolve(const RunConfig& c, const Context& ctx);
int cmd_semiclassical(const RunConfig& c, const Context& ctx);
// Runs every entry of a manifest {"runs": [{name, command, config, field?, expect_exit?}]}.
int cmd_sweep(const std::filesystem::path& manifest, const Context& ctx);

int run_command(const std::string& name, const RunConfig& c, const Context& ctx);

// Calls fn(i) for i in [0, count) on up to `jobs` threads.
template <class Fn>
void run_pool(int jobs, std::size_t count, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                fn(i);
        });
    for (auto& t : pool)
        t.join();
}

} // namespace nlsw::cli
