#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gridreg::cli {

/// Process exit codes shared by every command.
enum Exit : int { kOk = 0, kFailure = 1, kNoSolution = 2 };

struct RegisterArgs {
    std::string sar;
    std::string ref;
    std::string config;
    std::string desc_sar;
    std::string desc_ref;
    std::string out;  // empty: stdout
    std::string descriptor;
    std::optional<std::uint64_t> seed;
    std::optional<int> step;
    std::optional<double> beta;
    std::optional<std::int64_t> iterations;
};

struct EvalArgs {
    std::string pred;
    std::string gt;
    std::string sar_dims;  // "WxH"
    std::string ref_dims;
    std::string out;
    int stride = 4;
};

struct BenchArgs {
    std::string base;  // empty: procedural base
    int base_size = 1024;
    std::uint64_t base_seed = 0;
    std::string levels = "L0";
    std::string seeds = "0";
    std::string steps;  // comma list; empty: config value
    std::string betas;
    std::string config;
    std::string descriptor;
    std::optional<std::int64_t> iter_cap;
    std::optional<std::uint64_t> seed;
    bool speckle = false;
    bool occlusions = false;
    bool no_timing = false;
    std::string out;
};

struct ExportArgs {
    std::string image;
    std::string out;
    std::string descriptor = "baseline";
    int patch = 256;
    int step = 16;
};

int run_register(const RegisterArgs& args);
int run_eval(const EvalArgs& args);
int run_bench(const BenchArgs& args);
int run_descriptors_export(const ExportArgs& args);
int run_descriptors_inspect(const std::string& path, const std::string& out);

/// "N", "A-B" (inclusive) or comma-separated mixtures of both.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace gridreg::cli
