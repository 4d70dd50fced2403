#include "gridreg/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridreg/error.hpp"

namespace gridreg {

using nlohmann::json;

std::string to_string(DescriptorMode mode) {
    switch (mode) {
        case DescriptorMode::Baseline: return "baseline";
        case DescriptorMode::Polar: return "polar";
        case DescriptorMode::File: return "file";
    }
    return "baseline";
}

DescriptorMode parse_descriptor_mode(const std::string& text) {
    if (text == "baseline") return DescriptorMode::Baseline;
    if (text == "polar") return DescriptorMode::Polar;
    if (text == "file") return DescriptorMode::File;
    throw InputError("unknown descriptor mode '" + text + "' (baseline | polar | file)");
}

void EngineConfig::validate() const {
    if (patch < 16 || patch % 16 != 0) throw InputError("patch must be a positive multiple of 16");
    if (step < 1) throw InputError("step must be >= 1");
    if (k < 1) throw InputError("k must be >= 1");
    if (!(beta > 0.0)) throw InputError("beta must be positive");
    if (iterations && *iterations < 1) throw InputError("iterations must be >= 1");
    if (iter_cap < 0) throw InputError("iter_cap must be >= 0");
    if (r_l && !(*r_l > 0.0)) throw InputError("r_l must be positive");
    if (r_g && !(*r_g > 0.0)) throw InputError("r_g must be positive");
    if (mee_stride < 1) throw InputError("mee_stride must be >= 1");
    if (descriptor == DescriptorMode::File && (desc_sar.empty() || desc_ref.empty())) {
        throw InputError("descriptor mode 'file' needs desc_sar and desc_ref");
    }
    solver_config({patch, patch}, {patch, patch}).validate();
}

SolverConfig EngineConfig::solver_config(Extent sar, Extent opt) const {
    SolverConfig cfg = SolverConfig::for_step(step);
    cfg.iterations = iterations ? *iterations : default_iterations(beta, sar, opt, iter_cap);
    if (iterations && iter_cap > 0) cfg.iterations = std::min(cfg.iterations, iter_cap);
    cfg.s_lo = s_lo;
    cfg.s_hi = s_hi;
    cfg.l_th_init = l_th_init;
    cfg.rho = rho;
    if (r_l) cfg.r_l = *r_l;
    if (r_g) cfg.r_g = *r_g;
    cfg.iter_f_l = iter_f_l;
    cfg.iter_f_g = iter_f_g;
    cfg.seed = seed;
    return cfg;
}

std::string to_json(const EngineConfig& c) {
    json j;
    j["patch"] = c.patch;
    j["step"] = c.step;
    j["k"] = c.k;
    j["beta"] = c.beta;
    j["iterations"] = c.iterations ? json(*c.iterations) : json(nullptr);
    j["iter_cap"] = c.iter_cap;
    j["l_th_init"] = c.l_th_init;
    j["rho"] = c.rho;
    j["s_lo"] = c.s_lo;
    j["s_hi"] = c.s_hi;
    j["r_l"] = c.r_l ? json(*c.r_l) : json(nullptr);
    j["r_g"] = c.r_g ? json(*c.r_g) : json(nullptr);
    j["iter_f_l"] = c.iter_f_l;
    j["iter_f_g"] = c.iter_f_g;
    j["seed"] = c.seed;
    j["descriptor"] = to_string(c.descriptor);
    j["desc_sar"] = c.desc_sar;
    j["desc_ref"] = c.desc_ref;
    j["mee_stride"] = c.mee_stride;
    return j.dump(2) + "\n";
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("config field '") + key + "': " + e.what());
    }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    T value{};
    read_field(j, key, value);
    out = value;
}

}  // namespace

EngineConfig parse_engine_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed config JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw InputError("config must be a JSON object");
    }
    static const std::set<std::string> known{
        "patch", "step", "k", "beta", "iterations", "iter_cap", "l_th_init",
        "rho", "s_lo", "s_hi", "r_l", "r_g", "iter_f_l", "iter_f_g",
        "seed", "descriptor", "desc_sar", "desc_ref", "mee_stride"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw InputError("unknown config key '" + key + "'");
        }
    }
    EngineConfig c;
    read_field(j, "patch", c.patch);
    read_field(j, "step", c.step);
    read_field(j, "k", c.k);
    read_field(j, "beta", c.beta);
    read_optional(j, "iterations", c.iterations);
    read_field(j, "iter_cap", c.iter_cap);
    read_field(j, "l_th_init", c.l_th_init);
    read_field(j, "rho", c.rho);
    read_field(j, "s_lo", c.s_lo);
    read_field(j, "s_hi", c.s_hi);
    read_optional(j, "r_l", c.r_l);
    read_optional(j, "r_g", c.r_g);
    read_field(j, "iter_f_l", c.iter_f_l);
    read_field(j, "iter_f_g", c.iter_f_g);
    read_field(j, "seed", c.seed);
    std::string mode = to_string(c.descriptor);
    read_field(j, "descriptor", mode);
    c.descriptor = parse_descriptor_mode(mode);
    read_field(j, "desc_sar", c.desc_sar);
    read_field(j, "desc_ref", c.desc_ref);
    read_field(j, "mee_stride", c.mee_stride);
    c.validate();
    return c;
}

EngineConfig load_engine_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_engine_config(buffer.str());
}

std::string transform_to_json(const AffineTransform2D& t) {
    json j;
    // Adding +0.0 turns -0.0 into 0.0.
    const auto e = [&](int i) { return t[i] + 0.0; };
    j["affine"] = {{e(0), e(1), e(2)}, {e(3), e(4), e(5)}};
    return j.dump() + "\n";
}

AffineTransform2D parse_transform_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        const json& a = j.at("affine");
        if (!a.is_array() || a.size() != 2 || a[0].size() != 3 || a[1].size() != 3) {
            throw InputError("'affine' must be a 2x3 array");
        }
        std::array<double, 6> m{};
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 3; ++c) m[r * 3 + c] = a[r][c].get<double>();
        }
        return AffineTransform2D(m);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed transform JSON: ") + e.what());
    }
}

}  // namespace gridreg
