#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridreg/config.hpp"
#include "gridreg/engine.hpp"
#include "gridreg/error.hpp"
#include "gridreg/grds.hpp"
#include "gridreg/image_io.hpp"
#include "gridreg/metrics.hpp"
#include "gridreg/synth.hpp"

namespace gridreg::cli {

using nlohmann::json;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw IoError("cannot write " + out);
    f << text;
    if (!f) throw IoError("failed writing " + out);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

Extent parse_dims(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw InputError("dimensions must be WxH, got '" + text + "'");
    try {
        const int w = std::stoi(text.substr(0, x));
        const int h = std::stoi(text.substr(x + 1));
        if (w < 1 || h < 1) throw InputError("dimensions must be positive");
        return {w, h};
    } catch (const std::logic_error&) {
        throw InputError("dimensions must be WxH, got '" + text + "'");
    }
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const NoSolutionError& e) {
        std::cerr << "gridreg: no solution: " << e.what() << '\n'
                  << diagnostics_to_json(e.diagnostics()) << '\n';
        return kNoSolution;
    } catch (const NoOverlapError& e) {
        std::cerr << "gridreg: " << e.what() << '\n';
        return kNoSolution;
    } catch (const std::exception& e) {
        std::cerr << "gridreg: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const std::string& item : split(text, ',')) {
        try {
            const auto dash = item.find('-', 1);
            if (dash == std::string::npos) {
                seeds.push_back(std::stoull(item));
                continue;
            }
            const std::uint64_t lo = std::stoull(item.substr(0, dash));
            const std::uint64_t hi = std::stoull(item.substr(dash + 1));
            if (hi < lo) throw InputError("empty seed range '" + item + "'");
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } catch (const std::logic_error&) {
            throw InputError("bad seed list entry '" + item + "'");
        }
    }
    if (seeds.empty()) throw InputError("seed list is empty");
    return seeds;
}

int run_register(const RegisterArgs& a) {
    return guarded([&] {
        EngineConfig cfg = a.config.empty() ? EngineConfig{} : load_engine_config(a.config);
        if (a.seed) cfg.seed = *a.seed;
        if (a.step) cfg.step = *a.step;
        if (a.beta) cfg.beta = *a.beta;
        if (a.iterations) cfg.iterations = *a.iterations;
        if (!a.descriptor.empty()) cfg.descriptor = parse_descriptor_mode(a.descriptor);
        if (!a.desc_sar.empty()) cfg.desc_sar = a.desc_sar;
        if (!a.desc_ref.empty()) cfg.desc_ref = a.desc_ref;
        if (!a.desc_sar.empty() || !a.desc_ref.empty()) cfg.descriptor = DescriptorMode::File;

        RegistrationResult r;
        if (cfg.descriptor == DescriptorMode::File) {
            cfg.validate();
            const DescriptorSet fs = read_descriptor_file(cfg.desc_sar, "sar");
            const DescriptorSet fo = read_descriptor_file(cfg.desc_ref, "opt");
            r = register_descriptors(fs, fo, cfg);
        } else {
            if (a.sar.empty() || a.ref.empty()) {
                throw InputError("register needs --sar and --ref (or --desc-sar and --desc-ref)");
            }
            const ImageBuffer sar = load_image(a.sar);
            const ImageBuffer ref = load_image(a.ref);
            r = register_images(sar, ref, cfg);
        }
        emit(result_to_json(r), a.out);
        return static_cast<int>(kOk);
    });
}

int run_eval(const EvalArgs& a) {
    return guarded([&] {
        const AffineTransform2D pred = parse_transform_json(read_text(a.pred));
        const AffineTransform2D gt = parse_transform_json(read_text(a.gt));
        const EvalReport rep = evaluate(pred, gt, parse_dims(a.sar_dims), parse_dims(a.ref_dims),
                                        a.stride);
        json j;
        j["mee"] = rep.mee;
        j["n_eval_points"] = rep.n_eval_points;
        json s = json::object();
        for (const auto& [th, ok] : rep.success) {
            s[std::to_string(static_cast<long long>(std::llround(th)))] = ok;
        }
        j["success"] = s;
        emit(j.dump(2) + "\n", a.out);
        return static_cast<int>(kOk);
    });
}

int run_bench(const BenchArgs& a) {
    return guarded([&] {
        EngineConfig base_cfg = a.config.empty() ? EngineConfig{} : load_engine_config(a.config);
        if (a.seed) base_cfg.seed = *a.seed;
        if (a.iter_cap) base_cfg.iter_cap = *a.iter_cap;
        if (!a.descriptor.empty()) base_cfg.descriptor = parse_descriptor_mode(a.descriptor);
        if (base_cfg.descriptor == DescriptorMode::File) {
            throw InputError("bench needs an image descriptor (baseline | polar)");
        }

        std::vector<int> steps;
        for (const auto& s : split(a.steps, ',')) steps.push_back(std::stoi(s));
        if (steps.empty()) steps.push_back(base_cfg.step);
        std::vector<double> betas;
        for (const auto& b : split(a.betas, ',')) betas.push_back(std::stod(b));
        if (betas.empty()) betas.push_back(base_cfg.beta);
        std::vector<Level> levels;
        for (const auto& l : split(a.levels, ',')) levels.push_back(parse_level(l));
        if (levels.empty()) throw InputError("level list is empty");
        const std::vector<std::uint64_t> seeds = parse_seed_list(a.seeds);

        const ImageBuffer base = a.base.empty()
                                     ? make_textured_base(a.base_size, a.base_size, a.base_seed)
                                     : load_image(a.base);
        SynthOptions opts;
        opts.speckle = a.speckle;
        opts.occlusions = a.occlusions;

        std::ostringstream csv;
        write_bench_header(csv, true);
        for (Level level : levels) {
            for (std::uint64_t seed : seeds) {
                const SynthCase c = synth_pair(base, level, seed, opts);
                for (int step : steps) {
                    for (double beta : betas) {
                        EngineConfig cfg = base_cfg;
                        cfg.step = step;
                        cfg.beta = beta;
                        cfg.validate();
                        BenchRow row;
                        try {
                            row = run_case(c, cfg, !a.no_timing);
                        } catch (const Error& e) {
                            std::cerr << "gridreg: case " << to_string(level) << "_s" << seed
                                      << ": " << e.what() << '\n';
                            row.case_id = to_string(level) + "_s" + std::to_string(seed);
                            row.level = level;
                            row.seed = seed;
                            row.mee_px = std::numeric_limits<double>::infinity();
                            row.step = step;
                            row.beta = beta;
                        }
                        write_bench_row(csv, row, true);
                    }
                }
            }
        }
        emit(csv.str(), a.out);
        return static_cast<int>(kOk);
    });
}

int run_descriptors_export(const ExportArgs& a) {
    return guarded([&] {
        EngineConfig cfg;
        cfg.patch = a.patch;
        cfg.step = a.step;
        cfg.descriptor = parse_descriptor_mode(a.descriptor);
        cfg.validate();
        const ImageBuffer image = load_image(a.image);
        const GridSpec grid = gridize(image, cfg.patch, cfg.step);
        const DescriptorSet set = compute_descriptors(image, grid, provider_for(cfg));
        write_descriptor_file(set, a.out);
        return static_cast<int>(kOk);
    });
}

int run_descriptors_inspect(const std::string& path, const std::string& out) {
    return guarded([&] {
        const DescriptorSet set = read_descriptor_file(path);
        double min_norm = std::numeric_limits<double>::infinity();
        double max_norm = 0.0;
        for (int i = 0; i < set.rows(); ++i) {
            double sq = 0.0;
            for (float v : set.row(i)) sq += static_cast<double>(v) * v;
            min_norm = std::min(min_norm, std::sqrt(sq));
            max_norm = std::max(max_norm, std::sqrt(sq));
        }
        json j;
        j["version"] = kGrdsVersion;
        j["n_w"] = set.grid.n_w;
        j["n_h"] = set.grid.n_h;
        j["dim"] = set.dim;
        j["patch"] = set.grid.patch;
        j["step"] = set.grid.step;
        j["normalized"] = set.normalized;
        j["min_row_norm"] = min_norm;
        j["max_row_norm"] = max_norm;
        emit(j.dump(2) + "\n", out);
        return static_cast<int>(kOk);
    });
}

}  // namespace gridreg::cli
