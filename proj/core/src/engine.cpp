#include "gridreg/engine.hpp"

#include <nlohmann/json.hpp>

#include "gridreg/error.hpp"
#include "gridreg/grid.hpp"
#include "gridreg/matcher.hpp"

namespace gridreg {

using nlohmann::json;

DescriptorFn provider_for(const EngineConfig& cfg) {
    switch (cfg.descriptor) {
        case DescriptorMode::Baseline: return make_baseline_provider();
        case DescriptorMode::Polar: return make_polar_provider();
        case DescriptorMode::File: break;
    }
    throw InputError("descriptor mode 'file' has no image provider");
}

namespace {

RegistrationResult run(const DescriptorSet& f_s, const DescriptorSet& f_o, Extent sar,
                       Extent opt, const EngineConfig& cfg, const SolverMonitor& monitor) {
    const DistanceMatrix d = distance_matrix(f_s, f_o);
    const CandidateSets cs = candidate_sets(d, cfg.k, cfg.step, sar, opt);
    const SolverConfig scfg = cfg.solver_config(sar, opt);

    RegistrationResult r;
    r.sar_grid = f_s.grid;
    r.opt_grid = f_o.grid;
    r.sar = sar;
    r.opt = opt;
    r.counts = {cs.k_c, cs.k_f};
    r.candidates_clamped = cs.clamped;
    r.iterations = scfg.iterations;
    r.solve = solve(d, cs, f_s.grid, f_o.grid, scfg, monitor);
    return r;
}

}  // namespace

RegistrationResult register_images(const ImageBuffer& sar, const ImageBuffer& opt,
                                   const EngineConfig& cfg, const SolverMonitor& monitor) {
    cfg.validate();
    const DescriptorFn provider = provider_for(cfg);
    const GridSpec gs = gridize(sar, cfg.patch, cfg.step);
    const GridSpec go = gridize(opt, cfg.patch, cfg.step);
    const DescriptorSet f_s = compute_descriptors(sar, gs, provider, "sar");
    const DescriptorSet f_o = compute_descriptors(opt, go, provider, "opt");
    return run(f_s, f_o, {sar.width(), sar.height()}, {opt.width(), opt.height()}, cfg, monitor);
}

RegistrationResult register_descriptors(const DescriptorSet& sar, const DescriptorSet& opt,
                                        const EngineConfig& cfg, const SolverMonitor& monitor) {
    if (sar.grid.step != opt.grid.step || sar.grid.patch != opt.grid.patch) {
        throw InputError("descriptor grids use different patch or step");
    }
    EngineConfig c = cfg;
    c.step = sar.grid.step;
    c.patch = sar.grid.patch;
    const Extent es{sar.grid.covered_width(), sar.grid.covered_height()};
    const Extent eo{opt.grid.covered_width(), opt.grid.covered_height()};
    return run(sar, opt, es, eo, c, monitor);
}

std::string diagnostics_to_json(const SolverDiagnostics& d) {
    json j;
    j["iterations"] = d.iterations;
    j["area_rejected"] = d.area_rejected;
    j["degenerate"] = d.degenerate;
    j["refinements"] = d.refinements;
    j["improvements"] = d.improvements;
    j["global_accepts"] = d.global_accepts;
    j["l_before_global"] = d.l_before_global;
    return j.dump();
}

std::string result_to_json(const RegistrationResult& r) {
    const AffineTransform2D& t = r.solve.t_optimal;
    json j;
    // Adding +0.0 turns -0.0 into 0.0.
    const auto e = [&](int i) { return t[i] + 0.0; };
    j["affine"] = {{e(0), e(1), e(2)}, {e(3), e(4), e(5)}};
    j["l_min"] = r.solve.l_min;
    j["n_grid_src"] = r.sar_grid.size();
    j["n_grid_ref"] = r.opt_grid.size();
    j["k_c"] = r.counts.k_c;
    j["k_f"] = r.counts.k_f;
    j["candidates_clamped"] = r.candidates_clamped;
    j["diagnostics"] = json::parse(diagnostics_to_json(r.solve.diagnostics));
    return j.dump(2) + "\n";
}

}  // namespace gridreg
