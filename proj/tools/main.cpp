#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace gridreg::cli;
    CLI::App app{"Grid-based multimodal affine image registration"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gridreg 0.1.0");

    RegisterArgs reg;
    auto* c_reg = app.add_subcommand("register", "Estimate the source -> reference affine");
    c_reg->add_option("--sar", reg.sar, "Source image (PNG/TIFF)");
    c_reg->add_option("--ref", reg.ref, "Reference image (PNG/TIFF)");
    c_reg->add_option("--config", reg.config, "Flat JSON engine config");
    c_reg->add_option("--desc-sar", reg.desc_sar, "Source GRDS descriptor file");
    c_reg->add_option("--desc-ref", reg.desc_ref, "Reference GRDS descriptor file");
    c_reg->add_option("--descriptor", reg.descriptor, "baseline | polar | file");
    c_reg->add_option("--seed", reg.seed, "RNG seed");
    c_reg->add_option("--step", reg.step, "Grid step, px");
    c_reg->add_option("--beta", reg.beta, "Iteration scale factor");
    c_reg->add_option("--iterations", reg.iterations, "Explicit coarse iteration count");
    c_reg->add_option("--out", reg.out, "Output JSON path (default stdout)");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "Median endpoint error of a predicted transform");
    c_eval->add_option("--pred", ev.pred, "Predicted transform JSON")->required();
    c_eval->add_option("--gt", ev.gt, "Ground-truth transform JSON")->required();
    c_eval->add_option("--sar-dims", ev.sar_dims, "Source image size WxH")->required();
    c_eval->add_option("--ref-dims", ev.ref_dims, "Reference image size WxH")->required();
    c_eval->add_option("--stride", ev.stride, "Evaluation pixel stride")->check(CLI::PositiveNumber);
    c_eval->add_option("--out", ev.out, "Output JSON path (default stdout)");

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "Synthetic benchmark sweep to CSV");
    c_bench->add_option("--base", bench.base, "Base image (default: procedural texture)");
    c_bench->add_option("--base-size", bench.base_size, "Procedural base side, px");
    c_bench->add_option("--base-seed", bench.base_seed, "Procedural base seed");
    c_bench->add_option("--levels", bench.levels, "Comma list of L-1, L0, L1, L2");
    c_bench->add_option("--seeds", bench.seeds, "Case seeds, e.g. 0-9 or 1,5,7");
    c_bench->add_option("--step", bench.steps, "Comma list of grid steps");
    c_bench->add_option("--beta", bench.betas, "Comma list of iteration scale factors");
    c_bench->add_option("--config", bench.config, "Flat JSON engine config");
    c_bench->add_option("--descriptor", bench.descriptor, "baseline | polar");
    c_bench->add_option("--iter-cap", bench.iter_cap, "Upper bound on coarse iterations");
    c_bench->add_option("--seed", bench.seed, "Solver seed");
    c_bench->add_flag("--speckle", bench.speckle, "Multiplicative speckle on the source");
    c_bench->add_flag("--occlusions", bench.occlusions, "Occluding rectangles on the source");
    c_bench->add_flag("--no-timing", bench.no_timing, "Write wall_ms as 0");
    c_bench->add_option("--out", bench.out, "Output CSV path (default stdout)");

    auto* c_desc = app.add_subcommand("descriptors", "GRDS descriptor files");
    c_desc->require_subcommand(1);
    ExportArgs ex;
    auto* c_export = c_desc->add_subcommand("export", "Compute grid descriptors for an image");
    c_export->add_option("--image", ex.image, "Input image")->required();
    c_export->add_option("--out", ex.out, "Output GRDS path")->required();
    c_export->add_option("--descriptor", ex.descriptor, "baseline | polar");
    c_export->add_option("--patch", ex.patch, "Patch side, px");
    c_export->add_option("--step", ex.step, "Grid step, px");
    std::string inspect_path;
    std::string inspect_out;
    auto* c_inspect = c_desc->add_subcommand("inspect", "Print a GRDS header summary");
    c_inspect->add_option("file", inspect_path, "GRDS file")->required();
    c_inspect->add_option("--out", inspect_out, "Output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kFailure;
    }

    if (*c_reg) return run_register(reg);
    if (*c_eval) return run_eval(ev);
    if (*c_bench) return run_bench(bench);
    if (*c_export) return run_descriptors_export(ex);
    if (*c_inspect) return run_descriptors_inspect(inspect_path, inspect_out);
    return kFailure;
}
