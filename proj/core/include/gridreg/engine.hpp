#pragma once

#include <string>

#include "gridreg/config.hpp"
#include "gridreg/descriptors.hpp"
#include "gridreg/image.hpp"
#include "gridreg/solver.hpp"

namespace gridreg {

struct RegistrationResult {
    SolveResult solve;
    GridSpec sar_grid;
    GridSpec opt_grid;
    Extent sar;
    Extent opt;
    CandidateCounts counts;
    bool candidates_clamped = false;
    std::int64_t iterations = 0;
};

/// Image descriptor provider for the configured mode. Throws InputError for
/// DescriptorMode::File, which has no image provider.
DescriptorFn provider_for(const EngineConfig& cfg);

/// Full pipeline: gridize, describe, match, solve. Throws NoSolutionError
/// when the solver finds no admissible sample.
RegistrationResult register_images(const ImageBuffer& sar, const ImageBuffer& opt,
                                   const EngineConfig& cfg, const SolverMonitor& monitor = {});

/// Pipeline from precomputed descriptors. Image extents are taken from the
/// area covered by each grid.
RegistrationResult register_descriptors(const DescriptorSet& sar, const DescriptorSet& opt,
                                        const EngineConfig& cfg,
                                        const SolverMonitor& monitor = {});

/// {"affine", "l_min", "n_grid_src", "n_grid_ref", "diagnostics"}.
std::string result_to_json(const RegistrationResult& r);
std::string diagnostics_to_json(const SolverDiagnostics& d);

}  // namespace gridreg
