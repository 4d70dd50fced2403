#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gridreg/affine.hpp"
#include "gridreg/matcher.hpp"
#include "gridreg/solver.hpp"

namespace gridreg {

enum class DescriptorMode { Baseline, Polar, File };

std::string to_string(DescriptorMode mode);
/// "baseline" | "polar" | "file"; throws InputError otherwise.
DescriptorMode parse_descriptor_mode(const std::string& text);

/// Every knob of the registration pipeline. Serialised as one flat JSON
/// object; unknown keys are rejected.
struct EngineConfig {
    int patch = 256;
    int step = 16;
    int k = 1;
    double beta = 1.0;
    std::optional<std::int64_t> iterations;  // overrides beta when set
    std::int64_t iter_cap = 0;               // 0: no cap
    double l_th_init = 0.0;
    double rho = 0.0;
    double s_lo = 10.0 / 14.0;
    double s_hi = 14.0 / 10.0;
    std::optional<double> r_l;  // default min(4 step, 100)
    std::optional<double> r_g;  // default min(6 step, 150)
    int iter_f_l = 200;
    int iter_f_g = 20000;
    std::uint64_t seed = 0;
    DescriptorMode descriptor = DescriptorMode::Baseline;
    std::string desc_sar;
    std::string desc_ref;
    int mee_stride = 4;

    /// Throws InputError on any out-of-domain field.
    void validate() const;

    /// Solver settings for the given image extents (resolves ITER and radii).
    SolverConfig solver_config(Extent sar, Extent opt) const;

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// Canonical JSON (sorted keys, every field present, null for unset optionals).
std::string to_json(const EngineConfig& cfg);
/// Throws InputError on malformed JSON, unknown keys or wrong types.
EngineConfig parse_engine_config(const std::string& json_text);
EngineConfig load_engine_config(const std::string& path);

/// {"affine": [[a, b, tx], [c, d, ty]]}; extra keys are ignored on read.
std::string transform_to_json(const AffineTransform2D& t);
AffineTransform2D parse_transform_json(const std::string& json_text);

}  // namespace gridreg
