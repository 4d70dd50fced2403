#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gridreg/grid.hpp"
#include "gridreg/image.hpp"

namespace gridreg {

/// One descriptor per grid point, row i for grid index i.
struct DescriptorSet {
    GridSpec grid;
    int dim = 0;
    std::vector<float> data;  // grid.size() x dim, row-major
    std::string modality;     // "sar", "opt", ...
    bool normalized = true;

    int rows() const noexcept { return grid.size(); }
    std::span<const float> row(int i) const {
        return std::span<const float>(data).subspan(static_cast<std::size_t>(i) * dim, dim);
    }
    std::span<float> row(int i) {
        return std::span<float>(data).subspan(static_cast<std::size_t>(i) * dim, dim);
    }

    friend bool operator==(const DescriptorSet&, const DescriptorSet&) = default;
};

/// Maps a square patch to a fixed-length descriptor.
using DescriptorFn = std::function<std::vector<float>(const ImageBuffer& patch)>;

/// Block-mean descriptor: the patch is split into 16x16 equal blocks, block
/// means are z-scored and L2-normalised (dim 256). Constant patches give the
/// all-zero vector. Invariant to a*I + b (a > 0), not to rotation.
/// Throws InputError unless the patch is square with side divisible by 16.
std::vector<float> baseline_descriptor(const ImageBuffer& patch);

struct PolarDescriptorParams {
    int rings = 16;
    int angles = 32;
    int harmonics = 8;
};

/// Rotation- and reflection-invariant descriptor. The patch is box-filtered,
/// sampled on `rings` concentric circles inside the inscribed disc, each ring
/// reduced to its mean and the magnitudes of angular harmonics 1..harmonics-1.
/// Rotation shifts the angular phase and reflection conjugates it, so both
/// leave the features unchanged. Samples are z-scored first (intensity-affine
/// invariant); the feature vector is z-scored and L2-normalised. Constant
/// patches give the zero vector. Dim = rings * harmonics.
std::vector<float> polar_descriptor(const ImageBuffer& patch,
                                    const PolarDescriptorParams& params = {});

DescriptorFn make_baseline_provider();
DescriptorFn make_polar_provider(PolarDescriptorParams params = {});

/// In-place L2 normalisation; rows with norm below 1e-12 become zero.
void normalize_rows(DescriptorSet& set);

/// Evaluates `provider` on every grid patch (in parallel, indexed writes) and
/// L2-normalises the rows. Throws ContractError if the provider returns
/// inconsistent or empty dimensions.
DescriptorSet compute_descriptors(const ImageBuffer& image, const GridSpec& spec,
                                  const DescriptorFn& provider, std::string modality = {});

}  // namespace gridreg
