#pragma once

#include <span>
#include <vector>

#include "gridreg/descriptors.hpp"

namespace gridreg {

/// d(i, j) = -<f_i^S, f_j^O>, N_S x N_O, row-major f32, clamped to [-1, 1].
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(int rows, int cols, std::vector<float> data);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    float operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    std::span<const float> row(int i) const {
        return std::span<const float>(data_).subspan(static_cast<std::size_t>(i) * cols_, cols_);
    }
    std::span<const float> data() const noexcept { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<float> data_;
};

/// Throws DimensionError when the descriptor dimensions differ.
DistanceMatrix distance_matrix(const DescriptorSet& f_s, const DescriptorSet& f_o);

struct Extent {
    int width = 0;
    int height = 0;
};

/// Per-source nearest reference grid indices, ascending distance, ties to the
/// lower reference index. p_c[i] is a prefix of p_f[i].
struct CandidateSets {
    int k_c = 0;
    int k_f = 0;
    std::vector<std::vector<int>> p_c;
    std::vector<std::vector<int>> p_f;
    /// Set when k_c or k_f exceeded N_O and was clamped.
    bool clamped = false;
};

/// K_c = max(1, round(K * sqrt(area_opt / area_sar) * step / 16)), K_f = 4 K_c.
struct CandidateCounts {
    int k_c = 0;
    int k_f = 0;
};
CandidateCounts candidate_counts(int k, int step, Extent sar, Extent opt);

/// Throws InputError when k < 1.
CandidateSets candidate_sets(const DistanceMatrix& d, int k, int step, Extent sar, Extent opt);

/// The `count` smallest entries of one row as column indices (ascending d,
/// ties to lower index).
std::vector<int> smallest_k(std::span<const float> row, int count);

}  // namespace gridreg
