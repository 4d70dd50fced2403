#include "gridreg/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Core>

#include "gridreg/error.hpp"
#include "gridreg/parallel.hpp"

namespace gridreg {

DistanceMatrix::DistanceMatrix(int rows, int cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows) * cols) {
        throw DimensionError("distance matrix payload does not match its shape");
    }
}

DistanceMatrix distance_matrix(const DescriptorSet& f_s, const DescriptorSet& f_o) {
    if (f_s.dim != f_o.dim) {
        throw DimensionError("descriptor dimensions differ: " + std::to_string(f_s.dim) + " vs " +
                             std::to_string(f_o.dim));
    }
    using RowMajor = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> s(f_s.data.data(), f_s.rows(), f_s.dim);
    const Eigen::Map<const RowMajor> o(f_o.data.data(), f_o.rows(), f_o.dim);
    std::vector<float> out(static_cast<std::size_t>(f_s.rows()) * f_o.rows());
    Eigen::Map<RowMajor> d(out.data(), f_s.rows(), f_o.rows());
    d.noalias() = -(s * o.transpose());
    for (float& v : out) v = std::clamp(v, -1.0f, 1.0f);
    return DistanceMatrix(f_s.rows(), f_o.rows(), std::move(out));
}

CandidateCounts candidate_counts(int k, int step, Extent sar, Extent opt) {
    if (k < 1) {
        throw InputError("base candidate count K must be >= 1");
    }
    if (sar.width < 1 || sar.height < 1 || opt.width < 1 || opt.height < 1 || step < 1) {
        throw InputError("candidate counts need positive extents and step");
    }
    const double ratio = std::sqrt((static_cast<double>(opt.width) * opt.height) /
                                   (static_cast<double>(sar.width) * sar.height));
    const double raw = k * ratio * step / 16.0;
    // round half up
    const int k_c = std::max(1, static_cast<int>(std::floor(raw + 0.5)));
    return {k_c, 4 * k_c};
}

std::vector<int> smallest_k(std::span<const float> row, int count) {
    std::vector<int> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0);
    count = std::min<int>(count, static_cast<int>(row.size()));
    const auto less = [&](int a, int b) { return row[a] < row[b] || (row[a] == row[b] && a < b); };
    std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), less);
    idx.resize(count);
    return idx;
}

CandidateSets candidate_sets(const DistanceMatrix& d, int k, int step, Extent sar, Extent opt) {
    const CandidateCounts counts = candidate_counts(k, step, sar, opt);
    CandidateSets sets;
    sets.k_c = std::min(counts.k_c, d.cols());
    sets.k_f = std::min(counts.k_f, d.cols());
    sets.clamped = counts.k_f > d.cols();
    sets.p_c.resize(d.rows());
    sets.p_f.resize(d.rows());
    parallel_for(static_cast<std::size_t>(d.rows()), [&](std::size_t i) {
        sets.p_f[i] = smallest_k(d.row(static_cast<int>(i)), sets.k_f);
        sets.p_c[i].assign(sets.p_f[i].begin(), sets.p_f[i].begin() + sets.k_c);
    });
    return sets;
}

}  // namespace gridreg
