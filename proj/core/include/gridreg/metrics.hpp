#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "gridreg/affine.hpp"
#include "gridreg/matcher.hpp"

namespace gridreg {

inline constexpr std::array<double, 4> kDefaultThresholds{25.0, 50.0, 75.0, 100.0};

/// Median over source pixels (x, y) = (k*stride, l*stride) whose ground-truth
/// image t_gt(x, y) lies in [0, W_O - 1] x [0, H_O - 1] of
/// |t_hat(x, y) - t_gt(x, y)|. Even counts average the middle pair.
/// Throws NoOverlapError when no pixel qualifies, InputError for stride < 1.
double mee(const AffineTransform2D& t_hat, const AffineTransform2D& t_gt, Extent sar, Extent opt,
           int stride = 4);

/// Median with the even-count convention above. Throws EmptyInputError.
double median(std::vector<double> values);

/// Fraction of entries with mee <= th. Throws EmptyInputError on an empty list
/// and InputError for th <= 0.
double success_rate(std::span<const double> mees, double th);

struct EvalReport {
    double mee = 0.0;
    long long n_eval_points = 0;
    std::map<double, bool> success;
};

EvalReport evaluate(const AffineTransform2D& t_hat, const AffineTransform2D& t_gt, Extent sar,
                    Extent opt, int stride = 4,
                    std::span<const double> thresholds = kDefaultThresholds);

}  // namespace gridreg
