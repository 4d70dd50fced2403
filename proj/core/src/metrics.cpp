#include "gridreg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "gridreg/error.hpp"

namespace gridreg {

namespace {

std::vector<double> overlap_errors(const AffineTransform2D& t_hat, const AffineTransform2D& t_gt,
                                   Extent sar, Extent opt, int stride) {
    if (stride < 1) {
        throw InputError("MEE stride must be >= 1");
    }
    std::vector<double> errors;
    const double max_x = opt.width - 1;
    const double max_y = opt.height - 1;
    for (int y = 0; y < sar.height; y += stride) {
        for (int x = 0; x < sar.width; x += stride) {
            const Point2 p{static_cast<double>(x), static_cast<double>(y)};
            const Point2 gt = t_gt(p);
            if (gt.x < 0.0 || gt.y < 0.0 || gt.x > max_x || gt.y > max_y) continue;
            errors.push_back(distance(t_hat(p), gt));
        }
    }
    return errors;
}

}  // namespace

double median(std::vector<double> values) {
    if (values.empty()) {
        throw EmptyInputError("median of an empty set");
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

double mee(const AffineTransform2D& t_hat, const AffineTransform2D& t_gt, Extent sar, Extent opt,
           int stride) {
    auto errors = overlap_errors(t_hat, t_gt, sar, opt, stride);
    if (errors.empty()) {
        throw NoOverlapError("ground-truth transform maps no source pixel into the reference");
    }
    return median(std::move(errors));
}

double success_rate(std::span<const double> mees, double th) {
    if (!(th > 0.0)) {
        throw InputError("success threshold must be positive");
    }
    if (mees.empty()) {
        throw EmptyInputError("success rate over an empty list is undefined");
    }
    const auto hits = std::count_if(mees.begin(), mees.end(), [th](double m) { return m <= th; });
    return static_cast<double>(hits) / static_cast<double>(mees.size());
}

EvalReport evaluate(const AffineTransform2D& t_hat, const AffineTransform2D& t_gt, Extent sar,
                    Extent opt, int stride, std::span<const double> thresholds) {
    auto errors = overlap_errors(t_hat, t_gt, sar, opt, stride);
    if (errors.empty()) {
        throw NoOverlapError("ground-truth transform maps no source pixel into the reference");
    }
    EvalReport report;
    report.n_eval_points = static_cast<long long>(errors.size());
    report.mee = median(std::move(errors));
    for (double th : thresholds) report.success[th] = report.mee <= th;
    return report;
}

}  // namespace gridreg
