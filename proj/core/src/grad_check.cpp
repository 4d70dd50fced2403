#include "gridreg/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "gridreg/error.hpp"

namespace gridreg {

double grad_check(const DifferentiableFn& f, const Eigen::VectorXd& x, double eps) {
    if (!(eps >= 1e-6 && eps <= 1e-3)) {
        throw InputError("finite-difference step must lie in [1e-6, 1e-3]");
    }
    Eigen::VectorXd analytic(x.size());
    const double f0 = f(x, &analytic);
    if (!std::isfinite(f0)) {
        throw NumericalError("loss is not finite at the check point");
    }
    if (analytic.size() != x.size()) {
        throw ContractError("analytic gradient has the wrong size");
    }
    double worst = 0.0;
    Eigen::VectorXd probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        probe(k) = x(k) + eps;
        const double up = f(probe, nullptr);
        probe(k) = x(k) - eps;
        const double down = f(probe, nullptr);
        probe(k) = x(k);
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw NumericalError("loss is not finite at a probe point");
        }
        const double fd = (up - down) / (2.0 * eps);
        const double g = analytic(k);
        worst = std::max(worst, std::abs(fd - g) / std::max({1.0, std::abs(fd), std::abs(g)}));
    }
    return worst;
}

namespace eubv {

Eigen::VectorXd flatten(const EmbeddingQuad& q) {
    const Eigen::Index n = q.sar.size();
    Eigen::VectorXd x(4 * n);
    x.segment(0, n) = q.sar.reshaped();
    x.segment(n, n) = q.opt_warped.reshaped();
    x.segment(2 * n, n) = q.sar_warped.reshaped();
    x.segment(3 * n, n) = q.opt.reshaped();
    return x;
}

EmbeddingQuad unflatten(const Eigen::VectorXd& x, Eigen::Index rows, Eigen::Index cols) {
    const Eigen::Index n = rows * cols;
    if (x.size() != 4 * n) {
        throw DimensionError("flat embedding vector has the wrong length");
    }
    EmbeddingQuad q;
    q.sar = x.segment(0, n).reshaped(rows, cols);
    q.opt_warped = x.segment(n, n).reshaped(rows, cols);
    q.sar_warped = x.segment(2 * n, n).reshaped(rows, cols);
    q.opt = x.segment(3 * n, n).reshaped(rows, cols);
    return q;
}

}  // namespace eubv

}  // namespace gridreg
