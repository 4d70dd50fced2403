#pragma once

#include <functional>

#include <Eigen/Dense>

#include "gridreg/eubv.hpp"

namespace gridreg {

/// Scalar function of a flat parameter block. When `grad` is non-null the
/// function also writes its analytic gradient there.
using DifferentiableFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

/// Central-difference check of the analytic gradient of `f` at `x`:
///   max_k |g_fd - g| / max(1, |g_fd|, |g|).
/// Throws InputError unless eps is in [1e-6, 1e-3]; NumericalError if any
/// probe value is non-finite.
double grad_check(const DifferentiableFn& f, const Eigen::VectorXd& x, double eps = 1e-6);

namespace eubv {

/// Concatenates the four embedding sets (column-major) into one vector.
Eigen::VectorXd flatten(const EmbeddingQuad& q);
/// Inverse of flatten for sets of shape rows x cols.
EmbeddingQuad unflatten(const Eigen::VectorXd& x, Eigen::Index rows, Eigen::Index cols);

}  // namespace eubv

}  // namespace gridreg
