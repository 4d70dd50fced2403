#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gridreg/affine.hpp"
#include "gridreg/error.hpp"
#include "gridreg/grid.hpp"
#include "gridreg/matcher.hpp"
#include "gridreg/rng.hpp"

namespace gridreg {

struct SolverConfig {
    std::int64_t iterations = 1000;  // coarse iterations (ITER)
    double s_lo = 10.0 / 14.0;       // area ratio bounds for 3-point samples
    double s_hi = 14.0 / 10.0;
    double l_th_init = 0.0;          // initial refinement gate
    double rho = 0.0;                // gate slack: l_th = L_min + rho
    double r_l = 64.0;               // local refinement radius, px
    double r_g = 96.0;               // global refinement radius, px
    int iter_f_l = 200;
    int iter_f_g = 20000;
    std::uint64_t seed = 0;

    /// Radii min(4 step, 100) and min(6 step, 150); other fields default.
    static SolverConfig for_step(int step);

    /// Throws InputError unless 0 < s_lo < 1 < s_hi, radii > 0, iterations >= 1
    /// and refinement counts >= 0.
    void validate() const;
};

/// ITER = round(beta * (W_O H_O + W_S H_S) / 2), at least 1, at most `cap`
/// when cap > 0.
std::int64_t default_iterations(double beta, Extent sar, Extent opt, std::int64_t cap = 0);

/// A grid correspondence (source grid index, reference grid index).
struct Correspondence {
    int src = 0;
    int ref = 0;
    friend auto operator<=>(const Correspondence&, const Correspondence&) = default;
};

struct SolverDiagnostics {
    std::int64_t iterations = 0;       // coarse iterations attempted
    std::int64_t area_rejected = 0;    // samples failing the area gate
    std::int64_t degenerate = 0;       // samples whose exact fit failed
    std::int64_t refinements = 0;      // local refinements entered
    std::int64_t improvements = 0;     // L_min updates during the coarse stage
    std::int64_t global_accepts = 0;   // accepted steps in global refinement
    double l_before_global = 0.0;
};

class NoSolutionError : public Error {
public:
    NoSolutionError(const std::string& what, SolverDiagnostics diagnostics)
        : Error(what), diagnostics_(diagnostics) {}
    const SolverDiagnostics& diagnostics() const noexcept { return diagnostics_; }

private:
    SolverDiagnostics diagnostics_;
};

/// Transform hypothesis with its loss and supporting correspondences
/// (T_hat, L_curr, P_curr).
struct WorkingState {
    AffineTransform2D t;
    double loss = 0.0;
    std::vector<Correspondence> support;  // sorted, unique
};

struct SolverState {
    AffineTransform2D t_best;
    double l_min = 0.0;
    std::vector<Correspondence> p_optimal;
    double l_th = 0.0;
};

struct SolveResult {
    AffineTransform2D t_optimal;
    double l_min = 0.0;
    std::vector<Correspondence> p_optimal;
    SolverDiagnostics diagnostics;
};

/// s_lo <= area(src) / area(dst) <= s_hi; false when area(dst) < 1e-9.
bool area_constraint_ok(std::span<const PointPair, 3> p3, double s_lo, double s_hi);

/// Reference grid index nearest to t(p):
///   i_x = clip(round((x' - patch/2) / step), 0, n_w - 1), same for y,
/// with round half away from zero and integer patch/2.
int target_index(Point2 p, const AffineTransform2D& t, const GridSpec& opt);

/// Sum over all source grid points i of d(i, target_index(center_i, t)).
double matching_loss(const AffineTransform2D& t, const DistanceMatrix& d, const GridSpec& sar,
                     const GridSpec& opt);

struct RefineStats {
    int iterations = 0;
    int accepted = 0;
};

/// Refinement stage. Each iteration draws three matches (without replacement)
/// from P_f' = {(s, o) in P_f : 1 < |o - T(s)| <= radius}, fits T' by least
/// squares over P_curr plus the draw, and keeps it iff its loss is lower.
/// The returned loss never exceeds the input loss.
WorkingState local_refine(WorkingState state, const CandidateSets& candidates,
                          const DistanceMatrix& d, const GridSpec& sar, const GridSpec& opt,
                          double radius, int iterations, CounterRng& rng,
                          RefineStats* stats = nullptr);

/// Called as monitor(iteration, l_min) whenever L_min improves; iteration is
/// -1 for the global refinement stage.
using SolverMonitor = std::function<void(std::int64_t iteration, double l_min)>;

/// Coarse-to-fine estimate of the source -> reference affine: random
/// area-gated 3-point samples from P_c scored by matching_loss, local
/// refinement for samples within the L_th gate, then global refinement of
/// the best state. Deterministic for a fixed seed regardless of thread count.
/// Throws NoSolutionError when no sample passes the area gate.
SolveResult solve(const DistanceMatrix& d, const CandidateSets& candidates, const GridSpec& sar,
                  const GridSpec& opt, const SolverConfig& cfg,
                  const SolverMonitor& monitor = {});

}  // namespace gridreg
