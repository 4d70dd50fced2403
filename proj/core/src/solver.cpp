#include "gridreg/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "gridreg/parallel.hpp"

namespace gridreg {

namespace {

constexpr std::int64_t kBatch = 2048;

// Matching-loss evaluator with cached source grid centres.
class GridLoss {
public:
    GridLoss(const DistanceMatrix& d, const GridSpec& sar, const GridSpec& opt)
        : d_(d), opt_(opt) {
        if (d.rows() != sar.size() || d.cols() != opt.size()) {
            throw DimensionError("distance matrix is " + std::to_string(d.rows()) + "x" +
                                 std::to_string(d.cols()) + " but grids have " +
                                 std::to_string(sar.size()) + " and " +
                                 std::to_string(opt.size()) + " points");
        }
        centers_.reserve(sar.size());
        for (int i = 0; i < sar.size(); ++i) centers_.push_back(sar.center(i));
    }

    double operator()(const AffineTransform2D& t) const {
        double sum = 0.0;
        for (int i = 0; i < static_cast<int>(centers_.size()); ++i) {
            sum += d_(i, target_index(centers_[i], t, opt_));
        }
        return sum;
    }

    Point2 src_center(int i) const { return centers_[i]; }

private:
    const DistanceMatrix& d_;
    const GridSpec& opt_;
    std::vector<Point2> centers_;
};

std::array<PointPair, 3> to_pairs(const std::array<Correspondence, 3>& c, const GridSpec& sar,
                                  const GridSpec& opt) {
    return {PointPair{sar.center(c[0].src), opt.center(c[0].ref)},
            PointPair{sar.center(c[1].src), opt.center(c[1].ref)},
            PointPair{sar.center(c[2].src), opt.center(c[2].ref)}};
}

// Three distinct values in [0, n), n >= 3.
std::array<int, 3> draw_three(CounterRng& rng, int n) {
    std::array<int, 3> out{};
    out[0] = static_cast<int>(rng.uniform_index(n));
    do {
        out[1] = static_cast<int>(rng.uniform_index(n));
    } while (out[1] == out[0]);
    do {
        out[2] = static_cast<int>(rng.uniform_index(n));
    } while (out[2] == out[0] || out[2] == out[1]);
    return out;
}

WorkingState refine_impl(WorkingState state, const CandidateSets& cs, const GridLoss& loss,
                         const GridSpec& sar, const GridSpec& opt, double radius, int iterations,
                         CounterRng& rng, RefineStats* stats) {
    std::vector<Correspondence> pool;
    bool stale = true;
    std::vector<Correspondence> trial;
    std::vector<PointPair> pairs;
    for (int it = 0; it < iterations; ++it) {
        if (stale) {
            pool.clear();
            for (int s = 0; s < static_cast<int>(cs.p_f.size()); ++s) {
                const Point2 mapped = state.t(loss.src_center(s));
                for (int o : cs.p_f[s]) {
                    const double dist = distance(opt.center(o), mapped);
                    if (dist > 1.0 && dist <= radius) pool.push_back({s, o});
                }
            }
            stale = false;
        }
        // P_f' only changes with T, so an undersized pool stays undersized.
        if (pool.size() < 3) break;
        if (stats) ++stats->iterations;

        const auto pick = draw_three(rng, static_cast<int>(pool.size()));
        std::array<Correspondence, 3> drawn{pool[pick[0]], pool[pick[1]], pool[pick[2]]};
        std::sort(drawn.begin(), drawn.end());
        trial.clear();
        std::set_union(state.support.begin(), state.support.end(), drawn.begin(), drawn.end(),
                       std::back_inserter(trial));
        trial.erase(std::unique(trial.begin(), trial.end()), trial.end());

        pairs.clear();
        for (const auto& c : trial) pairs.push_back({sar.center(c.src), opt.center(c.ref)});
        AffineTransform2D candidate;
        try {
            candidate = estimate_affine_lsq(pairs);
        } catch (const DegenerateError&) {
            continue;
        }
        const double l = loss(candidate);
        if (l < state.loss) {
            state.t = candidate;
            state.loss = l;
            state.support.swap(trial);
            stale = true;
            if (stats) ++stats->accepted;
        }
    }
    return state;
}

struct CoarseSample {
    bool valid = false;
    bool area_rejected = false;
    AffineTransform2D t;
    double loss = 0.0;
    std::array<Correspondence, 3> pairs{};
};

}  // namespace

SolverConfig SolverConfig::for_step(int step) {
    SolverConfig cfg;
    cfg.r_l = std::min(4.0 * step, 100.0);
    cfg.r_g = std::min(6.0 * step, 150.0);
    return cfg;
}

void SolverConfig::validate() const {
    if (!(s_lo > 0.0 && s_lo < 1.0 && s_hi > 1.0)) {
        throw InputError("area ratio bounds must satisfy 0 < s_lo < 1 < s_hi");
    }
    if (!(r_l > 0.0) || !(r_g > 0.0)) {
        throw InputError("refinement radii must be positive");
    }
    if (iterations < 1) {
        throw InputError("solver needs at least one coarse iteration");
    }
    if (iter_f_l < 0 || iter_f_g < 0) {
        throw InputError("refinement iteration counts must be non-negative");
    }
    if (!std::isfinite(l_th_init) || !std::isfinite(rho)) {
        throw InputError("refinement gate parameters must be finite");
    }
}

std::int64_t default_iterations(double beta, Extent sar, Extent opt, std::int64_t cap) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw InputError("iteration scale beta must be positive");
    }
    const double area = (static_cast<double>(opt.width) * opt.height +
                         static_cast<double>(sar.width) * sar.height) / 2.0;
    auto iters = static_cast<std::int64_t>(std::llround(beta * area));
    iters = std::max<std::int64_t>(1, iters);
    if (cap > 0) iters = std::min(iters, cap);
    return iters;
}

bool area_constraint_ok(std::span<const PointPair, 3> p3, double s_lo, double s_hi) {
    const double src = triangle_area(p3[0].src, p3[1].src, p3[2].src);
    const double dst = triangle_area(p3[0].dst, p3[1].dst, p3[2].dst);
    if (dst < kMinTriangleArea) return false;
    const double ratio = src / dst;
    return ratio >= s_lo && ratio <= s_hi;
}

int target_index(Point2 p, const AffineTransform2D& t, const GridSpec& opt) {
    const Point2 q = t(p);
    const int half = opt.patch / 2;
    const double ix = std::clamp(std::round((q.x - half) / opt.step), 0.0,
                                 static_cast<double>(opt.n_w - 1));
    const double iy = std::clamp(std::round((q.y - half) / opt.step), 0.0,
                                 static_cast<double>(opt.n_h - 1));
    return static_cast<int>(iy) * opt.n_w + static_cast<int>(ix);
}

double matching_loss(const AffineTransform2D& t, const DistanceMatrix& d, const GridSpec& sar,
                     const GridSpec& opt) {
    return GridLoss(d, sar, opt)(t);
}

WorkingState local_refine(WorkingState state, const CandidateSets& candidates,
                          const DistanceMatrix& d, const GridSpec& sar, const GridSpec& opt,
                          double radius, int iterations, CounterRng& rng, RefineStats* stats) {
    const GridLoss loss(d, sar, opt);
    std::sort(state.support.begin(), state.support.end());
    state.support.erase(std::unique(state.support.begin(), state.support.end()),
                        state.support.end());
    return refine_impl(std::move(state), candidates, loss, sar, opt, radius, iterations, rng,
                       stats);
}

SolveResult solve(const DistanceMatrix& d, const CandidateSets& cs, const GridSpec& sar,
                  const GridSpec& opt, const SolverConfig& cfg, const SolverMonitor& monitor) {
    cfg.validate();
    const GridLoss loss(d, sar, opt);
    const int n_src = sar.size();
    if (static_cast<int>(cs.p_c.size()) != n_src || static_cast<int>(cs.p_f.size()) != n_src) {
        throw DimensionError("candidate sets do not cover the source grid");
    }
    SolverDiagnostics diag;
    if (n_src < 3 || std::any_of(cs.p_c.begin(), cs.p_c.end(),
                                 [](const auto& list) { return list.empty(); })) {
        throw NoSolutionError("need at least three source grid points with candidates", diag);
    }

    // Stream layout: coarse sample t -> 2t, its local refinement -> 2t + 1,
    // global refinement -> 2 * iterations.
    const auto coarse_sample = [&](std::int64_t t) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(2 * t));
        CoarseSample out;
        auto src = draw_three(rng, n_src);
        std::sort(src.begin(), src.end());
        for (int k = 0; k < 3; ++k) {
            const auto& list = cs.p_c[src[k]];
            out.pairs[k] = {src[k], list[rng.uniform_index(list.size())]};
        }
        const auto p3 = to_pairs(out.pairs, sar, opt);
        if (!area_constraint_ok(p3, cfg.s_lo, cfg.s_hi)) {
            out.area_rejected = true;
            return out;
        }
        try {
            out.t = estimate_affine_from_3(p3);
        } catch (const DegenerateError&) {
            return out;
        }
        out.loss = loss(out.t);
        out.valid = true;
        return out;
    };

    std::optional<WorkingState> best;
    double l_th = cfg.l_th_init;
    std::vector<CoarseSample> batch;
    for (std::int64_t start = 0; start < cfg.iterations; start += kBatch) {
        const std::int64_t count = std::min(kBatch, cfg.iterations - start);
        batch.assign(static_cast<std::size_t>(count), {});
        parallel_for(static_cast<std::size_t>(count),
                     [&](std::size_t k) { batch[k] = coarse_sample(start + static_cast<std::int64_t>(k)); });

        for (std::int64_t k = 0; k < count; ++k) {
            const std::int64_t t = start + k;
            const CoarseSample& s = batch[static_cast<std::size_t>(k)];
            ++diag.iterations;
            if (!s.valid) {
                (s.area_rejected ? diag.area_rejected : diag.degenerate) += 1;
                continue;
            }
            WorkingState w{s.t, s.loss, {s.pairs.begin(), s.pairs.end()}};
            std::sort(w.support.begin(), w.support.end());
            w.support.erase(std::unique(w.support.begin(), w.support.end()), w.support.end());
            if (w.loss <= l_th && cfg.iter_f_l > 0) {
                ++diag.refinements;
                CounterRng rng(cfg.seed, static_cast<std::uint64_t>(2 * t + 1));
                w = refine_impl(std::move(w), cs, loss, sar, opt, cfg.r_l, cfg.iter_f_l, rng,
                                nullptr);
            }
            if (!best || w.loss < best->loss) {
                best = std::move(w);
                l_th = best->loss + cfg.rho;
                ++diag.improvements;
                if (monitor) monitor(t, best->loss);
            }
        }
    }
    if (!best) {
        throw NoSolutionError("no 3-point sample passed the area constraint in " +
                                  std::to_string(diag.iterations) + " iterations",
                              diag);
    }

    diag.l_before_global = best->loss;
    if (cfg.iter_f_g > 0) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(2 * cfg.iterations));
        RefineStats stats;
        WorkingState refined =
            refine_impl(*best, cs, loss, sar, opt, cfg.r_g, cfg.iter_f_g, rng, &stats);
        diag.global_accepts = stats.accepted;
        if (refined.loss < best->loss) {
            best = std::move(refined);
            if (monitor) monitor(-1, best->loss);
        }
    }

    SolveResult result;
    result.t_optimal = best->t;
    result.l_min = best->loss;
    result.p_optimal = std::move(best->support);
    result.diagnostics = diag;
    return result;
}

}  // namespace gridreg
