#pragma once

// Synthetic ground truth with a closed-form optimal ROC curve.
//
// A random complete axis tree of depth D_gt over diag-transformed pair
// space [0,1]^q x [0,1]^q splits into L+1 = 2^D_gt cells C_0..C_L.
// Conditional cell masses follow geometric profiles
//   delta_plus[l]  ~ delta^(l/L),   delta_minus[l] ~ delta^(-l/L),
// each normalized to sum 1, so the likelihood ratio delta^(2l/L) decays
// in l: low-index cells hold the most-similar pairs. The optimal scorer
// is any increasing function of that ratio, and the optimal ROC is the
// broken line through the cumulative masses taken in decreasing-ratio
// order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "simtree/eval.hpp"
#include "simtree/pairs.hpp"

namespace simtree {

// Optimal ROC for explicit per-cell masses (already normalized).
inline RocCurve roc_from_masses(std::vector<double> dp, std::vector<double> dm) {
    if (dp.size() != dm.size() || dp.empty()) throw Error("mass vectors must match and be nonempty");
    std::vector<std::size_t> order(dp.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ra = dp[a] / dm[a], rb = dp[b] / dm[b];
        return ra > rb || (ra == rb && a < b);
    });
    std::vector<RocCurve::Knot> knots{{0.0, 0.0}};
    double ca = 0, cb = 0;
    for (const auto l : order) {
        ca += dm[l];
        cb += dp[l];
        knots.push_back({ca, cb});
    }
    return RocCurve(std::move(knots));
}

namespace detail {

struct Interval {
    double lo = 0, hi = 0;
    bool lo_open = false;
    bool contains(double v) const { return (lo_open ? v > lo : v >= lo) && v <= hi; }
};

// Area of {(u,v) in [0,1]^2 : a <= u+v <= b, c <= |u-v| <= d}. In the
// rotated coordinates s = u+v, w = u-v the cross-section length at s is
// 2 * max(0, min(d, s, 2-s) - c) and du dv = ds dw / 2, so the area is
// the integral of max(0, min(d, s, 2-s) - c), a piecewise-linear
// integrand whose only kinks sit at {c, d, 2-c, 2-d, 1}. Trapezoid
// integration over those breakpoints is exact.
inline double band_area(double a, double b, double c, double d) {
    a = std::max(a, 0.0);
    b = std::min(b, 2.0);
    c = std::max(c, 0.0);
    d = std::min(d, 1.0);
    if (b <= a || d <= c) return 0;
    double pts[7] = {a, b, c, 2 - c, d, 2 - d, 1.0};
    std::sort(std::begin(pts), std::end(pts));
    auto f = [&](double s) { return std::max(0.0, std::min({d, s, 2 - s}) - c); };
    double area = 0;
    double prev = a;
    for (const double p : pts) {
        if (p <= prev || p > b) continue;
        area += (p - prev) * (f(prev) + f(p)) / 2;
        prev = p;
    }
    return area;
}

}  // namespace detail

class SyntheticModel {
  public:
    struct Params {
        std::size_t gt_depth = 3;
        std::size_t q = 3;
        double delta = 0.01;
        double p_plus = 0.5;
    };

    struct GtNode {
        int feature = 0;
        double threshold = 0;
    };

    // Per-cell, per original coordinate i: the admissible region for
    // (x_i, x'_i), kept both as transformed-unit intervals (agreeing
    // exactly with tree routing) and as a sampling bounding box.
    struct CoordRegion {
        detail::Interval s, w;  // intervals on (x+x')/sqrt2 and |x-x'|/sqrt2
        double box_lo = 0, box_hi = 1;
        double area = 1;
    };

    struct Cell {
        std::vector<CoordRegion> coord;  // size q
        double volume = 1;
    };

    static constexpr double kMinCellProbability = 1e-4;

    Params params;
    std::vector<GtNode> nodes;  // complete tree, node (d,k) at (1<<d)-1+k
    std::vector<double> delta_plus, delta_minus;
    std::vector<Cell> cells;
    RngSeed seed = 0;

    std::size_t cell_count() const { return std::size_t(1) << params.gt_depth; }
    SymmetricTransform gt_transform() const { return {TransformKind::diag, params.q}; }

    // Draws trees until every cell keeps probability >= 1e-4 under the
    // uniform pair proposal (exact per-coordinate band areas, no
    // Monte Carlo estimate needed).
    static SyntheticModel generate(Params p, RngSeed seed) {
        validate(p);
        for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
            SyntheticModel m = draw_tree(p, Rng(derive(seed, "synth.tree", attempt)));
            double min_vol = 2;
            for (const auto& c : m.cells) min_vol = std::min(min_vol, c.volume);
            if (min_vol >= kMinCellProbability) {
                m.seed = seed;
                m.fill_masses();
                return m;
            }
        }
        throw Error("could not draw a ground-truth tree whose cells all keep probability >= 1e-4");
    }

    // Rebuild from stored parts (model files, hand-built fixtures).
    static SyntheticModel from_parts(Params p, std::vector<GtNode> nodes, RngSeed seed) {
        validate(p);
        if (nodes.size() != (std::size_t(1) << p.gt_depth) - 1)
            throw Error("ground-truth node count does not match depth");
        SyntheticModel m;
        m.params = p;
        m.nodes = std::move(nodes);
        m.seed = seed;
        m.rebuild_cells();
        m.fill_masses();
        return m;
    }

    std::size_t cell_of_fx(const double* fx) const {
        std::size_t d = 0, k = 0;
        while (d < params.gt_depth) {
            const GtNode& nd = nodes[(std::size_t(1) << d) - 1 + k];
            k = 2 * k + (fx[nd.feature] <= nd.threshold ? 0 : 1);
            ++d;
        }
        return k;
    }

    std::size_t cell_of(const std::vector<double>& x, const std::vector<double>& xp) const {
        return cell_of_fx(gt_transform().apply(x, xp).data());
    }

    // Likelihood ratio of the landed cell; the optimal similarity score.
    double oracle_score_fx(const double* fx) const {
        const std::size_t l = cell_of_fx(fx);
        return delta_plus[l] / delta_minus[l];
    }
    double oracle_score(const std::vector<double>& x, const std::vector<double>& xp) const {
        return oracle_score_fx(gt_transform().apply(x, xp).data());
    }

    RocCurve optimal_roc() const { return roc_from_masses(delta_plus, delta_minus); }
    double optimal_auc() const { return auc(optimal_roc()); }

    // n pairs, each from its own derived stream: draw the pair class from
    // p_plus, the cell from that class's masses, then the coordinates
    // uniformly inside the cell. Cells factor across original
    // coordinates, so each (x_i, x'_i) is rejection-sampled in its own
    // 2-D region; acceptance uses the same interval arithmetic as
    // routing, so every accepted pair routes back to its cell.
    RawPairs sample_raw(std::size_t n, RngSeed sample_seed) const {
        RawPairs out;
        out.q = params.q;
        out.x.resize(n * params.q);
        out.xp.resize(n * params.q);
        out.z.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            Rng rng(derive(sample_seed, "synth.pair", t));
            const bool pos = rng.next_double() < params.p_plus;
            out.z[t] = pos ? std::int8_t(1) : std::int8_t(-1);
            const auto& masses = pos ? delta_plus : delta_minus;
            double u = rng.next_double();
            std::size_t cell = masses.size() - 1;
            double acc = 0;
            for (std::size_t l = 0; l < masses.size(); ++l) {
                acc += masses[l];
                if (u < acc) {
                    cell = l;
                    break;
                }
            }
            sample_in_cell(cell, rng, &out.x[t * params.q], &out.xp[t * params.q]);
        }
        return out;
    }

    double cell_volume(std::size_t l) const { return cells[l].volume; }

  private:
    static void validate(const Params& p) {
        if (p.gt_depth < 1 || p.gt_depth > 12)
            throw Error("ground-truth depth must lie in [1, 12]");
        if (p.q < 1) throw Error("dimension q must be at least 1");
        if (!(p.delta > 0 && p.delta < 1)) throw Error("delta must lie strictly inside (0,1)");
        if (!(p.p_plus > 0 && p.p_plus < 1)) throw Error("p_plus must lie strictly inside (0,1)");
    }

    static SyntheticModel draw_tree(const Params& p, Rng rng) {
        SyntheticModel m;
        m.params = p;
        const std::size_t dim = 2 * p.q;
        m.nodes.resize((std::size_t(1) << p.gt_depth) - 1);
        std::vector<std::vector<detail::Interval>> level{domain_box(p.q)};
        for (std::size_t d = 0; d < p.gt_depth; ++d) {
            std::vector<std::vector<detail::Interval>> next(std::size_t(2) << d);
            for (std::size_t k = 0; k < level.size(); ++k) {
                GtNode& nd = m.nodes[(std::size_t(1) << d) - 1 + k];
                nd.feature = int(rng.next_below(dim));
                const detail::Interval& iv = level[k][nd.feature];
                nd.threshold = rng.uniform(iv.lo, iv.hi);
                auto left = level[k], right = level[k];
                left[nd.feature].hi = nd.threshold;
                right[nd.feature].lo = nd.threshold;
                right[nd.feature].lo_open = true;
                next[2 * k] = std::move(left);
                next[2 * k + 1] = std::move(right);
            }
            level = std::move(next);
        }
        m.cells_from_boxes(level);
        return m;
    }

    static std::vector<detail::Interval> domain_box(std::size_t q) {
        std::vector<detail::Interval> box(2 * q);
        for (std::size_t i = 0; i < q; ++i) {
            box[i] = {0.0, 2.0 / std::numbers::sqrt2, false};
            box[q + i] = {0.0, 1.0 / std::numbers::sqrt2, false};
        }
        return box;
    }

    void rebuild_cells() {
        std::vector<std::vector<detail::Interval>> level{domain_box(params.q)};
        for (std::size_t d = 0; d < params.gt_depth; ++d) {
            std::vector<std::vector<detail::Interval>> next(std::size_t(2) << d);
            for (std::size_t k = 0; k < level.size(); ++k) {
                const GtNode& nd = nodes[(std::size_t(1) << d) - 1 + k];
                auto left = level[k], right = level[k];
                left[nd.feature].hi = std::min(left[nd.feature].hi, nd.threshold);
                right[nd.feature].lo = std::max(right[nd.feature].lo, nd.threshold);
                right[nd.feature].lo_open = true;
                next[2 * k] = std::move(left);
                next[2 * k + 1] = std::move(right);
            }
            level = std::move(next);
        }
        cells_from_boxes(level);
    }

    void cells_from_boxes(const std::vector<std::vector<detail::Interval>>& boxes) {
        cells.clear();
        cells.reserve(boxes.size());
        for (const auto& box : boxes) {
            Cell c;
            c.volume = 1;
            for (std::size_t i = 0; i < params.q; ++i) {
                CoordRegion r;
                r.s = box[i];
                r.w = box[params.q + i];
                const double a = r.s.lo * std::numbers::sqrt2, b = r.s.hi * std::numbers::sqrt2;
                const double cw = r.w.lo * std::numbers::sqrt2, dw = r.w.hi * std::numbers::sqrt2;
                r.area = detail::band_area(a, b, cw, dw);
                r.box_lo = std::max(0.0, a - 1.0 - 1e-12);
                r.box_hi = std::min(1.0, b + 1e-12);
                c.volume *= r.area;
                c.coord.push_back(r);
            }
            cells.push_back(std::move(c));
        }
    }

    void fill_masses() {
        const std::size_t L = cell_count() - 1;
        delta_plus.resize(L + 1);
        delta_minus.resize(L + 1);
        double sp = 0, sm = 0;
        for (std::size_t l = 0; l <= L; ++l) {
            delta_plus[l] = std::pow(params.delta, double(l) / double(L));
            delta_minus[l] = std::pow(params.delta, -double(l) / double(L));
            sp += delta_plus[l];
            sm += delta_minus[l];
        }
        for (std::size_t l = 0; l <= L; ++l) {
            delta_plus[l] /= sp;
            delta_minus[l] /= sm;
        }
    }

    void sample_in_cell(std::size_t cell, Rng& rng, double* x, double* xp) const {
        const Cell& c = cells[cell];
        for (std::size_t i = 0; i < params.q; ++i) {
            const CoordRegion& r = c.coord[i];
            bool ok = false;
            for (std::uint64_t attempt = 0; attempt < 1000000; ++attempt) {
                const double u = rng.uniform(r.box_lo, r.box_hi);
                const double v = rng.uniform(r.box_lo, r.box_hi);
                const double s = (u + v) / std::numbers::sqrt2;
                const double w = std::fabs(u - v) / std::numbers::sqrt2;
                if (r.s.contains(s) && r.w.contains(w)) {
                    x[i] = u;
                    xp[i] = v;
                    ok = true;
                    break;
                }
            }
            if (!ok)
                throw Error("rejection budget exhausted while sampling cell " + std::to_string(cell) +
                            "; the ground truth is degenerate, regenerate it with another seed");
        }
    }
};

}  // namespace simtree
