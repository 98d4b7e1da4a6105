#pragma once

// Cost-sensitive node classifiers ("leaf rankers"). fit_split trains a
// depth-limited classifier over transformed pair features where
// misclassifying a negative pair costs p and misclassifying a positive
// costs 1-p. With p set to the slice's positive fraction, minimizing this
// weighted error is equivalent to maximizing the split's ranking gain
// Lambda (see treerank.hpp): on integer counts,
//   lambda_num = n_plus * n_minus - (n_plus * #FP + n_minus * #FN).

#include <span>

#include "simtree/pairs.hpp"

namespace simtree {

enum class LeafFamily { stump, tree, straddle };

inline const char* to_string(LeafFamily f) {
    switch (f) {
        case LeafFamily::stump: return "stump";
        case LeafFamily::tree: return "tree";
        default: return "straddle";
    }
}

inline LeafFamily parse_leaf_family(std::string_view s) {
    if (s == "stump") return LeafFamily::stump;
    if (s == "tree") return LeafFamily::tree;
    if (s == "straddle") return LeafFamily::straddle;
    throw Error("unknown leaf family \"" + std::string(s) + "\" (expected stump, tree or straddle)");
}

struct LeafConfig {
    LeafFamily family = LeafFamily::tree;
    std::size_t leaf_depth = 5;
    std::size_t min_split_rows = 8;
};

// Binary classifier over transformed pair features.
//   axis nodes:     fx[feature] <= threshold          goes left
//   straddle nodes: (fx[feature] >= A) xor (fx[feature+q] >= A) goes left,
//                   i.e. the two instances sit on opposite sides of A
//                   (minmax transform only, where fx[i]=max and fx[i+q]=min)
struct SymClassifier {
    enum class Op : std::uint8_t { leaf, axis, straddle };
    struct Node {
        Op op = Op::leaf;
        std::int8_t label = 1;  // leaves only
        int feature = -1;
        double threshold = 0;
        int left = -1, right = -1;
    };

    std::size_t dim = 0;  // 2q
    std::vector<Node> nodes;

    std::int8_t predict(const double* fx) const {
        int cur = 0;
        for (;;) {
            const Node& nd = nodes[cur];
            if (nd.op == Op::leaf) return nd.label;
            bool go_left;
            if (nd.op == Op::axis) {
                go_left = fx[nd.feature] <= nd.threshold;
            } else {
                go_left = (fx[nd.feature] >= nd.threshold) !=
                          (fx[nd.feature + dim / 2] >= nd.threshold);
            }
            cur = go_left ? nd.left : nd.right;
        }
    }

    std::int8_t predict_checked(const std::vector<double>& fx) const {
        if (fx.size() != dim)
            throw Error("classifier expects " + std::to_string(dim) + " features, got " +
                        std::to_string(fx.size()));
        return predict(fx.data());
    }

    std::size_t depth() const {
        std::size_t best = 0;
        std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            const auto [i, d] = stack.back();
            stack.pop_back();
            const Node& nd = nodes[i];
            if (nd.op == Op::leaf) {
                best = std::max(best, d);
            } else {
                stack.push_back({nd.left, d + 1});
                stack.push_back({nd.right, d + 1});
            }
        }
        return best;
    }
};

inline double positive_fraction(const PairBatch& b, std::span<const std::uint32_t> rows) {
    if (rows.empty()) throw Error("positive fraction of an empty slice is undefined");
    std::int64_t pos = 0;
    for (const auto r : rows)
        if (b.z[r] > 0) ++pos;
    return double(pos) / double(rows.size());
}

namespace detail {

struct SplitCand {
    bool found = false;
    double cost = 0;
    int feature = -1;
    double threshold = 0;
    bool straddle = false;
};

class LeafFitter {
  public:
    LeafFitter(const PairBatch& b, double p, const LeafConfig& cfg)
        : b_(b), cfg_(cfg), wpos_(1 - p), wneg_(p) {}

    SymClassifier fit(std::vector<std::uint32_t> rows) {
        out_.dim = b_.dim;
        const std::size_t max_depth = cfg_.family == LeafFamily::stump ? 1 : cfg_.leaf_depth;
        build(std::move(rows), 0, max_depth);
        return std::move(out_);
    }

  private:
    double row_cost(std::uint32_t r) const {
        return b_.weight[r] * (b_.z[r] > 0 ? wpos_ : wneg_);
    }

    int build(std::vector<std::uint32_t> rows, std::size_t depth, std::size_t max_depth) {
        double wp = 0, wn = 0;  // cost of misclassifying all positives / negatives here
        for (const auto r : rows) (b_.z[r] > 0 ? wp : wn) += row_cost(r);
        const int self = int(out_.nodes.size());
        out_.nodes.emplace_back();
        out_.nodes[self].label = wp >= wn ? std::int8_t(1) : std::int8_t(-1);
        const double leaf_cost = std::min(wp, wn);
        // min_split_rows bounds the recursion but never blocks the root split
        const bool can_split = depth < max_depth && wp > 0 && wn > 0 &&
                               (depth == 0 || rows.size() >= cfg_.min_split_rows);
        if (!can_split) return self;

        const SplitCand cand = cfg_.family == LeafFamily::straddle ? best_straddle(rows, wp, wn)
                                                                   : best_axis(rows, wp, wn);
        if (!cand.found || !(cand.cost < leaf_cost)) return self;

        std::vector<std::uint32_t> left, right;
        for (const auto r : rows) {
            const double* fx = b_.row(r);
            bool go_left;
            if (cand.straddle)
                go_left = (fx[cand.feature] >= cand.threshold) !=
                          (fx[cand.feature + b_.dim / 2] >= cand.threshold);
            else
                go_left = fx[cand.feature] <= cand.threshold;
            (go_left ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        out_.nodes[self].op = cand.straddle ? SymClassifier::Op::straddle : SymClassifier::Op::axis;
        out_.nodes[self].feature = cand.feature;
        out_.nodes[self].threshold = cand.threshold;
        const int l = build(std::move(left), depth + 1, max_depth);
        const int r = build(std::move(right), depth + 1, max_depth);
        out_.nodes[self].left = l;
        out_.nodes[self].right = r;
        return self;
    }

    // Candidate thresholds are midpoints between consecutive distinct
    // values; ties resolved toward the lowest feature then the lowest
    // threshold by visiting candidates in that order and keeping the
    // first strict improvement.
    SplitCand best_axis(const std::vector<std::uint32_t>& rows, double wp, double wn) {
        SplitCand best;
        std::vector<std::uint32_t> idx(rows);
        for (int j = 0; j < int(b_.dim); ++j) {
            std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t c) {
                const double va = b_.row(a)[j], vc = b_.row(c)[j];
                return va < vc || (va == vc && a < c);
            });
            double lp = 0, ln = 0;
            for (std::size_t t = 0; t + 1 < idx.size(); ++t) {
                const auto r = idx[t];
                (b_.z[r] > 0 ? lp : ln) += row_cost(r);
                const double v = b_.row(r)[j], nv = b_.row(idx[t + 1])[j];
                if (v == nv) continue;
                const double cost = std::min(lp, ln) + std::min(wp - lp, wn - ln);
                if (!best.found || cost < best.cost)
                    best = {true, cost, j, (v + nv) / 2, false};
            }
        }
        return best;
    }

    // Sweeps A upward; a row straddles A exactly while min < A <= max, so
    // it enters the straddle set when A passes its min value and leaves
    // when A passes its max value.
    SplitCand best_straddle(const std::vector<std::uint32_t>& rows, double wp, double wn) {
        SplitCand best;
        const std::size_t q = b_.dim / 2;
        std::vector<std::pair<double, std::uint32_t>> by_min, by_max;
        std::vector<double> vals;
        for (int i = 0; i < int(q); ++i) {
            by_min.clear();
            by_max.clear();
            vals.clear();
            for (const auto r : rows) {
                by_max.emplace_back(b_.row(r)[i], r);
                by_min.emplace_back(b_.row(r)[i + q], r);
                vals.push_back(b_.row(r)[i]);
                vals.push_back(b_.row(r)[i + q]);
            }
            std::sort(by_min.begin(), by_min.end());
            std::sort(by_max.begin(), by_max.end());
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());

            double sp = 0, sn = 0;  // weights currently straddling
            std::size_t pi = 0, po = 0;
            for (std::size_t t = 0; t < vals.size(); ++t) {
                const double v = vals[t];
                for (; pi < by_min.size() && by_min[pi].first == v; ++pi)
                    (b_.z[by_min[pi].second] > 0 ? sp : sn) += row_cost(by_min[pi].second);
                for (; po < by_max.size() && by_max[po].first == v; ++po)
                    (b_.z[by_max[po].second] > 0 ? sp : sn) -= row_cost(by_max[po].second);
                if (t + 1 == vals.size()) break;
                const double cost = std::min(sp, sn) + std::min(wp - sp, wn - sn);
                if (!best.found || cost < best.cost)
                    best = {true, cost, i, (v + vals[t + 1]) / 2, true};
            }
        }
        return best;
    }

    const PairBatch& b_;
    const LeafConfig& cfg_;
    double wpos_, wneg_;
    SymClassifier out_;
};

}  // namespace detail

inline SymClassifier fit_split(const PairBatch& b, std::span<const std::uint32_t> rows, double p,
                               const LeafConfig& cfg) {
    if (rows.empty()) throw Error("fit_split: empty slice");
    if (!(p > 0 && p < 1))
        throw Error("fit_split: p must lie strictly inside (0,1); pure slices cannot be split");
    if (cfg.leaf_depth < 1) throw Error("fit_split: leaf depth must be at least 1");
    if (cfg.family == LeafFamily::straddle && b.transform != TransformKind::minmax)
        throw Error("straddle leaf family requires the minmax transform");
    detail::LeafFitter fitter(b, p, cfg);
    return fitter.fit(std::vector<std::uint32_t>(rows.begin(), rows.end()));
}

}  // namespace simtree
