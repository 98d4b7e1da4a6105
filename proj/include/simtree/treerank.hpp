#pragma once

// Similarity trees learned by recursive ROC optimization.
//
// A tree of depth D carves pair space into 2^D ordered cells. Node (d,k)
// spans knots [k, k+1] of the level-d ROC approximation; splitting it
// inserts a knot at the empirical rates of the predicted-positive region
// chosen by a cost-sensitive leaf classifier. The left child always holds
// the higher-similarity region, so the leaf index k read off at depth D
// gives the score 2^D - k.
//
// Bookkeeping is exact: knots are stored as integer cumulative
// (negative, positive) pair counts, alpha = cum_neg/n_neg and
// beta = cum_pos/n_pos are derived on demand, and level-d knots are the
// final knots at stride 2^(D-d). Nodes that are pure, too small, or whose
// best split has Lambda <= 0 become pass-through: everything routes left
// and the right span is empty, which keeps the complete-tree indexing.

#include <numeric>

#include "simtree/eval.hpp"
#include "simtree/leafrank.hpp"

namespace simtree {

struct SimilarityTree {
    enum class NodeState : std::uint8_t { split, pass, merged };
    struct Node {
        NodeState state = NodeState::pass;
        SymClassifier cls;  // split nodes only
    };

    std::size_t depth = 0;
    SymmetricTransform transform;
    std::vector<Node> nodes;                      // level order, node (d,k) at (1<<d)-1+k
    std::vector<std::int64_t> cum_neg, cum_pos;   // training counts at the 2^D+1 knot boundaries
    std::int64_t n_neg = 1, n_pos = 1;
    std::vector<std::uint32_t> active_knots;      // knot indices kept after pruning

    std::size_t leaf_count() const { return std::size_t(1) << depth; }

    const Node& node_at(std::size_t d, std::size_t k) const {
        return nodes[(std::size_t(1) << d) - 1 + k];
    }
    Node& node_at(std::size_t d, std::size_t k) {
        return nodes[(std::size_t(1) << d) - 1 + k];
    }

    double knot_alpha(std::size_t d, std::size_t k) const {
        return double(cum_neg[k << (depth - d)]) / double(n_neg);
    }
    double knot_beta(std::size_t d, std::size_t k) const {
        return double(cum_pos[k << (depth - d)]) / double(n_pos);
    }

    // Score in {1, ..., 2^D}; merged subtrees inherit their span's top
    // score, matching 2^D (1 - k / 2^d) for a terminal node (d,k).
    int score_fx(const double* fx) const {
        std::size_t d = 0, k = 0;
        while (d < depth) {
            const Node& nd = node_at(d, k);
            if (nd.state == NodeState::merged) break;
            const bool left = nd.state == NodeState::pass || nd.cls.predict(fx) > 0;
            k = 2 * k + (left ? 0 : 1);
            ++d;
        }
        return int((std::size_t(1) << depth) - (k << (depth - d)));
    }

    int score(const std::vector<double>& x, const std::vector<double>& xp) const {
        return score_fx(transform.apply(x, xp).data());
    }

    // ROC of the training batch: the broken line through the surviving knots.
    RocCurve empirical_roc() const {
        std::vector<RocCurve::Knot> knots;
        knots.reserve(active_knots.size());
        for (const auto i : active_knots)
            knots.push_back({double(cum_neg[i]) / double(n_neg), double(cum_pos[i]) / double(n_pos)});
        return RocCurve(std::move(knots));
    }

    // Trapezoid area under empirical_roc, accumulated on integers.
    double empirical_auc() const {
        std::int64_t twice_area_num = 0;
        for (std::size_t t = 1; t < active_knots.size(); ++t) {
            const auto i = active_knots[t - 1], j = active_knots[t];
            twice_area_num += (cum_neg[j] - cum_neg[i]) * (cum_pos[i] + cum_pos[j]);
        }
        return double(twice_area_num) / (2.0 * double(n_neg) * double(n_pos));
    }

    // Ranking gain of the split stored at (d,k), from the knot counts.
    // Pass-through nodes give exactly 0.
    double lambda_of(std::size_t d, std::size_t k) const {
        const std::size_t stride = std::size_t(1) << (depth - d);
        const std::size_t lo = k * stride, hi = (k + 1) * stride, mid = lo + stride / 2;
        const std::int64_t num = (cum_neg[hi] - cum_neg[lo]) * (cum_pos[mid] - cum_pos[lo]) -
                                 (cum_pos[hi] - cum_pos[lo]) * (cum_neg[mid] - cum_neg[lo]);
        return double(num) / (double(n_neg) * double(n_pos));
    }

    // AUC as 1/2 plus half the sum of every split's ranking gain. Agrees
    // with empirical_auc() because each split adds the triangle area
    // Lambda/2 above the chord it refines.
    double auc_lambda_sum() const {
        double sum = 0;
        std::vector<std::pair<std::size_t, std::size_t>> stack;
        if (depth > 0) stack.push_back({0, 0});
        while (!stack.empty()) {
            const auto [d, k] = stack.back();
            stack.pop_back();
            if (node_at(d, k).state == NodeState::merged) continue;
            sum += lambda_of(d, k);
            if (d + 1 < depth) {
                stack.push_back({d + 1, 2 * k});
                stack.push_back({d + 1, 2 * k + 1});
            }
        }
        return 0.5 + 0.5 * sum;
    }

    // Constant scorer (depth 0); used when a batch cannot be split at all.
    static SimilarityTree trivial(SymmetricTransform t) {
        SimilarityTree out;
        out.transform = t;
        out.cum_neg = {0, 1};
        out.cum_pos = {0, 1};
        out.active_knots = {0, 1};
        return out;
    }
};

// Ranking gain of a candidate region inside a node spanning the given
// alpha/beta widths: Lambda = d_alpha * F+(C) - d_beta * F-(C), rates
// taken over the whole batch.
template <class Pred>
double lambda_measure(double alpha_lo, double alpha_hi, double beta_lo, double beta_hi,
                      const PairBatch& b, Pred&& member) {
    return (alpha_hi - alpha_lo) * empirical_rate(b, member, +1) -
           (beta_hi - beta_lo) * empirical_rate(b, member, -1);
}

template <class Pred>
double lambda_measure(const SimilarityTree& t, std::size_t d, std::size_t k, const PairBatch& b,
                      Pred&& member) {
    return lambda_measure(t.knot_alpha(d, k), t.knot_alpha(d, k + 1), t.knot_beta(d, k),
                          t.knot_beta(d, k + 1), b, member);
}

// Depth schedule for unspecified D: sqrt(ln n) rounded, clamped to [1,15].
inline std::size_t default_depth(std::size_t n_pairs) {
    const double d = std::round(std::sqrt(std::log(double(std::max<std::size_t>(n_pairs, 2)))));
    return std::size_t(std::clamp(d, 1.0, 15.0));
}

inline SimilarityTree train(const PairBatch& b, std::size_t depth, const LeafConfig& cfg) {
    if (b.size() == 0) throw Error("training batch is empty");
    if (b.n_plus == 0 || b.n_minus == 0)
        throw Error("training batch holds a single pair class; need both positive and negative pairs");
    if (depth > 20) throw Error("tree depth " + std::to_string(depth) + " is too large (max 20)");

    SimilarityTree t;
    t.depth = depth;
    t.transform = {b.transform, b.dim / 2};
    t.n_neg = b.n_minus;
    t.n_pos = b.n_plus;
    const std::size_t leaves = t.leaf_count();
    t.nodes.resize(leaves - 1);

    std::vector<std::vector<std::uint32_t>> cur(1);
    cur[0].resize(b.size());
    std::iota(cur[0].begin(), cur[0].end(), 0u);

    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<std::vector<std::uint32_t>> next(std::size_t(2) << d);
        for (std::size_t k = 0; k < cur.size(); ++k) {
            std::vector<std::uint32_t> rows = std::move(cur[k]);
            SimilarityTree::Node& nd = t.node_at(d, k);
            std::int64_t pos = 0, neg = 0;
            for (const auto r : rows) (b.z[r] > 0 ? pos : neg)++;

            bool do_split = false;
            SymClassifier g;
            std::vector<std::uint32_t> left, right;
            if (pos > 0 && neg > 0 && rows.size() >= cfg.min_split_rows) {
                g = fit_split(b, rows, double(pos) / double(rows.size()), cfg);
                std::int64_t pos_left = 0, neg_left = 0;
                for (const auto r : rows) {
                    if (g.predict(b.row(r)) > 0) {
                        left.push_back(r);
                        (b.z[r] > 0 ? pos_left : neg_left)++;
                    } else {
                        right.push_back(r);
                    }
                }
                // Lambda > 0 up to the common positive factor 1/(n_neg n_pos)
                do_split = neg * pos_left - pos * neg_left > 0;
            }
            if (do_split) {
                nd.state = SimilarityTree::NodeState::split;
                nd.cls = std::move(g);
                next[2 * k] = std::move(left);
                next[2 * k + 1] = std::move(right);
            } else {
                nd.state = SimilarityTree::NodeState::pass;
                next[2 * k] = std::move(rows);
            }
        }
        cur = std::move(next);
    }

    t.cum_neg.assign(leaves + 1, 0);
    t.cum_pos.assign(leaves + 1, 0);
    for (std::size_t k = 0; k < leaves; ++k) {
        std::int64_t pos = 0, neg = 0;
        for (const auto r : cur[k]) (b.z[r] > 0 ? pos : neg)++;
        t.cum_neg[k + 1] = t.cum_neg[k] + neg;
        t.cum_pos[k + 1] = t.cum_pos[k] + pos;
    }
    t.active_knots.resize(leaves + 1);
    std::iota(t.active_knots.begin(), t.active_knots.end(), 0u);
    return t;
}

// Bottom-up merge of sibling terminal spans whenever doing so does not
// lower the validation AUC. Removing the knot between siblings changes
// the area by (pos_left * neg_right - pos_right * neg_left) / (2 n+ n-)
// on validation counts, so the merge test is an exact integer comparison.
// Repeats to a fixpoint; the result's validation AUC is never below the
// input's.
inline SimilarityTree prune(const SimilarityTree& t, const PairBatch& val) {
    if (val.size() == 0) throw Error("validation batch is empty");
    if (val.n_plus == 0 || val.n_minus == 0)
        throw Error("validation batch holds a single pair class");
    if (val.transform != t.transform.kind || val.dim != t.transform.out_dim())
        throw Error("validation batch was built with a different transform than the tree");

    SimilarityTree out = t;
    const std::size_t leaves = out.leaf_count();
    if (out.depth == 0) return out;

    // validation counts per full-depth leaf slot (merged spans route to
    // their span start, which is the only slot inspected for them)
    std::vector<std::int64_t> vp(leaves + 1, 0), vn(leaves + 1, 0);
    for (std::size_t r = 0; r < val.size(); ++r) {
        const int s = out.score_fx(val.row(r));
        const std::size_t leaf = leaves - std::size_t(s);
        (val.z[r] > 0 ? vp[leaf + 1] : vn[leaf + 1])++;
    }
    for (std::size_t i = 1; i <= leaves; ++i) {
        vp[i] += vp[i - 1];
        vn[i] += vn[i - 1];
    }
    auto span_pos = [&](std::size_t d, std::size_t k) {
        const std::size_t stride = std::size_t(1) << (out.depth - d);
        return vp[(k + 1) * stride] - vp[k * stride];
    };
    auto span_neg = [&](std::size_t d, std::size_t k) {
        const std::size_t stride = std::size_t(1) << (out.depth - d);
        return vn[(k + 1) * stride] - vn[k * stride];
    };
    auto terminal = [&](std::size_t d, std::size_t k) {
        return d == out.depth || out.node_at(d, k).state == SimilarityTree::NodeState::merged;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t d = out.depth; d-- > 0;) {
            for (std::size_t k = 0; k < (std::size_t(1) << d); ++k) {
                auto& nd = out.node_at(d, k);
                if (nd.state == SimilarityTree::NodeState::merged) continue;
                if (!terminal(d + 1, 2 * k) || !terminal(d + 1, 2 * k + 1)) continue;
                const std::int64_t pl = span_pos(d + 1, 2 * k), nl = span_neg(d + 1, 2 * k);
                const std::int64_t pr = span_pos(d + 1, 2 * k + 1), nr = span_neg(d + 1, 2 * k + 1);
                if (pl * nr <= pr * nl) {
                    nd.state = SimilarityTree::NodeState::merged;
                    nd.cls = SymClassifier{};
                    changed = true;
                }
            }
        }
    }

    // collapse knots to the surviving terminal spans
    out.active_knots.clear();
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::vector<std::uint32_t> bounds;
    while (!stack.empty()) {
        const auto [d, k] = stack.back();
        stack.pop_back();
        if (terminal(d, k)) {
            bounds.push_back(std::uint32_t(k << (out.depth - d)));
            continue;
        }
        // visit left before right despite LIFO order: push right first
        stack.push_back({d + 1, 2 * k + 1});
        stack.push_back({d + 1, 2 * k});
    }
    std::sort(bounds.begin(), bounds.end());
    out.active_knots = std::move(bounds);
    out.active_knots.push_back(std::uint32_t(leaves));
    return out;
}

}  // namespace simtree
