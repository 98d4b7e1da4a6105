#pragma once

// ROC curves as piecewise-linear paths from (0,0) to (1,1), plus the
// L1 and sup distances between two curves. Vertical segments (repeated
// alpha with a beta jump) are allowed; as a function of alpha the curve
// takes the upper value there, and one-sided limits are available so the
// sup distance is exact across jumps.

#include <algorithm>
#include <cmath>
#include <fstream>

#include "simtree/common.hpp"
#include "simtree/dataset.hpp"

namespace simtree {

class RocCurve {
  public:
    struct Knot {
        double alpha, beta;
    };

    explicit RocCurve(std::vector<Knot> knots) : knots_(std::move(knots)) {
        if (knots_.size() < 2) throw Error("ROC curve needs at least two knots");
        auto close = [](double v, double t) { return std::fabs(v - t) <= 1e-9; };
        if (!close(knots_.front().alpha, 0) || !close(knots_.front().beta, 0))
            throw Error("ROC curve must start at (0,0)");
        if (!close(knots_.back().alpha, 1) || !close(knots_.back().beta, 1))
            throw Error("ROC curve must end at (1,1)");
        knots_.front() = {0.0, 0.0};
        knots_.back() = {1.0, 1.0};
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (knots_[i].alpha < knots_[i - 1].alpha - 1e-12 || knots_[i].beta < knots_[i - 1].beta - 1e-12)
                throw Error("ROC knots must be nondecreasing in both coordinates");
            knots_[i].alpha = std::max(knots_[i].alpha, knots_[i - 1].alpha);
            knots_[i].beta = std::max(knots_[i].beta, knots_[i - 1].beta);
        }
    }

    const std::vector<Knot>& knots() const { return knots_; }

    // {limit from the left, limit from the right}; they differ only at a
    // vertical segment's alpha. At alpha <= 0 both are 0, at alpha >= 1 both 1.
    std::pair<double, double> limits(double alpha) const {
        if (alpha <= 0) return {0.0, top_at(0)};
        if (alpha >= 1) {
            double bottom = 1.0;  // bottom of a terminal vertical, if any
            for (auto it = knots_.rbegin(); it != knots_.rend() && it->alpha == 1.0; ++it)
                bottom = it->beta;
            return {bottom, 1.0};
        }
        // first knot with .alpha >= alpha
        std::size_t i = std::size_t(
            std::lower_bound(knots_.begin(), knots_.end(), alpha,
                             [](const Knot& k, double a) { return k.alpha < a; }) -
            knots_.begin());
        if (i < knots_.size() && knots_[i].alpha == alpha) {
            double bottom = knots_[i].beta;
            double top = bottom;
            for (std::size_t j = i; j < knots_.size() && knots_[j].alpha == alpha; ++j) top = knots_[j].beta;
            return {bottom, top};
        }
        // strictly between knots i-1 and i
        const Knot& a = knots_[i - 1];
        const Knot& b = knots_[i];
        const double t = (alpha - a.alpha) / (b.alpha - a.alpha);
        const double v = a.beta + t * (b.beta - a.beta);
        return {v, v};
    }

    // Curve as a function of alpha (upper value at verticals).
    double evaluate(double alpha) const { return limits(alpha).second; }

  private:
    double top_at(double alpha) const {
        double top = 0;
        for (const auto& k : knots_) {
            if (k.alpha > alpha) break;
            top = k.beta;
        }
        return top;
    }

    std::vector<Knot> knots_;
};

inline double auc(const RocCurve& c) {
    const auto& k = c.knots();
    double area = 0;
    for (std::size_t i = 1; i < k.size(); ++i)
        area += (k[i].alpha - k[i - 1].alpha) * (k[i].beta + k[i - 1].beta) / 2.0;
    return area;
}

namespace detail {

inline std::vector<double> merged_alphas(const RocCurve& a, const RocCurve& b) {
    std::vector<double> xs;
    xs.reserve(a.knots().size() + b.knots().size());
    for (const auto& k : a.knots()) xs.push_back(k.alpha);
    for (const auto& k : b.knots()) xs.push_back(k.alpha);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace detail

// sup_alpha |a(alpha) - b(alpha)|. The difference is linear between
// breakpoints, so the sup is attained at a one-sided limit of some
// breakpoint in the union of knot alphas.
inline double sup_dist(const RocCurve& a, const RocCurve& b) {
    double best = 0;
    for (const double x : detail::merged_alphas(a, b)) {
        const auto [la, ra] = a.limits(x);
        const auto [lb, rb] = b.limits(x);
        best = std::max({best, std::fabs(la - lb), std::fabs(ra - rb)});
    }
    return best;
}

// Integral of |a(alpha) - b(alpha)|, exact: piecewise-linear segments
// are split at sign changes of the difference.
inline double l1_dist(const RocCurve& a, const RocCurve& b) {
    const auto xs = detail::merged_alphas(a, b);
    double total = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double w = xs[i] - xs[i - 1];
        if (w <= 0) continue;
        const double d0 = a.limits(xs[i - 1]).second - b.limits(xs[i - 1]).second;
        const double d1 = a.limits(xs[i]).first - b.limits(xs[i]).first;
        if ((d0 >= 0) == (d1 >= 0)) {
            total += w * (std::fabs(d0) + std::fabs(d1)) / 2.0;
        } else {
            const double t = d0 / (d0 - d1);  // crossing point in [0,1]
            total += w * (t * std::fabs(d0) + (1 - t) * std::fabs(d1)) / 2.0;
        }
    }
    return total;
}

// Empirical ROC of a score vector. Rows with tied scores move together,
// producing a single knot per distinct value (so a tie across classes
// shows up as a diagonal segment, which matches counting tied
// positive/negative pairs with weight 1/2 in the AUC).
inline RocCurve roc_from_scores(const std::vector<double>& scores, const std::vector<std::int8_t>& z) {
    if (scores.size() != z.size()) throw Error("scores and labels differ in length");
    std::int64_t n_pos = 0, n_neg = 0;
    for (const auto zi : z) (zi > 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw Error("empirical ROC needs scores from both pair classes");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return scores[i] > scores[j]; });

    std::vector<RocCurve::Knot> knots;
    knots.push_back({0.0, 0.0});
    std::int64_t cum_pos = 0, cum_neg = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i)
            (z[order[i]] > 0 ? cum_pos : cum_neg)++;
        knots.push_back({double(cum_neg) / double(n_neg), double(cum_pos) / double(n_pos)});
    }
    return RocCurve(std::move(knots));
}

// ------------------------------------------------------------------
// ROC CSV files: header "alpha,beta", one knot per line.
// ------------------------------------------------------------------

inline void write_roc_csv(const std::string& path, const RocCurve& c) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "alpha,beta\n";
    for (const auto& k : c.knots()) out << fmt_double(k.alpha) << "," << fmt_double(k.beta) << "\n";
}

inline RocCurve load_roc_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    const auto header = csv::split(lines[0]);
    if (header.size() != 2 || header[0] != "alpha" || header[1] != "beta")
        throw Error(path + ": expected header alpha,beta");
    std::vector<RocCurve::Knot> knots;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = csv::split(lines[r]);
        const std::string where = path + " line " + std::to_string(r + 1);
        if (cells.size() != 2) throw Error(where + ": expected 2 columns");
        knots.push_back({csv::parse_number(cells[0], where), csv::parse_number(cells[1], where)});
    }
    return RocCurve(std::move(knots));
}

}  // namespace simtree
