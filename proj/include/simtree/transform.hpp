#pragma once

// Swap-invariant featurization of instance pairs. Both variants map
// (x, x') in R^q x R^q to R^2q and satisfy f(x, x') == f(x', x) exactly
// in floating point (addition commutes; |a-b| == |b-a|; max/min commute).

#include <cmath>
#include <numbers>

#include "simtree/common.hpp"

namespace simtree {

enum class TransformKind { diag, minmax };

inline const char* to_string(TransformKind k) {
    return k == TransformKind::diag ? "diag" : "minmax";
}

inline TransformKind parse_transform(std::string_view s) {
    if (s == "diag") return TransformKind::diag;
    if (s == "minmax") return TransformKind::minmax;
    throw Error("unknown transform \"" + std::string(s) + "\" (expected diag or minmax)");
}

// diag:   out[i]   = (x_i + x'_i) / sqrt(2)    projection onto the diagonal
//         out[q+i] = |x_i - x'_i| / sqrt(2)    folded orthogonal part
// The scaling makes the map an isometry up to the fold, so distances
// between pairs are preserved when the sign of the difference is kept.
//
// minmax: out[i] = max(x_i, x'_i), out[q+i] = min(x_i, x'_i).
struct SymmetricTransform {
    TransformKind kind = TransformKind::diag;
    std::size_t q = 0;

    std::size_t out_dim() const { return 2 * q; }

    void apply_to(const double* x, const double* xp, double* out) const {
        if (kind == TransformKind::diag) {
            for (std::size_t i = 0; i < q; ++i) {
                out[i] = (x[i] + xp[i]) / std::numbers::sqrt2;
                out[q + i] = std::fabs(x[i] - xp[i]) / std::numbers::sqrt2;
            }
        } else {
            for (std::size_t i = 0; i < q; ++i) {
                out[i] = std::max(x[i], xp[i]);
                out[q + i] = std::min(x[i], xp[i]);
            }
        }
    }

    std::vector<double> apply(const std::vector<double>& x, const std::vector<double>& xp) const {
        if (x.size() != q || xp.size() != q)
            throw Error("transform: expected two vectors of dimension " + std::to_string(q) +
                        ", got " + std::to_string(x.size()) + " and " + std::to_string(xp.size()));
        std::vector<double> out(2 * q);
        apply_to(x.data(), xp.data(), out.data());
        return out;
    }
};

}  // namespace simtree
