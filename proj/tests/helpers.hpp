#pragma once

// Small shared test fixtures and brute-force oracles.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "simtree/eval.hpp"
#include "simtree/pairs.hpp"

namespace testutil {

// AUC by counting concordant positive/negative score pairs, ties at half
// weight. Quadratic; for small inputs only.
inline double concordance_auc(const std::vector<double>& s, const std::vector<std::int8_t>& z) {
    double num = 0;
    std::size_t np = 0, nn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (z[i] <= 0) continue;
        ++np;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (z[j] > 0) continue;
            num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    for (std::size_t j = 0; j < s.size(); ++j)
        if (z[j] <= 0) ++nn;
    return num / (double(np) * double(nn));
}

// Random curve with strictly increasing alphas (no vertical segments),
// so grid evaluation sees everything.
inline simtree::RocCurve random_gradual_curve(simtree::Rng& rng, std::size_t interior = 3) {
    std::vector<double> as, bs;
    for (std::size_t i = 0; i < interior; ++i) {
        as.push_back(0.02 + 0.96 * rng.next_double());
        bs.push_back(rng.next_double());
    }
    std::sort(as.begin(), as.end());
    std::sort(bs.begin(), bs.end());
    std::vector<simtree::RocCurve::Knot> knots{{0, 0}};
    for (std::size_t i = 0; i < interior; ++i) knots.push_back({as[i], bs[i]});
    knots.push_back({1, 1});
    return simtree::RocCurve(std::move(knots));
}

// Random labeled pair batch over pre-transformed features.
inline simtree::PairBatch random_batch(simtree::Rng& rng, std::size_t n, std::size_t dim,
                                       double p_plus = 0.5,
                                       simtree::TransformKind kind = simtree::TransformKind::diag) {
    simtree::PairBatch b = simtree::make_batch(kind, dim);
    std::vector<double> fx(dim);
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = rng.next_double() < p_plus;
        for (auto& v : fx) {
            v = rng.next_double();
            if (pos) v *= 0.8;  // make the classes separable-ish but overlapping
        }
        b.push_row(fx.data(), pos ? 1 : -1);
    }
    return b;
}

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("simtree_test_" + tag + "_" + std::to_string(std::uintptr_t(this)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

}  // namespace testutil
