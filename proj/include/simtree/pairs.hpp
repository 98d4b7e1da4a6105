#pragma once

// Labeled pairs. A pair gets z = +1 when its two instances share a class
// label, z = -1 otherwise. PairBatch rows live in transformed feature
// space; RawPairs keeps the original coordinates (needed to score a pair
// under a model whose transform may differ from the one used at build
// time, and for CSV round trips).

#include <cstdint>
#include <optional>
#include <set>

#include "simtree/dataset.hpp"
#include "simtree/transform.hpp"

namespace simtree {

struct PairBatch {
    TransformKind transform = TransformKind::diag;
    std::size_t dim = 0;  // 2q
    std::vector<double> features;
    std::vector<std::int8_t> z;
    std::vector<double> weight;
    std::int64_t n_plus = 0, n_minus = 0;

    std::size_t size() const { return z.size(); }
    const double* row(std::size_t i) const { return features.data() + i * dim; }

    void push_row(const double* f, std::int8_t zi, double w = 1.0) {
        features.insert(features.end(), f, f + dim);
        z.push_back(zi);
        weight.push_back(w);
        (zi > 0 ? n_plus : n_minus)++;
    }
};

inline PairBatch make_batch(TransformKind t, std::size_t dim) {
    PairBatch b;
    b.transform = t;
    b.dim = dim;
    return b;
}

struct RawPairs {
    std::size_t q = 0;
    std::vector<double> x;    // n x q
    std::vector<double> xp;   // n x q
    std::vector<std::int8_t> z;

    std::size_t size() const { return z.size(); }
    const double* x_row(std::size_t i) const { return x.data() + i * q; }
    const double* xp_row(std::size_t i) const { return xp.data() + i * q; }
};

inline PairBatch to_batch(const RawPairs& raw, TransformKind kind) {
    const SymmetricTransform t{kind, raw.q};
    PairBatch b = make_batch(kind, t.out_dim());
    std::vector<double> fx(t.out_dim());
    b.features.reserve(raw.size() * t.out_dim());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        t.apply_to(raw.x_row(i), raw.xp_row(i), fx.data());
        b.push_row(fx.data(), raw.z[i]);
    }
    return b;
}

// ------------------------------------------------------------------
// Index-pair subsampling.
// ------------------------------------------------------------------

namespace detail {

// Pairs (i, j), i < j, flattened in lexicographic order.
inline std::uint64_t pairs_before(std::uint64_t i, std::uint64_t n) {
    return i * (2 * n - i - 1) / 2;
}

inline std::pair<std::uint32_t, std::uint32_t> unflatten_pair(std::uint64_t m, std::uint64_t n) {
    std::uint64_t lo = 0, hi = n - 1;  // largest i with pairs_before(i) <= m
    while (lo < hi) {
        const std::uint64_t mid = (lo + hi + 1) / 2;
        if (pairs_before(mid, n) <= m) lo = mid; else hi = mid - 1;
    }
    const std::uint64_t j = lo + 1 + (m - pairs_before(lo, n));
    return {std::uint32_t(lo), std::uint32_t(j)};
}

// Floyd's uniform sample of `budget` values without replacement from
// [0, total); returned sorted ascending.
inline std::vector<std::uint64_t> sample_without_replacement(std::uint64_t total, std::uint64_t budget,
                                                             Rng& rng) {
    std::set<std::uint64_t> chosen;
    for (std::uint64_t t = total - budget; t < total; ++t) {
        const std::uint64_t r = rng.next_below(t + 1);
        if (!chosen.insert(r).second) chosen.insert(t);
    }
    return std::vector<std::uint64_t>(chosen.begin(), chosen.end());
}

}  // namespace detail

// All i<j index pairs, or `budget` of them drawn uniformly without
// replacement, in flat-index order.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_pair_indices(
    std::size_t n, std::optional<std::uint64_t> budget, RngSeed seed) {
    if (n < 2) throw Error("pair sampling needs at least 2 instances, got " + std::to_string(n));
    const std::uint64_t total = detail::pairs_before(n, n);  // n(n-1)/2
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    if (!budget || *budget >= total) {
        out.reserve(total);
        for (std::uint32_t i = 0; i + 1 < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
        return out;
    }
    if (*budget == 0) throw Error("pair budget must be positive");
    Rng rng(derive(seed, "pairs.subsample"));
    const auto flats = detail::sample_without_replacement(total, *budget, rng);
    out.reserve(flats.size());
    for (const auto m : flats) out.push_back(detail::unflatten_pair(m, n));
    return out;
}

inline PairBatch build_pairs(const Dataset& d, const SymmetricTransform& t,
                             std::optional<std::uint64_t> budget, RngSeed seed) {
    if (t.q != d.q)
        throw Error("transform dimension " + std::to_string(t.q) + " does not match dataset dimension " +
                    std::to_string(d.q));
    const auto idx = sample_pair_indices(d.size(), budget, seed);
    PairBatch b = make_batch(t.kind, t.out_dim());
    b.features.reserve(idx.size() * b.dim);
    std::vector<double> fx(t.out_dim());
    for (const auto& [i, j] : idx) {
        t.apply_to(d.row(i), d.row(j), fx.data());
        b.push_row(fx.data(), d.labels[i] == d.labels[j] ? std::int8_t(1) : std::int8_t(-1));
    }
    return b;
}

// ------------------------------------------------------------------
// Empirical conditional rates: fraction of the batch's sigma-labeled
// rows that fall in the region described by `member` (a predicate on the
// row index). Counts are unweighted.
// ------------------------------------------------------------------

// Fraction of the batch's sigma-class rows whose features satisfy the
// membership predicate.
template <class Pred>
double empirical_rate(const PairBatch& b, Pred&& member, int sigma) {
    if (sigma != 1 && sigma != -1) throw Error("sigma must be +1 or -1");
    const std::int64_t denom = sigma > 0 ? b.n_plus : b.n_minus;
    if (denom == 0)
        throw Error(std::string("empirical rate undefined: no rows with z = ") + (sigma > 0 ? "+1" : "-1"));
    std::int64_t hit = 0;
    for (std::size_t r = 0; r < b.size(); ++r)
        if (int(b.z[r]) == sigma && member(b.row(r))) ++hit;
    return double(hit) / double(denom);
}

// ------------------------------------------------------------------
// Pair CSV files: header x1..xq,xp1..xpq,z with optional trailing
// transformed-feature columns (ignored on read).
// ------------------------------------------------------------------

inline void write_pairs_csv(const std::string& path, const RawPairs& raw,
                            std::optional<TransformKind> with_features = std::nullopt) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (std::size_t i = 0; i < raw.q; ++i) out << "x" << (i + 1) << ",";
    for (std::size_t i = 0; i < raw.q; ++i) out << "xp" << (i + 1) << ",";
    out << "z";
    if (with_features)
        for (std::size_t i = 0; i < 2 * raw.q; ++i) out << ",f" << (i + 1);
    out << "\n";
    SymmetricTransform t{with_features.value_or(TransformKind::diag), raw.q};
    std::vector<double> fx(t.out_dim());
    for (std::size_t r = 0; r < raw.size(); ++r) {
        for (std::size_t i = 0; i < raw.q; ++i) out << fmt_double(raw.x_row(r)[i]) << ",";
        for (std::size_t i = 0; i < raw.q; ++i) out << fmt_double(raw.xp_row(r)[i]) << ",";
        out << int(raw.z[r]);
        if (with_features) {
            t.apply_to(raw.x_row(r), raw.xp_row(r), fx.data());
            for (std::size_t i = 0; i < fx.size(); ++i) out << "," << fmt_double(fx[i]);
        }
        out << "\n";
    }
}

inline RawPairs load_pairs_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    const auto header = csv::split(lines[0]);
    std::size_t q = 0;
    while (q < header.size() && header[q] == "x" + std::to_string(q + 1)) ++q;
    if (q == 0 || header.size() < 2 * q + 1)
        throw Error(path + ": not a pair file (expected header x1..xq,xp1..xpq,z)");
    for (std::size_t i = 0; i < q; ++i)
        if (header[q + i] != "xp" + std::to_string(i + 1))
            throw Error(path + ": not a pair file (expected column xp" + std::to_string(i + 1) + ")");
    if (header[2 * q] != "z") throw Error(path + ": not a pair file (expected column z)");

    RawPairs raw;
    raw.q = q;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = csv::split(lines[r]);
        const std::string where = path + " line " + std::to_string(r + 1);
        if (cells.size() < 2 * q + 1)
            throw Error(where + ": expected at least " + std::to_string(2 * q + 1) + " columns");
        for (std::size_t i = 0; i < q; ++i) raw.x.push_back(csv::parse_number(cells[i], where));
        for (std::size_t i = 0; i < q; ++i) raw.xp.push_back(csv::parse_number(cells[q + i], where));
        const double zv = csv::parse_number(cells[2 * q], where);
        if (zv != 1.0 && zv != -1.0) throw Error(where + ": z must be +1 or -1");
        raw.z.push_back(std::int8_t(zv));
    }
    return raw;
}

// Detects whether a CSV file is a pair file (x1..,xp1..,z header).
inline bool looks_like_pairs_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    const auto header = csv::split(lines[0]);
    if (header.empty() || header[0] != "x1") return false;
    for (const auto& h : header)
        if (h == "z") return true;
    return false;
}

}  // namespace simtree
