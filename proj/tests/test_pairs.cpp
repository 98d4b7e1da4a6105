#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"
#include "simtree/pairs.hpp"

using namespace simtree;

TEST_CASE("pair index unflattening is the exact inverse", "[pairs]") {
    for (const std::size_t n : {2u, 3u, 7u, 30u}) {
        std::uint64_t m = 0;
        for (std::uint32_t i = 0; i + 1 < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j, ++m) {
                const auto [a, b] = detail::unflatten_pair(m, n);
                REQUIRE(a == i);
                REQUIRE(b == j);
            }
        REQUIRE(m == std::uint64_t(n) * (n - 1) / 2);
    }
}

TEST_CASE("pair subsampling draws distinct sorted pairs deterministically", "[pairs]") {
    const auto a = sample_pair_indices(40, 100, 9);
    const auto b = sample_pair_indices(40, 100, 9);
    REQUIRE(a.size() == 100);
    CHECK(a == b);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& pr : a) {
        CHECK(pr.first < pr.second);
        CHECK(pr.second < 40);
        seen.insert(pr);
    }
    CHECK(seen.size() == a.size());
    CHECK(std::is_sorted(a.begin(), a.end()));

    const auto different = sample_pair_indices(40, 100, 10);
    CHECK(different != a);

    // no budget, or budget >= total: every pair in lexicographic order
    const auto all = sample_pair_indices(5, std::nullopt, 1);
    REQUIRE(all.size() == 10);
    CHECK(all.front() == std::make_pair(0u, 1u));
    CHECK(all.back() == std::make_pair(3u, 4u));
    CHECK(sample_pair_indices(5, 10000, 1) == all);

    CHECK_THROWS_AS(sample_pair_indices(1, std::nullopt, 1), Error);
    CHECK_THROWS_AS(sample_pair_indices(5, 0, 1), Error);
}

TEST_CASE("pair batches label same-class pairs positive", "[pairs]") {
    Dataset d;
    d.q = 1;
    d.n_classes = 2;
    d.features = {0.1, 0.2, 0.9, 0.8};
    d.labels = {1, 1, 2, 2};
    d.label_names = {"a", "b"};
    const PairBatch b = build_pairs(d, {TransformKind::diag, 1}, std::nullopt, 3);
    REQUIRE(b.size() == 6);
    // pairs in lexicographic order: (0,1)+ (0,2)- (0,3)- (1,2)- (1,3)- (2,3)+
    CHECK(b.n_plus == 2);
    CHECK(b.n_minus == 4);
    CHECK(b.z[0] == 1);
    CHECK(b.z[1] == -1);
    CHECK(b.z[5] == 1);
    CHECK(b.dim == 2);
    CHECK_THROWS_AS(build_pairs(d, {TransformKind::diag, 7}, std::nullopt, 3), Error);
}

TEST_CASE("empirical rates count rows of one pair class", "[pairs]") {
    Rng rng(11);
    const PairBatch b = testutil::random_batch(rng, 500, 4);
    const double fp = empirical_rate(b, [](const double* fx) { return fx[0] > 0.5; }, -1);
    std::size_t cnt = 0, tot = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.z[i] > 0) continue;
        ++tot;
        if (b.row(i)[0] > 0.5) ++cnt;
    }
    CHECK(fp == Catch::Approx(double(cnt) / double(tot)));
    CHECK(empirical_rate(b, [](const double*) { return true; }, 1) == 1.0);
    CHECK_THROWS_AS(empirical_rate(b, [](const double*) { return true; }, 0), Error);
}

TEST_CASE("pairs csv round trip preserves everything", "[pairs]") {
    testutil::TempDir dir("pairs_csv");
    Rng rng(77);
    RawPairs raw;
    raw.q = 3;
    for (int t = 0; t < 50; ++t) {
        for (int i = 0; i < 3; ++i) raw.x.push_back(rng.next_double());
        for (int i = 0; i < 3; ++i) raw.xp.push_back(rng.next_double());
        raw.z.push_back(rng.next_double() < 0.5 ? 1 : -1);
    }
    write_pairs_csv(dir.file("p.csv"), raw);
    const RawPairs back = load_pairs_csv(dir.file("p.csv"));
    REQUIRE(back.q == 3);
    REQUIRE(back.size() == raw.size());
    CHECK(back.x == raw.x);  // shortest round-trip formatting is exact
    CHECK(back.xp == raw.xp);
    CHECK(back.z == raw.z);
    CHECK(looks_like_pairs_csv(dir.file("p.csv")));

    // with transformed feature columns appended, loading still works
    write_pairs_csv(dir.file("pf.csv"), raw, TransformKind::minmax);
    const RawPairs back2 = load_pairs_csv(dir.file("pf.csv"));
    CHECK(back2.x == raw.x);
}

TEST_CASE("pairs csv rejects malformed input", "[pairs]") {
    testutil::TempDir dir("pairs_bad");
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream out(dir.file(name));
        out << text;
    };
    put("head.csv", "x1,xp1,zz\n0,1,1\n");
    CHECK_THROWS_AS(load_pairs_csv(dir.file("head.csv")), Error);
    put("zval.csv", "x1,xp1,z\n0,1,2\n");
    CHECK_THROWS_AS(load_pairs_csv(dir.file("zval.csv")), Error);
    put("num.csv", "x1,xp1,z\n0,oops,1\n");
    CHECK_THROWS_AS(load_pairs_csv(dir.file("num.csv")), Error);
    put("short.csv", "x1,xp1,z\n0,1\n");
    CHECK_THROWS_AS(load_pairs_csv(dir.file("short.csv")), Error);
    put("empty.csv", "");
    CHECK_THROWS_AS(load_pairs_csv(dir.file("empty.csv")), Error);
    put("dataset.csv", "f1,f2,label\n0,1,a\n");
    CHECK_FALSE(looks_like_pairs_csv(dir.file("dataset.csv")));
}

TEST_CASE("transformed batches agree with applying the transform by hand", "[pairs]") {
    Rng rng(5);
    RawPairs raw;
    raw.q = 2;
    for (int t = 0; t < 20; ++t) {
        for (int i = 0; i < 2; ++i) raw.x.push_back(rng.next_double());
        for (int i = 0; i < 2; ++i) raw.xp.push_back(rng.next_double());
        raw.z.push_back(t % 2 ? 1 : -1);
    }
    const PairBatch b = to_batch(raw, TransformKind::minmax);
    REQUIRE(b.size() == 20);
    REQUIRE(b.dim == 4);
    const SymmetricTransform t{TransformKind::minmax, 2};
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto fx = t.apply({raw.x_row(i)[0], raw.x_row(i)[1]},
                                {raw.xp_row(i)[0], raw.xp_row(i)[1]});
        for (std::size_t j = 0; j < 4; ++j) REQUIRE(b.row(i)[j] == fx[j]);
    }
}
