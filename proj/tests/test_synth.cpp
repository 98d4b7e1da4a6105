#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "simtree/synth.hpp"

using namespace simtree;

TEST_CASE("band area closed form on hand cases", "[synth]") {
    using detail::band_area;
    CHECK(band_area(0, 2, 0, 1) == Catch::Approx(1.0).margin(1e-15));
    CHECK(band_area(0, 1, 0, 1) == Catch::Approx(0.5).margin(1e-15));   // u+v <= 1
    CHECK(band_area(0, 2, 0.5, 1) == Catch::Approx(0.25).margin(1e-15));  // |u-v| >= 1/2
    CHECK(band_area(0.5, 1.5, 0, 1) == Catch::Approx(0.75).margin(1e-15));
    CHECK(band_area(0, 2, 0, 0) == 0.0);
    CHECK(band_area(1, 1, 0, 1) == 0.0);
}

TEST_CASE("band area matches monte carlo", "[synth]") {
    Rng rng(606);
    for (int rep = 0; rep < 6; ++rep) {
        double a = rng.uniform(0, 2), b = rng.uniform(0, 2);
        if (a > b) std::swap(a, b);
        double c = rng.uniform(0, 1), d = rng.uniform(0, 1);
        if (c > d) std::swap(c, d);
        const double exact = detail::band_area(a, b, c, d);
        const int N = 400000;
        int hit = 0;
        for (int i = 0; i < N; ++i) {
            const double u = rng.next_double(), v = rng.next_double();
            const double s = u + v, w = std::fabs(u - v);
            if (s >= a && s <= b && w >= c && w <= d) ++hit;
        }
        const double mc = double(hit) / N;
        CHECK(exact == Catch::Approx(mc).margin(5 * std::sqrt(0.25 / N) + 1e-6));
    }
}

TEST_CASE("generated ground truths have normalized decreasing-ratio masses", "[synth]") {
    const SyntheticModel m = SyntheticModel::generate({3, 3, 0.01, 0.5}, 11);
    REQUIRE(m.delta_plus.size() == 8);
    double sp = 0, sm = 0;
    for (std::size_t l = 0; l < 8; ++l) {
        sp += m.delta_plus[l];
        sm += m.delta_minus[l];
        if (l) {
            CHECK(m.delta_plus[l] < m.delta_plus[l - 1]);
            CHECK(m.delta_minus[l] > m.delta_minus[l - 1]);
        }
    }
    CHECK(sp == Catch::Approx(1.0).margin(1e-12));
    CHECK(sm == Catch::Approx(1.0).margin(1e-12));

    // cells partition pair space: volumes sum to one and respect the floor
    double vol = 0;
    for (std::size_t l = 0; l < m.cell_count(); ++l) {
        CHECK(m.cell_volume(l) >= SyntheticModel::kMinCellProbability);
        vol += m.cell_volume(l);
    }
    CHECK(vol == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("generation is deterministic in the seed", "[synth]") {
    const SyntheticModel a = SyntheticModel::generate({2, 2, 0.05, 0.5}, 5);
    const SyntheticModel b = SyntheticModel::generate({2, 2, 0.05, 0.5}, 5);
    const SyntheticModel c = SyntheticModel::generate({2, 2, 0.05, 0.5}, 6);
    REQUIRE(a.nodes.size() == b.nodes.size());
    bool same = true, diff = false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        same = same && a.nodes[i].feature == b.nodes[i].feature &&
               a.nodes[i].threshold == b.nodes[i].threshold;
        diff = diff || a.nodes[i].feature != c.nodes[i].feature ||
               a.nodes[i].threshold != c.nodes[i].threshold;
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("uniform pairs land in cells at the exact volume frequencies", "[synth]") {
    const SyntheticModel m = SyntheticModel::generate({2, 2, 0.1, 0.5}, 21);
    Rng rng(2222);
    const int N = 200000;
    std::vector<int> counts(m.cell_count(), 0);
    std::vector<double> x(2), xp(2);
    for (int i = 0; i < N; ++i) {
        for (auto& v : x) v = rng.next_double();
        for (auto& v : xp) v = rng.next_double();
        counts[m.cell_of(x, xp)]++;
    }
    for (std::size_t l = 0; l < m.cell_count(); ++l) {
        const double freq = double(counts[l]) / N;
        const double sigma = std::sqrt(m.cell_volume(l) / N) + 1e-9;
        CHECK(freq == Catch::Approx(m.cell_volume(l)).margin(5 * sigma + 1e-4));
    }
}

TEST_CASE("sampled pairs respect the conditional cell masses", "[synth]") {
    const SyntheticModel m = SyntheticModel::generate({2, 2, 0.1, 0.5}, 33);
    const RawPairs raw = m.sample_raw(60000, 77);
    std::vector<int> pos(m.cell_count(), 0), neg(m.cell_count(), 0);
    int npos = 0, nneg = 0;
    for (std::size_t t = 0; t < raw.size(); ++t) {
        for (std::size_t i = 0; i < 2; ++i) {
            REQUIRE(raw.x_row(t)[i] >= 0.0);
            REQUIRE(raw.x_row(t)[i] <= 1.0);
        }
        const std::size_t cell = m.cell_of_fx(m.gt_transform().apply(
            {raw.x_row(t)[0], raw.x_row(t)[1]}, {raw.xp_row(t)[0], raw.xp_row(t)[1]}).data());
        if (raw.z[t] > 0) {
            pos[cell]++;
            npos++;
        } else {
            neg[cell]++;
            nneg++;
        }
    }
    CHECK(double(npos) / double(raw.size()) == Catch::Approx(0.5).margin(0.01));
    for (std::size_t l = 0; l < m.cell_count(); ++l) {
        CHECK(double(pos[l]) / npos == Catch::Approx(m.delta_plus[l]).margin(0.015));
        CHECK(double(neg[l]) / nneg == Catch::Approx(m.delta_minus[l]).margin(0.015));
    }
}

TEST_CASE("sampling is reproducible and respects class balance", "[synth]") {
    const SyntheticModel m = SyntheticModel::generate({3, 3, 0.01, 0.2}, 3);
    const RawPairs a = m.sample_raw(500, 9);
    const RawPairs b = m.sample_raw(500, 9);
    CHECK(a.x == b.x);
    CHECK(a.xp == b.xp);
    CHECK(a.z == b.z);
    int pos = 0;
    for (const auto z : a.z) pos += z > 0;
    CHECK(double(pos) / 500.0 == Catch::Approx(0.2).margin(0.08));
}

TEST_CASE("optimal curve for a one-split truth matches the closed form", "[synth]") {
    const double d = 0.01;
    const SyntheticModel m = SyntheticModel::generate({1, 1, d, 0.5}, 2);
    const RocCurve star = m.optimal_roc();
    REQUIRE(star.knots().size() == 3);
    CHECK(star.knots()[1].alpha == Catch::Approx(d / (1 + d)).margin(1e-12));
    CHECK(star.knots()[1].beta == Catch::Approx(1 / (1 + d)).margin(1e-12));
    CHECK(m.optimal_auc() == Catch::Approx(0.9900990099009901).margin(1e-12));
}

TEST_CASE("optimal auc at the benchmark setting is frozen", "[synth]") {
    // depends only on depth and delta, not on the drawn tree
    const SyntheticModel a = SyntheticModel::generate({3, 3, 0.01, 0.5}, 1);
    const SyntheticModel b = SyntheticModel::generate({3, 3, 0.01, 0.5}, 99);
    CHECK(a.optimal_auc() == Catch::Approx(0.9756316541705902).margin(1e-12));
    CHECK(b.optimal_auc() == Catch::Approx(a.optimal_auc()).margin(1e-15));
}

TEST_CASE("oracle scores reproduce the optimal curve empirically", "[synth]") {
    const SyntheticModel m = SyntheticModel::generate({3, 3, 0.01, 0.5}, 8);
    const RawPairs raw = m.sample_raw(30000, 123);
    std::vector<double> scores(raw.size());
    for (std::size_t t = 0; t < raw.size(); ++t)
        scores[t] = m.oracle_score({raw.x_row(t)[0], raw.x_row(t)[1], raw.x_row(t)[2]},
                                   {raw.xp_row(t)[0], raw.xp_row(t)[1], raw.xp_row(t)[2]});
    const RocCurve emp = roc_from_scores(scores, raw.z);
    CHECK(sup_dist(emp, m.optimal_roc()) < 0.03);
}

TEST_CASE("mass curves order cells by likelihood ratio with stable ties", "[synth]") {
    const RocCurve c = roc_from_masses({0.5, 0.25, 0.25}, {0.2, 0.4, 0.4});
    REQUIRE(c.knots().size() == 4);
    // ratios: 2.5, 0.625, 0.625 -> order 0, then 1 before 2
    CHECK(c.knots()[1].alpha == Catch::Approx(0.2));
    CHECK(c.knots()[1].beta == Catch::Approx(0.5));
    CHECK(c.knots()[2].alpha == Catch::Approx(0.6));
    CHECK(c.knots()[2].beta == Catch::Approx(0.75));
    CHECK_THROWS_AS(roc_from_masses({1.0}, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(roc_from_masses({}, {}), Error);
}

TEST_CASE("stored parts rebuild the same model", "[synth]") {
    const SyntheticModel m = SyntheticModel::generate({3, 2, 0.05, 0.5}, 44);
    const SyntheticModel r = SyntheticModel::from_parts(m.params, m.nodes, m.seed);
    REQUIRE(r.cells.size() == m.cells.size());
    for (std::size_t l = 0; l < m.cells.size(); ++l)
        CHECK(r.cell_volume(l) == m.cell_volume(l));
    Rng rng(7);
    std::vector<double> x(2), xp(2);
    for (int i = 0; i < 500; ++i) {
        for (auto& v : x) v = rng.next_double();
        for (auto& v : xp) v = rng.next_double();
        REQUIRE(r.cell_of(x, xp) == m.cell_of(x, xp));
        REQUIRE(r.oracle_score(x, xp) == m.oracle_score(x, xp));
    }
    CHECK_THROWS_AS(SyntheticModel::from_parts(m.params, {}, 0), Error);
}

TEST_CASE("degenerate cells exhaust the rejection budget loudly", "[synth]") {
    // a threshold at the very edge leaves cell 0 with zero volume
    SyntheticModel::Params p{1, 1, 0.5, 0.9};
    const SyntheticModel m = SyntheticModel::from_parts(p, {{0, 0.0}}, 0);
    CHECK(m.cell_volume(0) == 0.0);
    CHECK_THROWS_AS(m.sample_raw(50, 1), Error);
}

TEST_CASE("parameter validation", "[synth]") {
    CHECK_THROWS_AS(SyntheticModel::generate({0, 3, 0.01, 0.5}, 1), Error);
    CHECK_THROWS_AS(SyntheticModel::generate({3, 0, 0.01, 0.5}, 1), Error);
    CHECK_THROWS_AS(SyntheticModel::generate({3, 3, 0.0, 0.5}, 1), Error);
    CHECK_THROWS_AS(SyntheticModel::generate({3, 3, 1.5, 0.5}, 1), Error);
    CHECK_THROWS_AS(SyntheticModel::generate({3, 3, 0.01, 0.0}, 1), Error);
    CHECK_THROWS_AS(SyntheticModel::generate({3, 3, 0.01, 1.0}, 1), Error);
}
