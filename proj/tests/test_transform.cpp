#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "simtree/transform.hpp"

using namespace simtree;

TEST_CASE("diag transform values", "[transform]") {
    const SymmetricTransform t{TransformKind::diag, 2};
    const auto fx = t.apply({1.0, 0.0}, {0.0, 0.5});
    REQUIRE(fx.size() == 4);
    CHECK(fx[0] == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(fx[1] == Catch::Approx(0.5 / std::sqrt(2.0)));
    CHECK(fx[2] == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(fx[3] == Catch::Approx(0.5 / std::sqrt(2.0)));
}

TEST_CASE("minmax transform values", "[transform]") {
    const SymmetricTransform t{TransformKind::minmax, 2};
    const auto fx = t.apply({1.0, 0.0}, {0.25, 0.5});
    REQUIRE(fx.size() == 4);
    CHECK(fx[0] == 1.0);
    CHECK(fx[1] == 0.5);
    CHECK(fx[2] == 0.25);
    CHECK(fx[3] == 0.0);
}

TEST_CASE("transforms are exactly swap invariant", "[transform]") {
    Rng rng(2718);
    for (const auto kind : {TransformKind::diag, TransformKind::minmax}) {
        const SymmetricTransform t{kind, 5};
        for (int rep = 0; rep < 2000; ++rep) {
            std::vector<double> x(5), xp(5);
            for (auto& v : x) v = rng.uniform(-3, 3);
            for (auto& v : xp) v = rng.uniform(-3, 3);
            const auto a = t.apply(x, xp);
            const auto b = t.apply(xp, x);
            for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);  // bitwise
        }
    }
}

TEST_CASE("transform parsing and errors", "[transform]") {
    CHECK(parse_transform("diag") == TransformKind::diag);
    CHECK(parse_transform("minmax") == TransformKind::minmax);
    CHECK_THROWS_AS(parse_transform("fourier"), Error);
    const SymmetricTransform t{TransformKind::diag, 3};
    CHECK_THROWS_AS(t.apply({1.0, 2.0}, {1.0, 2.0, 3.0}), Error);
}
