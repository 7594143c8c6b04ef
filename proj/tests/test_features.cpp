#include "pla/mlauth/features.hpp"
#include "pla/mlauth/kernel.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace pla;
using Catch::Approx;

TEST_CASE("featurize interleaves real and imaginary parts", "[features]")
{
    const ChannelVector h(std::vector<cplx>{{3, 4}});
    const auto f = featurize(h);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == 3.0);
    CHECK(f[1] == 4.0);

    Rng rng(5);
    std::vector<cplx> c(6);
    for (auto& z : c) z = rng.complex_normal(1.0);
    const ChannelVector g(c);
    CHECK(defeaturize(featurize(g)) == g);
}

TEST_CASE("feature distance is the complex 2-norm distance", "[features]")
{
    Rng rng(6);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<cplx> a(4), b(4);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            a[i] = rng.complex_normal(1.0);
            b[i] = rng.complex_normal(1.0);
            norm2 += std::norm(a[i] - b[i]);
        }
        const auto fa = featurize(ChannelVector(a)), fb = featurize(ChannelVector(b));
        CHECK(DistanceMetric::euclidean()(fa, fb) == Approx(std::sqrt(norm2)).epsilon(1e-14));
    }
}

TEST_CASE("non-finite components are rejected", "[features]")
{
    CHECK_THROWS_AS(FeatureVector({1.0, std::nan("")}), InvariantViolation);
    FeatureMatrix m(2);
    const std::vector<double> bad{1, 2, 3};
    CHECK_THROWS_AS(m.push_back(bad), DimensionMismatch);
}

TEST_CASE("LLR distance", "[features]")
{
    const FeatureVector a{1.0, 2.0, -1.0, 0.5}, b{0.0, 1.0, 1.0, 0.5};
    const std::vector<double> two{2.0, 2.0};
    CHECK(llr_distance(a, a, two) == 0.0);
    CHECK(llr_distance(a, b, two) == Approx(squared_euclidean(a.values(), b.values())).epsilon(1e-15));
    const std::vector<double> s{0.5, 4.0};
    // 2 * (2/0.5 + 4/4)
    CHECK(llr_distance(a, b, s) == Approx(10.0));
    CHECK(DistanceMetric::llr(s)(a, b) == Approx(10.0));
    const std::vector<double> zero{1.0, 0.0};
    CHECK_THROWS_AS(llr_distance(a, b, zero), SingularTest);
    CHECK_THROWS_AS(DistanceMetric::llr(zero), SingularTest);
}

TEST_CASE("metrics are symmetric and vanish only on equal inputs", "[features]")
{
    Rng rng(7);
    const std::vector<DistanceMetric> metrics{DistanceMetric::euclidean(), DistanceMetric::squared_euclidean(),
                                              DistanceMetric::llr({0.3, 1.7})};
    for (int rep = 0; rep < 100; ++rep) {
        const FeatureVector a{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const FeatureVector b{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        for (const auto& d : metrics) {
            CHECK(d(a, b) == d(b, a));
            CHECK(d(a, b) > 0.0);
            CHECK(d(a, a) == 0.0);
        }
    }
}

TEST_CASE("Gaussian kernel", "[features]")
{
    const FeatureVector a{0.0, 0.0}, b{1.0, 1.0};
    CHECK(gaussian_kernel(a, a, 0.7) == 1.0);
    CHECK(gaussian_kernel(a, b, 0.7) == gaussian_kernel(b, a, 0.7));
    // |a-b|^2 = 2 = 2 sigma^2
    CHECK(gaussian_kernel(a, b, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(gaussian_kernel(a, b, 1.0) == Approx(0.3679).margin(1e-4));
    CHECK_THROWS_AS(gaussian_kernel(a, b, 0.0), InvariantViolation);

    const Kernel lin = Kernel::linear(), poly = Kernel::polynomial(2, 0.5, 1.0);
    CHECK(lin(a.values(), b.values()) == 0.0);
    CHECK(poly(b.values(), b.values()) == Approx(4.0));
}

TEST_CASE("median pairwise distance", "[features]")
{
    FeatureMatrix m(1);
    for (double v : {0.0, 1.0, 3.0}) m.push_back(std::vector<double>{v});
    // pairwise: 1, 3, 2
    CHECK(median_pairwise_distance(m) == 2.0);
}
