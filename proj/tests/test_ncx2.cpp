#include "pla/ncx2.hpp"
#include "quadrature_oracle.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace pla;

TEST_CASE("central closed forms", "[ncx2]")
{
    REQUIRE(ncx2_cdf(2 * std::log(2.0), 2, 0.0) == Catch::Approx(0.5).margin(1e-14));
    for (double x : {0.1, 1.0, 5.0, 30.0}) REQUIRE(ncx2_cdf(x, 2, 0.0) == Catch::Approx(1 - std::exp(-x / 2)).margin(1e-14));
    REQUIRE(ncx2_cdf(0.0, 4, 3.0) == 0.0);
    REQUIRE(ncx2_cdf(1e4, 4, 3.0) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(ncx2_sf(60.0, 2, 0.0) == Catch::Approx(std::exp(-30.0)).epsilon(1e-12));
}

TEST_CASE("matches the Bessel-density quadrature oracle", "[ncx2]")
{
    // Frozen value of the oracle at (x=10, dof=6, delta=4).
    REQUIRE(std::fabs(testing::ncx2_cdf_quadrature(10.0, 6, 4.0) - 0.5653534736475517) < 1e-10);
    REQUIRE(std::fabs(ncx2_cdf(10.0, 6, 4.0) - 0.5653534736475517) < 1e-8);

    for (const auto& pt : testing::ncx2_oracle_grid()) {
        INFO("x=" << pt.x << " dof=" << pt.dof << " delta=" << pt.delta);
        const double oracle = testing::ncx2_cdf_quadrature(pt.x, pt.dof, pt.delta);
        REQUIRE(std::fabs(ncx2_cdf(pt.x, pt.dof, pt.delta) - oracle) < 1e-8);
        REQUIRE(std::fabs(ncx2_sf(pt.x, pt.dof, pt.delta) - (1 - oracle)) < 1e-8);
    }
}

TEST_CASE("monotone and bounded", "[ncx2]")
{
    for (int dof : {1, 2, 6, 12})
        for (double delta : {0.0, 1.0, 25.0}) {
            double prev = 0.0;
            for (double x = 0.05; x < 120; x *= 1.3) {
                const double c = ncx2_cdf(x, dof, delta);
                REQUIRE(c >= prev - 1e-15);
                REQUIRE(c <= 1.0);
                prev = c;
            }
        }
}

TEST_CASE("inverse round trips", "[ncx2]")
{
    for (int dof : {2, 4, 6, 12})
        for (double delta : {0.0, 0.26, 4.0, 40.0})
            for (double p : {1e-6, 0.001, 0.5, 0.9999, 1 - 1e-6}) {
                const double x = ncx2_inv(p, dof, delta);
                INFO("dof=" << dof << " delta=" << delta << " p=" << p);
                REQUIRE(std::fabs(ncx2_cdf(x, dof, delta) - p) <= 1e-9);
            }
    REQUIRE(ncx2_inv(1 - 1e-4, 2, 0.0) == Catch::Approx(2 * std::log(1e4)).epsilon(1e-9));
    REQUIRE(ncx2_inv(1 - 1e-4, 2, 0.0) == Catch::Approx(18.42).margin(0.005));
    REQUIRE(ncx2_inv(0.3, 6, 2.0) < ncx2_inv(0.31, 6, 2.0));
    REQUIRE_THROWS_AS(ncx2_inv(0.0, 2, 0.0), InvariantViolation);
    REQUIRE_THROWS_AS(ncx2_inv(1.0, 2, 0.0), InvariantViolation);
}

TEST_CASE("incomplete gamma complements", "[ncx2]")
{
    for (double a : {0.5, 1.0, 3.5, 40.0})
        for (double x : {0.01, 0.7, 3.0, 45.0, 200.0}) REQUIRE(gamma_p(a, x) + gamma_q(a, x) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(gamma_p(1.0, 2.0) == Catch::Approx(1 - std::exp(-2.0)).epsilon(1e-14));
}
