#include "pla/optimize.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace pla;

namespace {

ScenarioParams scenario(std::size_t n, auto&& edit)
{
    ScenarioConfig c;
    c.n_subcarriers = n;
    edit(c);
    return ScenarioParams(c);
}

double fresh_false_alarm(const ScenarioParams& p, const ThresholdPair& bob, std::size_t n, std::uint64_t seed)
{
    const McPlan plan{n, seed, 1};
    const auto [h0, h1] = detail::sample_stats(p, plan, AttackStrategy::simplified());
    std::size_t fa = 0;
    for (std::size_t i = 0; i < n; ++i) fa += h0.psi[i] > bob.theta || h0.abs_gamma[i] > bob.epsilon;
    return double(fa) / double(n);
}

} // namespace

TEST_CASE("threshold search meets the false-alarm target", "[optimize]")
{
    const auto p = scenario(3, [](auto& c) { c.rho_AE = 0.1; c.alpha_II = {0.8}; });
    const double target = 1e-2;
    const std::size_t n = 100000;
    Rng rng(10);
    const auto res = optimize_thresholds(p, target, n, AttackStrategy::simplified(), rng);

    SECTION("fresh validation set")
    {
        const double fa = fresh_false_alarm(p, res.best, n, 999);
        REQUIRE(std::fabs(fa - target) <= 1.96 * std::sqrt(target * (1 - target) / n));
    }
    SECTION("minimizer over the feasible grid")
    {
        for (const auto& c : res.grid)
            if (c.feasible) REQUIRE(res.p_md <= c.p_md);
        REQUIRE(res.grid.back().epsilon == std::numeric_limits<double>::infinity());
    }
    SECTION("modulus condition never hurts at matched false alarm")
    {
        const auto& llr_only = res.grid.back();
        REQUIRE(llr_only.feasible);
        REQUIRE(res.p_md <= llr_only.p_md + 3 * std::sqrt(llr_only.p_md * (1 - llr_only.p_md) / n));
        // At this fading level the modulus condition strictly helps.
        REQUIRE(res.p_md < llr_only.p_md);
    }
    SECTION("reproducible for a fixed seed and worker count independent")
    {
        Rng a(10), b(10);
        const auto r1 = optimize_thresholds(p, target, n, AttackStrategy::simplified(), a, 1);
        const auto r4 = optimize_thresholds(p, target, n, AttackStrategy::simplified(), b, 4);
        REQUIRE(r1.best.theta == r4.best.theta);
        REQUIRE(r1.best.epsilon == r4.best.epsilon);
        REQUIRE(r1.p_md == r4.p_md);
        REQUIRE(r1.best.theta == res.best.theta);
    }
}

TEST_CASE("infinite modulus threshold degenerates to the LLR threshold", "[optimize]")
{
    // Single Phase-I packet and static channel: the LLR is exactly central chi-square.
    const auto p = scenario(2, [](auto& c) { c.rho_AE = 0.3; });
    const double target = 1e-2;
    const std::size_t n = 200000;
    Rng rng(11);
    const auto res = optimize_thresholds(p, target, n, AttackStrategy::simplified(), rng);
    const double theta_inf = res.grid.back().theta;
    const double analytic_fa_at_empirical = ncx2_sf(theta_inf, 4, 0.0);
    REQUIRE(std::fabs(analytic_fa_at_empirical - target) < 3 * std::sqrt(target * (1 - target) / n));
    REQUIRE(theta_inf == Catch::Approx(ncx2_inv(1 - target, 4, 0.0)).epsilon(0.02));
}

TEST_CASE("threshold search preconditions", "[optimize]")
{
    const auto p = scenario(1, [](auto& c) { c.rho_AE = 0.1; });
    Rng rng(12);
    REQUIRE_THROWS_AS(optimize_thresholds(p, 1e-3, 50000, AttackStrategy::simplified(), rng), InvariantViolation);
    REQUIRE_THROWS_AS(optimize_thresholds(p, 0.0, 50000, AttackStrategy::simplified(), rng), InvariantViolation);
}

TEST_CASE("ideal-knowledge bound is below the LLR test", "[optimize]")
{
    for (double a2 : {1.0, 0.8}) {
        const auto p = scenario(3, [&](auto& c) { c.rho_AE = 0.1; c.alpha_II = {a2}; });
        const double target = 1e-2;
        const std::size_t n = 100000;
        Rng rng(13);
        const double s = p.sigma2_I() + p.sigma2_II();
        const auto ideal = calibrate_ideal_threshold(p, target, n, AttackStrategy::simplified(), s, s, rng);
        Rng rng2(14);
        const auto thr = optimize_thresholds(p, target, n, AttackStrategy::simplified(), rng2);
        const auto& llr = thr.grid.back();
        REQUIRE(ideal.p_fa <= target);
        REQUIRE(ideal.p_md <= llr.p_md + 3 * std::sqrt(llr.p_md * (1 - llr.p_md) / n));
    }
}

TEST_CASE("exponent search", "[optimize]")
{
    const auto p = scenario(1, [](auto& c) { c.rho_AE = 0.8; c.rho_EB = 0.8; });
    const double target = 1e-2;
    Rng trng(20);
    const auto thr = optimize_thresholds(p, target, 20000, AttackStrategy::modulus(), trng);

    SECTION("grid covers [-1, 1] at the requested step")
    {
        Rng rng(21);
        const auto s = optimize_attack_exponents(p, thr.best, 0.5, 4096, rng);
        REQUIRE(s.cells.size() == 25);
        REQUIRE(s.cells.front().x == -1.0);
        REQUIRE(s.cells.back().y == 1.0);
        REQUIRE_THROWS_AS(optimize_attack_exponents(p, thr.best, 0.3, 4096, rng), InvariantViolation);
    }
    SECTION("deterministic and independent of worker count")
    {
        Rng a(22), b(22);
        const auto s1 = optimize_attack_exponents(p, thr.best, 0.25, 20000, a, 1);
        const auto s3 = optimize_attack_exponents(p, thr.best, 0.25, 20000, b, 3);
        REQUIRE(s1.x == s3.x);
        REQUIRE(s1.y == s3.y);
        for (std::size_t i = 0; i < s1.cells.size(); ++i) REQUIRE(s1.cells[i].p_md == s3.cells[i].p_md);
    }
    SECTION("best response dominates every other strategy on common draws")
    {
        Rng a(23);
        const auto s = optimize_attack_exponents(p, thr.best, 0.25, 20000, a);
        for (const auto strat : {AttackStrategy::simplified(), AttackStrategy::modulus(), AttackStrategy::exponent(0.5, -0.5)}) {
            Rng b(23);
            const auto r = mismatched_eval(strat, StatDefender::Combined, p, thr.best, 20000, b);
            REQUIRE(s.p_md >= r.p);
        }
        Rng c(23);
        const auto same = mismatched_eval(AttackStrategy::exponent(s.x, s.y), StatDefender::Combined, p, thr.best, 20000, c);
        REQUIRE(same.p == s.p_md);
    }
    SECTION("co-located Eve makes the landscape flat")
    {
        const auto q = scenario(1, [](auto& c) { c.rho_AE = 1.0; c.rho_EB = 1.0; });
        Rng rng(24);
        const auto s = optimize_attack_exponents(q, thr.best, 0.5, 8192, rng);
        for (const auto& c : s.cells) REQUIRE(c.p_md == s.p_md);
        REQUIRE(s.x == 1.0);
        REQUIRE(s.y == 1.0);
    }
    SECTION("zero second-link correlation leaves non-positive exponents undefined")
    {
        const auto q = scenario(1, [](auto& c) { c.rho_AE = 0.5; });
        Rng rng(25);
        const auto s = optimize_attack_exponents(q, thr.best, 1.0, 4096, rng);
        for (const auto& c : s.cells) REQUIRE(std::isnan(c.p_md) == (c.y <= 0));
    }
}
