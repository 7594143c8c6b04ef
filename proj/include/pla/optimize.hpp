#pragma once

#include "pla/attacks.hpp"
#include "pla/error.hpp"
#include "pla/metrics.hpp"
#include "pla/simulate.hpp"
#include "pla/statdec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

namespace pla {

struct ThresholdPair {
    double theta;
    double epsilon; // +inf disables the modulus condition
};

struct ThresholdCandidate {
    double epsilon;
    double theta;
    double p_fa;
    double p_md;
    bool feasible;
};

struct ThresholdSearch {
    ThresholdPair best;
    double p_fa;
    double p_md;
    std::vector<ThresholdCandidate> grid; // ascending epsilon, +inf last
    std::size_t n_mc;
};

namespace detail {

struct StatSamples {
    std::vector<double> psi;
    std::vector<double> abs_gamma;
};

/// H0 and H1 statistic samples over a plan, concatenated in block order.
inline std::pair<StatSamples, StatSamples> sample_stats(const ScenarioParams& p, const McPlan& plan,
                                                        const AttackStrategy& attack)
{
    const auto s2 = per_dim_variance(p);
    const ForgeWeights w = forge_weights(attack, p);
    StatSamples h0, h1;
    for (auto* s : {&h0, &h1}) {
        s->psi.resize(plan.trials);
        s->abs_gamma.resize(plan.trials);
    }
    for_each_batch(p, plan, false, [&](const TrialBatch& b, std::size_t blk) {
        const BatchEvaluator ev(b, s2);
        const std::size_t off = blk * McPlan::kBlock;
        for (std::size_t t = 0; t < b.count; ++t) {
            const TestStats a = ev.alice(t), e = ev.eve(t, w);
            h0.psi[off + t] = a.psi;
            h0.abs_gamma[off + t] = std::fabs(a.gamma);
            h1.psi[off + t] = e.psi;
            h1.abs_gamma[off + t] = std::fabs(e.gamma);
        }
    });
    return {std::move(h0), std::move(h1)};
}

/// Value v such that at most `allowed` of `desc` (sorted descending) exceed it.
inline double upper_order_statistic(const std::vector<double>& desc, std::size_t allowed)
{
    if (allowed >= desc.size()) return std::numeric_limits<double>::min();
    return std::max(desc[allowed], std::numeric_limits<double>::min());
}

} // namespace detail

/// Two-step search for the combined test: for each modulus threshold on a grid, the LLR
/// threshold is the exact H0 order statistic meeting the false-alarm target; among the
/// feasible pairs the one with the lowest Monte Carlo missed-detection rate under `attack` wins.
inline ThresholdSearch optimize_thresholds(const ScenarioParams& p, double target_pfa, std::size_t n_mc,
                                           const AttackStrategy& attack, Rng& rng, unsigned workers = 1,
                                           std::size_t grid_points = 64)
{
    detail::require(target_pfa > 0 && target_pfa < 1, "optimize_thresholds: target must lie in (0,1)");
    detail::require(target_pfa * static_cast<double>(n_mc) >= 100.0,
                    "optimize_thresholds: need target_pfa * n_mc >= 100");
    const McPlan plan{n_mc, rng.next_u64(), workers};
    const auto [h0, h1] = detail::sample_stats(p, plan, attack);
    const double n = static_cast<double>(n_mc);
    const auto allowed = static_cast<std::size_t>(std::floor(target_pfa * n));
    const double ci = 1.96 * std::sqrt(target_pfa * (1.0 - target_pfa) / n);

    std::vector<std::size_t> order(n_mc);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return h0.psi[a] != h0.psi[b] ? h0.psi[a] > h0.psi[b] : a < b;
    });
    std::vector<double> gamma_sorted = h0.abs_gamma;
    std::sort(gamma_sorted.begin(), gamma_sorted.end());
    const double eps_max =
        1.25 * gamma_sorted[std::min(n_mc - 1, static_cast<std::size_t>(std::ceil((1.0 - target_pfa / 10.0) * n)))];

    auto evaluate = [&](double eps) {
        ThresholdCandidate c{eps, 0.0, 0.0, 0.0, false};
        const auto outside = static_cast<std::size_t>(
            gamma_sorted.end() - std::upper_bound(gamma_sorted.begin(), gamma_sorted.end(), eps));
        if (outside > allowed) {
            c.p_fa = static_cast<double>(outside) / n;
            c.p_md = std::numeric_limits<double>::quiet_NaN();
            return c;
        }
        std::size_t need = allowed - outside, seen = 0;
        c.theta = std::numeric_limits<double>::min();
        for (std::size_t idx : order) {
            if (h0.abs_gamma[idx] > eps) continue;
            if (seen == need) {
                c.theta = std::max(h0.psi[idx], std::numeric_limits<double>::min());
                break;
            }
            ++seen;
        }
        std::size_t fa = outside, md = 0;
        for (std::size_t i = 0; i < n_mc; ++i) {
            if (h0.abs_gamma[i] <= eps && h0.psi[i] > c.theta) ++fa;
            if (h1.abs_gamma[i] <= eps && h1.psi[i] <= c.theta) ++md;
        }
        c.p_fa = static_cast<double>(fa) / n;
        c.p_md = static_cast<double>(md) / n;
        c.feasible = std::fabs(c.p_fa - target_pfa) <= ci;
        return c;
    };

    ThresholdSearch out{{0, 0}, 0, 0, {}, n_mc};
    for (std::size_t res = grid_points;; res *= 2) {
        out.grid.clear();
        std::size_t finite_feasible = 0;
        for (std::size_t k = 1; k <= res; ++k) {
            out.grid.push_back(evaluate(eps_max * static_cast<double>(k) / static_cast<double>(res)));
            finite_feasible += out.grid.back().feasible;
        }
        if (finite_feasible >= 2 || res >= 1024) break;
    }
    out.grid.push_back(evaluate(std::numeric_limits<double>::infinity()));

    const ThresholdCandidate* best = nullptr;
    for (const auto& c : out.grid)
        if (c.feasible && (!best || c.p_md < best->p_md)) best = &c;
    if (!best) throw InfeasibleTarget("optimize_thresholds: no threshold pair meets the false-alarm target");
    out.best = {best->theta, best->epsilon};
    out.p_fa = best->p_fa;
    out.p_md = best->p_md;
    return out;
}

struct IdealCalibration {
    double theta_bar;
    double p_fa;
    double p_md;
};

/// Threshold of the ideal-knowledge test set at the empirical H0 quantile.
inline IdealCalibration calibrate_ideal_threshold(const ScenarioParams& p, double target_pfa, std::size_t n_mc,
                                                  const AttackStrategy& attack, double sigma2, double sigma2_E,
                                                  Rng& rng, unsigned workers = 1)
{
    detail::require(target_pfa > 0 && target_pfa < 1, "calibrate_ideal_threshold: target must lie in (0,1)");
    const McPlan plan{n_mc, rng.next_u64(), workers};
    const auto s2 = per_dim_variance(p);
    const ForgeWeights w = forge_weights(attack, p);
    std::vector<double> a(n_mc), e(n_mc);
    for_each_batch(p, plan, true, [&](const TrialBatch& b, std::size_t blk) {
        const BatchEvaluator ev(b, s2);
        for (std::size_t t = 0; t < b.count; ++t) {
            const auto [pa, pe] = ev.ideal(t, w, sigma2, sigma2_E);
            a[blk * McPlan::kBlock + t] = pa;
            e[blk * McPlan::kBlock + t] = pe;
        }
    });
    std::vector<double> desc = a;
    std::sort(desc.begin(), desc.end(), std::greater<>());
    const auto allowed = static_cast<std::size_t>(std::floor(target_pfa * static_cast<double>(n_mc)));
    const double theta = allowed >= n_mc ? -std::numeric_limits<double>::infinity() : desc[allowed];
    const auto fa = std::count_if(a.begin(), a.end(), [&](double v) { return v > theta; });
    const auto md = std::count_if(e.begin(), e.end(), [&](double v) { return v <= theta; });
    return {theta, static_cast<double>(fa) / static_cast<double>(n_mc), static_cast<double>(md) / static_cast<double>(n_mc)};
}

enum class StatDefender { Llr, Combined };

struct AttackCell {
    double x;
    double y;
    double p_md; // NaN when the exponents are undefined for the geometry
};

struct AttackSearch {
    double x;
    double y;
    double p_md;
    std::vector<AttackCell> cells;
    std::size_t n_mc;
};

namespace detail {

inline std::vector<double> exponent_grid(double step)
{
    const double k = 2.0 / step;
    require(step > 0 && std::fabs(k - std::round(k)) < 1e-9, "grid step must divide 2 evenly");
    std::vector<double> g;
    for (long i = 0; i <= std::lround(k); ++i) g.push_back(std::round((-1.0 + i * step) * 1e9) / 1e9);
    return g;
}

inline bool accepted(const TestStats& s, StatDefender d, const ThresholdPair& bob) noexcept
{
    if (s.psi > bob.theta) return false;
    return d == StatDefender::Llr || std::fabs(s.gamma) <= bob.epsilon;
}

/// Eve acceptance counts per attack, all evaluated on the same trial draws.
inline std::vector<std::uint64_t> count_eve_accepts(const ScenarioParams& p, const McPlan& plan,
                                                    const std::vector<ForgeWeights>& attacks, StatDefender d,
                                                    const ThresholdPair& bob)
{
    const auto s2 = per_dim_variance(p);
    std::vector<std::vector<std::uint64_t>> per_block(plan.blocks(), std::vector<std::uint64_t>(attacks.size(), 0));
    for_each_batch(p, plan, false, [&](const TrialBatch& b, std::size_t blk) {
        const BatchEvaluator ev(b, s2);
        auto& counts = per_block[blk];
        for (std::size_t a = 0; a < attacks.size(); ++a)
            for (std::size_t t = 0; t < b.count; ++t) counts[a] += accepted(ev.eve(t, attacks[a]), d, bob);
    });
    std::vector<std::uint64_t> total(attacks.size(), 0);
    for (const auto& c : per_block)
        for (std::size_t a = 0; a < c.size(); ++a) total[a] += c[a];
    return total;
}

} // namespace detail

/// Exhaustive search of the exponent attack maximizing missed detection against a defender.
/// All cells share the same trial draws; ties go to larger x, then larger y.
inline AttackSearch optimize_attack_exponents(const ScenarioParams& p, const ThresholdPair& bob, double grid_step,
                                              std::size_t n_mc, Rng& rng, unsigned workers = 1,
                                              StatDefender defender = StatDefender::Combined)
{
    const McPlan plan{n_mc, rng.next_u64(), workers};
    const auto grid = detail::exponent_grid(grid_step);
    std::vector<AttackCell> cells;
    std::vector<ForgeWeights> weights;
    std::vector<std::size_t> valid;
    for (double x : grid)
        for (double y : grid) {
            cells.push_back({x, y, std::numeric_limits<double>::quiet_NaN()});
            if ((p.rho_AE() == 0 && x <= 0) || (p.rho_EB() == 0 && y <= 0)) continue;
            weights.push_back(forge_weights(AttackStrategy::exponent(x, y), p));
            valid.push_back(cells.size() - 1);
        }
    const auto counts = detail::count_eve_accepts(p, plan, weights, defender, bob);
    AttackSearch out{0, 0, -1.0, {}, n_mc};
    for (std::size_t k = 0; k < valid.size(); ++k) {
        AttackCell& c = cells[valid[k]];
        c.p_md = static_cast<double>(counts[k]) / static_cast<double>(n_mc);
        const bool better = c.p_md > out.p_md ||
                            (c.p_md == out.p_md && (c.x > out.x || (c.x == out.x && c.y > out.y)));
        if (better) {
            out.x = c.x;
            out.y = c.y;
            out.p_md = c.p_md;
        }
    }
    out.cells = std::move(cells);
    return out;
}

struct McRate {
    double p;
    double se;
    std::size_t n;
};

/// Missed-detection rate of one attack against a statistical defender.
/// Consumes the Rng exactly like optimize_attack_exponents, so equal Rng states give common draws.
inline McRate mismatched_eval(const AttackStrategy& attack, StatDefender defender, const ScenarioParams& p,
                              const ThresholdPair& bob, std::size_t n_mc, Rng& rng, unsigned workers = 1)
{
    const McPlan plan{n_mc, rng.next_u64(), workers};
    const auto counts = detail::count_eve_accepts(p, plan, {forge_weights(attack, p)}, defender, bob);
    const double r = static_cast<double>(counts[0]) / static_cast<double>(n_mc);
    return {r, binomial_se(r, n_mc), n_mc};
}

/// Pure-LLR threshold Bob sets from fading statistics.
inline double llr_threshold_for(const ScenarioParams& p, double target_pfa)
{
    return llr_threshold(target_pfa, p.n(), expected_noncentrality_mu(p));
}

} // namespace pla
