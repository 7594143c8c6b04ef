#pragma once

#include "pla/attacks.hpp"
#include "pla/channel.hpp"
#include "pla/parallel.hpp"
#include "pla/statdec.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pla {

/// Monte Carlo budget: `trials` independent channel realizations split into fixed-size blocks.
/// Block b always draws from Rng::stream(seed, b), so results do not depend on `workers`.
struct McPlan {
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    static constexpr std::size_t kBlock = 4096;

    [[nodiscard]] std::size_t blocks() const noexcept { return (trials + kBlock - 1) / kBlock; }
    [[nodiscard]] std::size_t block_size(std::size_t b) const noexcept
    {
        return std::min(kBlock, trials - b * kBlock);
    }
};

/// One block of single-packet trials, stored row-major (trial x subcarrier).
/// Each trial holds a fresh channel, Bob's reference, one Alice packet and one Eve forging input.
struct TrialBatch {
    std::size_t n = 0;
    std::size_t count = 0;
    std::vector<cplx> ref, alice, ae, eb, eve_noise;
    // Present only for ideal-bound batches: Phase-I noise on the forged reference, and an
    // independent forging input for Alice's slots.
    std::vector<cplx> eve_ref_noise, alt_ae, alt_eb, alt_ref_noise;

    [[nodiscard]] std::span<const cplx> row(const std::vector<cplx>& v, std::size_t t) const noexcept
    {
        return {v.data() + t * n, n};
    }
};

namespace detail {

inline void append(std::vector<cplx>& dst, const ChannelVector& v) { dst.insert(dst.end(), v.begin(), v.end()); }

inline ReferenceEstimate draw_reference(const ChannelVector& h, const ScenarioParams& p, Rng& rng)
{
    if (p.alpha_I_spread() == 0) return sample_reference(h, p, rng);
    std::vector<ChannelVector> est;
    std::vector<std::vector<double>> alphas;
    est.reserve(p.m());
    alphas.reserve(p.m());
    for (std::size_t m = 0; m < p.m(); ++m) {
        alphas.push_back(phase1_alphas(p, rng));
        est.push_back(bob_estimate_phase1(h, p, alphas.back(), rng));
    }
    return average_estimates(est, alphas);
}

} // namespace detail

inline TrialBatch generate_batch(const ScenarioParams& p, std::uint64_t seed, std::uint64_t block, std::size_t count,
                                 bool ideal)
{
    Rng rng = Rng::stream(seed, block);
    TrialBatch b;
    b.n = p.n();
    b.count = count;
    for (auto* v : {&b.ref, &b.alice, &b.ae, &b.eb, &b.eve_noise}) v->reserve(count * b.n);
    for (std::size_t t = 0; t < count; ++t) {
        const ChannelVector h = sample_channel(p, rng);
        detail::append(b.ref, detail::draw_reference(h, p, rng).h_bar);
        detail::append(b.alice, alice_estimate_phase2(h, p, rng));
        const EveObservation o = eve_forging_input(h, p, rng);
        detail::append(b.ae, o.ae);
        detail::append(b.eb, o.eb);
        for (std::size_t i = 0; i < b.n; ++i) b.eve_noise.push_back(rng.complex_normal(p.sigma2_II()));
        if (ideal) {
            for (std::size_t i = 0; i < b.n; ++i) b.eve_ref_noise.push_back(rng.complex_normal(p.sigma2_I()));
            const EveObservation alt = eve_forging_input(h, p, rng);
            detail::append(b.alt_ae, alt.ae);
            detail::append(b.alt_eb, alt.eb);
            for (std::size_t i = 0; i < b.n; ++i) b.alt_ref_noise.push_back(rng.complex_normal(p.sigma2_I()));
        }
    }
    return b;
}

/// Per-carrier linear forging weights of an attack.
struct ForgeWeights {
    std::vector<double> on_ae;
    std::vector<double> on_eb;
};

inline ForgeWeights forge_weights(const AttackStrategy& a, const ScenarioParams& p)
{
    ForgeWeights w{std::vector<double>(p.n()), std::vector<double>(p.n())};
    for (std::size_t i = 0; i < p.n(); ++i) {
        const auto [c, d] = attack_weights(a, p, i);
        w.on_ae[i] = d;
        w.on_eb[i] = c;
    }
    return w;
}

/// Statistic pair (LLR, modulus difference) for one packet.
struct TestStats {
    double psi;
    double gamma;
};

/// Evaluates trials of a batch against Bob's per-dimension variances.
class BatchEvaluator {
public:
    BatchEvaluator(const TrialBatch& b, std::span<const double> sigma2_n) : b_(b), inv_s2_(sigma2_n.size())
    {
        detail::require_same_size(sigma2_n.size(), b.n, "BatchEvaluator");
        for (std::size_t i = 0; i < b.n; ++i) {
            if (!(sigma2_n[i] > 0)) throw SingularTest("BatchEvaluator: zero per-dimension variance");
            inv_s2_[i] = 2.0 / sigma2_n[i];
        }
    }

    [[nodiscard]] TestStats alice(std::size_t t) const noexcept
    {
        const cplx* r = b_.ref.data() + t * b_.n;
        const cplx* a = b_.alice.data() + t * b_.n;
        TestStats s{0.0, 0.0};
        for (std::size_t i = 0; i < b_.n; ++i) {
            s.psi += inv_s2_[i] * std::norm(a[i] - r[i]);
            s.gamma += std::abs(r[i]) - std::abs(a[i]);
        }
        return s;
    }

    [[nodiscard]] TestStats eve(std::size_t t, const ForgeWeights& w) const noexcept
    {
        const std::size_t o = t * b_.n;
        TestStats s{0.0, 0.0};
        for (std::size_t i = 0; i < b_.n; ++i) {
            const cplx hh = w.on_ae[i] * b_.ae[o + i] + w.on_eb[i] * b_.eb[o + i] + b_.eve_noise[o + i];
            s.psi += inv_s2_[i] * std::norm(hh - b_.ref[o + i]);
            s.gamma += std::abs(b_.ref[o + i]) - std::abs(hh);
        }
        return s;
    }

    /// Ideal-bound statistics for Alice's and Eve's packet of trial t.
    [[nodiscard]] std::pair<double, double> ideal(std::size_t t, const ForgeWeights& w, double sigma2,
                                                  double sigma2_E) const
    {
        const std::size_t o = t * b_.n;
        std::vector<cplx> g(b_.n), eref(b_.n), aref(b_.n), eve_hat(b_.n);
        for (std::size_t i = 0; i < b_.n; ++i) {
            g[i] = w.on_ae[i] * b_.ae[o + i] + w.on_eb[i] * b_.eb[o + i];
            eve_hat[i] = g[i] + b_.eve_noise[o + i];
            eref[i] = g[i] + b_.eve_ref_noise[o + i];
            aref[i] = w.on_ae[i] * b_.alt_ae[o + i] + w.on_eb[i] * b_.alt_eb[o + i] + b_.alt_ref_noise[o + i];
        }
        const auto ref = b_.row(b_.ref, t);
        return {ideal_llr(b_.row(b_.alice, t), ref, aref, sigma2, sigma2_E), ideal_llr(eve_hat, ref, eref, sigma2, sigma2_E)};
    }

private:
    const TrialBatch& b_;
    std::vector<double> inv_s2_;
};

/// Runs fn(batch, block_index) over every block of a plan, in parallel.
template <class F>
void for_each_batch(const ScenarioParams& p, const McPlan& plan, bool ideal, F&& fn)
{
    parallel_for(plan.blocks(), plan.workers, [&](std::size_t blk) {
        const TrialBatch b = generate_batch(p, plan.seed, blk, plan.block_size(blk), ideal);
        fn(b, blk);
    });
}

} // namespace pla
