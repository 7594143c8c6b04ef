#pragma once

#include "pla/error.hpp"
#include "pla/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace pla {

using cplx = std::complex<double>;

/// Fixed-length vector of per-subcarrier complex gains.
class ChannelVector {
public:
    ChannelVector() = default;
    explicit ChannelVector(std::size_t n) : c_(n) {}
    explicit ChannelVector(std::vector<cplx> coeffs) : c_(std::move(coeffs))
    {
        for (const auto& z : c_)
            detail::require(std::isfinite(z.real()) && std::isfinite(z.imag()), "ChannelVector: non-finite component");
    }
    ChannelVector(std::initializer_list<cplx> coeffs) : ChannelVector(std::vector<cplx>(coeffs)) {}

    [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }
    cplx& operator[](std::size_t i) noexcept { return c_[i]; }
    const cplx& operator[](std::size_t i) const noexcept { return c_[i]; }
    [[nodiscard]] std::span<const cplx> coeffs() const noexcept { return c_; }
    [[nodiscard]] auto begin() const noexcept { return c_.begin(); }
    [[nodiscard]] auto end() const noexcept { return c_.end(); }

    friend bool operator==(const ChannelVector&, const ChannelVector&) = default;

private:
    std::vector<cplx> c_;
};

/// How Eve's two observation links share the innovation term.
enum class EveLinkInnovation { Independent, Shared };

/// Whether Eve's innovation is redrawn for every packet or fixed per channel realization.
enum class EveInnovationTiming { PerPacket, PerRealization };

/// Plain description of a scenario; validated by ScenarioParams.
/// Length-1 vectors are broadcast to all subcarriers; an empty power_delay means all ones.
struct ScenarioConfig {
    std::size_t n_subcarriers = 1;
    std::size_t m_training = 1;
    double sigma2_I = 0.031622776601683791; // 15 dB
    double sigma2_II = 0.01;                // 20 dB
    std::vector<double> alpha_I{1.0};
    std::vector<double> alpha_II{1.0};
    double rho_AE = 0.0;
    double rho_EB = 0.0;
    double rho_AB = 0.0;
    double sigma2_AE = 0.0;
    double sigma2_EB = 0.0;
    std::vector<double> power_delay{};
    EveLinkInnovation eve_links = EveLinkInnovation::Independent;
    EveInnovationTiming eve_timing = EveInnovationTiming::PerPacket;
    /// Eve forges from the mean of her M Phase-I observations instead of a fresh one per packet.
    bool eve_averaging = false;
    /// Per-packet Phase-I fading drawn uniformly in [alpha_I - spread, alpha_I]; 0 keeps it constant.
    double alpha_I_spread = 0.0;
};

inline double noise_variance_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

class ScenarioParams {
public:
    explicit ScenarioParams(ScenarioConfig c) : c_(std::move(c))
    {
        using detail::require;
        const std::size_t n = c_.n_subcarriers;
        require(n >= 1, "n_subcarriers must be positive");
        require(c_.m_training >= 1, "m_training must be positive");
        require(c_.sigma2_I >= 0 && c_.sigma2_II >= 0, "noise variances must be nonnegative");
        require(c_.sigma2_AE >= 0 && c_.sigma2_EB >= 0, "Eve noise variances must be nonnegative");
        for (double r : {c_.rho_AE, c_.rho_EB, c_.rho_AB})
            require(r >= 0 && r <= 1, "correlation coefficients must lie in [0,1]");
        require(c_.alpha_I_spread >= 0 && c_.alpha_I_spread <= 1, "alpha_I_spread must lie in [0,1]");
        broadcast(c_.alpha_I, n, 1.0, "alpha_I");
        broadcast(c_.alpha_II, n, 1.0, "alpha_II");
        broadcast(c_.power_delay, n, 1.0, "power_delay");
        for (std::size_t i = 0; i < n; ++i) {
            require(c_.alpha_I[i] >= 0 && c_.alpha_I[i] <= 1, "alpha_I components must lie in [0,1]");
            require(c_.alpha_II[i] >= 0 && c_.alpha_II[i] <= 1, "alpha_II components must lie in [0,1]");
            require(c_.power_delay[i] > 0 && std::isfinite(c_.power_delay[i]), "power_delay must be strictly positive");
        }
    }

    [[nodiscard]] const ScenarioConfig& config() const noexcept { return c_; }
    [[nodiscard]] std::size_t n() const noexcept { return c_.n_subcarriers; }
    [[nodiscard]] std::size_t m() const noexcept { return c_.m_training; }
    [[nodiscard]] double sigma2_I() const noexcept { return c_.sigma2_I; }
    [[nodiscard]] double sigma2_II() const noexcept { return c_.sigma2_II; }
    [[nodiscard]] std::span<const double> alpha_I() const noexcept { return c_.alpha_I; }
    [[nodiscard]] std::span<const double> alpha_II() const noexcept { return c_.alpha_II; }
    [[nodiscard]] double rho_AE() const noexcept { return c_.rho_AE; }
    [[nodiscard]] double rho_EB() const noexcept { return c_.rho_EB; }
    [[nodiscard]] double rho_AB() const noexcept { return c_.rho_AB; }
    [[nodiscard]] double sigma2_AE() const noexcept { return c_.sigma2_AE; }
    [[nodiscard]] double sigma2_EB() const noexcept { return c_.sigma2_EB; }
    [[nodiscard]] std::span<const double> power_delay() const noexcept { return c_.power_delay; }
    [[nodiscard]] EveLinkInnovation eve_links() const noexcept { return c_.eve_links; }
    [[nodiscard]] EveInnovationTiming eve_timing() const noexcept { return c_.eve_timing; }
    [[nodiscard]] bool eve_averaging() const noexcept { return c_.eve_averaging; }
    [[nodiscard]] double alpha_I_spread() const noexcept { return c_.alpha_I_spread; }

    /// Copy with a modified configuration, re-validated.
    template <class F>
    [[nodiscard]] ScenarioParams with(F&& edit) const
    {
        ScenarioConfig c = c_;
        edit(c);
        return ScenarioParams(std::move(c));
    }

private:
    static void broadcast(std::vector<double>& v, std::size_t n, double fill, const char* name)
    {
        if (v.empty()) v.assign(n, fill);
        else if (v.size() == 1 && n > 1) v.assign(n, v[0]);
        detail::require_same_size(v.size(), n, name);
    }

    ScenarioConfig c_;
};

/// Averaged Phase-I estimate and the fading it was taken under.
struct ReferenceEstimate {
    ChannelVector h_bar;
    std::vector<double> alpha_bar_I;
};

struct EveObservation {
    ChannelVector ae; // Alice -> Eve
    ChannelVector eb; // Eve <- Bob
};

inline ChannelVector sample_channel(const ScenarioParams& p, Rng& rng)
{
    ChannelVector h(p.n());
    for (std::size_t i = 0; i < p.n(); ++i) h[i] = rng.complex_normal(p.power_delay()[i]);
    return h;
}

/// Fading coefficients for one Phase-I packet.
inline std::vector<double> phase1_alphas(const ScenarioParams& p, Rng& rng)
{
    std::vector<double> a(p.alpha_I().begin(), p.alpha_I().end());
    if (p.alpha_I_spread() > 0)
        for (auto& x : a) x = std::max(0.0, x - p.alpha_I_spread() * rng.uniform());
    return a;
}

inline ChannelVector bob_estimate_phase1(const ChannelVector& h, const ScenarioParams& p,
                                         std::span<const double> alpha_m, Rng& rng)
{
    detail::require_same_size(alpha_m.size(), h.size(), "bob_estimate_phase1 alpha");
    ChannelVector out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double a = alpha_m[i];
        detail::require(a >= 0 && a <= 1, "fading coefficient outside [0,1]");
        const cplx w = rng.complex_normal();
        const cplx wi = rng.complex_normal(p.sigma2_I());
        out[i] = a * h[i] + std::sqrt(1.0 - a * a) * w + wi;
    }
    return out;
}

inline ReferenceEstimate average_estimates(std::span<const ChannelVector> estimates,
                                           std::span<const std::vector<double>> alphas)
{
    detail::require(!estimates.empty(), "average_estimates: empty list");
    detail::require_same_size(alphas.size(), estimates.size(), "average_estimates alphas");
    const std::size_t n = estimates.front().size();
    std::vector<cplx> sum(n);
    std::vector<double> asum(n, 0.0);
    for (std::size_t m = 0; m < estimates.size(); ++m) {
        detail::require_same_size(estimates[m].size(), n, "average_estimates estimate");
        detail::require_same_size(alphas[m].size(), n, "average_estimates alpha");
        for (std::size_t i = 0; i < n; ++i) {
            sum[i] += estimates[m][i];
            asum[i] += alphas[m][i];
        }
    }
    const double inv = 1.0 / static_cast<double>(estimates.size());
    for (std::size_t i = 0; i < n; ++i) {
        sum[i] *= inv;
        asum[i] *= inv;
    }
    return {ChannelVector(std::move(sum)), std::move(asum)};
}

/// Draws the average of M Phase-I estimates directly from its exact law.
/// Equal in distribution to averaging M bob_estimate_phase1 draws at constant fading.
inline ReferenceEstimate sample_reference(const ChannelVector& h, const ScenarioParams& p, Rng& rng)
{
    detail::require(p.alpha_I_spread() == 0, "sample_reference requires constant Phase-I fading");
    const double inv_m = 1.0 / static_cast<double>(p.m());
    ChannelVector hb(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double a = p.alpha_I()[i];
        hb[i] = a * h[i] + rng.complex_normal((1.0 - a * a + p.sigma2_I()) * inv_m);
    }
    return {std::move(hb), std::vector<double>(p.alpha_I().begin(), p.alpha_I().end())};
}

inline ChannelVector alice_estimate_phase2(const ChannelVector& h, const ScenarioParams& p, Rng& rng)
{
    detail::require_same_size(h.size(), p.n(), "alice_estimate_phase2");
    ChannelVector out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double a = p.alpha_II()[i];
        const cplx wf = rng.complex_normal();
        const cplx w2 = rng.complex_normal(p.sigma2_II());
        out[i] = a * h[i] + std::sqrt(1.0 - a * a) * wf + w2;
    }
    return out;
}

/// Innovation terms of Eve's two links; identical when the links share it.
struct EveInnovation {
    ChannelVector ae;
    ChannelVector eb;
};

inline EveInnovation draw_eve_innovation(const ScenarioParams& p, Rng& rng, double var = 1.0)
{
    const bool shared = p.eve_links() == EveLinkInnovation::Shared;
    EveInnovation r{ChannelVector(p.n()), ChannelVector(p.n())};
    for (std::size_t i = 0; i < p.n(); ++i) {
        r.ae[i] = rng.complex_normal(var);
        r.eb[i] = shared ? r.ae[i] : rng.complex_normal(var);
    }
    return r;
}

/// Eve's estimates for a given innovation; only her estimation noise is drawn.
/// `noise_scale` multiplies Eve's noise variances (1/M for an averaged observation).
inline EveObservation eve_observations(const ChannelVector& h, const ScenarioParams& p, const EveInnovation& r,
                                       Rng& rng, double noise_scale = 1.0)
{
    detail::require_same_size(h.size(), p.n(), "eve_observations");
    const double ca = std::sqrt(1.0 - p.rho_AE() * p.rho_AE());
    const double cb = std::sqrt(1.0 - p.rho_EB() * p.rho_EB());
    EveObservation o{ChannelVector(h.size()), ChannelVector(h.size())};
    for (std::size_t i = 0; i < h.size(); ++i) {
        o.ae[i] = p.rho_AE() * h[i] + ca * r.ae[i] + rng.complex_normal(p.sigma2_AE() * noise_scale);
        o.eb[i] = p.rho_EB() * h[i] + cb * r.eb[i] + rng.complex_normal(p.sigma2_EB() * noise_scale);
    }
    return o;
}

/// Eve's estimates of her links to Alice and to Bob for one packet.
inline EveObservation eve_observations(const ChannelVector& h, const ScenarioParams& p, Rng& rng)
{
    const EveInnovation r = draw_eve_innovation(p, rng);
    return eve_observations(h, p, r, rng);
}

/// The observation Eve forges from in a fresh channel realization, drawn from its exact law
/// under the configured averaging and innovation timing.
inline EveObservation eve_forging_input(const ChannelVector& h, const ScenarioParams& p, Rng& rng)
{
    if (!p.eve_averaging()) return eve_observations(h, p, rng);
    const double inv_m = 1.0 / static_cast<double>(p.m());
    const double r_var = p.eve_timing() == EveInnovationTiming::PerPacket ? inv_m : 1.0;
    const EveInnovation r = draw_eve_innovation(p, rng, r_var);
    return eve_observations(h, p, r, rng, inv_m);
}

/// Componentwise mean of Eve's per-packet observations.
inline EveObservation average_observations(std::span<const EveObservation> obs)
{
    detail::require(!obs.empty(), "average_observations: empty list");
    const std::size_t n = obs.front().ae.size();
    EveObservation out{ChannelVector(n), ChannelVector(n)};
    for (const auto& o : obs)
        for (std::size_t i = 0; i < n; ++i) {
            out.ae[i] += o.ae[i];
            out.eb[i] += o.eb[i];
        }
    const double inv = 1.0 / static_cast<double>(obs.size());
    for (std::size_t i = 0; i < n; ++i) {
        out.ae[i] *= inv;
        out.eb[i] *= inv;
    }
    return out;
}

/// What Bob estimates when Eve transmits with forged vector g in Phase II.
inline ChannelVector forged_observation(const ChannelVector& g, const ScenarioParams& p, Rng& rng)
{
    ChannelVector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] + rng.complex_normal(p.sigma2_II());
    return out;
}

/// Same as forged_observation but with Phase-I estimation noise.
inline ChannelVector forged_observation_phase1(const ChannelVector& g, const ScenarioParams& p, Rng& rng)
{
    ChannelVector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] + rng.complex_normal(p.sigma2_I());
    return out;
}

} // namespace pla
