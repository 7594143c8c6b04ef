#pragma once

#include "pla/channel.hpp"
#include "pla/error.hpp"
#include "pla/ncx2.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace pla {

enum class Hypothesis { H0, H1 };

inline std::vector<double> per_dim_variance(const ScenarioParams& p, std::span<const double> alpha_bar_I)
{
    detail::require_same_size(alpha_bar_I.size(), p.n(), "per_dim_variance");
    std::vector<double> v(p.n());
    for (std::size_t i = 0; i < p.n(); ++i) {
        const double a1 = alpha_bar_I[i], a2 = p.alpha_II()[i];
        v[i] = p.sigma2_I() + p.sigma2_II() + (1.0 - a1 * a1) + (1.0 - a2 * a2);
    }
    return v;
}

inline std::vector<double> per_dim_variance(const ScenarioParams& p) { return per_dim_variance(p, p.alpha_I()); }

class LlrTest {
public:
    LlrTest(ReferenceEstimate reference, std::vector<double> sigma2_n, double theta)
        : ref_(std::move(reference)), s2_(std::move(sigma2_n)), theta_(theta)
    {
        detail::require_same_size(s2_.size(), ref_.h_bar.size(), "LlrTest sigma2_n");
        for (double s : s2_)
            if (!(s > 0)) throw SingularTest("LlrTest: per-dimension variance must be positive");
        detail::require(theta_ > 0, "LlrTest: threshold must be positive");
    }

    LlrTest(ReferenceEstimate reference, const ScenarioParams& p, double theta)
        : LlrTest(reference, per_dim_variance(p, reference.alpha_bar_I), theta)
    {
    }

    [[nodiscard]] const ReferenceEstimate& reference() const noexcept { return ref_; }
    [[nodiscard]] std::span<const double> sigma2_n() const noexcept { return s2_; }
    [[nodiscard]] double theta() const noexcept { return theta_; }

private:
    ReferenceEstimate ref_;
    std::vector<double> s2_;
    double theta_;
};

class CombinedTest {
public:
    CombinedTest(LlrTest llr, double epsilon) : llr_(std::move(llr)), eps_(epsilon)
    {
        detail::require(eps_ > 0, "CombinedTest: epsilon must be positive");
    }
    [[nodiscard]] const LlrTest& llr() const noexcept { return llr_; }
    [[nodiscard]] double epsilon() const noexcept { return eps_; }

private:
    LlrTest llr_;
    double eps_;
};

/// Weighted squared distance 2 * sum |a_n - b_n|^2 / s2_n.
inline double llr_distance(std::span<const cplx> a, std::span<const cplx> b, std::span<const double> s2)
{
    detail::require_same_size(a.size(), b.size(), "llr distance");
    detail::require_same_size(a.size(), s2.size(), "llr distance variances");
    double psi = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(s2[i] > 0)) throw SingularTest("llr distance: zero variance");
        psi += std::norm(a[i] - b[i]) / s2[i];
    }
    return 2.0 * psi;
}

inline double llr_statistic(const ChannelVector& h_hat, const LlrTest& t)
{
    return llr_distance(h_hat.coeffs(), t.reference().h_bar.coeffs(), t.sigma2_n());
}

inline double noncentrality_mu(const ScenarioParams& p, const ChannelVector& h, std::span<const double> alpha_bar_I)
{
    detail::require_same_size(h.size(), p.n(), "noncentrality_mu");
    const auto s2 = per_dim_variance(p, alpha_bar_I);
    double mu = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) mu += 2.0 * std::norm((p.alpha_II()[i] - alpha_bar_I[i]) * h[i]) / s2[i];
    return mu;
}

/// Noncentrality averaged over channel draws; the value Bob uses for thresholds.
inline double expected_noncentrality_mu(const ScenarioParams& p, std::span<const double> alpha_bar_I)
{
    const auto s2 = per_dim_variance(p, alpha_bar_I);
    double mu = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) {
        const double d = p.alpha_II()[i] - alpha_bar_I[i];
        mu += 2.0 * d * d * p.power_delay()[i] / s2[i];
    }
    return mu;
}

inline double expected_noncentrality_mu(const ScenarioParams& p) { return expected_noncentrality_mu(p, p.alpha_I()); }

inline double noncentrality_beta(const ChannelVector& g, const ScenarioParams& p, const ChannelVector& h,
                                 std::span<const double> alpha_bar_I)
{
    detail::require_same_size(g.size(), p.n(), "noncentrality_beta");
    detail::require_same_size(h.size(), p.n(), "noncentrality_beta");
    const auto s2 = per_dim_variance(p, alpha_bar_I);
    double beta = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) beta += 2.0 * std::norm(g[i] - alpha_bar_I[i] * h[i]) / s2[i];
    return beta;
}

/// Ratio of the per-dimension variance under impersonation to the one under legitimacy.
/// Below one when Phase-II fading adds variance only to Alice's packets.
inline double h1_variance_ratio(const ScenarioParams& p, std::span<const double> alpha_bar_I)
{
    const auto s2 = per_dim_variance(p, alpha_bar_I);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) {
        const double a = alpha_bar_I[i];
        num += p.sigma2_I() + p.sigma2_II() + (1.0 - a * a);
        den += s2[i];
    }
    return num / den;
}

inline double llr_threshold(double target_pfa, std::size_t n, double mu)
{
    return ncx2_inv(1.0 - target_pfa, static_cast<int>(2 * n), mu);
}

inline Hypothesis llr_decide(double psi, double theta)
{
    detail::require(theta > 0, "llr_decide: threshold must be positive");
    return psi <= theta ? Hypothesis::H0 : Hypothesis::H1;
}

struct ErrorRates {
    double p_fa;
    double p_md;
};

/// False-alarm and missed-detection probabilities of the LLR test.
/// `h1_ratio` rescales the impersonation-side law; 1 gives the textbook form.
inline ErrorRates analytic_pfa_pmd(double theta, double mu, double beta, std::size_t n, double h1_ratio = 1.0)
{
    detail::require(h1_ratio > 0, "analytic_pfa_pmd: variance ratio must be positive");
    const int dof = static_cast<int>(2 * n);
    return {ncx2_sf(theta, dof, mu), ncx2_cdf(theta / h1_ratio, dof, beta / h1_ratio)};
}

inline double modulus_statistic(const ReferenceEstimate& ref, const ChannelVector& h_hat)
{
    detail::require_same_size(h_hat.size(), ref.h_bar.size(), "modulus_statistic");
    double g = 0.0;
    for (std::size_t i = 0; i < h_hat.size(); ++i) g += std::abs(ref.h_bar[i]) - std::abs(h_hat[i]);
    return g;
}

inline Hypothesis combined_decide(double psi, double gamma, const CombinedTest& t)
{
    return (psi <= t.llr().theta() && gamma >= -t.epsilon() && gamma <= t.epsilon()) ? Hypothesis::H0
                                                                                       : Hypothesis::H1;
}

class IdealBoundTest {
public:
    IdealBoundTest(ReferenceEstimate reference, ChannelVector eve_reference, double sigma2, double sigma2_E,
                   double theta_bar)
        : ref_(std::move(reference)), eve_(std::move(eve_reference)), s2_(sigma2), s2e_(sigma2_E), theta_(theta_bar)
    {
        if (!(s2_ > 0) || !(s2e_ > 0)) throw SingularTest("IdealBoundTest: variances must be positive");
        detail::require_same_size(eve_.size(), ref_.h_bar.size(), "IdealBoundTest eve reference");
    }

    [[nodiscard]] const ReferenceEstimate& reference() const noexcept { return ref_; }
    [[nodiscard]] const ChannelVector& eve_reference() const noexcept { return eve_; }
    [[nodiscard]] double sigma2() const noexcept { return s2_; }
    [[nodiscard]] double sigma2_E() const noexcept { return s2e_; }
    [[nodiscard]] double theta_bar() const noexcept { return theta_; }

private:
    ReferenceEstimate ref_;
    ChannelVector eve_;
    double s2_, s2e_, theta_;
};

/// Log-likelihood ratio with both references known; kernel shared by the test and its calibration.
inline double ideal_llr(std::span<const cplx> h_hat, std::span<const cplx> h_bar, std::span<const cplx> h_eve,
                        double sigma2, double sigma2_E)
{
    if (!(sigma2 > 0) || !(sigma2_E > 0)) throw SingularTest("ideal_llr: variances must be positive");
    detail::require_same_size(h_hat.size(), h_bar.size(), "ideal_llr");
    detail::require_same_size(h_hat.size(), h_eve.size(), "ideal_llr");
    double da = 0.0, de = 0.0;
    for (std::size_t i = 0; i < h_hat.size(); ++i) {
        da += std::norm(h_hat[i] - h_bar[i]);
        de += std::norm(h_hat[i] - h_eve[i]);
    }
    const double n = static_cast<double>(h_hat.size());
    return n * 0.5 * std::log(sigma2 / sigma2_E) + da / (2.0 * sigma2) - de / (2.0 * sigma2_E);
}

inline double ideal_llr(const ChannelVector& h_hat, const IdealBoundTest& t)
{
    return ideal_llr(h_hat.coeffs(), t.reference().h_bar.coeffs(), t.eve_reference().coeffs(), t.sigma2(),
                     t.sigma2_E());
}

inline Hypothesis ideal_decide(double psi_bar, double theta_bar)
{
    return psi_bar <= theta_bar ? Hypothesis::H0 : Hypothesis::H1;
}

} // namespace pla
