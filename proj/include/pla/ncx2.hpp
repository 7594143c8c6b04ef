#pragma once

#include "pla/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pla {

namespace detail {

inline constexpr int kGammaIterCap = 100000;

/// Regularized lower incomplete gamma by its power series; valid for x < a + 1.
inline double gamma_p_series(double a, double x)
{
    double ap = a, del = 1.0 / a, sum = del;
    for (int n = 0; n < kGammaIterCap; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericError("incomplete gamma series did not converge (a=" + std::to_string(a) + ")");
}

/// Regularized upper incomplete gamma by Lentz's continued fraction; valid for x >= a + 1.
inline double gamma_q_cf(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < kGammaIterCap; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw NumericError("incomplete gamma continued fraction did not converge (a=" + std::to_string(a) + ")");
}

} // namespace detail

inline double gamma_p(double a, double x)
{
    if (x <= 0) return 0.0;
    return x < a + 1.0 ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_cf(a, x);
}

inline double gamma_q(double a, double x)
{
    if (x <= 0) return 1.0;
    return x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_cf(a, x);
}

/// Noncentral chi-square law with integer degrees of freedom.
/// Evaluated as a Poisson mixture of central laws, summed outward from the Poisson mode.
class NoncentralChi2 {
public:
    NoncentralChi2(int dof, double delta) : dof_(dof), delta_(delta)
    {
        detail::require(dof >= 1, "ncx2: dof must be >= 1");
        detail::require(delta >= 0 && std::isfinite(delta), "ncx2: noncentrality must be finite and >= 0");
    }

    [[nodiscard]] int dof() const noexcept { return dof_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double mean() const noexcept { return dof_ + delta_; }
    [[nodiscard]] double variance() const noexcept { return 2.0 * (dof_ + 2.0 * delta_); }

    [[nodiscard]] double cdf(double x) const
    {
        if (x <= 0) return 0.0;
        if (std::isinf(x)) return 1.0;
        return mixture(x, false);
    }

    /// Survival function, accurate in relative terms deep in the upper tail.
    [[nodiscard]] double sf(double x) const
    {
        if (x <= 0) return 1.0;
        if (std::isinf(x)) return 0.0;
        return mixture(x, true);
    }

    /// Smallest x with |cdf(x) - p| <= 1e-9, found by bracketing and bisection.
    [[nodiscard]] double quantile(double p) const
    {
        detail::require(p > 0 && p < 1, "ncx2 quantile: p must lie in (0,1)");
        const bool upper = p > 0.5;
        const double q = 1.0 - p;
        auto below = [&](double x) { return upper ? sf(x) > q : cdf(x) < p; };

        double lo = 0.0, hi = mean() + 4.0 * std::sqrt(variance()) + 1.0;
        for (int i = 0; below(hi); ++i) {
            if (i > 200) throw NumericError("ncx2 quantile: could not bracket");
            lo = hi;
            hi *= 2.0;
        }
        for (int i = 0; i < 400; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (below(mid)) lo = mid;
            else hi = mid;
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        }
        return hi;
    }

private:
    [[nodiscard]] double mixture(double x, bool upper) const
    {
        const double half_k = 0.5 * dof_, y = 0.5 * x;
        auto term = [&](double a) { return upper ? gamma_q(a, y) : gamma_p(a, y); };
        if (delta_ == 0.0) return term(half_k);

        constexpr double tail_tol = 1e-17;
        constexpr long cap = 1000000;
        const double lam = 0.5 * delta_;
        const long j0 = static_cast<long>(std::floor(lam));
        auto weight = [&](long j) { return std::exp(-lam + j * std::log(lam) - std::lgamma(j + 1.0)); };

        double sum = 0.0;
        // Upward from the mode: weights decay with ratio lam / (j+1).
        for (long j = j0;; ++j) {
            const double w = weight(j);
            sum += w * term(half_k + j);
            const double ratio = lam / (j + 2.0);
            if (ratio < 1.0 && w * lam / (j + 1.0) / (1.0 - ratio) < tail_tol) break;
            if (j - j0 > cap) throw NumericError("ncx2: upward series hit iteration cap");
        }
        // Downward: weights decay with ratio j / lam.
        for (long j = j0 - 1; j >= 0; --j) {
            const double w = weight(j);
            sum += w * term(half_k + j);
            const double ratio = j / lam;
            if (j == 0 || (ratio < 1.0 && w * ratio / (1.0 - ratio) < tail_tol)) break;
            if (j0 - j > cap) throw NumericError("ncx2: downward series hit iteration cap");
        }
        return std::min(1.0, sum);
    }

    int dof_;
    double delta_;
};

inline double ncx2_cdf(double x, int dof, double delta)
{
    detail::require(x >= 0, "ncx2_cdf: x must be >= 0");
    return NoncentralChi2(dof, delta).cdf(x);
}

inline double ncx2_sf(double x, int dof, double delta)
{
    detail::require(x >= 0, "ncx2_sf: x must be >= 0");
    return NoncentralChi2(dof, delta).sf(x);
}

inline double ncx2_inv(double p, int dof, double delta) { return NoncentralChi2(dof, delta).quantile(p); }

} // namespace pla
