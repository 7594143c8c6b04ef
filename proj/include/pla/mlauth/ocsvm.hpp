#pragma once

#include "pla/error.hpp"
#include "pla/mlauth/features.hpp"
#include "pla/mlauth/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pla {

struct SmoOptions {
    double tolerance = 1e-6;
    std::size_t max_iter = 0; // 0 picks max(10^6, 1000 m)
};

/// One-class SVM decision function sum_i lambda_i K(x, x_i) - xi over its support set.
class OcsvmModel {
public:
    OcsvmModel(FeatureMatrix support, std::vector<double> lambdas, double xi, double nu, Kernel kernel,
               double objective, std::size_t iterations)
        : support_(std::move(support)), lambdas_(std::move(lambdas)), xi_(xi), nu_(nu), kernel_(kernel),
          objective_(objective), iterations_(iterations)
    {
        detail::require_same_size(support_.rows(), lambdas_.size(), "OcsvmModel support");
    }

    [[nodiscard]] double decision(std::span<const double> x) const
    {
        detail::require_same_size(x.size(), support_.dim(), "OcsvmModel query");
        double s = 0.0;
        for (std::size_t i = 0; i < lambdas_.size(); ++i) s += lambdas_[i] * kernel_(x, support_.row(i));
        return s - xi_;
    }
    [[nodiscard]] bool accepts(std::span<const double> x) const { return decision(x) > 0.0; }

    [[nodiscard]] const FeatureMatrix& support() const noexcept { return support_; }
    [[nodiscard]] std::span<const double> lambdas() const noexcept { return lambdas_; }
    [[nodiscard]] double xi() const noexcept { return xi_; }
    [[nodiscard]] double nu() const noexcept { return nu_; }
    [[nodiscard]] const Kernel& kernel() const noexcept { return kernel_; }
    [[nodiscard]] double sigma_svm() const noexcept { return kernel_.sigma; }
    [[nodiscard]] double objective() const noexcept { return objective_; }
    [[nodiscard]] std::size_t iterations() const noexcept { return iterations_; }

private:
    FeatureMatrix support_;
    std::vector<double> lambdas_;
    double xi_;
    double nu_;
    Kernel kernel_;
    double objective_;
    std::size_t iterations_;
};

/// Full dual solution, including zero multipliers; index-aligned with the training rows.
struct OcsvmDual {
    std::vector<double> lambda;
    std::vector<double> gradient; // K lambda
    double xi;
    double upper;
    double objective;
    std::size_t iterations;
};

/// min 1/2 l'Kl  s.t.  0 <= l_i <= 1/(nu m),  sum l = 1, by maximal-violating-pair updates.
inline OcsvmDual ocsvm_solve(const GramMatrix& k, double nu, SmoOptions opt = {})
{
    const std::size_t m = k.size();
    detail::require(nu > 0 && nu <= 1, "ocsvm: nu must lie in (0,1]");
    detail::require(m >= 2, "ocsvm: need at least two samples");
    detail::require(nu * static_cast<double>(m) >= 1.0 - 1e-12, "ocsvm: nu * m must be at least 1");
    const double c = 1.0 / (nu * static_cast<double>(m));
    const std::size_t cap = opt.max_iter ? opt.max_iter : std::max<std::size_t>(1000000, 1000 * m);

    OcsvmDual d{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), 0.0, c, 0.0, 0};
    double left = 1.0;
    for (std::size_t i = 0; i < m && left > 0; ++i) {
        d.lambda[i] = std::min(c, left);
        left -= d.lambda[i];
    }
    for (std::size_t i = 0; i < m; ++i)
        if (d.lambda[i] > 0)
            for (std::size_t t = 0; t < m; ++t) d.gradient[t] += d.lambda[i] * k(i, t);

    auto& lam = d.lambda;
    auto& g = d.gradient;
    for (;; ++d.iterations) {
        // i: largest gradient that can give mass; j: smallest that can take it.
        std::size_t i = m, j = m;
        for (std::size_t t = 0; t < m; ++t) {
            if (lam[t] > 0 && (i == m || g[t] > g[i])) i = t;
            if (lam[t] < c && (j == m || g[t] < g[j])) j = t;
        }
        if (i == m || j == m || g[i] - g[j] < opt.tolerance) break;
        if (d.iterations >= cap) throw NumericError("ocsvm: SMO did not converge within the iteration cap");

        const double eta = std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), 1e-12);
        const double step = std::min({(g[i] - g[j]) / eta, lam[i], c - lam[j]});
        lam[i] -= step;
        lam[j] += step;
        if (lam[i] < 1e-300) lam[i] = 0.0;
        if (c - lam[j] < 1e-15 * c) lam[j] = c;
        const double* ki = k.row(i);
        const double* kj = k.row(j);
        for (std::size_t t = 0; t < m; ++t) g[t] += step * (kj[t] - ki[t]);
    }

    const double bound_tol = 1e-12 * c;
    double free_sum = 0.0;
    std::size_t free_n = 0;
    double at_upper = -std::numeric_limits<double>::infinity();
    double at_zero = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
        if (lam[t] <= 0.0) at_zero = std::min(at_zero, g[t]);
        else if (lam[t] >= c - bound_tol) at_upper = std::max(at_upper, g[t]);
        else {
            free_sum += g[t];
            ++free_n;
        }
    }
    if (free_n) d.xi = free_sum / static_cast<double>(free_n);
    else if (std::isfinite(at_upper) && std::isfinite(at_zero)) d.xi = 0.5 * (at_upper + at_zero);
    else d.xi = std::isfinite(at_upper) ? at_upper : at_zero;

    double obj = 0.0;
    for (std::size_t t = 0; t < m; ++t) obj += lam[t] * g[t];
    d.objective = 0.5 * obj;
    return d;
}

inline OcsvmModel ocsvm_train(const FeatureMatrix& positives, double nu, const Kernel& kernel, SmoOptions opt = {})
{
    const GramMatrix k(positives, kernel);
    const OcsvmDual d = ocsvm_solve(k, nu, opt);
    std::vector<std::size_t> sv;
    std::vector<double> lam;
    for (std::size_t t = 0; t < d.lambda.size(); ++t)
        if (d.lambda[t] > 0) {
            sv.push_back(t);
            lam.push_back(d.lambda[t]);
        }
    return OcsvmModel(positives.select(sv), std::move(lam), d.xi, nu, kernel, d.objective, d.iterations);
}

inline OcsvmModel ocsvm_train(const FeatureMatrix& positives, double nu, double sigma_svm)
{
    return ocsvm_train(positives, nu, Kernel::gaussian(sigma_svm));
}

inline bool ocsvm_classify(const OcsvmModel& model, const FeatureVector& x) { return model.accepts(x.values()); }

} // namespace pla
