#pragma once

#include "pla/error.hpp"
#include "pla/mlauth/features.hpp"
#include "pla/mlauth/kernel.hpp"
#include "pla/mlauth/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pla {

/// Training rows with a binary label; `true` marks the legitimate class.
struct LabeledSet {
    FeatureMatrix x;
    std::vector<bool> positive;

    [[nodiscard]] std::size_t size() const noexcept { return positive.size(); }
    [[nodiscard]] std::size_t count_positive() const noexcept
    {
        return static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
    }
    [[nodiscard]] LabeledSet select(std::span<const std::size_t> idx) const
    {
        LabeledSet out{x.select(idx), {}};
        for (std::size_t i : idx) out.positive.push_back(positive[i]);
        return out;
    }
};

struct BinarySvmDual {
    std::vector<double> alpha;
    std::vector<double> gradient; // Q alpha - 1
    double rho;
    double objective;
    std::size_t iterations;
};

/// min 1/2 a'Qa - sum a  s.t.  0 <= a_i <= C,  y'a = 0,  Q_ij = y_i y_j K_ij.
inline BinarySvmDual binary_svm_solve(const GramMatrix& k, std::span<const int> y, double c, SmoOptions opt = {})
{
    const std::size_t m = k.size();
    detail::require_same_size(m, y.size(), "binary_svm labels");
    detail::require(c > 0, "binary_svm: C must be positive");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        detail::require(v == 1 || v == -1, "binary_svm: labels must be +1 or -1");
        (v > 0 ? has_pos : has_neg) = true;
    }
    detail::require(has_pos && has_neg, "binary_svm: both labels must be present");
    const std::size_t cap = opt.max_iter ? opt.max_iter : std::max<std::size_t>(1000000, 1000 * m);

    BinarySvmDual d{std::vector<double>(m, 0.0), std::vector<double>(m, -1.0), 0.0, 0.0, 0};
    auto& a = d.alpha;
    auto& g = d.gradient;
    auto in_up = [&](std::size_t t) { return y[t] > 0 ? a[t] < c : a[t] > 0; };
    auto in_low = [&](std::size_t t) { return y[t] > 0 ? a[t] > 0 : a[t] < c; };

    for (;; ++d.iterations) {
        std::size_t i = m, j = m;
        double up = -std::numeric_limits<double>::infinity(), low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < m; ++t) {
            const double v = -y[t] * g[t];
            if (in_up(t) && v > up) up = v, i = t;
            if (in_low(t) && v < low) low = v, j = t;
        }
        if (i == m || j == m || up - low < opt.tolerance) break;
        if (d.iterations >= cap) throw NumericError("binary_svm: SMO did not converge within the iteration cap");

        const double quad = std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), 1e-12);
        const double ai = a[i], aj = a[j];
        if (y[i] != y[j]) {
            const double delta = (-g[i] - g[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0) {
                if (a[j] < 0) a[j] = 0, a[i] = diff;
            } else if (a[i] < 0) a[i] = 0, a[j] = -diff;
            if (diff > 0) {
                if (a[i] > c) a[i] = c, a[j] = c - diff;
            } else if (a[j] > c) a[j] = c, a[i] = c + diff;
        } else {
            const double delta = (g[i] - g[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > c) {
                if (a[i] > c) a[i] = c, a[j] = sum - c;
            } else if (a[j] < 0) a[j] = 0, a[i] = sum;
            if (sum > c) {
                if (a[j] > c) a[j] = c, a[i] = sum - c;
            } else if (a[i] < 0) a[i] = 0, a[j] = sum;
        }
        const double di = (a[i] - ai) * y[i], dj = (a[j] - aj) * y[j];
        const double* ki = k.row(i);
        const double* kj = k.row(j);
        for (std::size_t t = 0; t < m; ++t) g[t] += y[t] * (ki[t] * di + kj[t] * dj);
    }

    double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
    std::size_t free_n = 0;
    for (std::size_t t = 0; t < m; ++t) {
        const double yg = y[t] * g[t];
        const bool at_upper = a[t] >= c, at_zero = a[t] <= 0;
        if (at_upper || at_zero) {
            // Bounded variables only constrain rho from one side.
            if ((at_upper && y[t] < 0) || (at_zero && y[t] > 0)) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            free_sum += yg;
            ++free_n;
        }
    }
    d.rho = free_n ? free_sum / static_cast<double>(free_n) : 0.5 * (ub + lb);
    double obj = 0.0;
    for (std::size_t t = 0; t < m; ++t) obj += a[t] * (g[t] - 1.0);
    d.objective = 0.5 * obj;
    return d;
}

/// Soft-margin kernel SVM; positive decision values vote for the legitimate class.
class BinarySvmModel {
public:
    BinarySvmModel(FeatureMatrix support, std::vector<double> coef, double rho, double c, Kernel kernel,
                   double objective)
        : support_(std::move(support)), coef_(std::move(coef)), rho_(rho), c_(c), kernel_(kernel),
          objective_(objective)
    {
    }

    [[nodiscard]] double decision(std::span<const double> x) const
    {
        detail::require_same_size(x.size(), support_.dim(), "BinarySvmModel query");
        double s = 0.0;
        for (std::size_t i = 0; i < coef_.size(); ++i) s += coef_[i] * kernel_(x, support_.row(i));
        return s - rho_;
    }
    [[nodiscard]] bool accepts(std::span<const double> x) const { return decision(x) > 0.0; }

    [[nodiscard]] const FeatureMatrix& support() const noexcept { return support_; }
    [[nodiscard]] std::span<const double> coefficients() const noexcept { return coef_; } // alpha_i y_i
    [[nodiscard]] double rho() const noexcept { return rho_; }
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] const Kernel& kernel() const noexcept { return kernel_; }
    [[nodiscard]] double objective() const noexcept { return objective_; }

private:
    FeatureMatrix support_;
    std::vector<double> coef_;
    double rho_;
    double c_;
    Kernel kernel_;
    double objective_;
};

inline std::vector<int> signed_labels(const LabeledSet& s)
{
    std::vector<int> y(s.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = s.positive[i] ? 1 : -1;
    return y;
}

inline BinarySvmModel binary_svm_train(const LabeledSet& train, double c, const Kernel& kernel, SmoOptions opt = {})
{
    detail::require_same_size(train.x.rows(), train.size(), "binary_svm_train");
    const GramMatrix k(train.x, kernel);
    const auto y = signed_labels(train);
    const BinarySvmDual d = binary_svm_solve(k, y, c, opt);
    std::vector<std::size_t> sv;
    std::vector<double> coef;
    for (std::size_t t = 0; t < d.alpha.size(); ++t)
        if (d.alpha[t] > 0) {
            sv.push_back(t);
            coef.push_back(d.alpha[t] * y[t]);
        }
    return BinarySvmModel(train.x.select(sv), std::move(coef), d.rho, c, kernel, d.objective);
}

inline BinarySvmModel binary_svm_train(const LabeledSet& train, double c, double sigma_svm)
{
    return binary_svm_train(train, c, Kernel::gaussian(sigma_svm));
}

inline bool binary_svm_classify(const BinarySvmModel& model, const FeatureVector& x)
{
    return model.accepts(x.values());
}

} // namespace pla
