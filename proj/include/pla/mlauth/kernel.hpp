#pragma once

#include "pla/error.hpp"
#include "pla/mlauth/features.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace pla {

inline double gaussian_kernel(std::span<const double> a, std::span<const double> b, double sigma_svm)
{
    return std::exp(-squared_euclidean(a, b) / (2.0 * sigma_svm * sigma_svm));
}

inline double gaussian_kernel(const FeatureVector& a, const FeatureVector& b, double sigma_svm)
{
    detail::require(sigma_svm > 0, "gaussian_kernel: sigma must be positive");
    detail::require_same_size(a.size(), b.size(), "gaussian_kernel");
    return gaussian_kernel(a.values(), b.values(), sigma_svm);
}

enum class KernelKind { Gaussian, Polynomial, Linear };

/// Mercer kernel. Polynomial form is (gamma <a,b> + coef0)^degree.
struct Kernel {
    KernelKind kind = KernelKind::Gaussian;
    double sigma = 1.0;
    int degree = 3;
    double gamma = 1.0;
    double coef0 = 1.0;

    static Kernel gaussian(double sigma)
    {
        detail::require(sigma > 0, "Gaussian kernel: sigma must be positive");
        return {KernelKind::Gaussian, sigma, 3, 1.0, 1.0};
    }
    static Kernel polynomial(int degree, double gamma, double coef0)
    {
        detail::require(degree >= 1 && gamma > 0 && coef0 >= 0, "polynomial kernel: invalid parameters");
        return {KernelKind::Polynomial, 1.0, degree, gamma, coef0};
    }
    static Kernel linear() { return {KernelKind::Linear, 1.0, 1, 1.0, 0.0}; }

    [[nodiscard]] double operator()(std::span<const double> a, std::span<const double> b) const noexcept
    {
        switch (kind) {
        case KernelKind::Gaussian: return gaussian_kernel(a, b, sigma);
        case KernelKind::Polynomial: break;
        case KernelKind::Linear: {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
            return s;
        }
        }
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return std::pow(gamma * s + coef0, degree);
    }
};

inline std::string to_string(KernelKind k)
{
    switch (k) {
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Polynomial: return "polynomial";
    case KernelKind::Linear: return "linear";
    }
    return "?";
}

/// Dense symmetric Gram matrix.
class GramMatrix {
public:
    GramMatrix(const FeatureMatrix& x, const Kernel& k) : n_(x.rows()), v_(n_ * n_)
    {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j) v_[i * n_ + j] = v_[j * n_ + i] = k(x.row(i), x.row(j));
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return v_[i * n_ + j]; }
    [[nodiscard]] const double* row(std::size_t i) const noexcept { return v_.data() + i * n_; }

private:
    std::size_t n_;
    std::vector<double> v_;
};

/// Median pairwise Euclidean distance; the scale of the kernel-width heuristic.
inline double median_pairwise_distance(const FeatureMatrix& x)
{
    std::vector<double> d;
    d.reserve(x.rows() * (x.rows() - 1) / 2);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = i + 1; j < x.rows(); ++j) d.push_back(std::sqrt(squared_euclidean(x.row(i), x.row(j))));
    detail::require(!d.empty(), "median_pairwise_distance: need two rows");
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

} // namespace pla
