#pragma once

#include "pla/error.hpp"
#include "pla/mlauth/features.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace pla {

enum class OcnnVariant { NN11, NN1K, J1NN, JKNN };

inline std::string to_string(OcnnVariant v)
{
    switch (v) {
    case OcnnVariant::NN11: return "11NN";
    case OcnnVariant::NN1K: return "1KNN";
    case OcnnVariant::J1NN: return "J1NN";
    case OcnnVariant::JKNN: return "JKNN";
    }
    return "?";
}

struct OcnnParams {
    std::size_t j = 1;
    std::size_t k = 1;
    double theta_d = 1.0;
};

namespace detail {

/// Indices of the `count` smallest entries of `d`, ordered by (distance, index).
inline std::vector<std::size_t> smallest(const std::vector<double>& d, std::size_t count)
{
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) { return d[a] != d[b] ? d[a] < d[b] : a < b; };
    count = std::min(count, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(), less);
    idx.resize(count);
    return idx;
}

inline double mean_of(const std::vector<double>& d, const std::vector<std::size_t>& idx)
{
    double s = 0.0;
    for (std::size_t i : idx) s += d[i];
    return s / static_cast<double>(idx.size());
}

} // namespace detail

/// Nearest-neighbor one-class rule: accept x when the mean distance to its j nearest
/// training points, divided by those points' mean distance to their own k nearest
/// neighbors (self excluded), is below theta_d.
class OcnnModel {
public:
    OcnnModel(OcnnVariant variant, OcnnParams params, FeatureMatrix training, DistanceMetric metric)
        : variant_(variant), p_(params), train_(std::move(training)), metric_(std::move(metric))
    {
        using detail::require;
        require(train_.rows() > 0, "OcnnModel: empty training set");
        require(p_.j >= 1 && p_.k >= 1, "OcnnModel: j and k must be positive");
        require(p_.theta_d > 0, "OcnnModel: theta_d must be positive");
        require(variant_ != OcnnVariant::NN11 || (p_.j == 1 && p_.k == 1), "11NN requires j = k = 1");
        require(variant_ != OcnnVariant::NN1K || p_.j == 1, "1KNN requires j = 1");
        require(variant_ != OcnnVariant::J1NN || p_.k == 1, "J1NN requires k = 1");
        require(train_.rows() >= p_.j * p_.k + p_.j, "OcnnModel: training set smaller than j*k + j");
        require(metric_.dim() == 0 || metric_.dim() == train_.dim(), "OcnnModel: metric dimension mismatch");

        const std::size_t m = train_.rows();
        neighbor_mean_.resize(m);
        std::vector<double> d(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t t = 0; t < m; ++t) d[t] = metric_(train_.row(i), train_.row(t));
            d[i] = std::numeric_limits<double>::infinity();
            neighbor_mean_[i] = detail::mean_of(d, detail::smallest(d, p_.k));
        }
    }

    [[nodiscard]] OcnnVariant variant() const noexcept { return variant_; }
    [[nodiscard]] const OcnnParams& params() const noexcept { return p_; }
    [[nodiscard]] const FeatureMatrix& training() const noexcept { return train_; }
    [[nodiscard]] const DistanceMetric& metric() const noexcept { return metric_; }

    /// Distance ratio; 0 when x coincides with its neighbors, +inf when only the neighbors coincide.
    [[nodiscard]] double ratio(std::span<const double> x) const
    {
        detail::require_same_size(x.size(), train_.dim(), "OcnnModel query");
        const std::size_t m = train_.rows();
        std::vector<double> d(m);
        for (std::size_t t = 0; t < m; ++t) d[t] = metric_(x, train_.row(t));
        const auto nn = detail::smallest(d, p_.j);
        const double dxy = detail::mean_of(d, nn);
        double dyz = 0.0;
        for (std::size_t y : nn) dyz += neighbor_mean_[y];
        dyz /= static_cast<double>(nn.size());
        if (dyz == 0.0) return dxy == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return dxy / dyz;
    }

    [[nodiscard]] bool accepts(std::span<const double> x) const { return ratio(x) < p_.theta_d; }

private:
    OcnnVariant variant_;
    OcnnParams p_;
    FeatureMatrix train_;
    DistanceMetric metric_;
    std::vector<double> neighbor_mean_;
};

inline bool ocnn_classify(const OcnnModel& model, const FeatureVector& x) { return model.accepts(x.values()); }

} // namespace pla
