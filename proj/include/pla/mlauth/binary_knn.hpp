#pragma once

#include "pla/error.hpp"
#include "pla/mlauth/binary_svm.hpp"
#include "pla/mlauth/features.hpp"
#include "pla/mlauth/ocnn.hpp"

#include <vector>

namespace pla {

/// Majority vote among the k nearest labeled rows, neighbors ordered by (distance, index).
class BinaryKnnModel {
public:
    BinaryKnnModel(LabeledSet train, std::size_t k, DistanceMetric metric = DistanceMetric::euclidean())
        : train_(std::move(train)), k_(k), metric_(std::move(metric))
    {
        detail::require(k_ % 2 == 1, "binary kNN: k must be odd");
        detail::require(k_ <= train_.size(), "binary kNN: k exceeds the training size");
        detail::require_same_size(train_.x.rows(), train_.size(), "binary kNN labels");
    }

    [[nodiscard]] bool accepts(std::span<const double> x) const
    {
        detail::require_same_size(x.size(), train_.x.dim(), "binary kNN query");
        std::vector<double> d(train_.size());
        for (std::size_t t = 0; t < d.size(); ++t) d[t] = metric_(x, train_.x.row(t));
        std::size_t votes = 0;
        for (std::size_t t : detail::smallest(d, k_)) votes += train_.positive[t];
        return 2 * votes > k_;
    }

    [[nodiscard]] std::size_t k() const noexcept { return k_; }
    [[nodiscard]] const LabeledSet& training() const noexcept { return train_; }

private:
    LabeledSet train_;
    std::size_t k_;
    DistanceMetric metric_;
};

inline bool binary_knn(const LabeledSet& train, std::size_t k, const FeatureVector& x)
{
    return BinaryKnnModel(train, k).accepts(x.values());
}

} // namespace pla
