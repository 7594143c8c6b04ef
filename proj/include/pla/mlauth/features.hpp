#pragma once

#include "pla/channel.hpp"
#include "pla/error.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace pla {

/// Real-valued view of a channel estimate: (Re_1, Im_1, ..., Re_N, Im_N).
class FeatureVector {
public:
    FeatureVector() = default;
    explicit FeatureVector(std::vector<double> values) : v_(std::move(values))
    {
        for (double x : v_) detail::require(std::isfinite(x), "FeatureVector: non-finite component");
    }
    FeatureVector(std::initializer_list<double> values) : FeatureVector(std::vector<double>(values)) {}

    [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return v_[i]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return v_; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    std::vector<double> v_;
};

inline FeatureVector featurize(const ChannelVector& h)
{
    std::vector<double> v;
    v.reserve(2 * h.size());
    for (const auto& z : h) {
        v.push_back(z.real());
        v.push_back(z.imag());
    }
    return FeatureVector(std::move(v));
}

inline ChannelVector defeaturize(const FeatureVector& f)
{
    detail::require(f.size() % 2 == 0, "defeaturize: odd feature count");
    std::vector<cplx> c(f.size() / 2);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = {f[2 * i], f[2 * i + 1]};
    return ChannelVector(std::move(c));
}

/// Row-major sample matrix; rows share one dimension.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(std::size_t dim) : dim_(dim) {}
    explicit FeatureMatrix(std::span<const FeatureVector> rows)
    {
        detail::require(!rows.empty(), "FeatureMatrix: no rows");
        dim_ = rows.front().size();
        data_.reserve(rows.size() * dim_);
        for (const auto& r : rows) push_back(r.values());
    }

    void push_back(std::span<const double> row)
    {
        detail::require_same_size(row.size(), dim_, "FeatureMatrix row");
        data_.insert(data_.end(), row.begin(), row.end());
    }

    [[nodiscard]] std::size_t rows() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
    [[nodiscard]] FeatureVector vector(std::size_t i) const
    {
        const auto r = row(i);
        return FeatureVector(std::vector<double>(r.begin(), r.end()));
    }

    /// Rows at the given indices, in order.
    [[nodiscard]] FeatureMatrix select(std::span<const std::size_t> idx) const
    {
        FeatureMatrix out(dim_);
        out.data_.reserve(idx.size() * dim_);
        for (std::size_t i : idx) out.push_back(row(i));
        return out;
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

inline double squared_euclidean(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// LLR distance between featurized estimates: 2 * sum over carriers of squared gap / sigma2_n.
inline double llr_distance(const FeatureVector& a, const FeatureVector& b, std::span<const double> sigma2_n)
{
    detail::require_same_size(a.size(), b.size(), "llr_distance");
    detail::require_same_size(a.size(), 2 * sigma2_n.size(), "llr_distance variances");
    double s = 0.0;
    for (std::size_t n = 0; n < sigma2_n.size(); ++n) {
        if (!(sigma2_n[n] > 0)) throw SingularTest("llr_distance: zero variance");
        const double dr = a[2 * n] - b[2 * n], di = a[2 * n + 1] - b[2 * n + 1];
        s += (dr * dr + di * di) / sigma2_n[n];
    }
    return 2.0 * s;
}

enum class MetricKind { Euclidean, SquaredEuclidean, Llr };

/// Dissimilarity used by neighbor-based classifiers.
class DistanceMetric {
public:
    static DistanceMetric euclidean() { return DistanceMetric(MetricKind::Euclidean, {}); }
    static DistanceMetric squared_euclidean() { return DistanceMetric(MetricKind::SquaredEuclidean, {}); }
    static DistanceMetric llr(std::vector<double> sigma2_n)
    {
        for (double s : sigma2_n)
            if (!(s > 0)) throw SingularTest("LLR metric: zero variance");
        // Stored per feature so evaluation is one weighted sum.
        std::vector<double> w;
        for (double s : sigma2_n) {
            w.push_back(2.0 / s);
            w.push_back(2.0 / s);
        }
        return DistanceMetric(MetricKind::Llr, std::move(w));
    }

    [[nodiscard]] MetricKind kind() const noexcept { return kind_; }

    /// Feature dimension the metric is bound to; 0 when it accepts any.
    [[nodiscard]] std::size_t dim() const noexcept { return w_.size(); }

    [[nodiscard]] double operator()(std::span<const double> a, std::span<const double> b) const noexcept
    {
        switch (kind_) {
        case MetricKind::Euclidean: return std::sqrt(pla::squared_euclidean(a, b));
        case MetricKind::SquaredEuclidean: return pla::squared_euclidean(a, b);
        case MetricKind::Llr: break;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            s += w_[i] * d * d;
        }
        return s;
    }

    [[nodiscard]] double operator()(const FeatureVector& a, const FeatureVector& b) const noexcept
    {
        return (*this)(a.values(), b.values());
    }

private:
    DistanceMetric(MetricKind k, std::vector<double> w) : kind_(k), w_(std::move(w)) {}

    MetricKind kind_;
    std::vector<double> w_;
};

} // namespace pla
