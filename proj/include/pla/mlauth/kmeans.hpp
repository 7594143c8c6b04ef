#pragma once

#include "pla/error.hpp"
#include "pla/mlauth/features.hpp"
#include "pla/rng.hpp"

#include <limits>
#include <vector>

namespace pla {

struct KmeansResult {
    std::vector<std::size_t> labels;
    FeatureMatrix centroids;
    double wcss = 0.0;
    std::vector<double> wcss_trace; // best run, one entry per assignment pass
    std::size_t iterations = 0;
};

namespace detail {

inline std::size_t nearest_centroid(std::span<const double> x, const FeatureMatrix& c, double& best)
{
    std::size_t arg = 0;
    best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.rows(); ++i) {
        const double d = squared_euclidean(x, c.row(i));
        if (d < best) best = d, arg = i;
    }
    return arg;
}

inline KmeansResult lloyd(const FeatureMatrix& x, FeatureMatrix centroids, std::size_t max_iter)
{
    const std::size_t n = x.rows(), k = centroids.rows(), dim = x.dim();
    KmeansResult r;
    r.labels.assign(n, k);
    std::vector<double> dist(n);
    for (;;) {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = nearest_centroid(x.row(i), centroids, dist[i]);
            changed |= c != r.labels[i];
            r.labels[i] = c;
            wcss += dist[i];
        }
        r.wcss_trace.push_back(wcss);
        if (!changed || r.iterations == max_iter) break;
        ++r.iterations;

        std::vector<double> sum(k * dim, 0.0);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = x.row(i);
            for (std::size_t f = 0; f < dim; ++f) sum[r.labels[i] * dim + f] += row[f];
            ++count[r.labels[i]];
        }
        FeatureMatrix next(dim);
        std::vector<bool> taken(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] == 0) {
                // Re-seed at the worst-fit sample; it then sits at distance zero.
                std::size_t far = n;
                for (std::size_t i = 0; i < n; ++i)
                    if (!taken[i] && (far == n || dist[i] > dist[far])) far = i;
                taken[far] = true;
                next.push_back(x.row(far));
                continue;
            }
            std::vector<double> mean(dim);
            for (std::size_t f = 0; f < dim; ++f) mean[f] = sum[c * dim + f] / static_cast<double>(count[c]);
            next.push_back(mean);
        }
        centroids = std::move(next);
    }
    r.wcss = r.wcss_trace.back();
    r.centroids = std::move(centroids);
    return r;
}

} // namespace detail

/// Lloyd's algorithm from n_init random seedings; the lowest-WCSS run is returned.
inline KmeansResult kmeans_label(const FeatureMatrix& samples, std::size_t k, std::size_t n_init, Rng& rng,
                                 std::size_t max_iter = 300)
{
    const std::size_t n = samples.rows();
    detail::require(k >= 1 && k <= n, "kmeans: k must lie in [1, sample count]");
    detail::require(n_init >= 1, "kmeans: n_init must be positive");
    KmeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> perm(n);
    for (std::size_t run = 0; run < n_init; ++run) {
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        FeatureMatrix init(samples.dim());
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t pick = c + static_cast<std::size_t>(rng.below(n - c));
            std::swap(perm[c], perm[pick]);
            init.push_back(samples.row(perm[c]));
        }
        KmeansResult r = detail::lloyd(samples, std::move(init), max_iter);
        if (r.wcss < best.wcss) best = std::move(r);
    }
    return best;
}

} // namespace pla
