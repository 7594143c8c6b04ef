#pragma once

// Exhaustive one-class nearest-neighbour decision: every pairwise distance is recomputed
// and neighbours are ranked by explicit comparison.

#include "pla/mlauth/ocnn.hpp"

#include <limits>
#include <span>
#include <vector>

namespace pla::testing {

// Neighbors by rank: row t is among the j nearest to x when fewer than j rows beat it on
// (distance, index). Every pair is compared explicitly.
inline std::vector<std::size_t> ranked_neighbors(const std::vector<double>& d, std::size_t j)
{
    std::vector<std::size_t> out(j);
    for (std::size_t t = 0; t < d.size(); ++t) {
        std::size_t rank = 0;
        for (std::size_t s = 0; s < d.size(); ++s) rank += d[s] < d[t] || (d[s] == d[t] && s < t);
        if (rank < j) out[rank] = t;
    }
    return out;
}

inline bool brute_force_accepts(const FeatureMatrix& train, const DistanceMetric& metric, OcnnParams p,
                         std::span<const double> x)
{
    const std::size_t m = train.rows();
    std::vector<double> d(m);
    for (std::size_t t = 0; t < m; ++t) d[t] = metric(x, train.row(t));
    const auto nn = ranked_neighbors(d, p.j);
    double dxy = 0.0, dyz = 0.0;
    for (std::size_t y : nn) {
        dxy += d[y];
        std::vector<double> dy(m);
        for (std::size_t t = 0; t < m; ++t) dy[t] = t == y ? std::numeric_limits<double>::infinity()
                                                           : metric(train.row(y), train.row(t));
        double s = 0.0;
        for (std::size_t z : ranked_neighbors(dy, p.k)) s += dy[z];
        dyz += s / double(p.k);
    }
    dxy /= double(p.j);
    dyz /= double(p.j);
    if (dyz == 0.0) return dxy == 0.0;
    return dxy / dyz < p.theta_d;
}

} // namespace pla::testing
