#pragma once

#include "pla/error.hpp"
#include "pla/metrics.hpp"
#include "pla/mlauth/binary_knn.hpp"
#include "pla/mlauth/binary_svm.hpp"
#include "pla/mlauth/features.hpp"
#include "pla/mlauth/kernel.hpp"
#include "pla/mlauth/ocnn.hpp"
#include "pla/mlauth/ocsvm.hpp"
#include "pla/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pla {

/// Cross-validation setup. One-class scoring needs rejected examples the deployed model never
/// sees; `negatives` holds synthetic attack draws used only to measure the true-negative rate.
struct CvConfig {
    std::size_t folds = 5;
    FeatureMatrix negatives;
};

inline const std::vector<double>& default_theta_grid()
{
    static const std::vector<double> g{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
    return g;
}
inline const std::vector<double>& default_nu_grid()
{
    static const std::vector<double> g{0.01, 0.02, 0.05, 0.1, 0.2};
    return g;
}
inline const std::vector<double>& default_sigma_multipliers()
{
    static const std::vector<double> g{0.5, 1.0, 2.0};
    return g;
}
inline const std::vector<double>& default_c_grid()
{
    static const std::vector<double> g{0.1, 1.0, 10.0, 100.0};
    return g;
}

namespace detail {

/// Fold index per sample: a uniform permutation dealt round-robin.
inline std::vector<std::size_t> fold_assignment(std::size_t m, std::size_t folds, Rng& rng)
{
    std::vector<std::size_t> perm(m), fold(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < m; ++i) std::swap(perm[i], perm[i + static_cast<std::size_t>(rng.below(m - i))]);
    for (std::size_t i = 0; i < m; ++i) fold[perm[i]] = i % folds;
    return fold;
}

inline std::vector<std::size_t> indices_where(const std::vector<std::size_t>& fold, std::size_t f, bool equal)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
        if ((fold[i] == f) == equal) out.push_back(i);
    return out;
}

/// Held-out rows of fold f: positives first, then the fold's share of the negatives.
struct FoldSplit {
    FeatureMatrix train;
    FeatureMatrix queries;
    std::size_t n_positive;
};

inline FoldSplit split_fold(const FeatureMatrix& pos, const FeatureMatrix& neg, const std::vector<std::size_t>& fold,
                            std::size_t folds, std::size_t f)
{
    const auto tr = indices_where(fold, f, false);
    const auto te = indices_where(fold, f, true);
    FoldSplit s{pos.select(tr), pos.select(te), te.size()};
    for (std::size_t i = f; i < neg.rows(); i += folds) s.queries.push_back(neg.row(i));
    return s;
}

inline void tally(ConfusionMatrix& cm, bool is_positive, bool accepted)
{
    cm = record(cm, is_positive ? Truth::Alice : Truth::Eve, accepted ? Decision::Accept : Decision::Reject);
}

inline double cv_score(const ConfusionMatrix& cm) { return g_mean(cm); }

inline void require_cv(const FeatureMatrix& pos, const CvConfig& cv)
{
    require(cv.folds >= 2, "cross-validation needs at least two folds");
    require(pos.rows() >= cv.folds, "cross-validation: fewer samples than folds");
    require(cv.negatives.rows() >= cv.folds, "cross-validation: need synthetic negatives in every fold");
    require_same_size(cv.negatives.dim(), pos.dim(), "cross-validation negatives");
}

} // namespace detail

inline std::size_t neighbor_limit(std::size_t m)
{
    return std::min<std::size_t>(30, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m)))));
}

/// (j, k) pairs admissible for the variant, ascending in j then k.
inline std::vector<std::pair<std::size_t, std::size_t>> ocnn_neighbor_grid(OcnnVariant v, std::size_t m,
                                                                           std::size_t train_rows)
{
    const std::size_t lim = std::max<std::size_t>(1, neighbor_limit(m));
    const std::size_t jmax = (v == OcnnVariant::J1NN || v == OcnnVariant::JKNN) ? lim : 1;
    const std::size_t kmax = (v == OcnnVariant::NN1K || v == OcnnVariant::JKNN) ? lim : 1;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 1; j <= jmax; ++j)
        for (std::size_t k = 1; k <= kmax; ++k)
            if (j * k + j <= train_rows) out.emplace_back(j, k);
    return out;
}

struct OcnnGridPoint {
    OcnnParams params;
    ConfusionMatrix cm;
    double g_mean;
};

struct OcnnTuning {
    OcnnModel model;
    double cv_g_mean;
    std::vector<OcnnGridPoint> grid;
};

/// Grid search over (j, k, theta_d) by cross-validated g_mean; ties keep the smallest (j, k, theta_d).
/// Distances are computed once per fold; ratios reuse sorted-neighbor prefix sums and are
/// bit-identical to OcnnModel::ratio.
inline OcnnTuning ocnn_train(const FeatureMatrix& positives, OcnnVariant variant, const DistanceMetric& metric,
                             const CvConfig& cv, Rng& rng,
                             const std::vector<double>& theta_grid = default_theta_grid())
{
    detail::require(positives.rows() >= 10, "ocnn_train: need at least 10 positives");
    detail::require_cv(positives, cv);
    const std::size_t m = positives.rows();
    const auto fold = detail::fold_assignment(m, cv.folds, rng);

    std::size_t min_train = m;
    for (std::size_t f = 0; f < cv.folds; ++f) min_train = std::min(min_train, detail::indices_where(fold, f, false).size());
    const auto pairs = ocnn_neighbor_grid(variant, m, min_train);
    detail::require(!pairs.empty() && !theta_grid.empty(), "ocnn_train: empty parameter grid");
    std::size_t jmax = 1, kmax = 1;
    for (auto [j, k] : pairs) jmax = std::max(jmax, j), kmax = std::max(kmax, k);

    std::vector<ConfusionMatrix> cms(pairs.size() * theta_grid.size());
    for (std::size_t f = 0; f < cv.folds; ++f) {
        const auto s = detail::split_fold(positives, cv.negatives, fold, cv.folds, f);
        const std::size_t n = s.train.rows();
        std::vector<double> d(n);

        // neighbor_mean[k-1][y]: mean distance from training row y to its k nearest others.
        std::vector<std::vector<double>> neighbor_mean(kmax, std::vector<double>(n));
        for (std::size_t y = 0; y < n; ++y) {
            for (std::size_t t = 0; t < n; ++t) d[t] = metric(s.train.row(y), s.train.row(t));
            d[y] = std::numeric_limits<double>::infinity();
            double acc = 0.0;
            const auto nn = detail::smallest(d, kmax);
            for (std::size_t r = 0; r < nn.size(); ++r) {
                acc += d[nn[r]];
                neighbor_mean[r][y] = acc / static_cast<double>(r + 1);
            }
        }

        for (std::size_t q = 0; q < s.queries.rows(); ++q) {
            const bool is_pos = q < s.n_positive;
            for (std::size_t t = 0; t < n; ++t) d[t] = metric(s.queries.row(q), s.train.row(t));
            const auto nn = detail::smallest(d, jmax);
            std::vector<double> dxy_sum(nn.size());
            double acc = 0.0;
            for (std::size_t r = 0; r < nn.size(); ++r) dxy_sum[r] = acc += d[nn[r]];

            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const auto [j, k] = pairs[p];
                const double dxy = dxy_sum[j - 1] / static_cast<double>(j);
                double dyz = 0.0;
                for (std::size_t r = 0; r < j; ++r) dyz += neighbor_mean[k - 1][nn[r]];
                dyz /= static_cast<double>(j);
                const double ratio = dyz == 0.0 ? (dxy == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                                : dxy / dyz;
                for (std::size_t th = 0; th < theta_grid.size(); ++th)
                    detail::tally(cms[p * theta_grid.size() + th], is_pos, ratio < theta_grid[th]);
            }
        }
    }

    std::vector<OcnnGridPoint> grid;
    std::size_t best = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p)
        for (std::size_t th = 0; th < theta_grid.size(); ++th) {
            const auto& cm = cms[p * theta_grid.size() + th];
            grid.push_back({{pairs[p].first, pairs[p].second, theta_grid[th]}, cm, detail::cv_score(cm)});
            if (grid.back().g_mean > grid[best].g_mean) best = grid.size() - 1;
        }
    OcnnModel model(variant, grid[best].params, positives, metric);
    return {std::move(model), grid[best].g_mean, std::move(grid)};
}

struct KernelGridPoint {
    double first;  // nu, or C for the binary machine
    double sigma;
    ConfusionMatrix cm;
    double g_mean;
};

struct OcsvmTuning {
    OcsvmModel model;
    double cv_g_mean;
    std::vector<KernelGridPoint> grid;
};

namespace detail {

inline std::vector<double> squared_distances(const FeatureMatrix& a, const FeatureMatrix& b)
{
    std::vector<double> out(a.rows() * b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) out[i * b.rows() + j] = squared_euclidean(a.row(i), b.row(j));
    return out;
}

inline double gaussian_from_sq(double sq, double sigma) { return std::exp(-sq / (2.0 * sigma * sigma)); }

} // namespace detail

/// Kernels tried for a given kind: Gaussian widths from the median heuristic, otherwise one fixed kernel.
inline std::vector<Kernel> kernel_candidates(KernelKind kind, const FeatureMatrix& x,
                                             const std::vector<double>& sigma_mult)
{
    switch (kind) {
    case KernelKind::Gaussian: {
        const double base = median_pairwise_distance(x);
        detail::require(base > 0, "kernel_candidates: degenerate training set");
        std::vector<Kernel> out;
        for (double mult : sigma_mult) out.push_back(Kernel::gaussian(base * mult));
        return out;
    }
    case KernelKind::Polynomial: return {Kernel::polynomial(2, 1.0 / static_cast<double>(x.dim()), 1.0)};
    case KernelKind::Linear: return {Kernel::linear()};
    }
    return {};
}

/// One-class SVM tuned over nu and the candidate kernels by cross-validated g_mean;
/// ties keep the earliest grid point (nu ascending, then kernel order).
inline OcsvmTuning ocsvm_tune(const FeatureMatrix& positives, const CvConfig& cv, Rng& rng,
                              KernelKind kind = KernelKind::Gaussian,
                              const std::vector<double>& nu_grid = default_nu_grid(),
                              const std::vector<double>& sigma_mult = default_sigma_multipliers())
{
    detail::require_cv(positives, cv);
    const auto kernels = kernel_candidates(kind, positives, sigma_mult);
    const auto fold = detail::fold_assignment(positives.rows(), cv.folds, rng);

    std::vector<KernelGridPoint> grid;
    for (double nu : nu_grid)
        for (const auto& k : kernels) grid.push_back({nu, k.sigma, {}, 0.0});
    std::vector<bool> usable(grid.size(), true);

    for (std::size_t f = 0; f < cv.folds; ++f) {
        const auto s = detail::split_fold(positives, cv.negatives, fold, cv.folds, f);
        const std::size_t n = s.train.rows();
        for (std::size_t ki = 0; ki < kernels.size(); ++ki) {
            const GramMatrix gram(s.train, kernels[ki]);
            std::vector<double> kq(s.queries.rows() * n);
            for (std::size_t r = 0; r < s.queries.rows(); ++r)
                for (std::size_t t = 0; t < n; ++t) kq[r * n + t] = kernels[ki](s.queries.row(r), s.train.row(t));
            for (std::size_t ni = 0; ni < nu_grid.size(); ++ni) {
                const std::size_t g = ni * kernels.size() + ki;
                if (nu_grid[ni] * static_cast<double>(n) < 1.0) {
                    usable[g] = false;
                    continue;
                }
                const OcsvmDual dual = ocsvm_solve(gram, nu_grid[ni]);
                for (std::size_t r = 0; r < s.queries.rows(); ++r) {
                    double v = -dual.xi;
                    for (std::size_t t = 0; t < n; ++t) v += dual.lambda[t] * kq[r * n + t];
                    detail::tally(grid[g].cm, r < s.n_positive, v > 0.0);
                }
            }
        }
    }

    std::size_t best = grid.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!usable[g]) continue;
        grid[g].g_mean = detail::cv_score(grid[g].cm);
        if (best == grid.size() || grid[g].g_mean > grid[best].g_mean) best = g;
    }
    detail::require(best < grid.size(), "ocsvm_tune: no admissible nu for this training size");
    auto model = ocsvm_train(positives, grid[best].first, kernels[best % kernels.size()]);
    return {std::move(model), grid[best].g_mean, std::move(grid)};
}

struct BinarySvmTuning {
    BinarySvmModel model;
    double cv_g_mean;
    std::vector<KernelGridPoint> grid;
};

struct BinaryKnnTuning {
    BinaryKnnModel model;
    double cv_g_mean;
    std::vector<std::pair<std::size_t, double>> grid; // (k, g_mean)
};

namespace detail {

struct LabeledFold {
    LabeledSet train;
    LabeledSet test;
};

inline LabeledFold split_labeled(const LabeledSet& s, const std::vector<std::size_t>& fold, std::size_t f)
{
    return {s.select(indices_where(fold, f, false)), s.select(indices_where(fold, f, true))};
}

inline void require_labeled(const LabeledSet& s, std::size_t folds)
{
    require_same_size(s.x.rows(), s.size(), "labeled set");
    require(folds >= 2 && s.size() >= 2 * folds, "cross-validation: too few labeled samples");
    require(s.count_positive() > 0 && s.count_positive() < s.size(), "cross-validation: both labels required");
}

} // namespace detail

/// Gaussian soft-margin SVM tuned over C and kernel width by cross-validated g_mean.
inline BinarySvmTuning binary_svm_tune(const LabeledSet& train, std::size_t folds, Rng& rng,
                                       const std::vector<double>& c_grid = default_c_grid(),
                                       const std::vector<double>& sigma_mult = default_sigma_multipliers())
{
    detail::require_labeled(train, folds);
    const double base = median_pairwise_distance(train.x);
    detail::require(base > 0, "binary_svm_tune: degenerate training set");
    const auto fold = detail::fold_assignment(train.size(), folds, rng);

    std::vector<KernelGridPoint> grid;
    for (double c : c_grid)
        for (double mult : sigma_mult) grid.push_back({c, base * mult, {}, 0.0});
    std::vector<bool> usable(grid.size(), true);

    for (std::size_t f = 0; f < folds; ++f) {
        const auto s = detail::split_labeled(train, fold, f);
        const std::size_t np = s.train.count_positive();
        if (np == 0 || np == s.train.size()) {
            std::fill(usable.begin(), usable.end(), false);
            break;
        }
        const std::size_t n = s.train.size(), q = s.test.size();
        const auto y = signed_labels(s.train);
        const auto dqt = detail::squared_distances(s.test.x, s.train.x);
        for (std::size_t mi = 0; mi < sigma_mult.size(); ++mi) {
            const double sigma = base * sigma_mult[mi];
            const GramMatrix k(s.train.x, Kernel::gaussian(sigma));
            for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
                const auto dual = binary_svm_solve(k, y, c_grid[ci]);
                auto& cell = grid[ci * sigma_mult.size() + mi];
                for (std::size_t r = 0; r < q; ++r) {
                    double v = -dual.rho;
                    for (std::size_t t = 0; t < n; ++t)
                        if (dual.alpha[t] > 0)
                            v += dual.alpha[t] * y[t] * detail::gaussian_from_sq(dqt[r * n + t], sigma);
                    detail::tally(cell.cm, s.test.positive[r], v > 0.0);
                }
            }
        }
    }
    std::size_t best = grid.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!usable[g]) continue;
        grid[g].g_mean = detail::cv_score(grid[g].cm);
        if (best == grid.size() || grid[g].g_mean > grid[best].g_mean) best = g;
    }
    detail::require(best < grid.size(), "binary_svm_tune: a fold lacks one of the labels");
    auto model = binary_svm_train(train, grid[best].first, grid[best].sigma);
    return {std::move(model), grid[best].g_mean, std::move(grid)};
}

/// Odd k in [3, sqrt(M)] (k = 1 when the set is too small) by cross-validated g_mean; ties keep the smaller k.
inline BinaryKnnTuning binary_knn_tune(const LabeledSet& train, std::size_t folds, Rng& rng,
                                       const DistanceMetric& metric = DistanceMetric::euclidean())
{
    detail::require_labeled(train, folds);
    const auto fold = detail::fold_assignment(train.size(), folds, rng);
    const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(train.size()))));
    const std::size_t min_train = train.size() - (train.size() + folds - 1) / folds;
    std::vector<std::size_t> ks;
    for (std::size_t k = 3; k <= root && k <= min_train; k += 2) ks.push_back(k);
    if (ks.empty()) ks.push_back(1);

    std::vector<ConfusionMatrix> cms(ks.size());
    for (std::size_t f = 0; f < folds; ++f) {
        const auto s = detail::split_labeled(train, fold, f);
        std::vector<double> d(s.train.size());
        for (std::size_t r = 0; r < s.test.size(); ++r) {
            for (std::size_t t = 0; t < d.size(); ++t) d[t] = metric(s.test.x.row(r), s.train.x.row(t));
            const auto nn = detail::smallest(d, ks.back());
            std::size_t votes = 0, seen = 0;
            for (std::size_t i = 0; i < ks.size(); ++i) {
                for (; seen < ks[i]; ++seen) votes += s.train.positive[nn[seen]];
                detail::tally(cms[i], s.test.positive[r], 2 * votes > ks[i]);
            }
        }
    }
    std::vector<std::pair<std::size_t, double>> grid;
    std::size_t best = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        grid.emplace_back(ks[i], detail::cv_score(cms[i]));
        if (grid[i].second > grid[best].second) best = i;
    }
    return {BinaryKnnModel(train, ks[best], metric), grid[best].second, std::move(grid)};
}

} // namespace pla
