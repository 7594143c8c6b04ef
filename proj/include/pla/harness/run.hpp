#pragma once

#include "pla/attacks.hpp"
#include "pla/channel.hpp"
#include "pla/harness/config.hpp"
#include "pla/harness/result.hpp"
#include "pla/metrics.hpp"
#include "pla/mlauth/binary_knn.hpp"
#include "pla/mlauth/binary_svm.hpp"
#include "pla/mlauth/features.hpp"
#include "pla/mlauth/kmeans.hpp"
#include "pla/mlauth/ocnn.hpp"
#include "pla/mlauth/ocsvm.hpp"
#include "pla/mlauth/tuning.hpp"
#include "pla/optimize.hpp"
#include "pla/parallel.hpp"
#include "pla/rng.hpp"
#include "pla/simulate.hpp"
#include "pla/statdec.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pla {

struct RunOptions {
    unsigned workers = 1;
    /// Called after each finished row.
    std::function<void(const ResultRow&)> on_row;
};

namespace detail {

// Stream ids inside a sweep point. Datasets use ids 0..n_datasets-1.
inline constexpr std::uint64_t kThresholdStream = 1ULL << 40;
inline constexpr std::uint64_t kAttackSearchStream = (1ULL << 40) + 1;
// Children of a dataset stream.
inline constexpr std::uint64_t kAliceTraining = 1, kEveTraining = 2, kCvNegatives = 3, kTuning = 4, kShuffle = 5,
                               kClustering = 6, kTrialBase = 16;

/// Key of a sweep point: depends on the seed and the scenario, not on the defender or attacker,
/// so every series of a sweep shares its channel draws.
inline std::uint64_t point_key(std::uint64_t seed, const SweepPoint& pt)
{
    Rng r = Rng::stream(seed, pt.n);
    for (double v : {pt.alpha_I, pt.alpha_II, pt.rho_AE, pt.rho_EB, pt.snr_I_db, pt.snr_II_db})
        r = r.split(std::bit_cast<std::uint64_t>(v));
    return r.split(pt.m).next_u64();
}

/// Per-class trial count of each dataset; the remainder goes to the first datasets.
inline std::vector<std::size_t> dataset_trials(std::size_t total, std::size_t datasets)
{
    std::vector<std::size_t> out(datasets, total / datasets);
    for (std::size_t d = 0; d < total % datasets; ++d) ++out[d];
    return out;
}

struct Shard {
    std::size_t dataset;
    std::size_t block;
    std::size_t count;
};

inline std::vector<Shard> shards(const std::vector<std::size_t>& per_dataset)
{
    std::vector<Shard> out;
    for (std::size_t d = 0; d < per_dataset.size(); ++d)
        for (std::size_t b = 0; b * McPlan::kBlock < per_dataset[d]; ++b)
            out.push_back({d, b, std::min(McPlan::kBlock, per_dataset[d] - b * McPlan::kBlock)});
    return out;
}

/// Between-dataset standard error of a rate, floored at the pooled binomial error.
inline double dataset_se(const std::vector<ConfusionMatrix>& per_dataset, bool alice, double pooled, std::uint64_t n)
{
    const double floor = binomial_se(pooled, n);
    const std::size_t d = per_dataset.size();
    if (d < 2) return floor;
    double s = 0.0, s2 = 0.0;
    for (const auto& cm : per_dataset) {
        const double r = alice ? p_fa(cm) : p_md(cm);
        s += r;
        s2 += r * r;
    }
    const double mean = s / static_cast<double>(d);
    const double var = std::max(0.0, (s2 - static_cast<double>(d) * mean * mean) / static_cast<double>(d - 1));
    return std::max(floor, std::sqrt(var / static_cast<double>(d)));
}

inline void fill_metrics(ResultRow& row, const std::vector<ConfusionMatrix>& per_dataset)
{
    ConfusionMatrix cm;
    for (const auto& c : per_dataset) cm += c;
    row.fa_count = cm.fn;
    row.alice_total = cm.alice();
    row.md_count = cm.fp;
    row.eve_total = cm.eve();
    row.p_fa = p_fa(cm);
    row.p_md = p_md(cm);
    row.g_mean = g_mean(cm);
    row.accuracy = accuracy(cm);
    row.se_p_fa = dataset_se(per_dataset, true, row.p_fa, row.alice_total);
    row.se_p_md = dataset_se(per_dataset, false, row.p_md, row.eve_total);
}

inline std::string attacker_label(const AttackerSpec& a) { return a.exponent_search ? "exponent_search" : to_string(a.strategy); }

// ---------------------------------------------------------------------------------------------
// Statistical defenders: every trial draws a fresh channel realization.

inline void run_statistical(const ExperimentConfig& c, const SweepPoint& pt, const ScenarioParams& p,
                            std::uint64_t key, unsigned workers, ResultRow& row)
{
    const double target = *pt.target_pfa;
    const auto kind = c.defender.kind;
    AttackStrategy attack = c.attacker.strategy;
    const AttackStrategy against =
        c.defender.thresholds_against.value_or(c.attacker.exponent_search ? AttackStrategy::modulus() : attack);

    if (kind != DefenderKind::Llr && target * static_cast<double>(c.threshold_trials) < 100.0)
        throw InfeasibleTarget("target P_FA " + format_real(target) + " needs at least " +
                               format_real(std::ceil(100.0 / target)) + " threshold trials");

    Rng trng = Rng::stream(key, kThresholdStream);
    const StatDefender stat = kind == DefenderKind::Combined ? StatDefender::Combined : StatDefender::Llr;
    ThresholdPair bob{0.0, std::numeric_limits<double>::infinity()};
    const double s2e = p.sigma2_I() + p.sigma2_II();
    if (kind == DefenderKind::Llr) {
        bob.theta = llr_threshold_for(p, target);
        row.theta = bob.theta;
    } else if (kind == DefenderKind::Combined) {
        bob = optimize_thresholds(p, target, c.threshold_trials, against, trng, workers).best;
        row.theta = bob.theta;
        row.epsilon = bob.epsilon;
    } else {
        bob.theta = calibrate_ideal_threshold(p, target, c.threshold_trials, attack, s2e, s2e, trng, workers).theta_bar;
        row.theta = bob.theta;
    }

    if (c.attacker.exponent_search) {
        Rng arng = Rng::stream(key, kAttackSearchStream);
        const auto s = optimize_attack_exponents(p, bob, c.attacker.grid_step, c.attacker.search_trials, arng, workers, stat);
        attack = AttackStrategy::exponent(s.x, s.y);
    }
    if (attack.kind == AttackKind::Exponent) {
        row.attack_x = attack.x;
        row.attack_y = attack.y;
    }

    const bool ideal = kind == DefenderKind::IdealBound;
    const auto s2 = per_dim_variance(p);
    const ForgeWeights w = forge_weights(attack, p);
    const auto per = dataset_trials(c.n_trials, c.n_datasets);
    const auto work = shards(per);
    std::vector<ConfusionMatrix> cms(work.size());
    parallel_for(work.size(), workers, [&](std::size_t i) {
        const Shard& sh = work[i];
        const std::uint64_t seed = Rng::stream(key, sh.dataset).next_u64();
        const TrialBatch b = generate_batch(p, seed, sh.block, sh.count, ideal);
        const BatchEvaluator ev(b, s2);
        ConfusionMatrix cm;
        for (std::size_t t = 0; t < b.count; ++t) {
            bool alice_ok, eve_ok;
            if (ideal) {
                const auto [pa, pe] = ev.ideal(t, w, s2e, s2e);
                alice_ok = pa <= bob.theta;
                eve_ok = pe <= bob.theta;
            } else {
                alice_ok = detail::accepted(ev.alice(t), stat, bob);
                eve_ok = detail::accepted(ev.eve(t, w), stat, bob);
            }
            cm = record(cm, Truth::Alice, alice_ok ? Decision::Accept : Decision::Reject);
            cm = record(cm, Truth::Eve, eve_ok ? Decision::Accept : Decision::Reject);
        }
        cms[i] = cm;
    });
    std::vector<ConfusionMatrix> per_dataset(c.n_datasets);
    for (std::size_t i = 0; i < work.size(); ++i) per_dataset[work[i].dataset] += cms[i];
    fill_metrics(row, per_dataset);
}

// ---------------------------------------------------------------------------------------------
// Learned defenders: a dataset is one channel realization with its own training set.

struct Dataset {
    ChannelVector h;
    FeatureMatrix positives;   // one-class training set
    LabeledSet labeled;        // binary training set, first row from Alice
    FeatureMatrix negatives;   // synthetic attack draws for one-class cross-validation
};

inline FeatureVector eve_packet(const ChannelVector& h, const ScenarioParams& p, const AttackStrategy& a, Rng& rng,
                                bool phase1)
{
    const ChannelVector g = forge(a, eve_forging_input(h, p, rng), p);
    return featurize(phase1 ? forged_observation_phase1(g, p, rng) : forged_observation(g, p, rng));
}

inline Dataset make_dataset(const ExperimentConfig& c, const ScenarioParams& p, const Rng& base)
{
    const auto kind = c.defender.kind;
    const bool binary = kind == DefenderKind::BinaryKnn || kind == DefenderKind::BinarySvm ||
                        kind == DefenderKind::KmeansThenBinarySvm;
    const std::size_t dim = 2 * p.n();
    const std::size_t n_alice = binary ? p.m() / 2 : p.m();
    require(n_alice >= 1, "training set needs at least one Alice packet");

    Dataset ds{ChannelVector(), FeatureMatrix(dim), {FeatureMatrix(dim), {}}, FeatureMatrix(dim)};
    Rng ra = base.split(kAliceTraining);
    ds.h = sample_channel(p, ra);
    std::vector<double> mean(dim, 0.0);
    for (std::size_t m = 0; m < n_alice; ++m) {
        const FeatureVector f = featurize(bob_estimate_phase1(ds.h, p, phase1_alphas(p, ra), ra));
        ds.positives.push_back(f.values());
        for (std::size_t i = 0; i < dim; ++i) mean[i] += f[i] / static_cast<double>(n_alice);
    }

    if (binary) {
        const std::size_t n_eve = p.m() - n_alice;
        require(n_eve >= 1, "binary training needs M >= 2");
        Rng re = base.split(kEveTraining);
        FeatureMatrix eve(dim);
        for (std::size_t m = 0; m < n_eve; ++m) eve.push_back(eve_packet(ds.h, p, c.attacker.strategy, re, true).values());
        // Row 0 stays Alice's first packet; the rest is shuffled.
        std::vector<std::pair<bool, std::size_t>> order;
        for (std::size_t m = 1; m < n_alice; ++m) order.emplace_back(true, m);
        for (std::size_t m = 0; m < n_eve; ++m) order.emplace_back(false, m);
        Rng rs = base.split(kShuffle);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rs.below(i)]);
        ds.labeled.x.push_back(ds.positives.row(0));
        ds.labeled.positive.push_back(true);
        for (auto [alice, m] : order) {
            ds.labeled.x.push_back(alice ? ds.positives.row(m) : eve.row(m));
            ds.labeled.positive.push_back(alice);
        }
    } else {
        Rng rn = base.split(kCvNegatives);
        const ChannelVector h_bar = defeaturize(FeatureVector(mean));
        for (std::size_t m = 0; m < p.m(); ++m)
            ds.negatives.push_back(eve_packet(h_bar, p, c.attacker.strategy, rn, true).values());
    }
    return ds;
}

using TrainedModel = std::variant<OcnnModel, OcsvmModel, BinaryKnnModel, BinarySvmModel>;

/// Hyper-parameters chosen by cross-validation, reusable on another dataset.
struct Tuned {
    std::optional<OcnnParams> ocnn;
    std::optional<double> nu;
    std::optional<Kernel> kernel;
    std::optional<double> svm_c;
    std::optional<std::size_t> knn_k;
    double cv_g_mean = std::numeric_limits<double>::quiet_NaN();
};

inline DistanceMetric metric_for(const DefenderSpec& d, const ScenarioParams& p)
{
    switch (d.metric) {
    case MetricKind::Euclidean: return DistanceMetric::euclidean();
    case MetricKind::SquaredEuclidean: return DistanceMetric::squared_euclidean();
    case MetricKind::Llr: return DistanceMetric::llr(per_dim_variance(p));
    }
    return DistanceMetric::euclidean();
}

inline LabeledSet training_labels(const ExperimentConfig& c, const Dataset& ds, const Rng& base)
{
    if (c.defender.kind != DefenderKind::KmeansThenBinarySvm) return ds.labeled;
    Rng rk = base.split(kClustering);
    const auto km = kmeans_label(ds.labeled.x, 2, c.defender.kmeans_restarts, rk);
    LabeledSet out{ds.labeled.x, {}};
    for (std::size_t i = 0; i < km.labels.size(); ++i) out.positive.push_back(km.labels[i] == km.labels[0]);
    return out;
}

/// Trains a defender on a dataset. With `tune` set, hyper-parameters come from cross-validation
/// and are written to `tuned`; otherwise the ones already in `tuned` are used.
inline TrainedModel fit(const ExperimentConfig& c, const ScenarioParams& p, const Dataset& ds, const Rng& base,
                        Tuned& tuned, bool tune)
{
    const auto& d = c.defender;
    Rng rt = base.split(kTuning);
    switch (d.kind) {
    case DefenderKind::Ocnn: {
        const auto metric = metric_for(d, p);
        if (tune) {
            auto t = ocnn_train(ds.positives, d.variant, metric, CvConfig{d.cv_folds, ds.negatives}, rt);
            tuned.ocnn = t.model.params();
            tuned.cv_g_mean = t.cv_g_mean;
            return std::move(t.model);
        }
        return OcnnModel(d.variant, *tuned.ocnn, ds.positives, metric);
    }
    case DefenderKind::Ocsvm: {
        if (tune) {
            auto t = ocsvm_tune(ds.positives, CvConfig{d.cv_folds, ds.negatives}, rt, d.kernel);
            tuned.nu = t.model.nu();
            tuned.kernel = t.model.kernel();
            tuned.cv_g_mean = t.cv_g_mean;
            return std::move(t.model);
        }
        return ocsvm_train(ds.positives, *tuned.nu, *tuned.kernel);
    }
    case DefenderKind::BinaryKnn: {
        const auto metric = metric_for(d, p);
        if (tune) {
            auto t = binary_knn_tune(ds.labeled, d.cv_folds, rt, metric);
            tuned.knn_k = t.model.k();
            tuned.cv_g_mean = t.cv_g_mean;
            return std::move(t.model);
        }
        return BinaryKnnModel(ds.labeled, *tuned.knn_k, metric);
    }
    case DefenderKind::BinarySvm:
    case DefenderKind::KmeansThenBinarySvm: {
        const LabeledSet train = training_labels(c, ds, base);
        const std::size_t pos = train.count_positive();
        if (tune) {
            if (std::min(pos, train.size() - pos) >= d.cv_folds) {
                auto t = binary_svm_tune(train, d.cv_folds, rt);
                tuned.svm_c = t.model.c();
                tuned.kernel = t.model.kernel();
                tuned.cv_g_mean = t.cv_g_mean;
                return std::move(t.model);
            }
            // A cluster too small to cross-validate: unit cost and the median width.
            tuned.svm_c = 1.0;
            tuned.kernel = Kernel::gaussian(median_pairwise_distance(train.x));
        }
        return binary_svm_train(train, *tuned.svm_c, *tuned.kernel);
    }
    default: break;
    }
    throw InvariantViolation("fit: not a learned defender");
}

inline void record_tuned(ResultRow& row, const Tuned& t)
{
    if (t.ocnn) {
        row.j = t.ocnn->j;
        row.k = t.ocnn->k;
        row.theta_d = t.ocnn->theta_d;
    }
    row.nu = t.nu;
    if (t.kernel && t.kernel->kind == KernelKind::Gaussian) row.sigma_svm = t.kernel->sigma;
    row.svm_c = t.svm_c;
    if (t.knn_k) row.knn_k = *t.knn_k;
    if (!std::isnan(t.cv_g_mean)) row.cv_g_mean = t.cv_g_mean;
}

inline void run_learned(const ExperimentConfig& c, const ScenarioParams& p, std::uint64_t key, unsigned workers,
                        ResultRow& row)
{
    const std::size_t nd = c.n_datasets;
    std::vector<std::optional<Dataset>> data(nd);
    std::vector<std::optional<TrainedModel>> models(nd);
    std::vector<Tuned> tuned(nd);

    // Dataset 0 is tuned first; unless retuning is requested its choice is reused elsewhere.
    data[0] = make_dataset(c, p, Rng::stream(key, 0));
    const auto t0 = std::chrono::steady_clock::now();
    models[0] = fit(c, p, *data[0], Rng::stream(key, 0), tuned[0], true);
    const double train_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    parallel_for(nd - 1, workers, [&](std::size_t i) {
        const std::size_t d = i + 1;
        const Rng base = Rng::stream(key, d);
        data[d] = make_dataset(c, p, base);
        tuned[d] = tuned[0];
        models[d] = fit(c, p, *data[d], base, tuned[d], c.defender.retune_each_dataset);
    });

    const auto per = dataset_trials(c.n_trials, nd);
    const auto work = shards(per);
    std::vector<ConfusionMatrix> cms(work.size());
    parallel_for(work.size(), workers, [&](std::size_t i) {
        const Shard& sh = work[i];
        const ChannelVector& h = data[sh.dataset]->h;
        const TrainedModel& model = *models[sh.dataset];
        Rng rng = Rng::stream(key, sh.dataset).split(kTrialBase + sh.block);
        auto accepts = [&](const FeatureVector& x) {
            return std::visit([&](const auto& m) { return m.accepts(x.values()); }, model);
        };
        ConfusionMatrix cm;
        for (std::size_t t = 0; t < sh.count; ++t) {
            const FeatureVector a = featurize(alice_estimate_phase2(h, p, rng));
            cm = record(cm, Truth::Alice, accepts(a) ? Decision::Accept : Decision::Reject);
            const FeatureVector e = eve_packet(h, p, c.attacker.strategy, rng, false);
            cm = record(cm, Truth::Eve, accepts(e) ? Decision::Accept : Decision::Reject);
        }
        cms[i] = cm;
    });
    std::vector<ConfusionMatrix> per_dataset(nd);
    for (std::size_t i = 0; i < work.size(); ++i) per_dataset[work[i].dataset] += cms[i];
    fill_metrics(row, per_dataset);
    record_tuned(row, tuned[0]);
    if (c.record_timing) row.train_time_s = train_time;
}

inline std::string point_context(const ExperimentConfig& c, const SweepPoint& pt)
{
    return c.experiment + " [" + defender_label(c.defender) + ", N=" + std::to_string(pt.n) +
           ", M=" + std::to_string(pt.m) + ", alpha_I=" + format_real(pt.alpha_I) + ", alpha_II=" +
           format_real(pt.alpha_II) + ", rho_AE=" + format_real(pt.rho_AE) + ", rho_EB=" + format_real(pt.rho_EB) +
           ", SNR_I=" + format_real(pt.snr_I_db) + "dB]: ";
}

/// Rethrows with sweep-point context, keeping the exception category.
[[noreturn]] inline void rethrow_with(const std::string& ctx)
{
    try {
        throw;
    } catch (const InfeasibleTarget& e) {
        throw InfeasibleTarget(ctx + e.what());
    } catch (const NumericError& e) {
        throw NumericError(ctx + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(ctx + e.what());
    } catch (const InvariantViolation& e) {
        throw ConfigError(ctx + e.what());
    } catch (const SingularTest& e) {
        throw SingularTest(ctx + e.what());
    } catch (const SingularGeometry& e) {
        throw SingularGeometry(ctx + e.what());
    } catch (const UndefinedMetric& e) {
        throw UndefinedMetric(ctx + e.what());
    } catch (const Error& e) {
        throw Error(ctx + e.what());
    }
}

} // namespace detail

/// Runs every sweep point of a configuration. Rows depend only on (config, seed):
/// the worker count changes scheduling, never a single output bit.
inline ResultTable run_experiment(const ExperimentConfig& c, const RunOptions& opt = {})
{
    const auto points = expand(c);
    ResultTable table;
    for (const auto& pt : points) {
        ResultRow row;
        row.experiment = c.experiment;
        row.defender = defender_label(c.defender);
        row.attacker = detail::attacker_label(c.attacker);
        row.n_subcarriers = pt.n;
        row.m_training = pt.m;
        row.alpha_I = pt.alpha_I;
        row.alpha_II = pt.alpha_II;
        row.rho_AE = pt.rho_AE;
        row.rho_EB = pt.rho_EB;
        row.snr_I_db = pt.snr_I_db;
        row.snr_II_db = pt.snr_II_db;
        row.target_pfa = pt.target_pfa;
        row.n_datasets = c.n_datasets;
        row.n_trials = c.n_trials;
        try {
            const ScenarioParams p = scenario_of(c.scenario, pt);
            const std::uint64_t key = detail::point_key(c.seed, pt);
            if (c.defender.statistical()) detail::run_statistical(c, pt, p, key, opt.workers, row);
            else detail::run_learned(c, p, key, opt.workers, row);
        } catch (const Error&) {
            detail::rethrow_with(detail::point_context(c, pt));
        }
        if (opt.on_row) opt.on_row(row);
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace pla
