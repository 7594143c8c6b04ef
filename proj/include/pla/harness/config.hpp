#pragma once

#include "pla/attacks.hpp"
#include "pla/channel.hpp"
#include "pla/error.hpp"
#include "pla/mlauth/features.hpp"
#include "pla/mlauth/kernel.hpp"
#include "pla/mlauth/ocnn.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pla {

enum class DefenderKind { Llr, Combined, IdealBound, Ocnn, Ocsvm, BinaryKnn, BinarySvm, KmeansThenBinarySvm };

struct DefenderSpec {
    DefenderKind kind = DefenderKind::Llr;
    OcnnVariant variant = OcnnVariant::NN11;
    MetricKind metric = MetricKind::Euclidean;
    KernelKind kernel = KernelKind::Gaussian;
    /// Attack Bob tunes combined thresholds against; unset means the experiment's fixed attack,
    /// or the modulus attack when Eve searches her exponents.
    std::optional<AttackStrategy> thresholds_against{};
    /// Tune hyper-parameters on every dataset instead of once per sweep point.
    bool retune_each_dataset = false;
    std::size_t kmeans_restarts = 50;
    std::size_t cv_folds = 5;

    [[nodiscard]] bool statistical() const noexcept
    {
        return kind == DefenderKind::Llr || kind == DefenderKind::Combined || kind == DefenderKind::IdealBound;
    }
};

struct AttackerSpec {
    AttackStrategy strategy = AttackStrategy::ml();
    /// Eve picks the exponent pair maximizing missed detection against the defender.
    bool exponent_search = false;
    double grid_step = 0.1;
    std::size_t search_trials = 100000;
};

/// Sweep axes; every combination is one row.
struct SweepSpec {
    std::vector<std::size_t> n_subcarriers{1};
    std::vector<double> alpha_I{1.0};
    std::vector<double> alpha_II{1.0};
    std::vector<double> rho_AE{0.1};
    std::vector<double> rho_EB{0.0};
    std::vector<double> snr_I_db{15.0};
    std::vector<double> snr_II_db{20.0};
    std::vector<std::size_t> m_training{1000};
    bool rho_EB_equals_rho_AE = false;
    double rho_AB = 0.0;
    double sigma2_AE = 0.0;
    double sigma2_EB = 0.0;
    EveLinkInnovation eve_links = EveLinkInnovation::Independent;
    EveInnovationTiming eve_timing = EveInnovationTiming::PerPacket;
    bool eve_averaging = false;
    double alpha_I_spread = 0.0;
};

struct ExperimentConfig {
    std::string experiment = "custom";
    SweepSpec scenario;
    DefenderSpec defender;
    AttackerSpec attacker;
    /// One value, or one per entry of the axis named by target_pfa_axis.
    std::vector<double> target_pfa;
    std::string target_pfa_axis = "n_subcarriers";
    std::size_t n_trials = 40000; // per class, summed over datasets
    std::size_t n_datasets = 20;
    std::uint64_t seed = 42;
    std::size_t threshold_trials = 1000000;
    bool record_timing = false;
};

/// One fully specified sweep point.
struct SweepPoint {
    std::size_t n;
    double alpha_I, alpha_II, rho_AE, rho_EB, snr_I_db, snr_II_db;
    std::size_t m;
    std::optional<double> target_pfa;
};

inline ScenarioParams scenario_of(const SweepSpec& s, const SweepPoint& pt)
{
    ScenarioConfig c;
    c.n_subcarriers = pt.n;
    c.m_training = pt.m;
    c.sigma2_I = noise_variance_from_snr_db(pt.snr_I_db);
    c.sigma2_II = noise_variance_from_snr_db(pt.snr_II_db);
    c.alpha_I = {pt.alpha_I};
    c.alpha_II = {pt.alpha_II};
    c.rho_AE = pt.rho_AE;
    c.rho_EB = pt.rho_EB;
    c.rho_AB = s.rho_AB;
    c.sigma2_AE = s.sigma2_AE;
    c.sigma2_EB = s.sigma2_EB;
    c.eve_links = s.eve_links;
    c.eve_timing = s.eve_timing;
    c.eve_averaging = s.eve_averaging;
    c.alpha_I_spread = s.alpha_I_spread;
    return ScenarioParams(std::move(c));
}

inline void validate(const ExperimentConfig& c)
{
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    const auto& s = c.scenario;
    if (s.n_subcarriers.empty() || s.alpha_I.empty() || s.alpha_II.empty() || s.rho_AE.empty() ||
        s.rho_EB.empty() || s.snr_I_db.empty() || s.snr_II_db.empty() || s.m_training.empty())
        fail("every sweep list must be nonempty");
    if (c.n_trials < 1000) fail("n_trials must be at least 1000");
    if (c.n_datasets < 1 || c.n_datasets > c.n_trials) fail("n_datasets must lie in [1, n_trials]");
    if (c.defender.statistical() && c.target_pfa.empty()) fail("target_pfa is required for statistical defenders");
    for (double t : c.target_pfa)
        if (!(t > 0 && t < 1)) fail("target_pfa values must lie in (0,1)");
    if (c.attacker.exponent_search && !(c.defender.kind == DefenderKind::Llr || c.defender.kind == DefenderKind::Combined))
        fail("exponent search needs an LLR or combined defender");
    if (c.defender.cv_folds < 2) fail("cv_folds must be at least 2");
    if (c.defender.kmeans_restarts < 1) fail("kmeans_restarts must be positive");
}

namespace detail {

template <class T>
std::size_t axis_index(const std::vector<T>& axis, T v)
{
    for (std::size_t i = 0; i < axis.size(); ++i)
        if (axis[i] == v) return i;
    return axis.size();
}

} // namespace detail

/// Sweep points in row order: N outermost, then alpha_II, alpha_I, rho_AE, rho_EB, SNRs, M.
inline std::vector<SweepPoint> expand(const ExperimentConfig& c)
{
    validate(c);
    const auto& s = c.scenario;
    const std::vector<double> eb_axis = s.rho_EB_equals_rho_AE ? std::vector<double>{-1.0} : s.rho_EB;
    std::vector<SweepPoint> out;
    for (std::size_t n : s.n_subcarriers)
        for (double a2 : s.alpha_II)
            for (double a1 : s.alpha_I)
                for (double ae : s.rho_AE)
                    for (double eb : eb_axis)
                        for (double s1 : s.snr_I_db)
                            for (double s2 : s.snr_II_db)
                                for (std::size_t m : s.m_training) {
                                    SweepPoint pt{n, a1, a2, ae, s.rho_EB_equals_rho_AE ? ae : eb, s1, s2, m, {}};
                                    if (c.target_pfa.size() == 1) pt.target_pfa = c.target_pfa[0];
                                    else if (c.target_pfa.size() > 1) {
                                        std::size_t idx = 0, len = 0;
                                        const auto& ax = c.target_pfa_axis;
                                        if (ax == "n_subcarriers") idx = detail::axis_index(s.n_subcarriers, n), len = s.n_subcarriers.size();
                                        else if (ax == "snr_I_db") idx = detail::axis_index(s.snr_I_db, s1), len = s.snr_I_db.size();
                                        else if (ax == "rho_AE") idx = detail::axis_index(s.rho_AE, ae), len = s.rho_AE.size();
                                        else if (ax == "alpha_II") idx = detail::axis_index(s.alpha_II, a2), len = s.alpha_II.size();
                                        else if (ax == "alpha_I") idx = detail::axis_index(s.alpha_I, a1), len = s.alpha_I.size();
                                        else throw ConfigError("unknown target_pfa_axis '" + ax + "'");
                                        if (len != c.target_pfa.size())
                                            throw ConfigError("target_pfa length must match the " + ax + " sweep");
                                        pt.target_pfa = c.target_pfa[idx];
                                    }
                                    out.push_back(pt);
                                }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Names used in configuration files and result tables.

inline std::string to_string(DefenderKind k)
{
    switch (k) {
    case DefenderKind::Llr: return "llr";
    case DefenderKind::Combined: return "combined";
    case DefenderKind::IdealBound: return "ideal_bound";
    case DefenderKind::Ocnn: return "ocnn";
    case DefenderKind::Ocsvm: return "ocsvm";
    case DefenderKind::BinaryKnn: return "binary_knn";
    case DefenderKind::BinarySvm: return "binary_svm";
    case DefenderKind::KmeansThenBinarySvm: return "kmeans_binary_svm";
    }
    return "?";
}

inline std::string to_string(MetricKind m)
{
    switch (m) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::SquaredEuclidean: return "squared_euclidean";
    case MetricKind::Llr: return "llr";
    }
    return "?";
}

/// Row label of a defender, e.g. "ocnn:1KNN:euclidean" or "ocsvm:gaussian".
inline std::string defender_label(const DefenderSpec& d)
{
    switch (d.kind) {
    case DefenderKind::Ocnn: return "ocnn:" + to_string(d.variant) + ":" + to_string(d.metric);
    case DefenderKind::Ocsvm: return "ocsvm:" + to_string(d.kernel);
    default: return to_string(d.kind);
    }
}

namespace detail {

template <class E, std::size_t K>
E parse_enum(const std::string& s, const std::pair<const char*, E> (&table)[K], const char* what)
{
    for (const auto& [name, v] : table)
        if (s == name) return v;
    throw ConfigError(std::string("unknown ") + what + " '" + s + "'");
}

inline const std::pair<const char*, DefenderKind> kDefenders[] = {
    {"llr", DefenderKind::Llr},
    {"combined", DefenderKind::Combined},
    {"ideal_bound", DefenderKind::IdealBound},
    {"ocnn", DefenderKind::Ocnn},
    {"ocsvm", DefenderKind::Ocsvm},
    {"binary_knn", DefenderKind::BinaryKnn},
    {"binary_svm", DefenderKind::BinarySvm},
    {"kmeans_binary_svm", DefenderKind::KmeansThenBinarySvm}};
inline const std::pair<const char*, OcnnVariant> kVariants[] = {
    {"11NN", OcnnVariant::NN11}, {"1KNN", OcnnVariant::NN1K}, {"J1NN", OcnnVariant::J1NN}, {"JKNN", OcnnVariant::JKNN}};
inline const std::pair<const char*, MetricKind> kMetrics[] = {
    {"euclidean", MetricKind::Euclidean}, {"squared_euclidean", MetricKind::SquaredEuclidean}, {"llr", MetricKind::Llr}};
inline const std::pair<const char*, KernelKind> kKernels[] = {
    {"gaussian", KernelKind::Gaussian}, {"polynomial", KernelKind::Polynomial}, {"linear", KernelKind::Linear}};
inline const std::pair<const char*, AttackKind> kAttacks[] = {{"ml", AttackKind::MlEstimate},
                                                              {"simplified", AttackKind::Simplified},
                                                              {"modulus", AttackKind::Modulus},
                                                              {"exponent", AttackKind::Exponent}};
inline const std::pair<const char*, EveLinkInnovation> kLinks[] = {{"independent", EveLinkInnovation::Independent},
                                                                   {"shared", EveLinkInnovation::Shared}};
inline const std::pair<const char*, EveInnovationTiming> kTimings[] = {
    {"per_packet", EveInnovationTiming::PerPacket}, {"per_realization", EveInnovationTiming::PerRealization}};

template <class E, std::size_t K>
std::string enum_name(E v, const std::pair<const char*, E> (&table)[K])
{
    for (const auto& [name, e] : table)
        if (e == v) return name;
    return "?";
}

template <class T>
std::vector<T> list_of(const nlohmann::json& j, const char* key)
{
    if (j.is_array()) return j.get<std::vector<T>>();
    if (j.is_number()) return {j.get<T>()};
    throw ConfigError(std::string("'") + key + "' must be a number or a list of numbers");
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok |= it.key() == k;
        if (!ok) throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
    }
}

inline AttackStrategy attack_from_json(const nlohmann::json& j)
{
    const auto kind = parse_enum(j.at("kind").get<std::string>(), kAttacks, "attack");
    switch (kind) {
    case AttackKind::MlEstimate: return AttackStrategy::ml();
    case AttackKind::Simplified: return AttackStrategy::simplified();
    case AttackKind::Modulus: return AttackStrategy::modulus();
    case AttackKind::Exponent: return AttackStrategy::exponent(j.at("x").get<double>(), j.at("y").get<double>());
    }
    throw ConfigError("unknown attack");
}

inline nlohmann::json attack_to_json(const AttackStrategy& a)
{
    nlohmann::json j{{"kind", enum_name(a.kind, kAttacks)}};
    if (a.kind == AttackKind::Exponent) {
        j["x"] = a.x;
        j["y"] = a.y;
    }
    return j;
}

} // namespace detail

/// Parses a configuration document. Keys mirror the ExperimentConfig field names.
inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    using namespace detail;
    try {
        reject_unknown(j, {"experiment", "scenario", "defender", "attacker", "target_pfa", "target_pfa_axis", "n_trials",
                           "n_datasets", "seed", "threshold_trials", "record_timing"},
                       "config");
        ExperimentConfig c;
        c.experiment = j.value("experiment", c.experiment);
        if (j.contains("scenario")) {
            const auto& s = j.at("scenario");
            reject_unknown(s, {"n_subcarriers", "alpha_I", "alpha_II", "rho_AE", "rho_EB", "snr_I_db", "snr_II_db",
                               "m_training", "rho_EB_equals_rho_AE", "rho_AB", "sigma2_AE", "sigma2_EB", "eve_links",
                               "eve_timing", "eve_averaging", "alpha_I_spread"},
                           "scenario");
            auto& o = c.scenario;
            if (s.contains("n_subcarriers")) o.n_subcarriers = list_of<std::size_t>(s["n_subcarriers"], "n_subcarriers");
            if (s.contains("alpha_I")) o.alpha_I = list_of<double>(s["alpha_I"], "alpha_I");
            if (s.contains("alpha_II")) o.alpha_II = list_of<double>(s["alpha_II"], "alpha_II");
            if (s.contains("rho_AE")) o.rho_AE = list_of<double>(s["rho_AE"], "rho_AE");
            if (s.contains("rho_EB")) o.rho_EB = list_of<double>(s["rho_EB"], "rho_EB");
            if (s.contains("snr_I_db")) o.snr_I_db = list_of<double>(s["snr_I_db"], "snr_I_db");
            if (s.contains("snr_II_db")) o.snr_II_db = list_of<double>(s["snr_II_db"], "snr_II_db");
            if (s.contains("m_training")) o.m_training = list_of<std::size_t>(s["m_training"], "m_training");
            o.rho_EB_equals_rho_AE = s.value("rho_EB_equals_rho_AE", o.rho_EB_equals_rho_AE);
            o.rho_AB = s.value("rho_AB", o.rho_AB);
            o.sigma2_AE = s.value("sigma2_AE", o.sigma2_AE);
            o.sigma2_EB = s.value("sigma2_EB", o.sigma2_EB);
            if (s.contains("eve_links")) o.eve_links = parse_enum(s["eve_links"].get<std::string>(), kLinks, "eve_links");
            if (s.contains("eve_timing"))
                o.eve_timing = parse_enum(s["eve_timing"].get<std::string>(), kTimings, "eve_timing");
            o.eve_averaging = s.value("eve_averaging", o.eve_averaging);
            o.alpha_I_spread = s.value("alpha_I_spread", o.alpha_I_spread);
        }
        if (j.contains("defender")) {
            const auto& d = j.at("defender");
            reject_unknown(d, {"kind", "variant", "metric", "kernel", "thresholds_against", "retune_each_dataset",
                               "kmeans_restarts", "cv_folds"},
                           "defender");
            auto& o = c.defender;
            o.kind = parse_enum(d.at("kind").get<std::string>(), kDefenders, "defender");
            if (d.contains("variant")) o.variant = parse_enum(d["variant"].get<std::string>(), kVariants, "variant");
            if (d.contains("metric")) o.metric = parse_enum(d["metric"].get<std::string>(), kMetrics, "metric");
            if (d.contains("kernel")) o.kernel = parse_enum(d["kernel"].get<std::string>(), kKernels, "kernel");
            if (d.contains("thresholds_against")) o.thresholds_against = attack_from_json(d["thresholds_against"]);
            o.retune_each_dataset = d.value("retune_each_dataset", o.retune_each_dataset);
            o.kmeans_restarts = d.value("kmeans_restarts", o.kmeans_restarts);
            o.cv_folds = d.value("cv_folds", o.cv_folds);
        }
        if (j.contains("attacker")) {
            const auto& a = j.at("attacker");
            reject_unknown(a, {"kind", "x", "y", "grid_step", "search_trials"}, "attacker");
            const std::string kind = a.at("kind").get<std::string>();
            if (kind == "exponent_search") {
                c.attacker.exponent_search = true;
                c.attacker.strategy = AttackStrategy::ml();
            } else {
                c.attacker.strategy = attack_from_json(a);
            }
            c.attacker.grid_step = a.value("grid_step", c.attacker.grid_step);
            c.attacker.search_trials = a.value("search_trials", c.attacker.search_trials);
        }
        if (j.contains("target_pfa")) c.target_pfa = list_of<double>(j["target_pfa"], "target_pfa");
        c.target_pfa_axis = j.value("target_pfa_axis", c.target_pfa_axis);
        c.n_trials = j.value("n_trials", c.n_trials);
        c.n_datasets = j.value("n_datasets", c.n_datasets);
        c.seed = j.value("seed", c.seed);
        c.threshold_trials = j.value("threshold_trials", c.threshold_trials);
        c.record_timing = j.value("record_timing", c.record_timing);
        validate(c);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const InvariantViolation& e) {
        throw ConfigError(e.what());
    }
}

inline nlohmann::json config_to_json(const ExperimentConfig& c)
{
    using namespace detail;
    const auto& s = c.scenario;
    nlohmann::json scen{{"n_subcarriers", s.n_subcarriers}, {"alpha_I", s.alpha_I},
                        {"alpha_II", s.alpha_II},           {"rho_AE", s.rho_AE},
                        {"rho_EB", s.rho_EB},               {"snr_I_db", s.snr_I_db},
                        {"snr_II_db", s.snr_II_db},         {"m_training", s.m_training},
                        {"rho_EB_equals_rho_AE", s.rho_EB_equals_rho_AE},
                        {"rho_AB", s.rho_AB},               {"sigma2_AE", s.sigma2_AE},
                        {"sigma2_EB", s.sigma2_EB},         {"eve_links", enum_name(s.eve_links, kLinks)},
                        {"eve_timing", enum_name(s.eve_timing, kTimings)},
                        {"eve_averaging", s.eve_averaging}, {"alpha_I_spread", s.alpha_I_spread}};
    const auto& d = c.defender;
    nlohmann::json def{{"kind", enum_name(d.kind, kDefenders)},
                       {"variant", enum_name(d.variant, kVariants)},
                       {"metric", enum_name(d.metric, kMetrics)},
                       {"kernel", enum_name(d.kernel, kKernels)},
                       {"retune_each_dataset", d.retune_each_dataset},
                       {"kmeans_restarts", d.kmeans_restarts},
                       {"cv_folds", d.cv_folds}};
    if (d.thresholds_against) def["thresholds_against"] = attack_to_json(*d.thresholds_against);
    nlohmann::json att = c.attacker.exponent_search ? nlohmann::json{{"kind", "exponent_search"}}
                                                    : attack_to_json(c.attacker.strategy);
    att["grid_step"] = c.attacker.grid_step;
    att["search_trials"] = c.attacker.search_trials;
    return {{"experiment", c.experiment},      {"scenario", scen},
            {"defender", def},                 {"attacker", att},
            {"target_pfa", c.target_pfa},      {"target_pfa_axis", c.target_pfa_axis},
            {"n_trials", c.n_trials},          {"n_datasets", c.n_datasets},
            {"seed", c.seed},                  {"threshold_trials", c.threshold_trials},
            {"record_timing", c.record_timing}};
}

} // namespace pla
