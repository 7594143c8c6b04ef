#include "pla/harness/config.hpp"
#include "pla/harness/reproduce.hpp"
#include "pla/harness/result.hpp"
#include "pla/harness/run.hpp"
#include "pla/optimize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3 };

struct OutputArgs {
    std::string out;
    std::string format = "csv";
    unsigned workers = 1;
    bool verbose = false;
};

void add_output(CLI::App& app, OutputArgs& o)
{
    app.add_option("--out", o.out, "Output file (default: standard output)");
    app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", o.workers, "Worker threads; results do not depend on it")->check(CLI::Range(1u, 1024u));
    app.add_flag("--verbose", o.verbose, "Report each finished row on standard error");
}

pla::RunOptions run_options(const OutputArgs& o)
{
    pla::RunOptions r;
    r.workers = o.workers;
    if (o.verbose)
        r.on_row = [](const pla::ResultRow& row) {
            std::fprintf(stderr, "%s %s N=%llu rho_AE=%g alpha_II=%g: P_FA=%s P_MD=%s\n", row.experiment.c_str(),
                         row.defender.c_str(), static_cast<unsigned long long>(row.n_subcarriers), row.rho_AE,
                         row.alpha_II, pla::report_rate(row.fa_count, row.alice_total).c_str(),
                         pla::report_rate(row.md_count, row.eve_total).c_str());
        };
    return r;
}

void write_table(const pla::ResultTable& t, const OutputArgs& o)
{
    const auto fmt = o.format == "json" ? pla::OutputFormat::Json : pla::OutputFormat::Csv;
    if (!o.out.empty()) return pla::emit(t, fmt, o.out);
    if (fmt == pla::OutputFormat::Csv) pla::write_csv(t, std::cout);
    else pla::write_json(t, std::cout);
}

/// Single-scenario options shared by the threshold and attack tools.
struct ScenarioArgs {
    std::size_t n = 1;
    std::size_t m = 1000;
    double alpha_I = 1.0, alpha_II = 1.0, rho_AE = 0.1, rho_EB = -1.0, snr_I = 15.0, snr_II = 20.0;
    double target = 1e-4;
    std::size_t trials = 1000000;
    std::uint64_t seed = 42;
    unsigned workers = 1;

    void add(CLI::App& app)
    {
        app.add_option("--n-subcarriers", n, "Subcarriers N")->check(CLI::PositiveNumber);
        app.add_option("--m-training", m, "Training packets M")->check(CLI::PositiveNumber);
        app.add_option("--alpha-I", alpha_I, "Training-phase fading coefficient");
        app.add_option("--alpha-II", alpha_II, "Authentication-phase fading coefficient");
        app.add_option("--rho-AE", rho_AE, "Alice-Eve spatial correlation");
        app.add_option("--rho-EB", rho_EB, "Eve-Bob spatial correlation (default: equal to rho-AE)");
        app.add_option("--snr-I-db", snr_I, "Training-phase SNR in dB");
        app.add_option("--snr-II-db", snr_II, "Authentication-phase SNR in dB");
        app.add_option("--target-pfa", target, "False-alarm target");
        app.add_option("--threshold-trials", trials, "Monte Carlo trials for the threshold search");
        app.add_option("--seed", seed, "Random seed");
        app.add_option("--workers", workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    }

    [[nodiscard]] pla::ScenarioParams params() const
    {
        pla::ScenarioConfig c;
        c.n_subcarriers = n;
        c.m_training = m;
        c.alpha_I = {alpha_I};
        c.alpha_II = {alpha_II};
        c.rho_AE = rho_AE;
        c.rho_EB = rho_EB < 0 ? rho_AE : rho_EB;
        c.sigma2_I = pla::noise_variance_from_snr_db(snr_I);
        c.sigma2_II = pla::noise_variance_from_snr_db(snr_II);
        return pla::ScenarioParams(std::move(c));
    }
};

pla::AttackStrategy parse_attack(const std::string& s)
{
    if (s == "ml") return pla::AttackStrategy::ml();
    if (s == "simplified") return pla::AttackStrategy::simplified();
    if (s == "modulus") return pla::AttackStrategy::modulus();
    throw pla::ConfigError("unknown attack '" + s + "'");
}

int dispatch(int argc, char** argv)
{
    CLI::App app{"Physical-layer authentication benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    OutputArgs run_out;
    auto* run = app.add_subcommand("run", "Run an experiment configuration file");
    run->add_option("--config", config_path, "JSON configuration file")->required();
    add_output(*run, run_out);

    std::string target;
    double scale = 1.0;
    std::uint64_t seed = 42;
    OutputArgs rep_out;
    auto* rep = app.add_subcommand("reproduce", "Run the canned configuration of a table or figure");
    rep->add_option("--target", target, "table1..table5 or fig1..fig10")->required();
    rep->add_option("--scale", scale, "Fraction of the full trial budget, in (0, 1]");
    rep->add_option("--seed", seed, "Random seed");
    add_output(*rep, rep_out);

    ScenarioArgs thr_args;
    std::string thr_attack = "ml";
    auto* thr = app.add_subcommand("optimize-thresholds", "Combined-test thresholds for one scenario");
    thr_args.add(*thr);
    thr->add_option("--attack", thr_attack, "Attack the thresholds are tuned against: ml, simplified, modulus");

    ScenarioArgs att_args;
    std::string att_defender = "combined", att_against = "modulus";
    double grid_step = 0.1;
    std::size_t search_trials = 100000;
    bool att_cells = false;
    auto* att = app.add_subcommand("attack-search", "Best exponent attack against a statistical defender");
    att_args.add(*att);
    att->add_option("--defender", att_defender, "llr or combined")->check(CLI::IsMember({"llr", "combined"}));
    att->add_option("--thresholds-against", att_against, "Attack Bob tunes combined thresholds against");
    att->add_option("--grid-step", grid_step, "Exponent grid step");
    att->add_option("--search-trials", search_trials, "Monte Carlo trials per grid cell");
    att->add_flag("--cells", att_cells, "Print the whole grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    if (*run) {
        std::ifstream in(config_path);
        if (!in) throw pla::ConfigError("cannot read '" + config_path + "'");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw pla::ConfigError(config_path + ": " + e.what());
        }
        write_table(pla::run_experiment(pla::config_from_json(doc), run_options(run_out)), run_out);
    } else if (*rep) {
        write_table(pla::reproduce(pla::parse_target(target), scale, seed, run_options(rep_out)), rep_out);
    } else if (*thr) {
        const auto p = thr_args.params();
        pla::Rng rng = pla::Rng::stream(thr_args.seed, 0);
        const auto s = pla::optimize_thresholds(p, thr_args.target, thr_args.trials, parse_attack(thr_attack), rng,
                                                thr_args.workers);
        nlohmann::json out{{"theta", s.best.theta},
                           {"epsilon", pla::detail::real_json(s.best.epsilon)},
                           {"p_fa", s.p_fa},
                           {"p_md", s.p_md},
                           {"llr_only_theta", pla::llr_threshold_for(p, thr_args.target)},
                           {"n_mc", s.n_mc}};
        std::cout << out.dump(2) << '\n';
    } else if (*att) {
        const auto p = att_args.params();
        const bool comb = att_defender == "combined";
        pla::ThresholdPair bob{pla::llr_threshold_for(p, att_args.target), INFINITY};
        if (comb) {
            pla::Rng trng = pla::Rng::stream(att_args.seed, 0);
            bob = pla::optimize_thresholds(p, att_args.target, att_args.trials, parse_attack(att_against), trng,
                                           att_args.workers)
                      .best;
        }
        pla::Rng arng = pla::Rng::stream(att_args.seed, 1);
        const auto s = pla::optimize_attack_exponents(p, bob, grid_step, search_trials, arng, att_args.workers,
                                                      comb ? pla::StatDefender::Combined : pla::StatDefender::Llr);
        nlohmann::json out{{"x", s.x},         {"y", s.y},
                           {"p_md", s.p_md},   {"theta", bob.theta},
                           {"epsilon", pla::detail::real_json(bob.epsilon)}, {"n_mc", s.n_mc}};
        if (att_cells) {
            nlohmann::json cells = nlohmann::json::array();
            for (const auto& c : s.cells)
                cells.push_back({{"x", c.x}, {"y", c.y}, {"p_md", std::isnan(c.p_md) ? nlohmann::json() : nlohmann::json(c.p_md)}});
            out["cells"] = std::move(cells);
        }
        std::cout << out.dump(2) << '\n';
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return dispatch(argc, argv);
    } catch (const pla::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const pla::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const pla::InfeasibleTarget& e) {
        std::cerr << "infeasible target: " << e.what() << '\n';
        return kConfig;
    } catch (const pla::InvariantViolation& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
