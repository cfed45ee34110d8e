// Command-line front end: instance generation, single runs, sweeps, norm
// inspection and the acceptance suite.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccr/adversary.hpp"
#include "ccr/experiment.hpp"
#include "ccr/io.hpp"
#include "ccr/metrics.hpp"
#include "ccr/sdp.hpp"
#include "ccr/verify.hpp"

namespace {

using namespace ccr;

int cmd_gen(const std::string& out_dir, int n, int k, double eps, long long budget,
            const std::string& adversary, const std::string& phase, long long m_vertices,
            long long pair_count, int near_equal_slack, std::uint64_t seed) {
    ModelParams params_check{n, k, eps, budget, seed};
    params_check.validate();
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    SplitMix64 root(seed);
    SplitMix64 rng_partition = root.split();
    SplitMix64 rng_adversary = root.split();
    SplitMix64 rng_noise = root.split();

    const ClusterPartition truth =
        near_equal_slack >= 0 ? make_partition_near_equal(n, k, near_equal_slack, rng_partition)
                              : make_partition(n, k, rng_partition);
    const SymmetricMatrix m = zero_error_matrix(truth);

    AdversaryParams params;
    params.m_vertices = m_vertices;
    params.pair_count = pair_count > 0 ? pair_count : budget / 2;

    SymmetricMatrix mprime(1), mpp(1);
    EditLedger ledger;
    const Phase ph = phase_from_name(phase);
    if (ph == Phase::pre) {
        AdversaryContext ctx{&truth, &m, nullptr, eps, Phase::pre};
        auto step = perturb(adversary, m, budget, ctx, params, rng_adversary);
        mprime = std::move(step.matrix);
        ledger = std::move(step.ledger);
        mpp = apply_noise(mprime, eps, rng_noise);
    } else {
        mprime = apply_noise(m, eps, rng_noise);
        AdversaryContext ctx{&truth, &m, &mprime, eps, Phase::post};
        auto step = perturb(adversary, mprime, budget, ctx, params, rng_adversary);
        mpp = std::move(step.matrix);
        ledger = std::move(step.ledger);
    }

    write_partition(dir / "partition.txt", truth);
    write_matrix(dir / "M.txt", m);
    write_matrix(dir / "Mprime.txt", mprime);
    write_matrix(dir / "Mpp.txt", mpp);
    write_ledger_csv(dir / "ledger.csv", ledger);

    nlohmann::json meta;
    meta["n"] = n;
    meta["k"] = k;
    meta["epsilon"] = eps;
    meta["budget"] = budget;
    meta["seed"] = seed;
    meta["adversary"] = adversary;
    meta["phase"] = phase;
    meta["entries_used"] = ledger.entries_used;
    std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';

    std::cout << "instance bundle written to " << out_dir << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, int setting, int trial, std::uint64_t seed_override,
            bool has_seed, const std::string& algo, const std::string& variant, bool trace) {
    ExperimentConfig cfg = load_config(config_path);
    if (has_seed) cfg.base_seed = seed_override;
    if (!algo.empty()) cfg.algorithm.name = algo;
    if (!variant.empty()) cfg.algorithm.variant = variant_from_name(variant);
    cfg.validate();
    const auto settings = enumerate_settings(cfg);
    if (setting < 0 || setting >= static_cast<int>(settings.size()))
        throw ConfigError("run: setting index out of range");

    std::vector<RecursionTraceEntry> trace_entries;
    const TrialRecord rec =
        run_trial(cfg, settings[setting], trial, trace ? &trace_entries : nullptr);
    if (trace) {
        for (const auto& t : trace_entries) {
            nlohmann::json j;
            j["depth"] = t.depth;
            j["n_prime"] = t.n_prime;
            j["k_prime"] = t.k_prime;
            j["f"] = t.f;
            j["gamma"] = t.gamma;
            j["delta"] = t.delta;
            j["t"] = t.threshold;
            j["s1_size"] = t.s1_size;
            j["k_double_prime"] = t.k_double_prime;
            j["sdp_value"] = t.sdp_value;
            std::cerr << j.dump() << '\n';
        }
    }
    std::cout << trial_to_json_text(rec) << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override, int workers) {
    const ExperimentConfig cfg = load_config(config_path);
    const std::string out = out_override.empty() ? cfg.output_path : out_override;
    run_sweep(cfg, out, workers);
    std::cout << "sweep written to " << out << "\n";
    return 0;
}

int cmd_norms(const std::string& file, std::uint64_t seed) {
    const SymmetricMatrix a = read_matrix(file);
    SplitMix64 rng(seed);
    std::cout << "n " << a.size() << "\n";
    std::cout << "frobenius " << frobenius_norm(a) << "\n";
    std::cout << "operator " << operator_norm(a, 1e-9) << "\n";
    SdpOptions opts;
    const auto gb = grothendieck_bracket(a, opts, rng);
    std::cout << "sdp " << gb.sdp_value << "\n";
    if (a.size() <= 16) {
        std::cout << "infty_to_one " << infty_to_one_bruteforce(a) << "\n";
        std::cout << "bracket [" << gb.lower << ", " << gb.upper << "]\n";
    }
    return 0;
}

int cmd_verify(const std::vector<int>& criteria, int workers) {
    const auto results = run_acceptance(criteria, workers);
    const int failures = print_acceptance_report(std::cout, results);
    return failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlation-clustering reconstruction lab"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "write an instance bundle");
    std::string gen_out = "instance";
    int gen_n = 100, gen_k = 2, gen_slack = -1;
    double gen_eps = 0.2;
    long long gen_budget = 0, gen_m_vertices = 0, gen_pair_count = 0;
    std::string gen_adv = "null", gen_phase = "post";
    std::uint64_t gen_seed = 0;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--n", gen_n, "number of items")->required();
    gen->add_option("--k", gen_k, "number of clusters")->required();
    gen->add_option("--eps", gen_eps, "noise parameter in (0, 1/2]");
    gen->add_option("--budget", gen_budget, "adversary budget in entries");
    gen->add_option("--adversary", gen_adv, "adversary strategy name");
    gen->add_option("--phase", gen_phase, "pre or post");
    gen->add_option("--m-vertices", gen_m_vertices, "vertex count for vertex strategies");
    gen->add_option("--pair-count", gen_pair_count, "pair count for random_flip");
    gen->add_option("--near-equal-slack", gen_slack, "near-equal mode slack (default: equal mode)");
    gen->add_option("--seed", gen_seed, "seed");

    // run
    auto* run = app.add_subcommand("run", "run one trial, JSON result on stdout");
    std::string run_config, run_algo, run_variant;
    int run_setting = 0, run_trial_idx = 0;
    std::uint64_t run_seed = 0;
    bool run_trace = false;
    run->add_option("--config", run_config, "experiment config (JSON)")->required();
    run->add_option("--setting", run_setting, "setting index");
    run->add_option("--trial", run_trial_idx, "trial index");
    run->add_option("--algo", run_algo, "override the algorithm (spectral|sdp)");
    run->add_option("--variant", run_variant, "override the SDP variant (eps|eps-free)");
    auto* run_seed_opt = run->add_option("--seed", run_seed, "override base_seed");
    run->add_flag("--trace", run_trace, "dump the recursion trace to stderr (JSON lines)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a full sweep to CSV");
    std::string sweep_config, sweep_out;
    int sweep_workers = 2;
    sweep->add_option("--config", sweep_config, "experiment config (JSON)")->required();
    sweep->add_option("--out", sweep_out, "output CSV (default: config's out)");
    sweep->add_option("--workers", sweep_workers, "worker threads");

    // norms
    auto* norms = app.add_subcommand("norms", "norm report for a matrix file");
    std::string norms_file;
    std::uint64_t norms_seed = 0;
    norms->add_option("--file", norms_file, "matrix file")->required();
    norms->add_option("--seed", norms_seed, "seed for the SDP solver");

    // verify
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    std::vector<int> verify_criteria;
    int verify_workers = 2;
    verify->add_option("--criterion", verify_criteria, "run these criterion ids only");
    verify->add_option("--workers", verify_workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(gen_out, gen_n, gen_k, gen_eps, gen_budget, gen_adv, gen_phase,
                           gen_m_vertices, gen_pair_count, gen_slack, gen_seed);
        if (run->parsed())
            return cmd_run(run_config, run_setting, run_trial_idx, run_seed,
                           run_seed_opt->count() > 0, run_algo, run_variant, run_trace);
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, sweep_workers);
        if (norms->parsed()) return cmd_norms(norms_file, norms_seed);
        if (verify->parsed()) return cmd_verify(verify_criteria, verify_workers);
    } catch (const ccr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
