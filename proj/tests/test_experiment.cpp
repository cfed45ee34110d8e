#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccr/experiment.hpp"
#include "ccr/metrics.hpp"

using namespace ccr;

namespace {

std::string strip_runtime(const std::string& csv) {
    std::string out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        const auto last = line.rfind(',');
        const auto prev = line.rfind(',', last - 1);
        out += line.substr(0, prev) + line.substr(last) + "\n";
    }
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("budget expressions") {
    CHECK(eval_budget_expr("0.5*eps^2*n^2", 400, 0.1) == doctest::Approx(800.0));
    CHECK(eval_budget_expr("0", 100, 0.3) == 0.0);
    CHECK(eval_budget_expr("n", 123, 0.3) == 123.0);
    CHECK(eval_budget_expr("2*n^1.5", 100, 0.3) == doctest::Approx(2000.0));
    CHECK(eval_budget_expr(" n * eps ", 10, 0.5) == doctest::Approx(5.0));
    CHECK_THROWS_AS(eval_budget_expr("n+1", 10, 0.5), ConfigError);
    CHECK_THROWS_AS(eval_budget_expr("foo", 10, 0.5), ConfigError);
}

TEST_CASE("config round-trips through JSON") {
    ExperimentConfig cfg;
    cfg.n_values = {100, 200};
    cfg.k_values = {2};
    cfg.epsilon_values = {0.2, 0.45};
    cfg.budget_values = {"0", "0.5*eps^2*n^2"};
    cfg.adversary.name = "pre_random_flip";
    cfg.adversary.phase = Phase::pre;
    cfg.adversary.pair_count = "n";
    cfg.algorithm.name = "sdp";
    cfg.algorithm.variant = SdpVariant::epsilon_free;
    cfg.algorithm.sdp.restarts = 5;
    cfg.trials = 7;
    cfg.base_seed = 99;
    cfg.output_path = "out.csv";

    const auto text = config_to_json_text(cfg);
    const auto back = config_from_json_text(text);
    CHECK(back.n_values == cfg.n_values);
    CHECK(back.k_values == cfg.k_values);
    CHECK(back.epsilon_values == cfg.epsilon_values);
    CHECK(back.budget_values == cfg.budget_values);
    CHECK(back.adversary.name == cfg.adversary.name);
    CHECK(back.adversary.phase == cfg.adversary.phase);
    CHECK(back.adversary.pair_count == cfg.adversary.pair_count);
    CHECK(back.algorithm.name == cfg.algorithm.name);
    CHECK(back.algorithm.variant == cfg.algorithm.variant);
    CHECK(back.algorithm.sdp.restarts == 5);
    CHECK(back.trials == cfg.trials);
    CHECK(back.base_seed == cfg.base_seed);
    CHECK(back.output_path == cfg.output_path);
    // a second round-trip is byte-identical
    CHECK(config_to_json_text(back) == text);
}

TEST_CASE("setting enumeration") {
    ExperimentConfig cfg;
    cfg.n_values = {100, 200};
    cfg.k_values = {2};
    cfg.epsilon_values = {0.1, 0.2};
    cfg.budget_values = {"0.5*eps^2*n^2"};
    cfg.trials = 3;
    const auto settings = enumerate_settings(cfg);
    REQUIRE(settings.size() == 4);
    CHECK(settings[0].budget == 50);   // n=100, eps=0.1
    CHECK(settings[1].budget == 200);  // n=100, eps=0.2
    CHECK(settings[2].budget == 200);  // n=200, eps=0.1
    CHECK(settings[3].budget == 800);  // n=200, eps=0.2

    cfg.k_values = {3};
    CHECK_THROWS_AS(enumerate_settings(cfg), ConfigError); // k does not divide n
}

TEST_CASE("noiseless trial is clean") {
    ExperimentConfig cfg;
    cfg.n_values = {24};
    cfg.k_values = {2};
    cfg.epsilon_values = {0.5};
    cfg.budget_values = {"0"};
    cfg.trials = 1;
    cfg.base_seed = 7;
    const auto settings = enumerate_settings(cfg);
    const auto rec = run_trial(cfg, settings[0], 0);
    CHECK(rec.status == "ok");
    CHECK(rec.misclassified == 0);
    CHECK(rec.detected_k == 2);
    CHECK(rec.B_used == 0);
}

TEST_CASE("trials are deterministic modulo runtime") {
    ExperimentConfig cfg;
    cfg.n_values = {40};
    cfg.k_values = {2};
    cfg.epsilon_values = {0.3};
    cfg.budget_values = {"0.1*n^2"};
    cfg.adversary.name = "post_random_flip";
    cfg.adversary.phase = Phase::post;
    cfg.trials = 2;
    cfg.base_seed = 11;
    const auto settings = enumerate_settings(cfg);
    const auto a = run_trial(cfg, settings[0], 1);
    const auto b = run_trial(cfg, settings[0], 1);
    auto strip = [](const TrialRecord& r) {
        auto line = trial_to_csv(r);
        const auto last = line.rfind(',');
        const auto prev = line.rfind(',', last - 1);
        return line.substr(0, prev) + line.substr(last);
    };
    CHECK(strip(a) == strip(b));
}

TEST_CASE("post-phase adversary edits the noisy matrix") {
    // the ledger's old values must match M' (never M) at every edited entry
    SplitMix64 rng(13);
    const auto truth = make_partition(30, 2, rng);
    const auto m = zero_error_matrix(truth);
    const auto mprime = apply_noise(m, 0.2, rng);
    AdversaryContext ctx{&truth, &m, &mprime, 0.2, Phase::post};
    AdversaryParams params;
    params.pair_count = 40;
    const auto res = perturb("post_random_flip", mprime, 900, ctx, params, rng);
    for (const auto& e : res.ledger.edits) CHECK(e.old_value == mprime(e.i, e.j));
}

TEST_CASE("sweep writes the documented schema and is worker-invariant") {
    ExperimentConfig cfg;
    cfg.n_values = {20, 30};
    cfg.k_values = {2};
    cfg.epsilon_values = {0.4, 0.5};
    cfg.budget_values = {"0"};
    cfg.trials = 3;
    cfg.base_seed = 17;

    const auto dir = std::filesystem::temp_directory_path();
    const auto f1 = dir / "ccr_test_sweep1.csv";
    const auto f2 = dir / "ccr_test_sweep2.csv";
    run_sweep(cfg, f1.string(), 1);
    run_sweep(cfg, f2.string(), 3);
    const auto text1 = slurp(f1);
    const auto text2 = slurp(f2);
    std::filesystem::remove(f1);
    std::filesystem::remove(f2);

    std::istringstream in(text1);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "setting,n,k,epsilon,B_requested,B_used,adversary,algorithm,variant,seed,detected_k,"
          "misclassified,misclassified_fraction,runtime_ms,status");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 12); // 2 n * 2 eps * 3 trials

    CHECK(strip_runtime(text1) == strip_runtime(text2));
}

TEST_SUITE_END();
