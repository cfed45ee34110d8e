#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccr/adversary.hpp"
#include "ccr/recursive.hpp"
#include "ccr/spectral.hpp"

namespace ccr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluates the budget mini-language: products of powers of `n`, `eps` and
// numeric literals, e.g. "0.5*eps^2*n^2".
double eval_budget_expr(const std::string& expr, double n, double eps);

struct AdversaryConfig {
    std::string name = "null";
    Phase phase = Phase::post;
    std::string m_vertices;  // number or expression in n, eps; empty = 0
    std::string pair_count;  // empty = B/2 for the random_flip strategies
};

struct AlgorithmConfig {
    std::string name = "spectral"; // spectral | sdp
    SdpVariant variant = SdpVariant::with_epsilon;
    int sdp_retries = 3; // extra attempts after a recursion abort
    SpectralConfig spectral;
    SdpOptions sdp;
};

struct ExperimentConfig {
    std::vector<int> n_values;
    std::vector<int> k_values;
    std::vector<double> epsilon_values;
    std::vector<std::string> budget_values; // numbers or expressions
    AdversaryConfig adversary;
    AlgorithmConfig algorithm;
    int trials = 1;
    std::uint64_t base_seed = 0;
    std::string output_path = "results.csv";

    void validate() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

// One Cartesian point of the value lists.
struct SettingPoint {
    int setting_id = 0;
    int n = 0;
    int k = 0;
    double epsilon = 0.5;
    long long budget = 0;
    long long m_vertices = 0;
    long long pair_count = 0;
};

std::vector<SettingPoint> enumerate_settings(const ExperimentConfig& cfg);

struct TrialRecord {
    int setting_id = 0;
    int n = 0;
    int k = 0;
    double epsilon = 0.5;
    long long B_requested = 0;
    long long B_used = 0;
    std::string adversary;
    std::string algorithm;
    std::string variant;
    std::uint64_t seed = 0;
    int detected_k = -1;    // -1 = unknown
    int misclassified = -1; // -1 = not measured (status != ok)
    double misclassified_fraction = -1.0;
    long long runtime_ms = 0;
    std::string status = "ok";
};

// Runs one pipeline instance: partition -> M -> (adversary/noise per phase)
// -> algorithm -> score. Algorithm failures become status codes, never
// exceptions.
TrialRecord run_trial(const ExperimentConfig& cfg, const SettingPoint& point, int trial_index,
                      std::vector<RecursionTraceEntry>* trace = nullptr);

std::string trial_csv_header();
std::string trial_to_csv(const TrialRecord& r);
std::string trial_to_json_text(const TrialRecord& r);

// Cartesian product x trials across a worker pool; records are ordered by
// (setting, trial) regardless of scheduling.
std::vector<TrialRecord> run_sweep_records(const ExperimentConfig& cfg, int workers);

// Same, writing the CSV (header + rows) to out_path.
void run_sweep(const ExperimentConfig& cfg, const std::string& out_path, int workers);

} // namespace ccr
