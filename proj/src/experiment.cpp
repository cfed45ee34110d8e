#include "ccr/experiment.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "ccr/metrics.hpp"

namespace ccr {

using nlohmann::json;

namespace {

struct ExprParser {
    const std::string& s;
    std::size_t pos = 0;

    explicit ExprParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    double number() {
        skip_ws();
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ConfigError("budget expression: expected a number in '" + s + "'");
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }

    double atom(double n, double eps) {
        skip_ws();
        if (pos >= s.size()) throw ConfigError("budget expression: unexpected end in '" + s + "'");
        if (std::isalpha(static_cast<unsigned char>(s[pos]))) {
            std::size_t start = pos;
            while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
            const std::string name = s.substr(start, pos - start);
            if (name == "n") return n;
            if (name == "eps") return eps;
            throw ConfigError("budget expression: unknown symbol '" + name + "'");
        }
        return number();
    }

    double factor(double n, double eps) {
        double base = atom(n, eps);
        if (eat('^')) {
            const double exponent = number();
            base = std::pow(base, exponent);
        }
        return base;
    }

    double expr(double n, double eps) {
        double v = factor(n, eps);
        while (eat('*')) v *= factor(n, eps);
        skip_ws();
        if (pos != s.size())
            throw ConfigError("budget expression: trailing characters in '" + s + "'");
        return v;
    }
};

long long eval_count_expr(const std::string& expr, double n, double eps, long long fallback) {
    if (expr.empty()) return fallback;
    const double v = eval_budget_expr(expr, n, eps);
    if (!(v >= 0) || !std::isfinite(v))
        throw ConfigError("expression '" + expr + "' is not a nonnegative count");
    return std::llround(v);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

double eval_budget_expr(const std::string& expr, double n, double eps) {
    ExprParser p(expr);
    return p.expr(n, eps);
}

void ExperimentConfig::validate() const {
    if (n_values.empty() || k_values.empty() || epsilon_values.empty() || budget_values.empty())
        throw ConfigError("config: n, k, epsilon and B value lists must be nonempty");
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (algorithm.name != "spectral" && algorithm.name != "sdp")
        throw ConfigError("config: algorithm must be 'spectral' or 'sdp'");
    const auto names = adversary_names();
    if (std::find(names.begin(), names.end(), adversary.name) == names.end())
        throw ConfigError("config: unknown adversary '" + adversary.name + "'");
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        cfg.n_values = j.at("n").get<std::vector<int>>();
        cfg.k_values = j.at("k").get<std::vector<int>>();
        cfg.epsilon_values = j.at("epsilon").get<std::vector<double>>();
        cfg.budget_values.clear();
        for (const auto& b : j.at("B")) {
            if (b.is_string())
                cfg.budget_values.push_back(b.get<std::string>());
            else
                cfg.budget_values.push_back(format_double(b.get<double>()));
        }
        if (j.contains("adversary")) {
            const auto& a = j.at("adversary");
            cfg.adversary.name = a.value("name", std::string("null"));
            cfg.adversary.phase = phase_from_name(a.value("phase", std::string("post")));
            if (a.contains("m_vertices")) {
                const auto& m = a.at("m_vertices");
                cfg.adversary.m_vertices =
                    m.is_string() ? m.get<std::string>() : format_double(m.get<double>());
            }
            if (a.contains("pair_count")) {
                const auto& c = a.at("pair_count");
                cfg.adversary.pair_count =
                    c.is_string() ? c.get<std::string>() : format_double(c.get<double>());
            }
        }
        if (j.contains("algorithm")) {
            const auto& a = j.at("algorithm");
            cfg.algorithm.name = a.value("name", std::string("spectral"));
            cfg.algorithm.variant = variant_from_name(a.value("variant", std::string("eps")));
            cfg.algorithm.sdp_retries = a.value("sdp_retries", 3);
            if (a.contains("spectral")) {
                const auto& s = a.at("spectral");
                auto& sc = cfg.algorithm.spectral;
                sc.threshold_t = s.value("threshold_t", sc.threshold_t);
                sc.ratio_cutoff = s.value("ratio_cutoff", sc.ratio_cutoff);
                sc.k_max = s.value("k_max", sc.k_max);
                sc.pivot_attempt_cap = s.value("pivot_attempt_cap", sc.pivot_attempt_cap);
                sc.eig_tol = s.value("eig_tol", sc.eig_tol);
                sc.eig_max_iter = s.value("eig_max_iter", sc.eig_max_iter);
            }
            if (a.contains("sdp")) {
                const auto& s = a.at("sdp");
                auto& so = cfg.algorithm.sdp;
                so.rank_r = s.value("rank_r", so.rank_r);
                so.max_iters = s.value("max_iters", so.max_iters);
                so.step_size = s.value("step_size", so.step_size);
                so.step_decay = s.value("step_decay", so.step_decay);
                so.convergence_tol = s.value("convergence_tol", so.convergence_tol);
                so.plateau_iters = s.value("plateau_iters", so.plateau_iters);
                so.restarts = s.value("restarts", so.restarts);
                if (s.contains("zero_sum_penalty_mu"))
                    so.zero_sum_penalty_mu = s.at("zero_sum_penalty_mu").get<std::vector<double>>();
                so.zero_sum_tolerance = s.value("zero_sum_tolerance", so.zero_sum_tolerance);
            }
        }
        cfg.trials = j.value("trials", 1);
        cfg.base_seed = j.value("base_seed", static_cast<std::uint64_t>(0));
        cfg.output_path = j.value("out", std::string("results.csv"));
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["n"] = cfg.n_values;
    j["k"] = cfg.k_values;
    j["epsilon"] = cfg.epsilon_values;
    j["B"] = cfg.budget_values;
    json a;
    a["name"] = cfg.adversary.name;
    a["phase"] = phase_name(cfg.adversary.phase);
    if (!cfg.adversary.m_vertices.empty()) a["m_vertices"] = cfg.adversary.m_vertices;
    if (!cfg.adversary.pair_count.empty()) a["pair_count"] = cfg.adversary.pair_count;
    j["adversary"] = a;
    json alg;
    alg["name"] = cfg.algorithm.name;
    alg["variant"] = variant_name(cfg.algorithm.variant);
    alg["sdp_retries"] = cfg.algorithm.sdp_retries;
    const auto& sc = cfg.algorithm.spectral;
    alg["spectral"] = {{"threshold_t", sc.threshold_t},
                       {"ratio_cutoff", sc.ratio_cutoff},
                       {"k_max", sc.k_max},
                       {"pivot_attempt_cap", sc.pivot_attempt_cap},
                       {"eig_tol", sc.eig_tol},
                       {"eig_max_iter", sc.eig_max_iter}};
    const auto& so = cfg.algorithm.sdp;
    alg["sdp"] = {{"rank_r", so.rank_r},
                  {"max_iters", so.max_iters},
                  {"step_size", so.step_size},
                  {"step_decay", so.step_decay},
                  {"convergence_tol", so.convergence_tol},
                  {"plateau_iters", so.plateau_iters},
                  {"restarts", so.restarts},
                  {"zero_sum_penalty_mu", so.zero_sum_penalty_mu},
                  {"zero_sum_tolerance", so.zero_sum_tolerance}};
    j["algorithm"] = alg;
    j["trials"] = cfg.trials;
    j["base_seed"] = cfg.base_seed;
    j["out"] = cfg.output_path;
    return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json_text(text);
}

std::vector<SettingPoint> enumerate_settings(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<SettingPoint> points;
    int id = 0;
    for (int n : cfg.n_values) {
        for (int k : cfg.k_values) {
            if (k < 2 || k > n) throw ConfigError("config: need 2 <= k <= n");
            if (n % k != 0) throw ConfigError("config: equal-size partitions need k | n");
            for (double eps : cfg.epsilon_values) {
                if (!(eps > 0.0 && eps <= 0.5))
                    throw ConfigError("config: need 0 < epsilon <= 1/2");
                for (const auto& bexpr : cfg.budget_values) {
                    SettingPoint p;
                    p.setting_id = id++;
                    p.n = n;
                    p.k = k;
                    p.epsilon = eps;
                    p.budget = eval_count_expr(bexpr, n, eps, 0);
                    if (p.budget > static_cast<long long>(n) * n)
                        throw ConfigError("config: budget exceeds n^2");
                    p.m_vertices = eval_count_expr(cfg.adversary.m_vertices, n, eps, 0);
                    p.pair_count = eval_count_expr(cfg.adversary.pair_count, n, eps, p.budget / 2);
                    points.push_back(p);
                }
            }
        }
    }
    return points;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const SettingPoint& point, int trial_index,
                      std::vector<RecursionTraceEntry>* trace) {
    TrialRecord rec;
    rec.setting_id = point.setting_id;
    rec.n = point.n;
    rec.k = point.k;
    rec.epsilon = point.epsilon;
    rec.B_requested = point.budget;
    rec.adversary = cfg.adversary.name;
    rec.algorithm = cfg.algorithm.name;
    rec.variant = cfg.algorithm.name == "sdp" ? variant_name(cfg.algorithm.variant) : "";
    rec.seed = hash_seed(hash_seed(cfg.base_seed, static_cast<std::uint64_t>(point.setting_id)),
                         static_cast<std::uint64_t>(trial_index));

    const auto t0 = std::chrono::steady_clock::now();
    try {
        SplitMix64 root(rec.seed);
        SplitMix64 rng_partition = root.split();
        SplitMix64 rng_adversary = root.split();
        SplitMix64 rng_noise = root.split();
        SplitMix64 rng_algo = root.split();

        const ClusterPartition truth = make_partition(point.n, point.k, rng_partition);
        const SymmetricMatrix m = zero_error_matrix(truth);

        AdversaryParams params;
        params.m_vertices = point.m_vertices;
        params.pair_count = point.pair_count;

        SymmetricMatrix mpp(1);
        if (cfg.adversary.phase == Phase::pre) {
            AdversaryContext ctx{&truth, &m, nullptr, point.epsilon, Phase::pre};
            auto step = perturb(cfg.adversary.name, m, point.budget, ctx, params, rng_adversary);
            rec.B_used = step.ledger.entries_used;
            mpp = apply_noise(step.matrix, point.epsilon, rng_noise);
        } else {
            const SymmetricMatrix mprime = apply_noise(m, point.epsilon, rng_noise);
            AdversaryContext ctx{&truth, &m, &mprime, point.epsilon, Phase::post};
            auto step =
                perturb(cfg.adversary.name, mprime, point.budget, ctx, params, rng_adversary);
            rec.B_used = step.ledger.entries_used;
            mpp = std::move(step.matrix);
        }

        ClusterPartition predicted;
        if (cfg.algorithm.name == "spectral") {
            const SpectralResult sr = spectral_cluster(mpp, cfg.algorithm.spectral, rng_algo);
            predicted = sr.partition;
            rec.detected_k = sr.detected_k;
        } else {
            rec.detected_k = point.k; // k is an input of the SDP algorithm
            const double f0 = default_f0(point.n) + 2.0 * static_cast<double>(point.budget);
            bool done = false;
            for (int attempt = 0; attempt <= cfg.algorithm.sdp_retries && !done; ++attempt) {
                SplitMix64 rng_attempt(hash_seed(rec.seed, 0xa770ULL + attempt));
                try {
                    predicted = sdp_reconstruct(mpp, point.n, point.k, point.epsilon, f0,
                                                cfg.algorithm.variant, cfg.algorithm.sdp,
                                                rng_attempt, trace);
                    done = true;
                } catch (const RecursionAbort&) {
                    if (attempt == cfg.algorithm.sdp_retries) {
                        rec.status = "aborted";
                    }
                }
            }
            if (!done) {
                rec.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
                return rec;
            }
        }

        const MatchResult match = misclassified_count(predicted, truth);
        rec.misclassified = match.misclassified;
        rec.misclassified_fraction = static_cast<double>(match.misclassified) / point.n;
        rec.status = "ok";
    } catch (const NoSpectralGap&) {
        rec.status = "error:no-gap";
    } catch (const PivotError&) {
        rec.status = "error:pivot";
    } catch (const ConvergenceError&) {
        rec.status = "error:convergence";
    } catch (const BudgetExceeded&) {
        rec.status = "error:budget";
    } catch (const SdpNoConvergence&) {
        rec.status = "error:sdp";
    } catch (const std::exception&) {
        rec.status = "error:runtime";
    }
    rec.runtime_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
            .count();
    return rec;
}

std::string trial_csv_header() {
    return "setting,n,k,epsilon,B_requested,B_used,adversary,algorithm,variant,seed,"
           "detected_k,misclassified,misclassified_fraction,runtime_ms,status";
}

std::string trial_to_csv(const TrialRecord& r) {
    std::string out;
    out += std::to_string(r.setting_id);
    out += ',' + std::to_string(r.n);
    out += ',' + std::to_string(r.k);
    out += ',' + format_double(r.epsilon);
    out += ',' + std::to_string(r.B_requested);
    out += ',' + std::to_string(r.B_used);
    out += ',' + r.adversary;
    out += ',' + r.algorithm;
    out += ',' + r.variant;
    out += ',' + std::to_string(r.seed);
    out += ',';
    if (r.detected_k >= 0) out += std::to_string(r.detected_k);
    out += ',';
    if (r.misclassified >= 0) out += std::to_string(r.misclassified);
    out += ',';
    if (r.misclassified >= 0) out += format_double(r.misclassified_fraction);
    out += ',' + std::to_string(r.runtime_ms);
    out += ',' + r.status;
    return out;
}

std::string trial_to_json_text(const TrialRecord& r) {
    json j;
    j["setting"] = r.setting_id;
    j["n"] = r.n;
    j["k"] = r.k;
    j["epsilon"] = r.epsilon;
    j["B_requested"] = r.B_requested;
    j["B_used"] = r.B_used;
    j["adversary"] = r.adversary;
    j["algorithm"] = r.algorithm;
    j["variant"] = r.variant;
    j["seed"] = r.seed;
    if (r.detected_k >= 0) j["detected_k"] = r.detected_k;
    if (r.misclassified >= 0) {
        j["misclassified"] = r.misclassified;
        j["misclassified_fraction"] = r.misclassified_fraction;
    }
    j["runtime_ms"] = r.runtime_ms;
    j["status"] = r.status;
    return j.dump(2);
}

std::vector<TrialRecord> run_sweep_records(const ExperimentConfig& cfg, int workers) {
    const auto settings = enumerate_settings(cfg);
    const std::size_t total = settings.size() * static_cast<std::size_t>(cfg.trials);
    std::vector<TrialRecord> results(total);

    if (workers < 1) workers = 1;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            const auto& point = settings[idx / cfg.trials];
            const int trial = static_cast<int>(idx % cfg.trials);
            results[idx] = run_trial(cfg, point, trial);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return results;
}

void run_sweep(const ExperimentConfig& cfg, const std::string& out_path, int workers) {
    const auto results = run_sweep_records(cfg, workers);
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot open output path: " + out_path);
    out << trial_csv_header() << '\n';
    for (const auto& r : results) out << trial_to_csv(r) << '\n';
    if (!out) throw ConfigError("write failed: " + out_path);
}

} // namespace ccr
