// procache: experiment harness for proactive caching and bandwidth
// allocation. Subcommands cover data generation/ingestion, training of the
// unsupervised, supervised and predict-then-optimize strategies, evaluation
// against the closed form and the Monte-Carlo simulator, and single static
// solves.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "procache/analytics.hpp"
#include "procache/baselines.hpp"
#include "procache/data.hpp"
#include "procache/log.hpp"
#include "procache/netsim.hpp"
#include "procache/proactive.hpp"
#include "procache/rng.hpp"
#include "procache/solver.hpp"
#include "procache/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace procache;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct DataConfig {
    std::string source = "zipf";  // zipf | shot-noise | ingest
    std::size_t catalog_files = 64;
    std::size_t num_periods = 40;
    double zipf_exponent = 1.0;
    ShotNoiseParams shot_noise{};
    std::string ingest_path;
    double keep_fraction = 0.02;
    std::size_t min_total_requests = 0;  // 0: use keep_fraction instead
    double test_fraction = 0.2;
    std::size_t train_samples = 2000;
    std::size_t test_samples = 100;
};

struct EvalConfig {
    std::size_t mc_drops = 100;
    bool known_future = false;
};

struct SimConfig {
    double region_radius = 2000.0;
    std::size_t num_drops = 2000;
    std::vector<unsigned> subbands = {1, 2, 4};
};

struct Config {
    NetworkConfig net{};
    TrainOptions train{};
    SolverOptions solver{};
    DataConfig data{};
    SimConfig sim{};
    EvalConfig eval{};
    json effective;  // fully-expanded config for hashing and the manifest
};

template <typename T>
void read_field(const json& j, const char* section, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(section) + "." + key + ": wrong type");
    }
}

Config load_config(const std::string& path) {
    json j = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open " + path);
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
        }
    }

    Config cfg;
    if (j.contains("network")) {
        const json& n = j["network"];
        read_field(n, "network", "lambda_b", cfg.net.lambda_b);
        read_field(n, "network", "lambda_u", cfg.net.lambda_u);
        read_field(n, "network", "bandwidth_w", cfg.net.bandwidth_w);
        read_field(n, "network", "rate_threshold_r0", cfg.net.rate_threshold_r0);
        read_field(n, "network", "alpha", cfg.net.alpha);
        read_field(n, "network", "tx_power_dbm", cfg.net.tx_power_dbm);
        read_field(n, "network", "num_files_f", cfg.net.num_files_f);
        read_field(n, "network", "cache_size_c", cfg.net.cache_size_c);
        read_field(n, "network", "window_tau", cfg.net.window_tau);
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        read_field(t, "train", "batch_size", cfg.train.batch_size);
        read_field(t, "train", "epochs", cfg.train.epochs);
        read_field(t, "train", "lr_base", cfg.train.lr.base);
        read_field(t, "train", "lr_decay", cfg.train.lr.decay);
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        read_field(s, "solver", "max_iters", cfg.solver.max_iters);
        read_field(s, "solver", "step_size", cfg.solver.step_size);
        read_field(s, "solver", "tolerance", cfg.solver.tolerance);
        read_field(s, "solver", "restarts", cfg.solver.restarts);
        read_field(s, "solver", "beta_min", cfg.solver.beta_min);
    }
    if (j.contains("data")) {
        const json& d = j["data"];
        read_field(d, "data", "source", cfg.data.source);
        read_field(d, "data", "catalog_files", cfg.data.catalog_files);
        read_field(d, "data", "num_periods", cfg.data.num_periods);
        read_field(d, "data", "zipf_exponent", cfg.data.zipf_exponent);
        read_field(d, "data", "ingest_path", cfg.data.ingest_path);
        read_field(d, "data", "keep_fraction", cfg.data.keep_fraction);
        read_field(d, "data", "min_total_requests", cfg.data.min_total_requests);
        read_field(d, "data", "test_fraction", cfg.data.test_fraction);
        read_field(d, "data", "train_samples", cfg.data.train_samples);
        read_field(d, "data", "test_samples", cfg.data.test_samples);
        if (d.contains("shot_noise")) {
            const json& sn = d["shot_noise"];
            read_field(sn, "data.shot_noise", "arrival_rate", cfg.data.shot_noise.arrival_rate);
            read_field(sn, "data.shot_noise", "volume_pareto_shape",
                       cfg.data.shot_noise.volume_pareto_shape);
            read_field(sn, "data.shot_noise", "volume_pareto_scale",
                       cfg.data.shot_noise.volume_pareto_scale);
            read_field(sn, "data.shot_noise", "lifespan_decay",
                       cfg.data.shot_noise.lifespan_decay);
        }
    }
    if (j.contains("sim")) {
        const json& s = j["sim"];
        read_field(s, "sim", "region_radius", cfg.sim.region_radius);
        read_field(s, "sim", "num_drops", cfg.sim.num_drops);
        read_field(s, "sim", "subbands", cfg.sim.subbands);
    }
    if (j.contains("evaluate")) {
        const json& e = j["evaluate"];
        read_field(e, "evaluate", "mc_drops", cfg.eval.mc_drops);
        read_field(e, "evaluate", "known_future", cfg.eval.known_future);
    }

    cfg.net.validate();
    cfg.train.validate();
    cfg.solver.validate();
    if (cfg.data.source != "zipf" && cfg.data.source != "shot-noise" &&
        cfg.data.source != "ingest")
        throw std::invalid_argument("data.source: must be zipf, shot-noise or ingest");
    if (!(cfg.data.test_fraction >= 0.0 && cfg.data.test_fraction < 1.0))
        throw std::invalid_argument("data.test_fraction: must be in [0,1)");
    if (cfg.data.source == "shot-noise") {
        cfg.data.shot_noise.num_periods = cfg.data.num_periods;
        cfg.data.shot_noise.num_files_cap = cfg.data.catalog_files;
        cfg.data.shot_noise.validate();
    }

    // fully-expanded config snapshot for hashing
    json e;
    e["network"] = {{"lambda_b", cfg.net.lambda_b},
                    {"lambda_u", cfg.net.lambda_u},
                    {"bandwidth_w", cfg.net.bandwidth_w},
                    {"rate_threshold_r0", cfg.net.rate_threshold_r0},
                    {"alpha", cfg.net.alpha},
                    {"tx_power_dbm", cfg.net.tx_power_dbm},
                    {"num_files_f", cfg.net.num_files_f},
                    {"cache_size_c", cfg.net.cache_size_c},
                    {"window_tau", cfg.net.window_tau}};
    e["train"] = {{"batch_size", cfg.train.batch_size},
                  {"epochs", cfg.train.epochs},
                  {"lr_base", cfg.train.lr.base},
                  {"lr_decay", cfg.train.lr.decay}};
    e["solver"] = {{"max_iters", cfg.solver.max_iters},
                   {"step_size", cfg.solver.step_size},
                   {"tolerance", cfg.solver.tolerance},
                   {"restarts", cfg.solver.restarts},
                   {"beta_min", cfg.solver.beta_min}};
    e["data"] = {{"source", cfg.data.source},
                 {"catalog_files", cfg.data.catalog_files},
                 {"num_periods", cfg.data.num_periods},
                 {"zipf_exponent", cfg.data.zipf_exponent},
                 {"ingest_path", cfg.data.ingest_path},
                 {"keep_fraction", cfg.data.keep_fraction},
                 {"min_total_requests", cfg.data.min_total_requests},
                 {"test_fraction", cfg.data.test_fraction},
                 {"train_samples", cfg.data.train_samples},
                 {"test_samples", cfg.data.test_samples},
                 {"shot_noise",
                  {{"arrival_rate", cfg.data.shot_noise.arrival_rate},
                   {"volume_pareto_shape", cfg.data.shot_noise.volume_pareto_shape},
                   {"volume_pareto_scale", cfg.data.shot_noise.volume_pareto_scale},
                   {"lifespan_decay", cfg.data.shot_noise.lifespan_decay}}}};
    e["sim"] = {{"region_radius", cfg.sim.region_radius},
                {"num_drops", cfg.sim.num_drops},
                {"subbands", cfg.sim.subbands}};
    e["evaluate"] = {{"mc_drops", cfg.eval.mc_drops}, {"known_future", cfg.eval.known_future}};
    cfg.effective = std::move(e);
    return cfg;
}

std::uint64_t config_hash(const Config& cfg) {
    const std::string dump = cfg.effective.dump();
    return fnv1a(dump.data(), dump.size());
}

void write_manifest(const fs::path& out_dir, const std::string& command, const Config& cfg,
                    std::uint64_t seed) {
    json m;
    m["command"] = command;
    m["config_hash"] = config_hash(cfg);
    m["seed"] = seed;
    m["version"] = kVersion;
    m["config"] = cfg.effective;
    std::ofstream f(out_dir / ("manifest-" + command + ".json"));
    f << m.dump(1) << "\n";
}

std::vector<TrainingSample> samples_from_records(const std::vector<FileRecord>& records,
                                                 const Config& cfg, std::size_t count,
                                                 std::uint64_t seed, bool known_future) {
    std::vector<TrainingSample> samples =
        repeat_sample(records, cfg.net.num_files_f, count, seed);
    for (TrainingSample& s : samples) {
        if (known_future) {
            // input becomes the (ranked) target itself: a one-period window
            s = rank_for_training(s, RankMode::by_target);
            s.history.rows.assign(1, s.target.probs);
        } else {
            s = rank_for_training(s, RankMode::by_previous_period);
        }
    }
    return samples;
}

SolverOptions seeded_solver(const Config& cfg, std::uint64_t seed) {
    SolverOptions s = cfg.solver;
    s.seed = seed;
    return s;
}

// --- subcommands ---

int cmd_gen_data(const Config& cfg, std::uint64_t seed, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    if (cfg.data.source == "zipf") {
        const PopularitySeries series =
            gen_zipf(cfg.data.catalog_files, cfg.data.zipf_exponent, cfg.data.num_periods);
        write_series_csv((out_dir / "series.csv").string(), series);
    } else if (cfg.data.source == "shot-noise") {
        const ShotNoiseResult r = gen_shot_noise(cfg.data.shot_noise, seed);
        write_series_csv((out_dir / "series.csv").string(), r.series);
        write_request_log_csv((out_dir / "requests.csv").string(), r.log);
    } else {  // ingest
        if (cfg.data.ingest_path.empty())
            throw std::invalid_argument("data.ingest_path: required for source=ingest");
        const RequestLog log = read_request_log_csv(cfg.data.ingest_path);
        const PopularitySeries series =
            cfg.data.min_total_requests > 0
                ? estimate_popularity_min_requests(log, cfg.data.min_total_requests)
                : estimate_popularity(log, cfg.data.keep_fraction);
        write_series_csv((out_dir / "series.csv").string(), series);
        write_request_log_csv((out_dir / "requests.csv").string(), log);
    }
    write_manifest(out_dir, "gen-data", cfg, seed);
    std::cout << "gen-data: wrote " << (out_dir / "series.csv").string() << "\n";
    return 0;
}

int cmd_split(const Config& cfg, std::uint64_t seed, const fs::path& out_dir) {
    const PopularitySeries series = read_series_csv((out_dir / "series.csv").string());
    const std::vector<FileRecord> records = build_records(series, cfg.net.window_tau);
    auto [train_recs, test_recs] = split_records(records, cfg.data.test_fraction, seed);
    write_records_csv((out_dir / "train_records.csv").string(), train_recs);
    write_records_csv((out_dir / "test_records.csv").string(), test_recs);
    write_manifest(out_dir, "split", cfg, seed);
    std::cout << "split: " << train_recs.size() << " train records, " << test_recs.size()
              << " test records\n";
    return 0;
}

int cmd_train_unsup(const Config& cfg, std::uint64_t seed, const fs::path& out_dir,
                    bool known_future) {
    const auto records = read_records_csv((out_dir / "train_records.csv").string());
    const auto samples = samples_from_records(records, cfg, cfg.data.train_samples,
                                              derive_seed(seed, 1001), known_future);
    TrainOptions opts = cfg.train;
    opts.seed = derive_seed(seed, 1002);
    const ProactiveModel model = train(samples, cfg.net, opts);
    const char* name = known_future ? "model_future.json" : "model.json";
    save_model(model, (out_dir / name).string(), config_hash(cfg));
    write_manifest(out_dir, known_future ? "train-unsup-future" : "train-unsup", cfg, seed);
    std::cout << "train-unsup: saved " << (out_dir / name).string() << "\n";
    return 0;
}

int cmd_train_sup(const Config& cfg, std::uint64_t seed, const fs::path& out_dir,
                  bool known_future) {
    const auto records = read_records_csv((out_dir / "train_records.csv").string());
    const auto samples = samples_from_records(records, cfg, cfg.data.train_samples,
                                              derive_seed(seed, 1001), known_future);
    const fs::path cache =
        out_dir / (known_future ? "labels_future.csv" : "labels.csv");

    std::vector<SupervisedSample> labels(samples.size());
    bool reused = load_labels_csv(cache.string(), labels);
    if (reused) {
        for (std::size_t i = 0; i < samples.size(); ++i)
            labels[i].input =
                known_future ? samples[i].target.probs : samples[i].history.flatten();
        log_info("train-sup: reusing cached labels from " + cache.string());
    } else {
        labels = make_labels(samples, cfg.net, seeded_solver(cfg, derive_seed(seed, 1003)),
                             known_future);
        save_labels_csv(cache.string(), labels);
    }

    TrainOptions opts = cfg.train;
    opts.seed = derive_seed(seed, 1004);
    const SupervisedNets nets = train_supervised(labels, cfg.net.num_files_f, opts);
    const char* name = known_future ? "sup_future.json" : "sup.json";
    save_supervised(nets, (out_dir / name).string(), config_hash(cfg));
    write_manifest(out_dir, known_future ? "train-sup-future" : "train-sup", cfg, seed);
    std::cout << "train-sup: saved " << (out_dir / name).string() << "\n";
    return 0;
}

int cmd_fit_preopt(const Config& cfg, std::uint64_t seed, const fs::path& out_dir) {
    const auto records = read_records_csv((out_dir / "train_records.csv").string());
    const auto samples = samples_from_records(records, cfg, cfg.data.train_samples,
                                              derive_seed(seed, 1001), false);
    const LinearPredictor pred = fit_linear_predictor(samples);
    save_predictor(pred, (out_dir / "preopt.json").string());
    write_manifest(out_dir, "fit-preopt", cfg, seed);
    std::cout << "fit-preopt: saved " << (out_dir / "preopt.json").string() << "\n";
    return 0;
}

struct StrategyRow {
    std::string name;
    Policy policy;
};

int cmd_evaluate(const Config& cfg, std::uint64_t seed, const fs::path& out_dir,
                 const fs::path& ckpt_dir_in) {
    const fs::path ckpt_dir = ckpt_dir_in.empty() ? out_dir : ckpt_dir_in;
    const auto records = read_records_csv((out_dir / "test_records.csv").string());
    const auto samples = samples_from_records(records, cfg, cfg.data.test_samples,
                                              derive_seed(seed, 2002), false);

    const std::uint64_t hash = config_hash(cfg);
    ProactiveModel model = load_model((ckpt_dir / "model.json").string(), hash);
    SupervisedNets sup = load_supervised((ckpt_dir / "sup.json").string(), hash);
    LinearPredictor pred = load_predictor((ckpt_dir / "preopt.json").string());

    bool have_future = cfg.eval.known_future;
    ProactiveModel model_future;
    SupervisedNets sup_future;
    if (have_future) {
        model_future = load_model((ckpt_dir / "model_future.json").string(), hash);
        sup_future = load_supervised((ckpt_dir / "sup_future.json").string(), hash);
    }

    std::ofstream csv(out_dir / "evaluate.csv");
    csv << "strategy,period,sop_closed_form,sop_montecarlo,stderr\n";
    std::ofstream pol(out_dir / "evaluate_policies.csv");
    pol << "strategy,period,beta,q\n";

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const TrainingSample& s = samples[i];
        std::vector<StrategyRow> rows;
        rows.push_back({"genie",
                        solve_p0(s.target, cfg.net,
                                 seeded_solver(cfg, derive_seed(seed, 3000 + i)))
                            .policy});
        rows.push_back({"unsup", decide(model, s.history, cfg.net).projected});
        rows.push_back(
            {"sup", supervised_decide(sup, s.history.flatten(), cfg.net)});
        rows.push_back({"preopt", preopt_decide(pred, s.history, cfg.net,
                                                seeded_solver(cfg, derive_seed(seed, 4000 + i)))});
        // known-future variants reuse the same operations with the input
        // swapped to the (by-target ranked) target popularity; sop is
        // permutation-equivariant, so they are scored against that ranking
        TrainingSample fut = rank_for_training(s, RankMode::by_target);
        if (have_future) {
            HistoryWindow h1;
            h1.rows.assign(1, fut.target.probs);
            rows.push_back({"unsup_future", decide(model_future, h1, cfg.net).projected});
            rows.push_back(
                {"sup_future", supervised_decide(sup_future, fut.target.probs, cfg.net)});
        }

        for (std::size_t r_idx = 0; r_idx < rows.size(); ++r_idx) {
            const StrategyRow& row = rows[r_idx];
            const bool future_row = row.name == "unsup_future" || row.name == "sup_future";
            const PopularityVector& target = future_row ? fut.target : s.target;
            const double closed = sop(target, row.policy, cfg.net);

            double mc = 0.0, se = 0.0;
            if (cfg.eval.mc_drops > 0) {
                const unsigned I = static_cast<unsigned>(
                    std::max(1.0, std::round(1.0 / row.policy.beta)));
                Policy mc_policy = row.policy;
                mc_policy.beta = 1.0 / static_cast<double>(I);
                SimOptions so;
                so.region_radius = cfg.sim.region_radius;
                so.num_drops = cfg.eval.mc_drops;
                so.subband_count_i = I;
                so.seed = derive_seed(seed, 5000 + i * 16 + r_idx);
                const SimResult r = simulate_sop(target, mc_policy, cfg.net, so);
                mc = r.sop_estimate;
                se = r.stderr_estimate;
            }
            csv << row.name << "," << i << "," << fmt_double(closed) << "," << fmt_double(mc)
                << "," << fmt_double(se) << "\n";
            pol << row.name << "," << i << "," << fmt_double(row.policy.beta);
            for (double v : row.policy.q) pol << "," << fmt_double(v);
            pol << "\n";
        }
    }
    write_manifest(out_dir, "evaluate", cfg, seed);
    std::cout << "evaluate: wrote " << (out_dir / "evaluate.csv").string() << "\n";
    return 0;
}

int cmd_validate_approx(const Config& cfg, std::uint64_t seed, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const PopularitySeries series =
        gen_zipf(cfg.net.num_files_f, cfg.data.zipf_exponent, 1);
    const PopularityVector& p = series.periods.front();

    std::ofstream csv(out_dir / "approx.csv");
    csv << "subbands,beta,sop_closed_form,sop_montecarlo,stderr,abs_diff,tolerance,pass\n";
    bool all_pass = true;
    for (unsigned I : cfg.sim.subbands) {
        const double beta = 1.0 / static_cast<double>(I);
        SolverOptions sopts = seeded_solver(cfg, derive_seed(seed, 6000 + I));
        sopts.fixed_beta = beta;
        const SolveResult sol = solve_p0(p, cfg.net, sopts);

        SimOptions so;
        so.region_radius = cfg.sim.region_radius;
        so.num_drops = cfg.sim.num_drops;
        so.subband_count_i = I;
        so.seed = derive_seed(seed, 7000 + I);
        const SimResult r = simulate_sop(p, sol.policy, cfg.net, so);

        const double diff = std::fabs(sol.achieved_sop - r.sop_estimate);
        const double tol = std::max(0.03, 4.0 * r.stderr_estimate);
        const bool pass = diff <= tol;
        all_pass = all_pass && pass;
        csv << I << "," << fmt_double(beta) << "," << fmt_double(sol.achieved_sop) << ","
            << fmt_double(r.sop_estimate) << "," << fmt_double(r.stderr_estimate) << ","
            << fmt_double(diff) << "," << fmt_double(tol) << "," << (pass ? 1 : 0) << "\n";
        std::cout << "validate-approx: I=" << I << " closed=" << sol.achieved_sop
                  << " mc=" << r.sop_estimate << " diff=" << diff << (pass ? " ok" : " MISMATCH")
                  << "\n";
    }
    write_manifest(out_dir, "validate-approx", cfg, seed);
    return all_pass ? 0 : 1;
}

int cmd_solve_static(const Config& cfg, std::uint64_t seed, const fs::path& out_dir,
                     const std::string& series_path, std::size_t period) {
    fs::create_directories(out_dir);
    PopularityVector p;
    if (!series_path.empty()) {
        const PopularitySeries series = read_series_csv(series_path);
        if (period >= series.num_periods())
            throw std::invalid_argument("solve-static: period out of range");
        p = series.periods[period];
    } else {
        p = gen_zipf(cfg.net.num_files_f, cfg.data.zipf_exponent, 1).periods.front();
    }
    if (p.size() != cfg.net.num_files_f)
        throw std::invalid_argument(
            "solve-static: series has " + std::to_string(p.size()) +
            " files but network.num_files_f=" + std::to_string(cfg.net.num_files_f));

    const SolveResult res = solve_p0(p, cfg.net, seeded_solver(cfg, seed));
    json out;
    out["beta"] = res.policy.beta;
    out["q"] = res.policy.q;
    out["achieved_sop"] = res.achieved_sop;
    out["converged"] = res.converged;
    out["iterations"] = res.iterations;
    std::ofstream f(out_dir / "policy.json");
    f << out.dump(1) << "\n";
    write_manifest(out_dir, "solve-static", cfg, seed);
    std::cout << "solve-static: sop=" << res.achieved_sop << " beta=" << res.policy.beta
              << (res.converged ? " (converged)" : " (max iterations)") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proactive caching and bandwidth allocation harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::string ckpt_dir;
    app.add_option("--config", config_path, "JSON config file (defaults used when omitted)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--checkpoint", ckpt_dir, "checkpoint directory (defaults to --out-dir)");

    bool known_future = false;
    std::string series_path;
    std::size_t period = 0;

    auto* gen = app.add_subcommand("gen-data", "generate or ingest a popularity trace");
    auto* split = app.add_subcommand("split", "build records and split train/test");
    auto* tu = app.add_subcommand("train-unsup", "train the primal-dual strategy");
    tu->add_flag("--known-future", known_future, "swap the input to the future popularity");
    auto* ts = app.add_subcommand("train-sup", "train the supervised strategy");
    ts->add_flag("--known-future", known_future, "swap the input to the future popularity");
    auto* fp = app.add_subcommand("fit-preopt", "fit the linear predictor");
    auto* ev = app.add_subcommand("evaluate", "evaluate all strategies plus the genie bound");
    auto* va = app.add_subcommand("validate-approx", "closed form vs Monte-Carlo sweep");
    auto* ss = app.add_subcommand("solve-static", "single static solve");
    ss->add_option("--series", series_path, "popularity series csv (default: config popularity)");
    ss->add_option("--period", period, "period index into --series");

    CLI11_PARSE(app, argc, argv);

    try {
        const Config cfg = load_config(config_path);
        const fs::path out(out_dir);
        fs::create_directories(out);
        if (gen->parsed()) return cmd_gen_data(cfg, seed, out);
        if (split->parsed()) return cmd_split(cfg, seed, out);
        if (tu->parsed()) return cmd_train_unsup(cfg, seed, out, known_future);
        if (ts->parsed()) return cmd_train_sup(cfg, seed, out, known_future);
        if (fp->parsed()) return cmd_fit_preopt(cfg, seed, out);
        if (ev->parsed()) return cmd_evaluate(cfg, seed, out, fs::path(ckpt_dir));
        if (va->parsed()) return cmd_validate_approx(cfg, seed, out);
        if (ss->parsed()) return cmd_solve_static(cfg, seed, out, series_path, period);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
