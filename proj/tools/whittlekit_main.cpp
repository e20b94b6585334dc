#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "whittlekit/baselines.hpp"
#include "whittlekit/generate.hpp"
#include "whittlekit/json_io.hpp"
#include "whittlekit/oracle.hpp"

namespace fs = std::filesystem;
using namespace whittlekit;

namespace {

int thread_cap() {
    if (const char* env = std::getenv("WHITTLE_KIT_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

struct LearnConfig {
    std::string experiment = "custom";
    std::string arm_path;
    std::vector<std::string> algorithms;
    long horizon = -1;
    std::vector<std::uint64_t> seeds;
    double schedule_factor = 2.0;
    double discount = -1.0;  // < 0: keep the arm's criterion
    std::uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    std::string out_dir = "out";
};

Arm resolve_arm(const LearnConfig& cfg) {
    if (cfg.experiment == "ex2") {
        return generate_dirichlet_arm(5, cfg.gen_seed_set ? cfg.gen_seed : 12,
                                      RewardLaw::Geometric, 0.9);
    }
    if (cfg.experiment == "ex8") {
        return generate_dirichlet_arm(50, cfg.gen_seed_set ? cfg.gen_seed : 13,
                                      RewardLaw::FivePlus, 0.9);
    }
    if (cfg.arm_path.empty())
        throw std::runtime_error("experiment '" + cfg.experiment +
                                 "' needs --arm FILE");
    return load_arm(cfg.arm_path);
}

int run_learn(LearnConfig cfg) {
    // Per-experiment defaults mirror the benchmark setups.
    if (cfg.experiment == "ex1") {
        if (cfg.arm_path.empty()) cfg.arm_path = "data/ex1_arm.json";
        if (cfg.algorithms.empty()) cfg.algorithms = {"blinq", "qwi"};
        if (cfg.horizon < 0) cfg.horizon = 20000;
        if (cfg.discount < 0) cfg.discount = 0.9;
    } else if (cfg.experiment == "ex2" || cfg.experiment == "ex8") {
        if (cfg.algorithms.empty()) cfg.algorithms = {"blinq", "qgi", "qwi"};
        if (cfg.horizon < 0) cfg.horizon = 100000;
    } else if (cfg.experiment != "custom") {
        std::cerr << "unknown experiment id: " << cfg.experiment << "\n";
        return 2;
    }
    if (cfg.algorithms.empty()) cfg.algorithms = {"blinq"};
    if (cfg.horizon < 0) cfg.horizon = 100000;
    if (cfg.seeds.empty()) cfg.seeds = {0};

    Arm arm = resolve_arm(cfg);
    if (cfg.discount > 0)
        arm = Arm(arm.p_passive, arm.p_active, arm.r_passive, arm.r_active,
                  cfg.discount);

    for (const auto& algo : cfg.algorithms) {
        if (algo != "blinq" && algo != "qwi" && algo != "qgi")
            throw std::runtime_error("unknown algorithm: " + algo);
        if (algo == "qgi" && !arm.has_gittins_structure())
            throw StructureMismatch("qgi requires a rested arm (P0 = I, r0 = 0)");
    }

    Reference ref{arm, ewisc(arm).indices};
    KnownRewards rewards{arm.r_passive, arm.r_active, arm.discount};
    TabularSimulator sim(arm);

    fs::create_directories(cfg.out_dir);

    struct Job {
        std::string algo;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& a : cfg.algorithms)
        for (auto s : cfg.seeds) jobs.push_back({a, s});

    struct Result {
        Job job;
        LearningTrace trace;
    };
    std::vector<Result> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            try {
                LearningTrace trace;
                if (job.algo == "blinq") {
                    BlinqOptions opts;
                    opts.schedule.factor = cfg.schedule_factor;
                    trace = blinq_run(sim, rewards, cfg.horizon, job.seed, &ref, opts);
                } else if (job.algo == "qwi") {
                    trace = qwi_run(sim, rewards, QParams{}, cfg.horizon, job.seed, &ref);
                } else {
                    trace = qgi_run(sim, rewards, QParams{}, cfg.horizon, job.seed, &ref);
                }
                results[i] = {job, std::move(trace)};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };
    const int nthreads = std::min<int>(thread_cap(), static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);

    // Single-threaded merge of per-job files and the summary.
    nlohmann::json summary;
    std::map<std::string, std::vector<const LearningTrace*>> by_algo;
    for (const auto& res : results) {
        const std::string stem =
            res.job.algo + "_seed" + std::to_string(res.job.seed);
        write_text_file(cfg.out_dir + "/" + stem + "_trace.csv",
                        trace_to_csv(res.trace, &ref.indices));
        write_text_file(cfg.out_dir + "/" + stem + "_metrics.csv",
                        metrics_to_csv(error_metrics(res.trace, ref.indices)));
        by_algo[res.job.algo].push_back(&res.trace);
    }
    for (const auto& [algo, traces] : by_algo) {
        double mins = 0, meds = 0, maxs = 0;
        long final_t = 0;
        int counted = 0;
        for (const auto* tr : traces) {
            auto rows = error_metrics(*tr, ref.indices);
            if (rows.empty()) continue;
            mins += rows.back().min_err;
            meds += rows.back().median_err;
            maxs += rows.back().max_err;
            final_t = std::max(final_t, rows.back().t);
            ++counted;
        }
        if (counted == 0) {
            summary[algo] = {{"note", "no index records (coverage not reached)"}};
            continue;
        }
        summary[algo] = {{"min", mins / counted},
                         {"median", meds / counted},
                         {"max", maxs / counted},
                         {"final_t", final_t}};
    }
    write_text_file(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Whittle/Gittins index computation and learning benchmarks"};
    app.require_subcommand(1);

    std::string arm_path, out_path;
    auto* compute = app.add_subcommand(
        "compute", "Validate an arm and compute its indices");
    compute->add_option("arm", arm_path, "arm JSON file")->required();
    compute->add_option("--out", out_path, "write the result JSON here");

    int grid = 0;
    auto* scan = app.add_subcommand(
        "scan", "Scan the optimal activation advantage over the penalty range");
    scan->add_option("arm", arm_path, "arm JSON file")->required();
    scan->add_option("--grid", grid, "grid size (default max(4S, 64))");
    scan->add_option("--out", out_path, "write the scan JSON here");

    LearnConfig cfg;
    std::string seeds_csv = "0";
    std::string algos_csv;
    auto* learn = app.add_subcommand("learn", "Run learning benchmarks");
    learn->add_option("--experiment", cfg.experiment, "ex1|ex2|ex8|custom");
    learn->add_option("--arm", cfg.arm_path, "arm JSON file (custom/ex1)");
    learn->add_option("--algorithms", algos_csv, "comma list: blinq,qwi,qgi");
    learn->add_option("--horizon", cfg.horizon, "number of simulator steps");
    learn->add_option("--seed", seeds_csv, "comma list of run seeds");
    learn->add_option("--schedule-factor", cfg.schedule_factor,
                      "geometric spacing factor for index recomputation");
    learn->add_option("--discount", cfg.discount, "override the arm's discount");
    auto* gs = learn->add_option("--gen-seed", cfg.gen_seed,
                                 "generator seed for ex2/ex8 arms");
    learn->add_option("--out", cfg.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        if (compute->parsed()) {
            Arm arm = load_arm(arm_path);
            ValidationReport rep = validate_arm(arm);
            if (!arm.discount && !rep.unichain_all_policies)
                throw NotUnichain(
                    std::string("average-reward criterion needs every policy "
                                "chain unichain (") +
                    (rep.unichain_sampled ? "sampled check" : "exhaustive check") +
                    " failed)");
            IndexabilityVerdict v = classify_indexability(arm);
            std::string text = verdict_to_json_text(v);
            if (!out_path.empty())
                write_text_file(out_path, text);
            else
                std::cout << text;
            return 0;
        }
        if (scan->parsed()) {
            Arm arm = load_arm(arm_path);
            LambdaScan s = lambda_scan(arm, grid);
            std::string text = lambda_scan_to_json_text(s);
            if (!out_path.empty())
                write_text_file(out_path, text);
            else
                std::cout << text;
            return 0;
        }
        if (learn->parsed()) {
            cfg.gen_seed_set = gs->count() > 0;
            for (std::stringstream ss(seeds_csv); ss.good();) {
                std::string tok;
                std::getline(ss, tok, ',');
                if (!tok.empty()) cfg.seeds.push_back(std::stoull(tok));
            }
            for (std::stringstream ss(algos_csv); ss.good();) {
                std::string tok;
                std::getline(ss, tok, ',');
                if (!tok.empty()) cfg.algorithms.push_back(tok);
            }
            return run_learn(cfg);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
