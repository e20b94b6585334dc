#include "whittlekit/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace whittlekit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed * 0x100000001B3ull + stream));
}

EmpiricalCounts::EmpiricalCounts(int num_states) {
    n_sa.setZero(num_states, 2);
    n_sas[0].setZero(num_states, num_states);
    n_sas[1].setZero(num_states, num_states);
}

void EmpiricalCounts::record(int s, int a, int next) {
    n_sa(s, a) += 1;
    n_sas[a](s, next) += 1;
    ++t;
}

bool EmpiricalCounts::all_pairs_visited() const {
    return n_sa.minCoeff() > 0;
}

ArmEstimate estimate_arm(const EmpiricalCounts& counts, const KnownRewards& rewards) {
    const int n = counts.num_states();
    if (rewards.r_passive.size() != n || rewards.r_active.size() != n)
        throw DimensionMismatch("estimate_arm: reward dimensions do not match counts");
    Matrix p[2];
    for (int a = 0; a < 2; ++a) {
        p[a].resize(n, n);
        for (int s = 0; s < n; ++s) {
            const long visits = counts.n_sa(s, a);
            if (visits <= 0)
                throw InsufficientSamples("estimate_arm: pair (" + std::to_string(s) +
                                          ", " + std::to_string(a) + ") unvisited");
            for (int j = 0; j < n; ++j)
                p[a](s, j) = static_cast<double>(counts.n_sas[a](s, j)) /
                             static_cast<double>(visits);
        }
    }
    ArmEstimate est{Arm(std::move(p[0]), std::move(p[1]), rewards.r_passive,
                        rewards.r_active, rewards.discount),
                    counts};
    return est;
}

TabularSimulator::TabularSimulator(Arm arm, int initial_state)
    : arm_(std::move(arm)), initial_(initial_state) {
    if (initial_ < 0 || initial_ >= arm_.num_states())
        throw DimensionMismatch("TabularSimulator: initial state out of range");
}

std::pair<int, double> TabularSimulator::step(int state, int action,
                                              std::mt19937_64& rng) const {
    const auto& row = arm_.transition(action).row(state);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u = uni(rng);
    int next = arm_.num_states() - 1;
    double acc = 0.0;
    for (int j = 0; j < arm_.num_states(); ++j) {
        acc += row[j];
        if (u <= acc) {
            next = j;
            break;
        }
    }
    return {next, arm_.reward(action)[state]};
}

namespace {

double model_distance(const Arm& truth, const Arm& estimate) {
    const double dp = std::max(
        (truth.p_passive - estimate.p_passive).cwiseAbs().rowwise().sum().maxCoeff(),
        (truth.p_active - estimate.p_active).cwiseAbs().rowwise().sum().maxCoeff());
    const double dr = std::max(
        (truth.r_passive - estimate.r_passive).cwiseAbs().maxCoeff(),
        (truth.r_active - estimate.r_active).cwiseAbs().maxCoeff());
    return dp + dr;
}

}  // namespace

LearningTrace blinq_run(const ArmSimulator& sim, const KnownRewards& rewards,
                        long horizon, std::uint64_t seed, const Reference* reference,
                        const BlinqOptions& opts) {
    const int n = sim.num_states();
    std::mt19937_64 rng_actions = seeded_stream(seed, 0);
    std::mt19937_64 rng_sim = seeded_stream(seed, 1);
    std::uniform_int_distribution<int> coin(0, 1);

    LearningTrace trace;
    trace.horizon = horizon;

    std::vector<long> checkpoints = opts.checkpoints;
    std::sort(checkpoints.begin(), checkpoints.end());
    std::size_t next_ckpt = 0;

    EmpiricalCounts counts(n);
    int state = sim.initial_state();
    long next_due = -1;
    long gap = std::max<long>(1, opts.schedule.first_gap);

    for (long t = 1; t <= horizon; ++t) {
        const int action = coin(rng_actions);
        auto [next, reward] = sim.step(state, action, rng_sim);
        (void)reward;  // rewards are known; learning uses transitions only
        counts.record(state, action, next);
        state = next;

        if (trace.coverage_step < 0 && counts.all_pairs_visited()) {
            trace.coverage_step = t;
            next_due = t;
        }
        if (trace.coverage_step < 0) continue;

        const bool fires = t >= next_due;
        while (next_ckpt < checkpoints.size() && checkpoints[next_ckpt] < t)
            ++next_ckpt;
        const bool at_ckpt =
            next_ckpt < checkpoints.size() && checkpoints[next_ckpt] == t;
        const bool at_end = opts.final_run && t == horizon;
        if (!fires && !at_ckpt && !at_end) continue;

        TraceEntry entry;
        entry.t = t;
        try {
            ArmEstimate est = estimate_arm(counts, rewards);
            const auto start = std::chrono::steady_clock::now();
            IndexComputation comp = ewisc(est.arm);
            const auto stop = std::chrono::steady_clock::now();
            entry.solver_ms =
                std::chrono::duration<double, std::milli>(stop - start).count();
            entry.ok = true;
            entry.indices = comp.indices;
            entry.indexable = comp.indexable;
            if (reference) {
                entry.abs_error = (comp.indices - reference->indices).cwiseAbs();
                entry.model_err = model_distance(reference->arm, est.arm);
            }
        } catch (const Error& e) {
            // Early estimates may violate unichainness even when the true
            // arm satisfies it; log and keep learning.
            entry.ok = false;
            entry.error = e.what();
        }
        trace.entries.push_back(std::move(entry));
        ++trace.solver_calls;
        if (fires) {
            next_due = t + gap;
            gap = static_cast<long>(std::ceil(gap * opts.schedule.factor));
        }
    }
    return trace;
}

std::vector<ErrorMetricsRow> error_metrics(const LearningTrace& trace,
                                           const Vector& true_indices) {
    std::vector<ErrorMetricsRow> rows;
    for (const auto& e : trace.entries) {
        if (!e.ok) continue;
        if (e.indices.size() != true_indices.size())
            throw DimensionMismatch("error_metrics: dimension mismatch");
        std::vector<double> errs(true_indices.size());
        for (int s = 0; s < true_indices.size(); ++s)
            errs[s] = std::abs(e.indices[s] - true_indices[s]);
        std::sort(errs.begin(), errs.end());
        const std::size_t m = errs.size();
        ErrorMetricsRow row;
        row.t = e.t;
        row.min_err = errs.front();
        row.max_err = errs.back();
        row.median_err = m % 2 == 1 ? errs[m / 2]
                                    : 0.5 * (errs[m / 2 - 1] + errs[m / 2]);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace whittlekit
