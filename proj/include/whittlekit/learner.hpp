#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "whittlekit/arm.hpp"
#include "whittlekit/ewisc.hpp"

namespace whittlekit {

/// Visit and transition counters of a learning run.
struct EmpiricalCounts {
    // n_sa(s, a); n_sas[a](s, s')
    Eigen::Matrix<long, Eigen::Dynamic, 2> n_sa;
    Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> n_sas[2];
    long t = 0;

    explicit EmpiricalCounts(int num_states = 0);
    int num_states() const { return static_cast<int>(n_sa.rows()); }
    void record(int s, int a, int next);
    bool all_pairs_visited() const;
};

/// Known rewards (and criterion) of the arm being learned; transitions come
/// from the counts.
struct KnownRewards {
    Vector r_passive;
    Vector r_active;
    std::optional<double> discount;
};

/// Empirical arm plus the counts it came from.
struct ArmEstimate {
    Arm arm;
    EmpiricalCounts source_counts;
};

/// P_hat[a](s, .) = N(s,a,.) / N(s,a); rewards copied verbatim. Throws
/// InsufficientSamples if some pair is unvisited.
ArmEstimate estimate_arm(const EmpiricalCounts& counts, const KnownRewards& rewards);

/// Behavioral contract of the environment: a generative model of the arm.
class ArmSimulator {
public:
    virtual ~ArmSimulator() = default;
    virtual int num_states() const = 0;
    virtual int initial_state() const = 0;
    /// Samples (next state, reward) for taking `action` in `state`.
    virtual std::pair<int, double> step(int state, int action,
                                        std::mt19937_64& rng) const = 0;
};

/// Reference simulator backed by an explicit Arm.
class TabularSimulator : public ArmSimulator {
public:
    explicit TabularSimulator(Arm arm, int initial_state = 0);
    int num_states() const override { return arm_.num_states(); }
    int initial_state() const override { return initial_; }
    std::pair<int, double> step(int state, int action,
                                std::mt19937_64& rng) const override;
    const Arm& arm() const { return arm_; }

private:
    Arm arm_;
    int initial_;
};

/// Geometric spacing of the index recomputations: the first run happens at
/// coverage, the next after first_gap steps, and every subsequent gap is
/// multiplied by `factor` (rounded up).
struct Schedule {
    double factor = 2.0;
    long first_gap = 1;
};

struct TraceEntry {
    long t = 0;
    Vector indices;            // empty if the solver call failed
    bool ok = false;
    bool indexable = false;
    std::string error;         // failure note when !ok
    double solver_ms = 0.0;
    Vector abs_error;          // vs reference indices, if a reference is set
    double model_err = -1.0;   // ||M - M_hat||_inf, if a reference is set
};

struct LearningTrace {
    std::vector<TraceEntry> entries;
    long horizon = 0;
    long coverage_step = -1;   // -1 when never covered
    int solver_calls = 0;
};

/// Reference data against which a learning run is scored.
struct Reference {
    Arm arm;
    Vector indices;
};

struct BlinqOptions {
    Schedule schedule;
    /// Extra steps at which the estimate is computed and recorded in
    /// addition to the schedule (used for fixed-checkpoint error curves).
    std::vector<long> checkpoints;
    /// Always record a final estimate at t = horizon once covered.
    bool final_run = true;
};

/**
 * The model-based learning loop: at each step pick an action uniformly at
 * random, advance the simulator, update the counts; once every state-action
 * pair is visited run the index computation whenever the schedule fires.
 * Solver failures on early, degenerate estimates are recorded in the trace
 * and the run continues. Deterministic per seed: action and simulator draws
 * use disjoint RNG streams derived from the seed.
 */
LearningTrace blinq_run(const ArmSimulator& sim, const KnownRewards& rewards,
                        long horizon, std::uint64_t seed,
                        const Reference* reference = nullptr,
                        const BlinqOptions& opts = {});

/// Per-recorded-step (min, median, max) of |lambda_s - lambda_hat_s|.
struct ErrorMetricsRow {
    long t = 0;
    double min_err = 0.0;
    double median_err = 0.0;
    double max_err = 0.0;
};

std::vector<ErrorMetricsRow> error_metrics(const LearningTrace& trace,
                                           const Vector& true_indices);

/// RNG streams derived from a run seed; stream 0 drives action draws,
/// stream 1 the simulator.
std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace whittlekit
