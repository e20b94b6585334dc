#include "whittlekit/baselines.hpp"

#include <cmath>

namespace whittlekit {

namespace {

struct TwoTimescaleState {
    // Q0(ref, x) and Q1(ref, x): Q-value of (x, action) in the MDP
    // penalized by lambda_hat[ref].
    Matrix q0, q1;
    Vector lambda_hat;
    Eigen::Matrix<long, Eigen::Dynamic, 2> visits;
};

TwoTimescaleState init_state(int n, const KnownRewards& rewards, const QParams& p) {
    TwoTimescaleState st;
    st.q0.setZero(n, n);
    st.q1.setZero(n, n);
    st.visits.setZero(n, 2);
    st.lambda_hat = p.myopic_init ? Vector(rewards.r_active - rewards.r_passive)
                                  : Vector(Vector::Zero(n));
    return st;
}

double slow_rate(const QParams& p, long t) {
    return p.slow_c / (1.0 + t * std::log(std::max<double>(t, 2.0)) / 1000.0);
}

void slow_update(TwoTimescaleState& st, const QParams& p, long t) {
    if (t <= p.warmup) return;
    const double bt = slow_rate(p, t);
    st.lambda_hat += bt * (st.q1.diagonal() - st.q0.diagonal());
    st.lambda_hat = st.lambda_hat.cwiseMax(-p.clamp).cwiseMin(p.clamp);
}

void maybe_record(LearningTrace& trace, const TwoTimescaleState& st, long t,
                  long horizon, const QParams& p, const Reference* reference) {
    if (t % p.record_every != 0 && t != horizon) return;
    TraceEntry entry;
    entry.t = t;
    entry.ok = true;
    entry.indexable = true;  // not meaningful for Q-learning traces
    entry.indices = st.lambda_hat;
    if (reference)
        entry.abs_error = (st.lambda_hat - reference->indices).cwiseAbs();
    trace.entries.push_back(std::move(entry));
}

int restart_state(const QParams& p, long t, int n) {
    return static_cast<int>(((t - 1) / p.restart_every) % n);
}

}  // namespace

LearningTrace qwi_run(const ArmSimulator& sim, const KnownRewards& rewards,
                      const QParams& params, long horizon, std::uint64_t seed,
                      const Reference* reference) {
    const int n = sim.num_states();
    const bool discounted = rewards.discount.has_value();
    const double beta = rewards.discount.value_or(0.0);

    std::mt19937_64 rng_actions = seeded_stream(seed, 0);
    std::mt19937_64 rng_sim = seeded_stream(seed, 1);
    std::uniform_int_distribution<int> coin(0, 1);

    TwoTimescaleState st = init_state(n, rewards, params);
    LearningTrace trace;
    trace.horizon = horizon;

    int x = sim.initial_state();
    for (long t = 1; t <= horizon; ++t) {
        if (params.restart_every > 0 && (t - 1) % params.restart_every == 0)
            x = restart_state(params, t, n);
        const int a = coin(rng_actions);
        auto [x2, r] = sim.step(x, a, rng_sim);

        st.visits(x, a) += 1;
        const double alpha =
            1.0 / std::ceil(st.visits(x, a) / params.alpha_step);
        Vector vmax = st.q0.col(x2).cwiseMax(st.q1.col(x2));
        Vector target;
        if (discounted) {
            target = beta * vmax;
        } else {
            // Relative Q-learning: subtract the value at the fixed
            // reference pair (state 0, action 0).
            target = vmax - st.q0.col(0);
        }
        target.array() += r;
        if (a == 1) target -= st.lambda_hat;
        auto& q = a == 1 ? st.q1 : st.q0;
        q.col(x) += alpha * (target - q.col(x));

        slow_update(st, params, t);
        maybe_record(trace, st, t, horizon, params, reference);
        x = x2;
    }
    return trace;
}

LearningTrace qgi_run(const ArmSimulator& sim, const KnownRewards& rewards,
                      const QParams& params, long horizon, std::uint64_t seed,
                      const Reference* reference) {
    const int n = sim.num_states();
    if (!rewards.discount)
        throw StructureMismatch("qgi_run: Gittins learning needs a discount factor");
    if (rewards.r_passive.size() && rewards.r_passive.cwiseAbs().maxCoeff() > 0.0)
        throw StructureMismatch("qgi_run: passive rewards must be zero");
    if (reference && !reference->arm.has_gittins_structure())
        throw StructureMismatch("qgi_run: arm is not a rested bandit");
    const double beta = *rewards.discount;

    std::mt19937_64 rng_actions = seeded_stream(seed, 0);
    std::mt19937_64 rng_sim = seeded_stream(seed, 1);
    std::uniform_int_distribution<int> coin(0, 1);

    TwoTimescaleState st = init_state(n, rewards, params);
    LearningTrace trace;
    trace.horizon = horizon;

    int x = sim.initial_state();
    for (long t = 1; t <= horizon; ++t) {
        if (params.restart_every > 0 && (t - 1) % params.restart_every == 0)
            x = restart_state(params, t, n);
        const int a = coin(rng_actions);
        int x2 = x;
        if (a == 1) {
            auto [next, r] = sim.step(x, 1, rng_sim);
            x2 = next;
            st.visits(x, 1) += 1;
            const double alpha =
                1.0 / std::ceil(st.visits(x, 1) / params.alpha_step);
            Vector vmax = st.q0.col(x2).cwiseMax(st.q1.col(x2));
            Vector target = (beta * vmax).array() + r;
            target -= st.lambda_hat;
            st.q1.col(x) += alpha * (target - st.q1.col(x));
        }
        // Rested structure: the passive action freezes the state and earns
        // nothing, so its Bellman backup is exact.
        st.q0.col(x) = beta * st.q0.col(x).cwiseMax(st.q1.col(x));

        slow_update(st, params, t);
        maybe_record(trace, st, t, horizon, params, reference);
        x = x2;
    }
    return trace;
}

}  // namespace whittlekit
