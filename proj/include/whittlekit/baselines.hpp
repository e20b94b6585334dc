#pragma once

#include "whittlekit/learner.hpp"

namespace whittlekit {

/**
 * Update parameters of the tabular two-timescale baselines. The cited
 * methods are known to be very sensitive to these rates, so they are kept
 * configurable; the defaults below were tuned on the desk-scale benchmark
 * instances.
 *
 * Fast rate: alpha(N) = 1 / ceil(N / alpha_step) per (state, action) visit
 * count. Slow rate: beta(t) = slow_c / (1 + t log(t) / 1000), applied after
 * `warmup` steps and clamped to |lambda| <= clamp. With myopic_init the
 * index estimates start at r1 - r0 (rewards are known); otherwise at zero.
 * The exploration trajectory restarts every `restart_every` steps at a
 * round-robin state so that every reference state keeps receiving samples
 * even when the chain would freeze.
 */
struct QParams {
    double slow_c = 0.3;
    double alpha_step = 50.0;
    long warmup = 2000;
    int restart_every = 10;
    double clamp = 200.0;
    bool myopic_init = true;
    /// Steps between recorded trace entries (plus a final entry).
    long record_every = 1000;
};

/**
 * QWI: tabular two-timescale Whittle index learning. Keeps one Q-table per
 * reference state s over (state, action), penalizing action 1 by the
 * current estimate lambda_hat_s, and moves lambda_hat_s on the slow
 * timescale by Q_s(s, 1) - Q_s(s, 0). Discounted targets when the rewards
 * carry a discount factor; otherwise relative Q-learning with the Q value
 * at the fixed pair (0, 0) subtracted.
 */
LearningTrace qwi_run(const ArmSimulator& sim, const KnownRewards& rewards,
                      const QParams& params, long horizon, std::uint64_t seed,
                      const Reference* reference = nullptr);

/**
 * QGI: QWI specialized to rested (Gittins) arms with known discount. The
 * passive action freezes the state and earns nothing, so its Q-values are
 * refreshed exactly as Q_s(x, 0) = beta max_a Q_s(x, a) instead of being
 * sampled. Throws StructureMismatch unless r0 = 0 and a discount is set
 * (and P0 = I when a reference arm is given).
 */
LearningTrace qgi_run(const ArmSimulator& sim, const KnownRewards& rewards,
                      const QParams& params, long horizon, std::uint64_t seed,
                      const Reference* reference = nullptr);

}  // namespace whittlekit
