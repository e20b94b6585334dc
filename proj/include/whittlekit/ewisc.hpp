#pragma once

#include <vector>

#include "whittlekit/arm.hpp"
#include "whittlekit/solve.hpp"

namespace whittlekit {

/**
 * Output of the index sweep. The thresholds mu_1 <= ... <= mu_K are the
 * penalties at which the tracked Bellman-optimal policy changes by one
 * state; policies has K+1 entries starting from the full set and ending at
 * the empty set. Each state's crossings list holds the thresholds at which
 * it entered or left the policy; its index is the plain average of that
 * list. The arm is indexable exactly when every state crosses once, which
 * forces K = S and a strictly nested policy sequence.
 */
struct IndexComputation {
    std::vector<double> thresholds;
    std::vector<Policy> policies;
    std::vector<std::vector<double>> crossings;
    Vector indices;
    bool indexable = false;
    int num_steps = 0;
};

struct EwiscOptions {
    /// Relative tolerance for treating a crossing as co-located with the
    /// current threshold (buffer handling).
    double threshold_tol = 1e-9;
    /// Slopes below this magnitude are treated as flat lines.
    double zero_slope = 1e-12;
    /// Full re-factorization period, in rank-1 updates. <= 0 refactors
    /// every iteration (used by the incremental-fidelity tests).
    int refactor_every = -2;  // -2: default max(1, S)
    bool use_sherman_morrison = true;
};

/**
 * Index computation by an upward penalty sweep: maintains the
 * tracked Bellman-optimal policy and the inverse of its advantage line
 * system. Each iteration finds the state (outside the co-location buffer)
 * whose line crosses zero soonest at or after the current threshold,
 * records the crossing and toggles that state. Runs on indexable and
 * non-indexable arms alike; average-reward arms must be unichain,
 * discounted arms need no such assumption.
 */
IndexComputation ewisc(const Arm& arm, const EwiscOptions& opts = {});

/**
 * Rank-1 inverse update: (A + p q^T)^{-1} from A^{-1} by the
 * Sherman-Morrison formula. Throws DegenerateUpdate when
 * |1 + q^T A^{-1} p| < 1e-12; the caller then re-factorizes.
 */
Matrix sherman_morrison_update(const Matrix& inverse, const Vector& p, const Vector& q);

/// Explicit enclosure of all Whittle indices of an indexable arm, from the
/// rewards' spans, the extreme policies' diameters and ||P1 - P0||_inf.
struct IndexBounds {
    double lower = 0.0;
    double upper = 0.0;
};

IndexBounds index_bounds(const Arm& arm);

/// classify_indexability verdict. On non-indexable arms the crossing lists
/// carry every zero of the optimal advantage and indices are their
/// averages.
struct IndexabilityVerdict {
    bool indexable = false;
    Vector indices;
    std::vector<std::vector<double>> crossings;
    IndexComputation computation;
};

IndexabilityVerdict classify_indexability(const Arm& arm);

}  // namespace whittlekit
