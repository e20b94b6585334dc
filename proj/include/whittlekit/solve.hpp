#pragma once

#include <utility>
#include <vector>

#include "whittlekit/arm.hpp"

namespace whittlekit {

/**
 * Solves the gain/bias equation g + b_s = r_s + sum_s' P[s][s'] b_s' with
 * the normalization b[0] = 0. The unknowns (g, b_1, ..., b_{S-1}) form a
 * dense S x S system that is regular exactly when the chain is unichain.
 */
GainBias gain_bias(const Matrix& transition, const Vector& reward);

/// v = (I - beta P)^{-1} r, the total discounted reward of a fixed chain.
Vector value_discounted(const Matrix& transition, const Vector& reward, double beta);

/// Transition matrix of the chain induced by a policy (row s comes from the
/// action the policy picks in s).
Matrix induced_transition(const Arm& arm, const Policy& policy);

/// Reward vector of the induced chain in the lambda-penalized arm.
Vector induced_reward(const Arm& arm, const Policy& policy, double lambda = 0.0);

/**
 * Activation advantage of every state under `policy` in the
 * lambda-penalized arm, computed from its definition:
 *   alpha_s = r1_s - lambda - r0_s + (P1_s - P0_s) . b
 * where b is the bias (average reward) or beta * v (discounted) of the
 * induced chain of the penalized arm.
 */
Vector advantage_definitional(const Arm& arm, const Policy& policy, double lambda);

/**
 * Per-state advantage lines under a fixed policy together with the inverse
 * of the linear system that produced them. The inverse is what the sweep
 * updates by rank-1 steps when the policy changes in a single state.
 *
 * For the average-reward criterion the system matrix has a first column of
 * ones (carrying the gain) and columns of I - P^pi elsewhere; the gain
 * component is masked out before applying P1 - P0 so the lines agree with
 * advantage_definitional for every lambda.
 */
struct AdvantageLineSystem {
    std::vector<AdvantageLine> lines;
    Matrix inverse;  // (A^pi)^{-1} or (I - beta P^pi)^{-1}
};

AdvantageLineSystem advantage_lines(const Arm& arm, const Policy& policy);

/// System matrix whose inverse advantage_lines returns.
Matrix line_system_matrix(const Arm& arm, const Policy& policy);

/// Recomputes the per-state lines from a given inverse (shared by
/// advantage_lines and ewisc's incremental path).
std::vector<AdvantageLine> lines_from_inverse(const Arm& arm, const Policy& policy,
                                              const Matrix& inverse);

/**
 * Diameter of a unichain transition matrix: the largest expected hitting
 * time E[tau_{s,s'}] over all start states s and targets s' in the unique
 * recurrent class, with tau_{s,s} = 0.
 */
double diameter(const Matrix& transition);

/// Stationary distribution of a unichain transition matrix.
Vector stationary_distribution(const Matrix& transition);

/**
 * First-order bias, a diagnostic quantity: the solution of
 * b1 = b + P b1 where b is the bias centered against the stationary
 * distribution. Defined up to an additive constant; normalized here with
 * b1[0] = 0, so only its span is canonical.
 */
Vector first_order_bias(const Matrix& transition, const Vector& reward);

}  // namespace whittlekit
