#pragma once

#include <cstdint>
#include <random>

#include "whittlekit/arm.hpp"

namespace whittlekit {

enum class RewardLaw {
    FivePlus,   // r1_s = 5 + (s+1)/10
    Geometric,  // r1_s = 0.9^(s+1)
};

/**
 * Rested (Gittins) arm with P1 rows drawn from Dirichlet(1/S, ..., 1/S),
 * P0 = I, r0 = 0 and r1 given by the chosen law. Deterministic per seed.
 */
Arm generate_dirichlet_arm(int num_states, std::uint64_t seed, RewardLaw law,
                           std::optional<double> discount = std::nullopt);

/// One Dirichlet(alpha, ..., alpha) draw of a stochastic row.
Vector dirichlet_row(int n, double alpha, std::mt19937_64& rng);

/// Row-stochastic matrix with independent Dirichlet(alpha) rows.
Matrix dirichlet_matrix(int n, double alpha, std::mt19937_64& rng);

/**
 * Dense random arm: Dirichlet(1) rows for both actions, rewards uniform in
 * [-1, 1]. Every entry is positive almost surely, so the arm is
 * communicating and unichain under every policy. `floor` mixes each row
 * with the uniform distribution to keep entries away from zero.
 */
Arm random_dense_arm(int num_states, std::mt19937_64& rng,
                     std::optional<double> discount = std::nullopt,
                     double floor = 0.0);

/**
 * Same-support perturbation: adds eps * delta to both transition matrices
 * where delta has zero row sums, vanishes outside the support of the
 * original rows, and max row 1-norm equal to one, so that
 * ||P' - P||_inf = eps exactly. The direction is deterministic per rng
 * state; rewards are kept.
 */
Arm perturb_same_support(const Arm& arm, double eps, std::mt19937_64& rng);

}  // namespace whittlekit
