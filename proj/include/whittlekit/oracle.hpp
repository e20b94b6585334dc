#pragma once

#include <cstdint>
#include <vector>

#include "whittlekit/arm.hpp"
#include "whittlekit/ewisc.hpp"

namespace whittlekit {

/// Hard cap on brute-force policy enumeration (2^S policies).
inline constexpr int kOracleMaxStates = 12;

/**
 * All Bellman-optimal policies of the lambda-penalized arm, by exhaustive
 * enumeration. Average reward: sign characterization of the definitional
 * advantage. Discounted: componentwise value dominance plus the same sign
 * test. Throws TooLarge for S > 12.
 */
std::vector<Policy> bo_policies_at(const Arm& arm, double lambda, double tol = 1e-9);

/**
 * Ground-truth scan of the optimal activation advantage. The piecewise
 * affine structure is reconstructed exactly: starting from the left bound,
 * the unique BO policy of each regime is found by enumeration and its
 * validity interval computed from the regime's own advantage lines (taken
 * as the affine interpolation of two definitional evaluations). Zeros are
 * read off each regime's lines, deduplicated at regime boundaries. The
 * grid and adv_star fields sample the reconstruction for plotting.
 */
struct LambdaScan {
    std::vector<double> grid;
    Matrix adv_star;  // grid.size() x S
    std::vector<std::vector<double>> zeros;
    Vector indices;  // per-state average of zeros
    /// Regime boundaries (breakpoints of alpha*), increasing.
    std::vector<double> breakpoints;
    /// BO policy of each regime, regimes.size() == breakpoints.size() + 1.
    std::vector<Policy> regimes;
    double lo = 0.0, hi = 0.0;
};

LambdaScan lambda_scan(const Arm& arm, double lo, double hi, int grid_size);

/// Bounds default to index_bounds(arm) padded by one on each side; the
/// grid defaults to max(4 S, 64) points.
LambdaScan lambda_scan(const Arm& arm, int grid_size = 0);

/**
 * Seeded random search for a non-indexable unichain arm: samples arms with
 * Dirichlet(0.3) rows and uniform rewards until one's lambda scan shows a
 * state with two or more zeros. Throws NotFound after max_trials.
 */
Arm search_non_indexable(std::uint64_t seed, int num_states, int max_trials);

/// Same search, collecting up to max_hits certified instances within the
/// trial budget (used by the acceptance suite).
std::vector<Arm> search_non_indexable_all(std::uint64_t seed, int num_states,
                                          int max_trials, int max_hits);

}  // namespace whittlekit
