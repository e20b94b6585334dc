#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "whittlekit/errors.hpp"

namespace whittlekit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * A two-action MDP ("arm"): passive action 0 and active action 1, each with
 * its own row-stochastic transition matrix and reward vector. When
 * `discount` is set the arm is evaluated under the total discounted reward
 * criterion, otherwise under the long-run average reward.
 *
 * Construction validates dimensions and stochasticity. Rows whose sum is
 * within 1e-9 of one are renormalized; larger deviations raise
 * NotStochastic. Entries below -1e-15 also raise NotStochastic; tiny
 * negative round-off is clamped to zero.
 */
struct Arm {
    Matrix p_passive;
    Matrix p_active;
    Vector r_passive;
    Vector r_active;
    std::optional<double> discount;

    Arm(Matrix p0, Matrix p1, Vector r0, Vector r1,
        std::optional<double> beta = std::nullopt);

    int num_states() const { return static_cast<int>(p_passive.rows()); }

    const Matrix& transition(int action) const {
        return action == 0 ? p_passive : p_active;
    }
    const Vector& reward(int action) const {
        return action == 0 ? r_passive : r_active;
    }

    /// True if the arm is a rested (Gittins) bandit: P0 = I and r0 = 0.
    bool has_gittins_structure() const;
};

/// A deterministic policy, stored as the set of states that choose the
/// active action.
class Policy {
public:
    Policy() = default;
    explicit Policy(int num_states, bool all_active = false)
        : active_(num_states, all_active ? 1 : 0) {}

    static Policy full(int num_states) { return Policy(num_states, true); }
    static Policy none(int num_states) { return Policy(num_states, false); }

    /// Build from a bitmask; bit s set means state s is active.
    static Policy from_mask(int num_states, std::uint64_t mask) {
        Policy p(num_states);
        for (int s = 0; s < num_states; ++s)
            if (mask >> s & 1) p.active_[s] = 1;
        return p;
    }

    static Policy from_active_states(int num_states, const std::vector<int>& states);

    int num_states() const { return static_cast<int>(active_.size()); }
    bool is_active(int s) const { return active_[s] != 0; }
    int action(int s) const { return active_[s]; }
    void set_active(int s, bool a) { active_[s] = a ? 1 : 0; }
    void toggle(int s) { active_[s] ^= 1; }

    int count_active() const;
    bool empty() const { return count_active() == 0; }
    std::vector<int> active_states() const;

    /// Indicator vector (1 for active states), the `bin` vector of the
    /// advantage line system.
    Vector indicator() const;

    bool operator==(const Policy& o) const { return active_ == o.active_; }
    bool operator!=(const Policy& o) const { return !(*this == o); }

    /// True if this policy is a strict subset of `o`.
    bool strict_subset_of(const Policy& o) const;

private:
    std::vector<std::uint8_t> active_;
};

/// Gain (long-run average reward) and bias of a policy-induced chain,
/// normalized so that bias[0] = 0.
struct GainBias {
    double gain = 0.0;
    Vector bias;
};

/// One state's activation advantage as an affine function of the penalty.
struct AdvantageLine {
    double intercept = 0.0;
    double slope = 0.0;
    double at(double lambda) const { return intercept + slope * lambda; }
};

/// Validation summary produced by validate_arm.
struct ValidationReport {
    bool stochastic = false;
    bool communicating = false;
    bool unichain_all_policies = false;
    /// True when the unichain flag was established by sampling 256 random
    /// policies instead of exhaustive enumeration (S > 12).
    bool unichain_sampled = false;
};

/**
 * Checks stochasticity, strong connectivity of the uniform-exploration
 * kernel (P0 + P1) / 2, and whether every policy induces a unichain Markov
 * chain. The unichain check enumerates all 2^S policies for S <= 12 and
 * samples 256 seeded random policies otherwise.
 */
ValidationReport validate_arm(const Arm& arm);

/// Strong connectivity of the directed graph with an edge s -> s' whenever
/// P[s][s'] > 0.
bool is_communicating(const Matrix& kernel);

/// True if the chain has exactly one recurrent class.
bool is_unichain(const Matrix& transition);

/// States of the unique recurrent class. Throws NotUnichain if the chain
/// has more than one.
std::vector<int> recurrent_class(const Matrix& transition);

}  // namespace whittlekit
