#include <doctest.h>

#include <random>

#include "whittlekit/generate.hpp"
#include "whittlekit/solve.hpp"

using namespace whittlekit;

namespace {

Matrix two_cycle() {
    Matrix p(2, 2);
    p << 0, 1, 1, 0;
    return p;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("gain_bias: periodic two-cycle solved by hand") {
    auto gb = gain_bias(two_cycle(), vec({0.0, 1.0}));
    CHECK(gb.gain == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gb.bias[0] == 0.0);
    CHECK(gb.bias[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gain_bias: uniform rows with constant reward") {
    const int n = 4;
    Matrix p = Matrix::Constant(n, n, 1.0 / n);
    auto gb = gain_bias(p, Vector::Constant(n, 3.25));
    CHECK(gb.gain == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(gb.bias.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gain_bias: defining-equation residual on random unichain chains") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        Arm arm = random_dense_arm(5, rng);
        const Matrix& p = arm.p_passive;
        const Vector& r = arm.r_passive;
        auto gb = gain_bias(p, r);
        Vector residual =
            Vector::Constant(5, gb.gain) + gb.bias - r - p * gb.bias;
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("gain_bias: multichain input raises SingularSystem") {
    CHECK_THROWS_AS(gain_bias(Matrix::Identity(2, 2), vec({0.0, 1.0})),
                    SingularSystem);
}

TEST_CASE("value_discounted: geometric series and hand solve") {
    Matrix one(1, 1);
    one << 1.0;
    Vector v1 = value_discounted(one, vec({1.0}), 0.9);
    CHECK(v1[0] == doctest::Approx(10.0).epsilon(1e-12));

    Vector v2 = value_discounted(two_cycle(), vec({0.0, 1.0}), 0.5);
    CHECK(v2[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(v2[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("value_discounted: fixed-point residual on random chains") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        Arm arm = random_dense_arm(6, rng);
        Vector v = value_discounted(arm.p_active, arm.r_active, 0.9);
        Vector residual = v - arm.r_active - 0.9 * (arm.p_active * v);
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("advantage_definitional: equal transition matrices cancel the bias term") {
    std::mt19937_64 rng(3);
    Matrix p = dirichlet_matrix(4, 1.0, rng);
    Vector r0 = vec({0.0, 0.1, -0.4, 2.0});
    Vector r1 = vec({1.0, 0.4, 0.0, -1.0});
    Arm arm(p, p, r0, r1);
    for (double lambda : {-1.0, 0.0, 0.7}) {
        Vector a = advantage_definitional(arm, Policy::from_mask(4, 0b0101), lambda);
        for (int s = 0; s < 4; ++s)
            CHECK(a[s] == doctest::Approx(r1[s] - r0[s] - lambda).epsilon(1e-12));
    }
}

TEST_CASE("advantage lines match the definitional advantage on random arms") {
    // The core consistency oracle of this module: the matrix-form lines and
    // the definitional advantage must agree at every penalty, for both
    // criteria.
    std::mt19937_64 rng(4);
    int triples = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 4);
        std::optional<double> beta;
        if (trial % 2 == 1) beta = 0.9;
        Arm arm = random_dense_arm(n, rng, beta);
        Policy pi = Policy::from_mask(n, rng() & ((1ull << n) - 1));
        auto system = advantage_lines(arm, pi);
        for (double lambda : {0.0, 1.0, -1.0}) {
            Vector def = advantage_definitional(arm, pi, lambda);
            for (int s = 0; s < n; ++s)
                CHECK(system.lines[s].at(lambda) ==
                      doctest::Approx(def[s]).epsilon(1e-9).scale(1.0));
            ++triples;
        }
    }
    CHECK(triples >= 100);
}

TEST_CASE("advantage lines: equal matrices give slope -1 and intercept r1 - r0") {
    std::mt19937_64 rng(5);
    Matrix p = dirichlet_matrix(3, 1.0, rng);
    Vector r0 = vec({0.0, 1.0, 2.0});
    Vector r1 = vec({0.5, 0.2, 2.5});
    Arm arm(p, p, r0, r1);
    for (std::uint64_t mask : {0ull, 3ull, 7ull}) {
        auto system = advantage_lines(arm, Policy::from_mask(3, mask));
        for (int s = 0; s < 3; ++s) {
            CHECK(system.lines[s].slope == doctest::Approx(-1.0).epsilon(1e-12));
            CHECK(system.lines[s].intercept ==
                  doctest::Approx(r1[s] - r0[s]).epsilon(1e-12));
        }
    }
}

TEST_CASE("advantage lines: rested discounted arm has negative slopes under the full policy") {
    Arm arm = generate_dirichlet_arm(6, 11, RewardLaw::Geometric, 0.9);
    auto system = advantage_lines(arm, Policy::full(6));
    for (const auto& line : system.lines) CHECK(line.slope < 0.0);
}

TEST_CASE("bias-shift insensitivity of the advantage") {
    // Rows of P1 - P0 sum to zero, so adding a constant to the bias leaves
    // the advantage unchanged.
    std::mt19937_64 rng(6);
    Arm arm = random_dense_arm(5, rng);
    Policy pi = Policy::from_mask(5, 0b10110);
    Matrix p = induced_transition(arm, pi);
    Vector r = induced_reward(arm, pi, 0.3);
    Vector bias = gain_bias(p, r).bias;
    Vector shifted = bias + Vector::Constant(5, 7.0);
    Vector base = arm.r_active - Vector::Constant(5, 0.3) - arm.r_passive;
    Vector a1 = base + (arm.p_active - arm.p_passive) * bias;
    Vector a2 = base + (arm.p_active - arm.p_passive) * shifted;
    CHECK((a1 - a2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reward-shift equivariance of the lines") {
    // Adding c to every active reward is the same as lowering the penalty
    // by c, so each line shifts horizontally: line'(l) = line(l - c) with
    // the slope unchanged. Zeros therefore move by exactly +c. The vertical
    // +c intercept shift holds only for slope -1 (the P1 = P0 family).
    std::mt19937_64 rng(7);
    Arm arm = random_dense_arm(5, rng);
    const double c = 0.8125;
    Arm shifted(arm.p_passive, arm.p_active, arm.r_passive,
                arm.r_active + Vector::Constant(5, c));
    Policy pi = Policy::from_mask(5, 0b01101);
    auto base = advantage_lines(arm, pi);
    auto moved = advantage_lines(shifted, pi);
    for (int s = 0; s < 5; ++s) {
        CHECK(moved.lines[s].slope ==
              doctest::Approx(base.lines[s].slope).epsilon(1e-12));
        for (double lambda : {-0.5, 0.0, 1.25})
            CHECK(moved.lines[s].at(lambda) ==
                  doctest::Approx(base.lines[s].at(lambda - c)).epsilon(1e-10));
    }

    Matrix p = dirichlet_matrix(4, 1.0, rng);
    Arm flat(p, p, Vector::Zero(4), vec({1.0, 2.0, -1.0, 0.25}));
    Arm flat_shifted(p, p, flat.r_passive,
                     flat.r_active + Vector::Constant(4, c));
    auto fb = advantage_lines(flat, Policy::from_mask(4, 0b0110));
    auto fm = advantage_lines(flat_shifted, Policy::from_mask(4, 0b0110));
    for (int s = 0; s < 4; ++s)
        CHECK(fm.lines[s].intercept ==
              doctest::Approx(fb.lines[s].intercept + c).epsilon(1e-10));
}

TEST_CASE("diameter: deterministic restarts and the two-cycle") {
    Matrix all_to_zero = Matrix::Zero(3, 3);
    all_to_zero.col(0).setOnes();
    CHECK(diameter(all_to_zero) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(diameter(two_cycle()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(diameter(Matrix::Identity(2, 2)), NotUnichain);
}

namespace {

// Monte-Carlo hitting-time oracle: mean and standard error of tau_{s,target}.
std::pair<double, double> mc_hitting_time(const Matrix& p, int start, int target,
                                          int episodes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int n = static_cast<int>(p.rows());
    double sum = 0.0, sumsq = 0.0;
    for (int e = 0; e < episodes; ++e) {
        int s = start;
        long steps = 0;
        while (s != target) {
            double u = uni(rng);
            double acc = 0.0;
            int next = n - 1;
            for (int j = 0; j < n; ++j) {
                acc += p(s, j);
                if (u <= acc) {
                    next = j;
                    break;
                }
            }
            s = next;
            ++steps;
        }
        sum += steps;
        sumsq += static_cast<double>(steps) * steps;
    }
    const double mean = sum / episodes;
    const double var = std::max(0.0, sumsq / episodes - mean * mean);
    return {mean, std::sqrt(var / episodes)};
}

}  // namespace

TEST_CASE("diameter matches a Monte-Carlo hitting-time estimate") {
    std::mt19937_64 rng(8);
    // One detailed case at S = 6 with a large episode budget.
    {
        Matrix p = dirichlet_matrix(6, 1.0, rng);
        const double d = diameter(p);
        // Locate the attaining pair by recomputing hitting times.
        int best_s = -1, best_t = -1;
        double best = -1.0;
        for (int target = 0; target < 6; ++target) {
            for (int start = 0; start < 6; ++start) {
                if (start == target) continue;
                // brute solve via the library value: estimate by MC below only
                // for the argmax found with a coarse MC pass
                auto [mean, se] = mc_hitting_time(p, start, target, 2000, rng);
                if (mean > best) {
                    best = mean;
                    best_s = start;
                    best_t = target;
                }
            }
        }
        auto [mean, se] = mc_hitting_time(p, best_s, best_t, 100000, rng);
        CHECK(std::abs(mean - d) <= 3.0 * se + 0.05 * d);
    }
    // Twenty random chains with a lighter budget.
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 4);
        Matrix p = dirichlet_matrix(n, 1.0, rng);
        const double d = diameter(p);
        double worst = 0.0;
        int ws = 0, wt = 0;
        for (int target = 0; target < n; ++target)
            for (int start = 0; start < n; ++start) {
                if (start == target) continue;
                auto [mean, se] = mc_hitting_time(p, start, target, 500, rng);
                if (mean > worst) {
                    worst = mean;
                    ws = start;
                    wt = target;
                }
            }
        auto [mean, se] = mc_hitting_time(p, ws, wt, 20000, rng);
        CHECK(std::abs(mean - d) <= 4.0 * se + 0.05 * d);
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("same-support perturbation keeps support and hits the requested size") {
    std::mt19937_64 rng(9);
    Arm arm = random_dense_arm(5, rng, std::nullopt, 0.25);
    std::mt19937_64 dir_rng(10);
    const double eps = 1e-3;
    Arm moved = perturb_same_support(arm, eps, dir_rng);
    const double d0 =
        (moved.p_passive - arm.p_passive).cwiseAbs().rowwise().sum().maxCoeff();
    const double d1 =
        (moved.p_active - arm.p_active).cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(std::max(d0, d1) == doctest::Approx(eps).epsilon(1e-9));
    for (int s = 0; s < 5; ++s)
        for (int j = 0; j < 5; ++j) {
            CHECK((arm.p_passive(s, j) > 0) == (moved.p_passive(s, j) > 0));
            CHECK((arm.p_active(s, j) > 0) == (moved.p_active(s, j) > 0));
        }
}

TEST_CASE("stationary distribution solves the balance equations") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix p = dirichlet_matrix(5, 1.0, rng);
        Vector phi = stationary_distribution(p);
        CHECK(phi.sum() == doctest::Approx(1.0).epsilon(1e-12));
        Vector residual = p.transpose() * phi - phi;
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("first-order bias: residual and span canonicity") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix p = dirichlet_matrix(5, 1.0, rng);
        Vector r(5);
        for (int s = 0; s < 5; ++s)
            r[s] = std::uniform_real_distribution<double>(-1, 1)(rng);
        Vector b1 = first_order_bias(p, r);
        CHECK(b1[0] == 0.0);

        Vector phi = stationary_distribution(p);
        Vector b = gain_bias(p, r).bias;
        b.array() -= phi.dot(b);
        Vector residual = b1 - b - p * b1;
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-9);

        // shifting the plain bias by a constant must not change the span
        Vector b1_shifted = first_order_bias(p, r + Vector::Constant(5, 3.0));
        auto span = [](const Vector& v) { return v.maxCoeff() - v.minCoeff(); };
        CHECK(span(b1_shifted) == doctest::Approx(span(b1)).epsilon(1e-9));
    }
}
