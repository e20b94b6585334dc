#include "whittlekit/solve.hpp"

#include <Eigen/LU>
#include <cmath>

namespace whittlekit {

namespace {

Matrix lu_inverse(const Matrix& a, const char* what) {
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) throw SingularSystem(what);
    return lu.inverse();
}

}  // namespace

Matrix induced_transition(const Arm& arm, const Policy& policy) {
    const int n = arm.num_states();
    Matrix p(n, n);
    for (int s = 0; s < n; ++s)
        p.row(s) = policy.is_active(s) ? arm.p_active.row(s) : arm.p_passive.row(s);
    return p;
}

Vector induced_reward(const Arm& arm, const Policy& policy, double lambda) {
    const int n = arm.num_states();
    Vector r(n);
    for (int s = 0; s < n; ++s)
        r[s] = policy.is_active(s) ? arm.r_active[s] - lambda : arm.r_passive[s];
    return r;
}

GainBias gain_bias(const Matrix& transition, const Vector& reward) {
    const int n = static_cast<int>(transition.rows());
    if (transition.cols() != n || reward.size() != n)
        throw DimensionMismatch("gain_bias: inconsistent dimensions");

    // Unknowns (g, b_1..b_{n-1}); column 0 carries the gain, the rest is
    // I - P without its first column.
    Matrix a(n, n);
    a.col(0).setOnes();
    if (n > 1)
        a.rightCols(n - 1) =
            (Matrix::Identity(n, n) - transition).rightCols(n - 1);

    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible())
        throw SingularSystem("gain_bias: singular system (non-unichain chain?)");
    Vector x = lu.solve(reward);

    GainBias gb;
    gb.gain = x[0];
    gb.bias = Vector::Zero(n);
    if (n > 1) gb.bias.tail(n - 1) = x.tail(n - 1);
    return gb;
}

Vector value_discounted(const Matrix& transition, const Vector& reward, double beta) {
    const int n = static_cast<int>(transition.rows());
    if (transition.cols() != n || reward.size() != n)
        throw DimensionMismatch("value_discounted: inconsistent dimensions");
    if (beta <= 0.0 || beta >= 1.0)
        throw DimensionMismatch("value_discounted: beta must lie in (0, 1)");
    Matrix a = Matrix::Identity(n, n) - beta * transition;
    Eigen::PartialPivLU<Matrix> lu(a);
    Vector v = lu.solve(reward);
    if (!v.allFinite()) throw SingularSystem("value_discounted: solve failed");
    return v;
}

Vector advantage_definitional(const Arm& arm, const Policy& policy, double lambda) {
    const Matrix p = induced_transition(arm, policy);
    const Vector r = induced_reward(arm, policy, lambda);
    Vector h;  // bias, or beta * value
    if (arm.discount) {
        h = *arm.discount * value_discounted(p, r, *arm.discount);
    } else {
        h = gain_bias(p, r).bias;
    }
    const int n = arm.num_states();
    return arm.r_active - Vector::Constant(n, lambda) - arm.r_passive +
           (arm.p_active - arm.p_passive) * h;
}

Matrix line_system_matrix(const Arm& arm, const Policy& policy) {
    const int n = arm.num_states();
    const Matrix p = induced_transition(arm, policy);
    if (arm.discount) return Matrix::Identity(n, n) - *arm.discount * p;
    Matrix a(n, n);
    a.col(0).setOnes();
    if (n > 1)
        a.rightCols(n - 1) = (Matrix::Identity(n, n) - p).rightCols(n - 1);
    return a;
}

std::vector<AdvantageLine> lines_from_inverse(const Arm& arm, const Policy& policy,
                                              const Matrix& inverse) {
    const int n = arm.num_states();
    Vector sol_c = inverse * induced_reward(arm, policy, 0.0);
    Vector sol_d = inverse * policy.indicator();
    if (!arm.discount) {
        // First solution component is the gain; the bias normalization puts
        // b_0 = 0, so mask it before applying P1 - P0.
        sol_c[0] = 0.0;
        sol_d[0] = 0.0;
    }
    const double scale = arm.discount ? *arm.discount : 1.0;
    Vector inter = arm.r_active - arm.r_passive +
                   scale * ((arm.p_active - arm.p_passive) * sol_c);
    Vector slope = -Vector::Ones(n) -
                   scale * ((arm.p_active - arm.p_passive) * sol_d);
    std::vector<AdvantageLine> lines(n);
    for (int s = 0; s < n; ++s) lines[s] = {inter[s], slope[s]};
    return lines;
}

AdvantageLineSystem advantage_lines(const Arm& arm, const Policy& policy) {
    AdvantageLineSystem out;
    out.inverse = lu_inverse(line_system_matrix(arm, policy),
                             "advantage_lines: singular line system");
    out.lines = lines_from_inverse(arm, policy, out.inverse);
    return out;
}

Vector stationary_distribution(const Matrix& transition) {
    const int n = static_cast<int>(transition.rows());
    // phi^T (I - P) = 0 with phi^T 1 = 1; replace one balance equation by
    // the normalization to make the system regular.
    Matrix a = (Matrix::Identity(n, n) - transition).transpose();
    a.row(0).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs[0] = 1.0;
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible())
        throw SingularSystem("stationary_distribution: non-unichain chain");
    Vector phi = lu.solve(rhs);
    if (phi.minCoeff() < -1e-9)
        throw SingularSystem("stationary_distribution: negative mass");
    return phi.cwiseMax(0.0);
}

Vector first_order_bias(const Matrix& transition, const Vector& reward) {
    const int n = static_cast<int>(transition.rows());
    const Vector phi = stationary_distribution(transition);
    Vector bias = gain_bias(transition, reward).bias;
    // Center the bias so that (I - P) b1 = b is solvable.
    bias.array() -= phi.dot(bias);
    Matrix a(n, n);
    a.col(0).setOnes();
    if (n > 1)
        a.rightCols(n - 1) =
            (Matrix::Identity(n, n) - transition).rightCols(n - 1);
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible())
        throw SingularSystem("first_order_bias: singular system");
    Vector x = lu.solve(bias);
    Vector b1 = Vector::Zero(n);
    if (n > 1) b1.tail(n - 1) = x.tail(n - 1);
    return b1;
}

double diameter(const Matrix& transition) {
    const int n = static_cast<int>(transition.rows());
    const std::vector<int> rec = recurrent_class(transition);
    double best = 0.0;
    for (int target : rec) {
        if (n == 1) continue;
        // Hitting time into `target`: h_target = 0,
        // h_s = 1 + sum_{u != target} P(s, u) h_u.
        Matrix a(n - 1, n - 1);
        std::vector<int> others;
        others.reserve(n - 1);
        for (int s = 0; s < n; ++s)
            if (s != target) others.push_back(s);
        for (int i = 0; i < n - 1; ++i)
            for (int j = 0; j < n - 1; ++j)
                a(i, j) = (i == j ? 1.0 : 0.0) - transition(others[i], others[j]);
        Eigen::PartialPivLU<Eigen::Ref<Matrix>> lu(a);
        Vector h = lu.solve(Vector::Ones(n - 1));
        if (!h.allFinite())
            throw NotUnichain("diameter: hitting-time system is singular");
        best = std::max(best, h.maxCoeff());
    }
    return best;
}

}  // namespace whittlekit
