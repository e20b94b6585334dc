#include "whittlekit/generate.hpp"

#include <cmath>

namespace whittlekit {

Vector dirichlet_row(int n, double alpha, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    Vector row(n);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        row[j] = gamma(rng);
        sum += row[j];
    }
    if (sum <= 0.0) {
        // All draws underflowed (only possible for tiny alpha); fall back
        // to a point mass on a uniformly chosen column.
        row.setZero();
        row[static_cast<int>(rng() % n)] = 1.0;
        return row;
    }
    return row / sum;
}

Matrix dirichlet_matrix(int n, double alpha, std::mt19937_64& rng) {
    Matrix p(n, n);
    for (int s = 0; s < n; ++s) p.row(s) = dirichlet_row(n, alpha, rng).transpose();
    return p;
}

Arm generate_dirichlet_arm(int num_states, std::uint64_t seed, RewardLaw law,
                           std::optional<double> discount) {
    if (num_states < 2) throw DimensionMismatch("generate_dirichlet_arm: need S >= 2");
    std::mt19937_64 rng(seed);
    Matrix p1 = dirichlet_matrix(num_states, 1.0 / num_states, rng);
    Matrix p0 = Matrix::Identity(num_states, num_states);
    Vector r0 = Vector::Zero(num_states);
    Vector r1(num_states);
    for (int s = 0; s < num_states; ++s) {
        switch (law) {
            case RewardLaw::FivePlus:
                r1[s] = 5.0 + (s + 1) / 10.0;
                break;
            case RewardLaw::Geometric:
                r1[s] = std::pow(0.9, s + 1);
                break;
        }
    }
    return Arm(std::move(p0), std::move(p1), std::move(r0), std::move(r1), discount);
}

Arm random_dense_arm(int num_states, std::mt19937_64& rng,
                     std::optional<double> discount, double floor) {
    Matrix p0 = dirichlet_matrix(num_states, 1.0, rng);
    Matrix p1 = dirichlet_matrix(num_states, 1.0, rng);
    if (floor > 0.0) {
        const double u = floor / num_states;
        p0 = (1.0 - floor) * p0 + Matrix::Constant(num_states, num_states, u);
        p1 = (1.0 - floor) * p1 + Matrix::Constant(num_states, num_states, u);
    }
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vector r0(num_states), r1(num_states);
    for (int s = 0; s < num_states; ++s) r0[s] = uni(rng);
    for (int s = 0; s < num_states; ++s) r1[s] = uni(rng);
    return Arm(std::move(p0), std::move(p1), std::move(r0), std::move(r1), discount);
}

namespace {

// Zero-row-sum direction restricted to the row's support, scaled afterwards.
Matrix support_direction(const Matrix& p, std::mt19937_64& rng) {
    const int n = static_cast<int>(p.rows());
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix d = Matrix::Zero(n, n);
    for (int s = 0; s < n; ++s) {
        int supp = 0;
        for (int j = 0; j < n; ++j)
            if (p(s, j) > 0.0) ++supp;
        if (supp < 2) continue;  // a deterministic row cannot move
        double mean = 0.0;
        for (int j = 0; j < n; ++j)
            if (p(s, j) > 0.0) {
                d(s, j) = normal(rng);
                mean += d(s, j);
            }
        mean /= supp;
        for (int j = 0; j < n; ++j)
            if (p(s, j) > 0.0) d(s, j) -= mean;
    }
    return d;
}

}  // namespace

Arm perturb_same_support(const Arm& arm, double eps, std::mt19937_64& rng) {
    Matrix d0 = support_direction(arm.p_passive, rng);
    Matrix d1 = support_direction(arm.p_active, rng);
    const double norm = std::max(d0.cwiseAbs().rowwise().sum().maxCoeff(),
                                 d1.cwiseAbs().rowwise().sum().maxCoeff());
    if (norm <= 0.0) return arm;
    d0 /= norm;
    d1 /= norm;
    Matrix p0 = arm.p_passive + eps * d0;
    Matrix p1 = arm.p_active + eps * d1;
    // eps must stay below the smallest supported entry for the support to
    // be preserved; the callers choose floored arms accordingly.
    if (p0.minCoeff() < 0.0 || p1.minCoeff() < 0.0)
        throw DimensionMismatch("perturb_same_support: eps exceeds the support margin");
    return Arm(std::move(p0), std::move(p1), arm.r_passive, arm.r_active, arm.discount);
}

}  // namespace whittlekit
