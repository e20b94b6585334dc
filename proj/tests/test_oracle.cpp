#include <doctest.h>

#include <random>

#include "whittlekit/generate.hpp"
#include "whittlekit/oracle.hpp"

using namespace whittlekit;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

Arm flat_arm() {
    Matrix p(2, 2);
    p << 0.3, 0.7, 0.6, 0.4;
    return Arm(p, p, Vector::Zero(2), vec({1.0, 2.0}));
}

bool contains(const std::vector<Policy>& pis, const Policy& pi) {
    for (const auto& p : pis)
        if (p == pi) return true;
    return false;
}

}  // namespace

TEST_CASE("bo_policies_at on the P1 = P0 arm") {
    Arm arm = flat_arm();

    auto at0 = bo_policies_at(arm, 0.0);
    REQUIRE(at0.size() == 1);
    CHECK(at0[0] == Policy::full(2));

    auto at15 = bo_policies_at(arm, 1.5);
    REQUIRE(at15.size() == 1);
    CHECK(at15[0] == Policy::from_active_states(2, {1}));

    auto at1 = bo_policies_at(arm, 1.0);
    CHECK(at1.size() == 2);
    CHECK(contains(at1, Policy::full(2)));
    CHECK(contains(at1, Policy::from_active_states(2, {1})));
}

TEST_CASE("bo_policies_at rejects oversized state spaces") {
    const int n = 13;
    Matrix p = Matrix::Constant(n, n, 1.0 / n);
    Arm arm(p, p, Vector::Zero(n), Vector::Ones(n));
    CHECK_THROWS_AS(bo_policies_at(arm, 0.0), TooLarge);
}

TEST_CASE("bo_policies_at is nonempty along the whole scan range") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        std::optional<double> beta;
        if (trial % 2 == 1) beta = 0.9;
        Arm arm = random_dense_arm(4, rng, beta);
        IndexBounds b = index_bounds(arm);
        for (int i = 0; i <= 16; ++i) {
            const double lam =
                (b.lower - 1.0) + (b.upper - b.lower + 2.0) * i / 16.0;
            CHECK_FALSE(bo_policies_at(arm, lam).empty());
        }
    }
}

TEST_CASE("lambda_scan: P1 = P0 zeros sit at the reward differences") {
    auto scan = lambda_scan(flat_arm());
    REQUIRE(scan.zeros.size() == 2);
    REQUIRE(scan.zeros[0].size() == 1);
    REQUIRE(scan.zeros[1].size() == 1);
    CHECK(scan.zeros[0][0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(scan.zeros[1][0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("lambda_scan curve is continuous across regime boundaries") {
    std::mt19937_64 rng(32);
    Arm arm = random_dense_arm(5, rng);
    auto scan = lambda_scan(arm, 256);
    // adjacent grid samples of the reconstructed alpha* must not jump more
    // than the grid spacing times a crude Lipschitz bound
    const double spacing = scan.grid[1] - scan.grid[0];
    double max_slope = 0.0;
    for (int i = 0; i + 1 < static_cast<int>(scan.grid.size()); ++i)
        for (int s = 0; s < 5; ++s)
            max_slope = std::max(
                max_slope, std::abs(scan.adv_star(i + 1, s) - scan.adv_star(i, s)) /
                               spacing);
    for (int i = 0; i + 1 < static_cast<int>(scan.grid.size()); ++i)
        for (int s = 0; s < 5; ++s)
            CHECK(std::abs(scan.adv_star(i + 1, s) - scan.adv_star(i, s)) <=
                  spacing * (2.0 * max_slope + 1.0) + 1e-9);
}

TEST_CASE("mutual oracle: ewisc and lambda_scan agree on random arms") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 24; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 4);
        std::optional<double> beta;
        if (trial % 2 == 1) beta = 0.9;
        Arm arm = random_dense_arm(n, rng, beta);
        auto e = ewisc(arm);
        auto scan = lambda_scan(arm);
        REQUIRE(e.indices.size() == scan.indices.size());
        for (int s = 0; s < n; ++s)
            CHECK(std::abs(e.indices[s] - scan.indices[s]) < 1e-6);
        bool scan_indexable = true;
        for (const auto& z : scan.zeros)
            if (z.size() != 1) scan_indexable = false;
        CHECK(e.indexable == scan_indexable);
    }
}

TEST_CASE("regime structure: indexable arms have nested decreasing regimes") {
    std::mt19937_64 rng(34);
    Arm arm = random_dense_arm(5, rng);
    REQUIRE(ewisc(arm).indexable);
    auto scan = lambda_scan(arm);
    REQUIRE(scan.regimes.size() == 6);
    CHECK(scan.regimes.front() == Policy::full(5));
    CHECK(scan.regimes.back() == Policy::none(5));
    for (std::size_t i = 0; i + 1 < scan.regimes.size(); ++i)
        CHECK(scan.regimes[i + 1].strict_subset_of(scan.regimes[i]));
}

TEST_CASE("search_non_indexable finds certified witnesses") {
    Arm found = search_non_indexable(0, 4, 10000);
    auto scan = lambda_scan(found);
    bool multi = false;
    for (const auto& z : scan.zeros)
        if (z.size() >= 2) multi = true;
    CHECK(multi);

    // cross-module agreement
    auto verdict = classify_indexability(found);
    CHECK_FALSE(verdict.indexable);

    // determinism per seed
    Arm again = search_non_indexable(0, 4, 10000);
    CHECK((found.p_active - again.p_active).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("search_non_indexable: the P1 = P0 family never yields a witness") {
    // Degenerate check through the public search on an impossible budget is
    // slow; instead assert the family is always indexable directly.
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix p = dirichlet_matrix(4, 1.0, rng);
        Vector r1(4);
        for (int s = 0; s < 4; ++s) r1[s] = std::uniform_real_distribution<double>(
                                        -1.0, 1.0)(rng);
        Arm arm(p, p, Vector::Zero(4), r1);
        CHECK(ewisc(arm).indexable);
    }
    CHECK_THROWS_AS(search_non_indexable(1, 4, 0), NotFound);
}

TEST_CASE("search_non_indexable rejects oversized requests") {
    CHECK_THROWS_AS(search_non_indexable(0, 9, 10), TooLarge);
}

TEST_CASE("ewisc matches the scan on searched non-indexable arms") {
    auto hits = search_non_indexable_all(7, 4, 4000, 3);
    REQUIRE(hits.size() >= 1);
    for (const auto& arm : hits) {
        auto e = ewisc(arm);
        auto scan = lambda_scan(arm);
        CHECK_FALSE(e.indexable);
        for (int s = 0; s < 4; ++s) {
            CHECK(e.crossings[s].size() == scan.zeros[s].size());
            CHECK(std::abs(e.indices[s] - scan.indices[s]) < 1e-6);
        }
    }
}
