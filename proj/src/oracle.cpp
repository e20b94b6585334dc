#include "whittlekit/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "whittlekit/generate.hpp"
#include "whittlekit/solve.hpp"

namespace whittlekit {

namespace {

bool sign_characterization(const Policy& pi, const Vector& adv, double tol) {
    for (int s = 0; s < pi.num_states(); ++s) {
        if (pi.is_active(s) && adv[s] < -tol) return false;
        if (!pi.is_active(s) && adv[s] > tol) return false;
    }
    return true;
}

}  // namespace

std::vector<Policy> bo_policies_at(const Arm& arm, double lambda, double tol) {
    const int n = arm.num_states();
    if (n > kOracleMaxStates)
        throw TooLarge("bo_policies_at: " + std::to_string(n) + " states exceed 2^" +
                       std::to_string(kOracleMaxStates) + " enumeration limit");
    const std::uint64_t count = 1ull << n;
    std::vector<Policy> result;

    if (!arm.discount) {
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            Policy pi = Policy::from_mask(n, mask);
            Vector adv;
            try {
                adv = advantage_definitional(arm, pi, lambda);
            } catch (const SingularSystem&) {
                continue;  // non-unichain policy chain cannot be certified
            }
            if (sign_characterization(pi, adv, tol)) result.push_back(pi);
        }
        return result;
    }

    // Discounted: dominance of the value vector is the primitive notion of
    // optimality; the sign test is applied on top of it.
    const double beta = *arm.discount;
    std::vector<Vector> values(count);
    Vector vstar;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        Policy pi = Policy::from_mask(n, mask);
        values[mask] = value_discounted(induced_transition(arm, pi),
                                        induced_reward(arm, pi, lambda), beta);
        if (mask == 0)
            vstar = values[mask];
        else
            vstar = vstar.cwiseMax(values[mask]);
    }
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        Policy pi = Policy::from_mask(n, mask);
        bool dominant = true;
        for (int s = 0; s < n; ++s)
            if (values[mask][s] < vstar[s] - tol * std::max(1.0, std::abs(vstar[s]))) {
                dominant = false;
                break;
            }
        if (!dominant) continue;
        Vector adv = advantage_definitional(arm, pi, lambda);
        if (sign_characterization(pi, adv, tol)) result.push_back(pi);
    }
    return result;
}

namespace {

struct RegimeLine {
    Vector intercept;
    Vector slope;
};

// Affine interpolation of two definitional evaluations; exact because the
// advantage is affine in lambda under a fixed policy.
RegimeLine definitional_lines(const Arm& arm, const Policy& pi, double l0, double l1) {
    Vector a0 = advantage_definitional(arm, pi, l0);
    Vector a1 = advantage_definitional(arm, pi, l1);
    RegimeLine rl;
    rl.slope = (a1 - a0) / (l1 - l0);
    rl.intercept = a0 - l0 * rl.slope;
    return rl;
}

}  // namespace

LambdaScan lambda_scan(const Arm& arm, double lo, double hi, int grid_size) {
    const int n = arm.num_states();
    if (n > kOracleMaxStates)
        throw TooLarge("lambda_scan: too many states for enumeration");
    if (grid_size < 4 * n) grid_size = std::max(4 * n, 64);

    LambdaScan scan;
    scan.lo = lo;
    scan.hi = hi;

    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    // Probe offsets and zero-attribution tolerances scale with the local
    // penalty, not with the bounds range: sparse arms can have enormous
    // diameters and hence a bounds interval many orders of magnitude wider
    // than the regime structure sitting inside it.
    const auto local = [](double x) { return std::max(1.0, std::abs(x)); };

    // Validity interval of a policy's regime going right from lam: it ends
    // where one of its own lines moves against the sign characterization.
    const auto regime_upper = [&](const Policy& pi, const RegimeLine& rl,
                                  double lam) {
        double upper = hi;
        for (int s = 0; s < n; ++s) {
            const double d = rl.slope[s];
            if (std::abs(d) < 1e-14) continue;
            const double z = -rl.intercept[s] / d;
            const bool leaving = pi.is_active(s) ? (d < 0.0) : (d > 0.0);
            if (leaving && z > lam && z < upper) upper = z;
        }
        return upper;
    };

    // Strict sign characterization of pi's own lines at a point.
    const auto holds_at = [&](const Policy& pi, const RegimeLine& rl, double x) {
        for (int s = 0; s < n; ++s) {
            const double v = rl.intercept[s] + x * rl.slope[s];
            const double tol = 1e-9 * local(x);
            if (pi.is_active(s) && v < -tol) return false;
            if (!pi.is_active(s) && v > tol) return false;
        }
        return true;
    };

    // Walk the BO regimes left to right. A probe just past a breakpoint can
    // still certify the previous policy within the sign tolerance, and a
    // line that has just flipped no longer counts as a forward crossing, so
    // a stale policy may claim a long interval it does not own. The owner
    // is the candidate whose characterization still holds in the middle of
    // its claimed interval; among those, the one reaching furthest right.
    double lam = lo;
    const long guard = 16L * n * n + 64;
    long steps = 0;
    while (lam < hi) {
        if (++steps > guard)
            throw IterationLimit("lambda_scan: regime walk did not terminate");
        auto pis = bo_policies_at(arm, lam);
        if (pis.empty())
            throw NoCrossing("lambda_scan: no BO policy at lambda = " +
                             std::to_string(lam));
        Policy pi;
        double upper = -1e300;
        bool verified = false;
        for (const Policy& cand : pis) {
            const RegimeLine rl = definitional_lines(arm, cand, lam, lam + scale);
            const double u = regime_upper(cand, rl, lam);
            const bool ok = holds_at(cand, rl, 0.5 * (lam + std::min(u, hi)));
            if ((ok && !verified) || (ok == verified && u > upper)) {
                upper = u;
                pi = cand;
                verified = ok;
            }
        }
        scan.regimes.push_back(pi);
        if (upper >= hi) break;
        scan.breakpoints.push_back(upper);
        lam = upper + 1e-8 * local(upper);
    }

    // Zeros per state, regime by regime, deduplicated at boundaries.
    scan.zeros.assign(n, {});
    for (std::size_t k = 0; k < scan.regimes.size(); ++k) {
        const double a = k == 0 ? lo : scan.breakpoints[k - 1];
        const double b = k < scan.breakpoints.size() ? scan.breakpoints[k] : hi;
        const RegimeLine rl = definitional_lines(arm, scan.regimes[k], a, a + scale);
        for (int s = 0; s < n; ++s) {
            if (std::abs(rl.slope[s]) < 1e-14) continue;
            const double z = -rl.intercept[s] / rl.slope[s];
            if (z >= a - 1e-8 * local(z) && z <= b + 1e-8 * local(z))
                scan.zeros[s].push_back(std::clamp(z, a, b));
        }
    }
    scan.indices = Vector::Zero(n);
    for (int s = 0; s < n; ++s) {
        auto& zs = scan.zeros[s];
        std::sort(zs.begin(), zs.end());
        std::vector<double> dedup;
        for (double z : zs)
            if (dedup.empty() ||
                z - dedup.back() > 1e-8 * std::max(1.0, std::abs(z)))
                dedup.push_back(z);
        zs = std::move(dedup);
        if (zs.empty())
            throw NoCrossing("lambda_scan: state " + std::to_string(s) +
                             " has no zero inside the bounds");
        double sum = 0.0;
        for (double z : zs) sum += z;
        scan.indices[s] = sum / static_cast<double>(zs.size());
    }

    // Sampled curve for serialization, read off the reconstruction.
    scan.grid.resize(grid_size);
    scan.adv_star.resize(grid_size, n);
    std::size_t regime = 0;
    std::vector<RegimeLine> lines;
    lines.reserve(scan.regimes.size());
    for (std::size_t k = 0; k < scan.regimes.size(); ++k) {
        const double a = k == 0 ? lo : scan.breakpoints[k - 1];
        lines.push_back(definitional_lines(arm, scan.regimes[k], a, a + scale));
    }
    for (int i = 0; i < grid_size; ++i) {
        const double l = lo + (hi - lo) * i / (grid_size - 1);
        scan.grid[i] = l;
        while (regime < scan.breakpoints.size() && l > scan.breakpoints[regime])
            ++regime;
        for (int s = 0; s < n; ++s)
            scan.adv_star(i, s) = lines[regime].intercept[s] + l * lines[regime].slope[s];
    }
    return scan;
}

LambdaScan lambda_scan(const Arm& arm, int grid_size) {
    IndexBounds b = index_bounds(arm);
    return lambda_scan(arm, b.lower - 1.0, b.upper + 1.0, grid_size);
}

namespace {

Arm sample_search_arm(int n, std::mt19937_64& rng) {
    Matrix p0 = dirichlet_matrix(n, 0.3, rng);
    Matrix p1 = dirichlet_matrix(n, 0.3, rng);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vector r0(n), r1(n);
    for (int s = 0; s < n; ++s) r0[s] = uni(rng);
    for (int s = 0; s < n; ++s) r1[s] = uni(rng);
    return Arm(std::move(p0), std::move(p1), std::move(r0), std::move(r1));
}

}  // namespace

std::vector<Arm> search_non_indexable_all(std::uint64_t seed, int num_states,
                                          int max_trials, int max_hits) {
    if (num_states > 8)
        throw TooLarge("search_non_indexable: num_states must be <= 8");
    std::mt19937_64 rng(seed);
    std::vector<Arm> hits;
    for (int trial = 0; trial < max_trials && static_cast<int>(hits.size()) < max_hits;
         ++trial) {
        Arm arm = sample_search_arm(num_states, rng);
        // Cheap prefilter; the scan below is the certificate.
        bool candidate = false;
        try {
            candidate = !ewisc(arm).indexable;
        } catch (const Error&) {
            continue;
        }
        if (!candidate) continue;
        try {
            LambdaScan scan = lambda_scan(arm);
            bool multi = false;
            for (const auto& zs : scan.zeros)
                if (zs.size() >= 2) multi = true;
            if (multi) hits.push_back(arm);
        } catch (const Error&) {
            continue;
        }
    }
    return hits;
}

Arm search_non_indexable(std::uint64_t seed, int num_states, int max_trials) {
    auto hits = search_non_indexable_all(seed, num_states, max_trials, 1);
    if (hits.empty())
        throw NotFound("search_non_indexable: no non-indexable arm within " +
                       std::to_string(max_trials) + " trials");
    return hits.front();
}

}  // namespace whittlekit
