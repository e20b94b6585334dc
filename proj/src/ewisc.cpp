#include "whittlekit/ewisc.hpp"

#include <Eigen/LU>
#include <cmath>
#include <optional>

namespace whittlekit {

Matrix sherman_morrison_update(const Matrix& inverse, const Vector& p, const Vector& q) {
    Vector ip = inverse * p;
    const double denom = 1.0 + q.dot(ip);
    if (std::abs(denom) < 1e-12)
        throw DegenerateUpdate("sherman_morrison_update: denominator " +
                               std::to_string(denom));
    Vector qi = inverse.transpose() * q;
    return inverse - (ip * qi.transpose()) / denom;
}

namespace {

Matrix full_inverse(const Arm& arm, const Policy& pi) {
    Eigen::FullPivLU<Matrix> lu(line_system_matrix(arm, pi));
    if (!lu.isInvertible())
        throw SingularSystem("ewisc: singular line system (non-unichain policy chain?)");
    return lu.inverse();
}

}  // namespace

IndexComputation ewisc(const Arm& arm, const EwiscOptions& opts) {
    const int n = arm.num_states();
    const long kmax = std::max<long>(64, 8L * n * n);
    const int refactor_every =
        opts.refactor_every == -2 ? std::max(1, n) : opts.refactor_every;

    IndexComputation out;
    out.crossings.assign(n, {});

    Policy pi = Policy::full(n);
    out.policies.push_back(pi);

    Matrix inv = full_inverse(arm, pi);
    int updates = 0;

    std::optional<double> mu;  // nullopt encodes the -inf start
    std::vector<std::uint8_t> buff(n, 0);

    while (pi.count_active() > 0) {
        if (out.num_steps >= kmax)
            throw IterationLimit("ewisc: exceeded " + std::to_string(kmax) +
                                 " iterations");

        const std::vector<AdvantageLine> lines = lines_from_inverse(arm, pi, inv);

        int best_s = -1;
        double best_z = 0.0;
        for (int s = 0; s < n; ++s) {
            if (buff[s]) continue;
            const double c = lines[s].intercept;
            const double d = lines[s].slope;
            double z;
            if (std::abs(d) < opts.zero_slope) {
                // A flat line crosses only if it already sits at zero.
                if (!mu) continue;
                if (std::abs(lines[s].at(*mu)) >
                    opts.threshold_tol * std::max(1.0, std::abs(c)))
                    continue;
                z = *mu;
            } else {
                z = -c / d;
                if (mu) {
                    const double tol = opts.threshold_tol * std::max(1.0, std::abs(*mu));
                    if (z < *mu - tol) continue;  // crossing lies in the past
                    if (z < *mu) z = *mu;
                }
            }
            if (best_s < 0 ||
                z < best_z - opts.threshold_tol * std::max(1.0, std::abs(best_z))) {
                best_s = s;
                best_z = z;
            }
        }
        if (best_s < 0)
            throw NoCrossing("ewisc: no crossing at or beyond the current threshold");

        if (mu && std::abs(best_z - *mu) <=
                      opts.threshold_tol * std::max(1.0, std::abs(*mu))) {
            buff[best_s] = 1;  // co-located crossing, keep the threshold
            best_z = *mu;
        } else {
            std::fill(buff.begin(), buff.end(), 0);
            buff[best_s] = 1;
        }
        mu = best_z;
        out.thresholds.push_back(best_z);
        out.crossings[best_s].push_back(best_z);

        // Toggle best_s and refresh the inverse. The system matrix changes
        // in row best_s only.
        const int old_action = pi.action(best_s);
        const int new_action = 1 - old_action;
        Vector dp = (arm.transition(new_action).row(best_s) -
                     arm.transition(old_action).row(best_s))
                        .transpose();
        pi.toggle(best_s);

        bool refreshed = false;
        if (opts.use_sherman_morrison && updates < refactor_every) {
            Vector p = Vector::Zero(n);
            p[best_s] = 1.0;
            Vector q = arm.discount ? Vector(-*arm.discount * dp) : Vector(-dp);
            if (!arm.discount) q[0] = 0.0;  // first column carries the gain
            try {
                inv = sherman_morrison_update(inv, p, q);
                ++updates;
                refreshed = true;
            } catch (const DegenerateUpdate&) {
                refreshed = false;
            }
        }
        if (!refreshed) {
            inv = full_inverse(arm, pi);
            updates = 0;
        }

        out.policies.push_back(pi);
        ++out.num_steps;
    }

    out.indices = Vector::Zero(n);
    out.indexable = true;
    for (int s = 0; s < n; ++s) {
        double sum = 0.0;
        for (double z : out.crossings[s]) sum += z;
        out.indices[s] = sum / static_cast<double>(out.crossings[s].size());
        if (out.crossings[s].size() != 1) out.indexable = false;
    }
    return out;
}

IndexBounds index_bounds(const Arm& arm) {
    const auto span = [](const Vector& v) { return v.maxCoeff() - v.minCoeff(); };
    const double dinf =
        (arm.p_active - arm.p_passive).cwiseAbs().rowwise().sum().maxCoeff();
    const double rdiff = (arm.r_active - arm.r_passive).cwiseAbs().maxCoeff();
    const double diam_active = diameter(arm.p_active);
    const double diam_passive = diameter(arm.p_passive);
    IndexBounds b;
    b.lower = -rdiff - 0.5 * span(arm.r_active) * diam_active * dinf;
    b.upper = rdiff + 0.5 * span(arm.r_passive) * diam_passive * dinf;
    return b;
}

IndexabilityVerdict classify_indexability(const Arm& arm) {
    IndexabilityVerdict v;
    v.computation = ewisc(arm);
    v.indexable = v.computation.indexable;
    v.indices = v.computation.indices;
    v.crossings = v.computation.crossings;
    return v;
}

}  // namespace whittlekit
