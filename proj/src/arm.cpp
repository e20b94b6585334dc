#include "whittlekit/arm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace whittlekit {

namespace {

constexpr double kRowSumRepair = 1e-9;
constexpr double kNegativeFloor = -1e-15;

void check_and_repair(Matrix& p, const char* name) {
    const int n = static_cast<int>(p.rows());
    for (int s = 0; s < n; ++s) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            double v = p(s, j);
            if (v < kNegativeFloor)
                throw NotStochastic(std::string(name) + ": negative entry at row " +
                                    std::to_string(s));
            if (v < 0.0) p(s, j) = 0.0;
            sum += p(s, j);
        }
        if (std::abs(sum - 1.0) > kRowSumRepair)
            throw NotStochastic(std::string(name) + ": row " + std::to_string(s) +
                                " sums to " + std::to_string(sum));
        // Renormalize serialized-float drift, but leave rows that are off
        // by mere accumulation ulps alone so that parse/serialize is a
        // fixed point.
        if (std::abs(sum - 1.0) > 1e-13) p.row(s) /= sum;
    }
}

// Tarjan-free strongly connected components by double DFS (Kosaraju).
std::vector<int> scc_labels(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<std::vector<int>> radj(n);
    for (int u = 0; u < n; ++u)
        for (int v : adj[u]) radj[v].push_back(u);

    std::vector<int> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    for (int start = 0; start < n; ++start) {
        if (seen[start]) continue;
        // iterative DFS with postorder
        std::vector<std::pair<int, size_t>> stack{{start, 0}};
        seen[start] = 1;
        while (!stack.empty()) {
            auto& [u, i] = stack.back();
            if (i < adj[u].size()) {
                int v = adj[u][i++];
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.emplace_back(v, 0);
                }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }

    std::vector<int> label(n, -1);
    int num = 0;
    for (int k = n - 1; k >= 0; --k) {
        int start = order[k];
        if (label[start] != -1) continue;
        std::vector<int> stack{start};
        label[start] = num;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : radj[u])
                if (label[v] == -1) {
                    label[v] = num;
                    stack.push_back(v);
                }
        }
        ++num;
    }
    return label;
}

std::vector<std::vector<int>> support_graph(const Matrix& p) {
    const int n = static_cast<int>(p.rows());
    std::vector<std::vector<int>> adj(n);
    for (int s = 0; s < n; ++s)
        for (int j = 0; j < n; ++j)
            if (p(s, j) > 0.0) adj[s].push_back(j);
    return adj;
}

int count_recurrent_classes(const Matrix& p, std::vector<int>* members = nullptr) {
    auto adj = support_graph(p);
    auto label = scc_labels(adj);
    const int n = static_cast<int>(p.rows());
    int num = *std::max_element(label.begin(), label.end()) + 1;
    std::vector<char> has_exit(num, 0);
    for (int u = 0; u < n; ++u)
        for (int v : adj[u])
            if (label[v] != label[u]) has_exit[label[u]] = 1;
    int recurrent = 0;
    int rec_label = -1;
    for (int c = 0; c < num; ++c)
        if (!has_exit[c]) {
            ++recurrent;
            rec_label = c;
        }
    if (members && recurrent == 1) {
        members->clear();
        for (int u = 0; u < n; ++u)
            if (label[u] == rec_label) members->push_back(u);
    }
    return recurrent;
}

}  // namespace

Arm::Arm(Matrix p0, Matrix p1, Vector r0, Vector r1, std::optional<double> beta)
    : p_passive(std::move(p0)),
      p_active(std::move(p1)),
      r_passive(std::move(r0)),
      r_active(std::move(r1)),
      discount(beta) {
    const int n = static_cast<int>(p_passive.rows());
    if (n < 1) throw DimensionMismatch("arm needs at least one state");
    if (p_passive.cols() != n || p_active.rows() != n || p_active.cols() != n ||
        r_passive.size() != n || r_active.size() != n)
        throw DimensionMismatch("arm matrices/vectors are not dimension-consistent");
    if (discount && (*discount <= 0.0 || *discount >= 1.0))
        throw DimensionMismatch("discount must lie in (0, 1)");
    check_and_repair(p_passive, "p_passive");
    check_and_repair(p_active, "p_active");
}

bool Arm::has_gittins_structure() const {
    const int n = num_states();
    if (r_passive.cwiseAbs().maxCoeff() > 0.0) return false;
    return p_passive.isIdentity(1e-12) && n >= 1;
}

Policy Policy::from_active_states(int num_states, const std::vector<int>& states) {
    Policy p(num_states);
    for (int s : states) {
        if (s < 0 || s >= num_states)
            throw DimensionMismatch("policy state out of range: " + std::to_string(s));
        p.active_[s] = 1;
    }
    return p;
}

int Policy::count_active() const {
    int c = 0;
    for (auto v : active_) c += v;
    return c;
}

std::vector<int> Policy::active_states() const {
    std::vector<int> out;
    for (int s = 0; s < num_states(); ++s)
        if (active_[s]) out.push_back(s);
    return out;
}

Vector Policy::indicator() const {
    Vector v(num_states());
    for (int s = 0; s < num_states(); ++s) v[s] = active_[s] ? 1.0 : 0.0;
    return v;
}

bool Policy::strict_subset_of(const Policy& o) const {
    bool strict = false;
    for (int s = 0; s < num_states(); ++s) {
        if (active_[s] && !o.active_[s]) return false;
        if (!active_[s] && o.active_[s]) strict = true;
    }
    return strict;
}

bool is_communicating(const Matrix& kernel) {
    auto adj = support_graph(kernel);
    auto label = scc_labels(adj);
    return *std::max_element(label.begin(), label.end()) == 0;
}

bool is_unichain(const Matrix& transition) {
    return count_recurrent_classes(transition) == 1;
}

std::vector<int> recurrent_class(const Matrix& transition) {
    std::vector<int> members;
    if (count_recurrent_classes(transition, &members) != 1)
        throw NotUnichain("chain has more than one recurrent class");
    return members;
}

ValidationReport validate_arm(const Arm& arm) {
    // The constructor already enforced stochasticity.
    ValidationReport rep;
    rep.stochastic = true;

    const int n = arm.num_states();
    Matrix kernel = 0.5 * (arm.p_passive + arm.p_active);
    rep.communicating = is_communicating(kernel);

    auto induced = [&](const Policy& pi) {
        Matrix p(n, n);
        for (int s = 0; s < n; ++s)
            p.row(s) = pi.is_active(s) ? arm.p_active.row(s) : arm.p_passive.row(s);
        return p;
    };

    if (n <= 12) {
        rep.unichain_all_policies = true;
        for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
            if (!is_unichain(induced(Policy::from_mask(n, mask)))) {
                rep.unichain_all_policies = false;
                break;
            }
        }
    } else {
        rep.unichain_sampled = true;
        rep.unichain_all_policies = true;
        std::mt19937_64 rng(0x9E3779B97F4A7C15ull);
        for (int trial = 0; trial < 256; ++trial) {
            Policy pi(n);
            for (int s = 0; s < n; ++s) pi.set_active(s, rng() & 1);
            if (!is_unichain(induced(pi))) {
                rep.unichain_all_policies = false;
                break;
            }
        }
    }
    return rep;
}

}  // namespace whittlekit
