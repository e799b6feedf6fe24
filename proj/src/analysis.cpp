#include "crndist/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "crndist/errors.hpp"

namespace crndist {

namespace {

struct StateHash {
    std::size_t operator()(const State& s) const {
        std::size_t h = 1469598103934665603ull;
        for (Count c : s) {
            h ^= std::hash<Count>{}(c);
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace

StateSpace explore(const Crs& crs, std::uint64_t cap) {
    if (cap < 1) throw Error("state cap must be at least 1");
    StateSpace space;
    space.crs = crs;
    space.cap_used = cap;

    std::unordered_map<State, std::uint32_t, StateHash> index;
    auto intern = [&](const State& s) -> std::uint32_t {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        if (space.states.size() >= cap) throw StateCapExceeded(cap);
        auto id = static_cast<std::uint32_t>(space.states.size());
        index.emplace(s, id);
        space.states.push_back(s);
        return id;
    };

    space.initial = intern(crs.initial());
    for (std::uint32_t current = 0; current < space.states.size(); ++current) {
        State x = space.states[current]; // copy: states vector may reallocate
        std::map<State, Rat> successors;  // lexicographic target order
        for (std::size_t ri : enabled(crs, x)) {
            const Reaction& r = crs.reactions()[ri];
            State next = apply(crs, r, x);
            if (next == x) continue;
            successors[std::move(next)] += propensity(crs, r, x);
        }
        auto& out = space.edges.emplace_back();
        out.reserve(successors.size());
        for (auto& [next, rate] : successors) out.emplace_back(intern(next), rate);
    }
    return space;
}

namespace {

// Iterative Tarjan. Components are numbered in emission order, so every edge
// between components goes from a higher to a lower component id.
struct SccDecomposition {
    std::vector<std::uint32_t> comp; // state -> component id
    std::uint32_t count = 0;
    std::vector<bool> bottom;       // component id -> is BSCC
};

SccDecomposition tarjan(const StateSpace& space) {
    const std::uint32_t n = static_cast<std::uint32_t>(space.states.size());
    constexpr std::uint32_t kUnset = UINT32_MAX;
    SccDecomposition d;
    d.comp.assign(n, kUnset);

    std::vector<std::uint32_t> idx(n, kUnset), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::uint32_t next_index = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t edge;
    };
    std::vector<Frame> frames;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (idx[root] != kUnset) continue;
        frames.push_back({root, 0});
        idx[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& out = space.edges[f.v];
            if (f.edge < out.size()) {
                std::uint32_t w = out[f.edge++].first;
                if (idx[w] == kUnset) {
                    idx[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], idx[w]);
                }
            } else {
                std::uint32_t v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                if (low[v] == idx[v]) {
                    std::uint32_t c = d.count++;
                    while (true) {
                        std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        d.comp[w] = c;
                        if (w == v) break;
                    }
                }
            }
        }
    }

    d.bottom.assign(d.count, true);
    for (std::uint32_t v = 0; v < n; ++v)
        for (const auto& [w, rate] : space.edges[v])
            if (d.comp[w] != d.comp[v]) d.bottom[d.comp[v]] = false;
    return d;
}

std::vector<std::vector<std::uint32_t>> component_members(const SccDecomposition& d,
                                                          std::uint32_t n) {
    std::vector<std::vector<std::uint32_t>> members(d.count);
    for (std::uint32_t v = 0; v < n; ++v) members[d.comp[v]].push_back(v);
    return members; // ascending within each component by construction
}

// Solves A x = b by exact fraction-free-ish Gaussian elimination with
// partial pivoting on nonzero entries. A is dense, small.
std::vector<Rat> solve_exact(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) throw Error("singular linear system in steady-state solve");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            if (a[row][col] == 0) continue;
            Rat factor = a[row][col] / a[col][col];
            a[row][col] = 0;
            for (std::size_t k = col + 1; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    std::vector<Rat> x(n);
    for (std::size_t row = n; row-- > 0;) {
        Rat acc = b[row];
        for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return x;
}

// Stationary distribution of one BSCC via pi Q = 0, sum(pi) = 1, exactly.
std::vector<Rat> stationary_exact(const StateSpace& space,
                                  const std::vector<std::uint32_t>& members) {
    const std::size_t m = members.size();
    std::map<std::uint32_t, std::size_t> local;
    for (std::size_t i = 0; i < m; ++i) local.emplace(members[i], i);

    // Row i of the system: column-j balance equation (Q^T pi = 0), with the
    // last equation replaced by the normalization constraint.
    std::vector<std::vector<Rat>> a(m, std::vector<Rat>(m, Rat(0)));
    std::vector<Rat> b(m, Rat(0));
    for (std::size_t i = 0; i < m; ++i) {
        Rat total(0);
        for (const auto& [w, rate] : space.edges[members[i]]) {
            total += rate;
            a[local.at(w)][i] += rate;
        }
        a[i][i] -= total;
    }
    for (std::size_t j = 0; j < m; ++j) a[m - 1][j] = 1;
    b[m - 1] = 1;
    return solve_exact(std::move(a), std::move(b));
}

// Float fallback: power iteration on the uniformized jump matrix.
std::vector<double> stationary_float(const StateSpace& space,
                                     const std::vector<std::uint32_t>& members,
                                     double& residual) {
    const std::size_t m = members.size();
    std::unordered_map<std::uint32_t, std::size_t> local;
    local.reserve(m);
    for (std::size_t i = 0; i < m; ++i) local.emplace(members[i], i);

    std::vector<std::vector<std::pair<std::size_t, double>>> out(m);
    std::vector<double> exit_rate(m, 0.0);
    double gamma = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& [w, rate] : space.edges[members[i]]) {
            double r = rate.convert_to<double>();
            out[i].emplace_back(local.at(w), r);
            exit_rate[i] += r;
        }
        gamma = std::max(gamma, exit_rate[i]);
    }
    gamma *= 1.05;

    std::vector<double> v(m, 1.0 / static_cast<double>(m)), next(m);
    residual = 1.0;
    const std::size_t max_iters = 200000;
    for (std::size_t iter = 0; iter < max_iters && residual > 1e-12; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            next[i] += v[i] * (1.0 - exit_rate[i] / gamma);
            for (const auto& [j, r] : out[i]) next[j] += v[i] * r / gamma;
        }
        double total = 0.0;
        for (double x : next) total += x;
        for (double& x : next) x /= total;
        std::swap(v, next);
        if (iter % 16 == 0 || iter + 1 == max_iters) {
            // residual = ||v Q||_inf, normalized by gamma
            std::vector<double> flow(m, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                flow[i] -= v[i] * exit_rate[i];
                for (const auto& [j, r] : out[i]) flow[j] += v[i] * r;
            }
            residual = 0.0;
            for (double x : flow) residual = std::max(residual, std::abs(x) / gamma);
        }
    }
    return v;
}

} // namespace

std::vector<std::vector<std::uint32_t>> bsccs(const StateSpace& space) {
    auto d = tarjan(space);
    auto members = component_members(d, static_cast<std::uint32_t>(space.states.size()));
    std::vector<std::vector<std::uint32_t>> result;
    for (std::uint32_t c = 0; c < d.count; ++c)
        if (d.bottom[c]) result.push_back(members[c]);
    std::sort(result.begin(), result.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return result;
}

SteadyReport steady_state(const StateSpace& space, std::size_t exact_cutoff) {
    const std::uint32_t n = static_cast<std::uint32_t>(space.states.size());
    auto d = tarjan(space);
    auto members = component_members(d, n);

    // Push transient mass through the condensation, sources first. Component
    // ids descend along edges, so descending order is topological.
    std::vector<Rat> mass(n, Rat(0));
    mass[space.initial] = 1;
    for (std::uint32_t c = d.count; c-- > 0;) {
        if (d.bottom[c]) continue;
        const auto& group = members[c];
        if (group.size() == 1) {
            std::uint32_t v = group[0];
            if (mass[v] == 0) continue;
            Rat total(0);
            for (const auto& [w, rate] : space.edges[v]) total += rate;
            for (const auto& [w, rate] : space.edges[v]) mass[w] += mass[v] * rate / total;
            mass[v] = 0;
            continue;
        }
        // Expected visits v = inflow + P^T v within the component, then the
        // exit edges carry v_i * rate / total out of it.
        const std::size_t m = group.size();
        std::map<std::uint32_t, std::size_t> local;
        for (std::size_t i = 0; i < m; ++i) local.emplace(group[i], i);
        std::vector<Rat> total(m, Rat(0));
        for (std::size_t i = 0; i < m; ++i)
            for (const auto& [w, rate] : space.edges[group[i]]) total[i] += rate;

        std::vector<std::vector<Rat>> a(m, std::vector<Rat>(m, Rat(0)));
        std::vector<Rat> b(m);
        for (std::size_t i = 0; i < m; ++i) {
            a[i][i] = 1;
            b[i] = mass[group[i]];
        }
        for (std::size_t i = 0; i < m; ++i)
            for (const auto& [w, rate] : space.edges[group[i]]) {
                auto it = local.find(w);
                if (it != local.end()) a[it->second][i] -= rate / total[i];
            }
        std::vector<Rat> visits = solve_exact(std::move(a), std::move(b));
        for (std::size_t i = 0; i < m; ++i) {
            for (const auto& [w, rate] : space.edges[group[i]])
                if (!local.count(w)) mass[w] += visits[i] * rate / total[i];
            mass[group[i]] = 0;
        }
    }

    SteadyReport report;
    report.bscc_list = bsccs(space);
    bool any_multi = false;
    bool any_float = false;
    for (const auto& group : report.bscc_list) {
        Rat inflow(0);
        for (std::uint32_t v : group) inflow += mass[v];
        report.bscc_mass.push_back(inflow);
        if (inflow == 0) continue;

        if (group.size() == 1) {
            report.dist[group[0]] += inflow;
            continue;
        }
        any_multi = true;
        if (group.size() <= exact_cutoff) {
            auto pi = stationary_exact(space, group);
            for (std::size_t i = 0; i < group.size(); ++i)
                if (pi[i] != 0) report.dist[group[i]] += inflow * pi[i];
        } else {
            any_float = true;
            double res = 0.0;
            auto pi = stationary_float(space, group, res);
            report.residual = std::max(report.residual, res);
            double w = inflow.convert_to<double>();
            for (std::size_t i = 0; i < group.size(); ++i)
                report.dist_f[group[i]] += w * pi[i];
        }
    }

    report.exact = !any_float;
    report.method = any_float ? SolveMethod::FloatStationary
                  : any_multi ? SolveMethod::ExactRationalStationary
                              : SolveMethod::ExactRationalAbsorption;
    for (const auto& [s, p] : report.dist) report.dist_f[s] += p.convert_to<double>();
    return report;
}

std::string method_name(SolveMethod m) {
    switch (m) {
    case SolveMethod::ExactRationalAbsorption: return "exact-rational-absorption";
    case SolveMethod::ExactRationalStationary: return "exact-rational-stationary";
    case SolveMethod::FloatStationary: return "float-stationary";
    }
    return "unknown";
}

Pmf species_marginal(const StateSpace& space, const SteadyReport& report,
                     const std::string& name) {
    if (!report.exact)
        throw Error("exact marginal requested from a float-path report");
    std::uint32_t s = space.crs.species_index(name);
    std::vector<std::pair<State, Rat>> dist;
    dist.reserve(report.dist.size());
    for (const auto& [v, p] : report.dist) dist.emplace_back(space.states[v], p);
    return marginal(dist, s);
}

std::map<Count, double> species_marginal_float(const StateSpace& space,
                                               const SteadyReport& report,
                                               const std::string& name) {
    std::uint32_t s = space.crs.species_index(name);
    std::map<Count, double> out;
    for (const auto& [v, p] : report.dist_f) out[space.states[v][s]] += p;
    return out;
}

std::map<std::string, Pmf> output_marginals(const StateSpace& space, const SteadyReport& report) {
    std::map<std::string, Pmf> result;
    for (std::uint32_t s : space.crs.outputs())
        result.emplace(space.crs.species_name(s),
                       species_marginal(space, report, space.crs.species_name(s)));
    return result;
}

Pmf joint_marginal(const StateSpace& space, const SteadyReport& report,
                   const std::vector<std::string>& names) {
    if (!report.exact)
        throw Error("exact marginal requested from a float-path report");
    std::vector<std::uint32_t> idx;
    idx.reserve(names.size());
    for (const auto& name : names) idx.push_back(space.crs.species_index(name));
    Pmf::Entries entries;
    Rat total(0);
    for (const auto& [v, p] : report.dist) {
        Point point;
        point.reserve(idx.size());
        for (std::uint32_t s : idx) point.push_back(space.states[v][s]);
        entries[std::move(point)] += p;
        total += p;
    }
    if (total != 1) throw NotNormalized("steady-state distribution does not sum to 1");
    return Pmf::from_entries(static_cast<int>(idx.size()), std::move(entries));
}

Comparison compare(const Pmf& a, const Pmf& b) {
    return Comparison{l1_distance(a, b), ratio_closeness(a, b)};
}

ComparisonF compare_empirical(const Pmf& exact, const std::map<Count, double>& empirical) {
    if (exact.dim() != 1) throw DimensionMismatch("empirical comparison requires dim-1 pmfs");
    auto ratio = [](double x, double y) {
        if (x == 0.0 && y == 0.0) return 1.0;
        if (x == 0.0 || y == 0.0) return 0.0;
        return x < y ? x / y : y / x;
    };
    double l1 = 0.0, worst = 1.0;
    for (const auto& [y, m] : exact.entries()) {
        auto it = empirical.find(y[0]);
        double e = it == empirical.end() ? 0.0 : it->second;
        double p = m.convert_to<double>();
        l1 += std::abs(p - e);
        worst = std::min(worst, ratio(p, e));
    }
    for (const auto& [y, e] : empirical) {
        if (exact.at(y) == 0) {
            l1 += e;
            if (e != 0.0) worst = 0.0;
        }
    }
    return ComparisonF{l1, worst};
}

} // namespace crndist
