#ifndef CRNDIST_TESTS_SUPPORT_HPP
#define CRNDIST_TESTS_SUPPORT_HPP

#include <map>
#include <random>
#include <set>
#include <vector>

#include "crndist/pmf.hpp"

namespace crndist::testing {

// Deterministic generator of small exact-rational pmfs: distinct natural
// support values with integer weights normalized by their total.
inline Pmf random_pmf(std::mt19937_64& rng, int max_support = 4, Count max_value = 10) {
    std::uniform_int_distribution<int> size_dist(1, max_support);
    std::uniform_int_distribution<Count> value_dist(0, max_value);
    std::uniform_int_distribution<int> weight_dist(1, 9);

    int n = size_dist(rng);
    std::set<Count> values;
    while (static_cast<int>(values.size()) < n) values.insert(value_dist(rng));

    std::vector<int> weights(values.size());
    int total = 0;
    for (auto& w : weights) {
        w = weight_dist(rng);
        total += w;
    }
    Pmf::Entries entries;
    std::size_t i = 0;
    for (Count v : values) entries[Point{v}] = Rat(weights[i++], total);
    return Pmf::from_entries(1, std::move(entries));
}

inline Rat random_weight(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> den_dist(1, 9);
    int d = den_dist(rng);
    std::uniform_int_distribution<int> num_dist(0, d);
    return Rat(num_dist(rng), d);
}

// Brute-force oracles for the pairwise pmf operations: enumerate the full
// Cartesian product of supports and bin the combined values. Written apart
// from the library so the implementations are checked against independent
// code.
inline std::map<Count, Rat> oracle_pairwise_sum(const Pmf& a, const Pmf& b) {
    std::map<Count, Rat> out;
    for (const auto& [ya, pa] : a.entries())
        for (const auto& [yb, pb] : b.entries()) {
            Count combined = ya[0] + yb[0];
            auto it = out.find(combined);
            if (it == out.end())
                out.emplace(combined, pa * pb);
            else
                it->second = it->second + pa * pb;
        }
    return out;
}

inline std::map<Count, Rat> oracle_pairwise_min(const Pmf& a, const Pmf& b) {
    std::map<Count, Rat> out;
    for (const auto& [ya, pa] : a.entries())
        for (const auto& [yb, pb] : b.entries()) {
            Count combined = ya[0] < yb[0] ? ya[0] : yb[0];
            auto it = out.find(combined);
            if (it == out.end())
                out.emplace(combined, pa * pb);
            else
                it->second = it->second + pa * pb;
        }
    return out;
}

inline bool matches(const Pmf& pmf, const std::map<Count, Rat>& expected) {
    if (pmf.entries().size() != expected.size()) return false;
    for (const auto& [v, m] : expected)
        if (pmf.at(v) != m) return false;
    return true;
}

// Convenience literal: {{2, {1,6}}, {5, {1,3}}} -> pmf.
inline Pmf make_pmf(const std::vector<std::pair<Count, Rat>>& entries) {
    Pmf::Entries map;
    for (const auto& [v, m] : entries) map[Point{v}] = m;
    return Pmf::from_entries(1, std::move(map));
}

inline Rat rat_pow(const Rat& base, Count e) {
    Rat out(1);
    for (Count i = 0; i < e; ++i) out *= base;
    return out;
}

// Exact Binomial(trials, success) pmf.
inline Pmf binomial_pmf(Count trials, const Rat& success) {
    Pmf::Entries entries;
    Int choose = 1;
    for (Count y = 0; y <= trials; ++y) {
        if (y > 0) choose = choose * Int(trials - y + 1) / Int(y);
        Rat mass = Rat(choose) * rat_pow(success, y) * rat_pow(1 - success, trials - y);
        if (mass != 0) entries[Point{y}] = mass;
    }
    return Pmf::from_entries(1, std::move(entries));
}

} // namespace crndist::testing

#endif
