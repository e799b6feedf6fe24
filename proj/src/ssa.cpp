#include "crndist/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "crndist/errors.hpp"

namespace crndist {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed ^ ((stream + 1) * 0x9E3779B97F4A7C15ull);
    for (auto& word : state_) word = splitmix64(sm);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomStream::next_u64() {
    // xoshiro256**
    std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

namespace {

// Flattened reaction view for the simulator; reactions with zero net change
// cannot affect the trajectory distribution and are excluded.
struct SimReaction {
    std::vector<std::pair<std::uint32_t, Count>> source;
    std::vector<std::pair<std::uint32_t, std::int64_t>> delta;
    double rate;
};

std::vector<SimReaction> build_sim_reactions(const Crs& crs) {
    std::vector<SimReaction> sim;
    for (const auto& r : crs.reactions()) {
        SimReaction s;
        s.source = r.source.entries;
        std::map<std::uint32_t, std::int64_t> delta;
        for (const auto& [sp, n] : r.source.entries) delta[sp] -= static_cast<std::int64_t>(n);
        for (const auto& [sp, n] : r.product.entries) delta[sp] += static_cast<std::int64_t>(n);
        for (const auto& [sp, d] : delta)
            if (d != 0) s.delta.emplace_back(sp, d);
        if (s.delta.empty()) continue;
        double rate = r.rate.convert_to<double>();
        if (crs.kinetics() == Kinetics::Combinatorial)
            for (const auto& [sp, n] : s.source)
                for (Count i = 2; i <= n; ++i) rate /= static_cast<double>(i);
        s.rate = rate;
        sim.push_back(std::move(s));
    }
    return sim;
}

double sim_propensity(const SimReaction& r, const State& x) {
    double a = r.rate;
    for (const auto& [sp, n] : r.source) {
        if (x[sp] < n) return 0.0;
        for (Count i = 0; i < n; ++i) a *= static_cast<double>(x[sp] - i);
    }
    return a;
}

enum class StopReason { Quiescent, TimeCap, StepCap };

StopReason run_trial(const std::vector<SimReaction>& sim, State& x, RandomStream& rng,
                     double t_max, std::uint64_t step_cap) {
    double t = 0.0;
    std::vector<double> a(sim.size());
    for (std::uint64_t step = 0; step < step_cap; ++step) {
        double total = 0.0;
        for (std::size_t i = 0; i < sim.size(); ++i) {
            a[i] = sim_propensity(sim[i], x);
            total += a[i];
        }
        if (total == 0.0) return StopReason::Quiescent;
        t += -std::log1p(-rng.next_unit()) / total;
        if (t > t_max) return StopReason::TimeCap;
        double pick = rng.next_unit() * total;
        std::size_t chosen = sim.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < sim.size(); ++i) {
            acc += a[i];
            if (pick < acc) {
                chosen = i;
                break;
            }
        }
        for (const auto& [sp, d] : sim[chosen].delta)
            x[sp] = static_cast<Count>(static_cast<std::int64_t>(x[sp]) + d);
    }
    return StopReason::StepCap;
}

} // namespace

TrajectoryStats ssa_run(const Crs& crs, const SsaOptions& options) {
    if (options.trials < 1) throw Error("ssa requires at least one trial");
    auto sim = build_sim_reactions(crs);

    struct Partial {
        std::map<std::uint32_t, std::map<Count, std::uint64_t>> histograms;
        std::uint64_t quiescent = 0, time_capped = 0, step_capped = 0;
    };

    unsigned threads = std::max(1u, options.threads);
    threads = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, options.trials));
    std::vector<Partial> partials(threads);

    auto worker = [&](unsigned tid) {
        Partial& p = partials[tid];
        for (std::uint64_t trial = tid; trial < options.trials; trial += threads) {
            RandomStream rng(options.seed, trial);
            State x = crs.initial();
            StopReason reason = run_trial(sim, x, rng, options.t_max, options.step_cap);
            switch (reason) {
            case StopReason::Quiescent: ++p.quiescent; break;
            case StopReason::TimeCap: ++p.time_capped; break;
            case StopReason::StepCap: ++p.step_capped; break;
            }
            for (std::uint32_t s : crs.outputs()) ++p.histograms[s][x[s]];
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned tid = 0; tid < threads; ++tid) pool.emplace_back(worker, tid);
        for (auto& th : pool) th.join();
    }

    TrajectoryStats stats;
    stats.trials = options.trials;
    stats.seed = options.seed;
    for (std::uint32_t s : crs.outputs()) stats.histograms[crs.species_name(s)];
    for (const auto& p : partials) {
        stats.quiescent += p.quiescent;
        stats.time_capped += p.time_capped;
        stats.step_capped += p.step_capped;
        for (const auto& [s, hist] : p.histograms)
            for (const auto& [value, count] : hist)
                stats.histograms[crs.species_name(s)][value] += count;
    }
    return stats;
}

std::map<Count, double> ssa_occupation(const Crs& crs, const std::string& species,
                                       std::uint64_t seed, std::uint64_t min_events,
                                       double burn_in_fraction) {
    if (burn_in_fraction < 0.0 || burn_in_fraction >= 1.0)
        throw Error("burn-in fraction must lie in [0,1)");
    std::uint32_t target = crs.species_index(species);
    auto sim = build_sim_reactions(crs);

    std::uint64_t events = std::max<std::uint64_t>(min_events, 1);
    std::uint64_t burn_in = static_cast<std::uint64_t>(
        std::floor(burn_in_fraction * static_cast<double>(events)));

    RandomStream rng(seed, 0);
    State x = crs.initial();
    std::map<Count, double> occupancy;
    std::vector<double> a(sim.size());
    double recorded = 0.0;

    for (std::uint64_t step = 0; step < events; ++step) {
        double total = 0.0;
        for (std::size_t i = 0; i < sim.size(); ++i) {
            a[i] = sim_propensity(sim[i], x);
            total += a[i];
        }
        if (total == 0.0) return {{x[target], 1.0}}; // absorbed
        double dt = -std::log1p(-rng.next_unit()) / total;
        if (step >= burn_in) {
            occupancy[x[target]] += dt;
            recorded += dt;
        }
        double pick = rng.next_unit() * total;
        std::size_t chosen = sim.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < sim.size(); ++i) {
            acc += a[i];
            if (pick < acc) {
                chosen = i;
                break;
            }
        }
        for (const auto& [sp, d] : sim[chosen].delta)
            x[sp] = static_cast<Count>(static_cast<std::int64_t>(x[sp]) + d);
    }
    for (auto& [value, weight] : occupancy) weight /= recorded;
    return occupancy;
}

} // namespace crndist
