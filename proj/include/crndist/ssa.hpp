#ifndef CRNDIST_SSA_HPP
#define CRNDIST_SSA_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <string>

#include "crndist/crn.hpp"

namespace crndist {

// Gillespie direct-method options. Trial i draws from an independent stream
// derived from (seed, i), so results are reproducible bit-for-bit for a
// fixed (seed, trials) pair regardless of thread count.
struct SsaOptions {
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    double t_max = std::numeric_limits<double>::infinity();
    std::uint64_t step_cap = 100'000'000;
    unsigned threads = 1;
};

struct TrajectoryStats {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    // Final molecule counts of each output species, histogrammed over trials.
    std::map<std::string, std::map<Count, std::uint64_t>> histograms;
    std::uint64_t quiescent = 0;
    std::uint64_t time_capped = 0;
    std::uint64_t step_capped = 0;
};

TrajectoryStats ssa_run(const Crs& crs, const SsaOptions& options);

// Occupation-time estimate of the long-run distribution of one species from
// a single trajectory: holding times are accumulated per molecule count over
// at least `min_events` jump events, after discarding the burn-in prefix.
// Intended for irreducible (never-quiescent) networks; if the trajectory
// quiesces the absorbed state is reported as a point mass.
std::map<Count, double> ssa_occupation(const Crs& crs, const std::string& species,
                                       std::uint64_t seed, std::uint64_t min_events,
                                       double burn_in_fraction = 0.1);

// Counter-seeded xoshiro256** stream; exposed for tests of the determinism
// contract. Stream i for master seed s starts from SplitMix64 state
// s XOR (i+1)*0x9E3779B97F4A7C15.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next_u64();
    double next_unit(); // uniform in [0, 1)

private:
    std::uint64_t state_[4];
};

} // namespace crndist

#endif
