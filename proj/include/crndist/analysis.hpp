#ifndef CRNDIST_ANALYSIS_HPP
#define CRNDIST_ANALYSIS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crndist/crn.hpp"
#include "crndist/pmf.hpp"

namespace crndist {

inline constexpr std::uint64_t kDefaultStateCap = 1'000'000;

// Reachable fragment of the CTMC: states in BFS discovery order from the
// initial condition (successors of a state visited in lexicographic order),
// transitions aggregated per (from, to) pair with exact rates. Self-loop
// reactions do not alter the state distribution and are dropped.
struct StateSpace {
    Crs crs;
    std::vector<State> states;
    std::vector<std::vector<std::pair<std::uint32_t, Rat>>> edges;
    std::uint32_t initial = 0;
    std::uint64_t cap_used = 0;
};

// BFS closure of the initial state; throws StateCapExceeded past `cap`.
StateSpace explore(const Crs& crs, std::uint64_t cap = kDefaultStateCap);

// Bottom strongly connected components (no edge leaves the set), each as a
// sorted list of state indices; components ordered by smallest member.
std::vector<std::vector<std::uint32_t>> bsccs(const StateSpace& space);

enum class SolveMethod {
    ExactRationalAbsorption, // every BSCC is a single quiescent state
    ExactRationalStationary, // some BSCC needed an exact stationary solve
    FloatStationary,         // at least one BSCC fell back to the float solver
};

std::string method_name(SolveMethod m);

// Limit distribution of the chain started in the initial state, decomposed
// as absorption probability per BSCC times the stationary distribution
// within it. Absorption probabilities are always exact (embedded jump-chain
// branch ratios are rational); stationary solves are exact up to
// `exact_cutoff` states per component.
struct SteadyReport {
    bool exact = true;
    std::map<std::uint32_t, Rat> dist;      // filled on the exact path
    std::map<std::uint32_t, double> dist_f; // always filled
    std::vector<std::vector<std::uint32_t>> bscc_list;
    std::vector<Rat> bscc_mass;
    SolveMethod method = SolveMethod::ExactRationalAbsorption;
    double residual = 0.0;
};

SteadyReport steady_state(const StateSpace& space, std::size_t exact_cutoff = 2000);

// Exact per-species steady-state pmf; requires the exact path.
Pmf species_marginal(const StateSpace& space, const SteadyReport& report,
                     const std::string& name);

// Same projection from the float distribution (also usable on exact reports).
std::map<Count, double> species_marginal_float(const StateSpace& space,
                                               const SteadyReport& report,
                                               const std::string& name);

// Marginals of every output species.
std::map<std::string, Pmf> output_marginals(const StateSpace& space, const SteadyReport& report);

// Joint pmf of several species (dimension = names.size()).
Pmf joint_marginal(const StateSpace& space, const SteadyReport& report,
                   const std::vector<std::string>& names);

struct Comparison {
    Rat l1;
    Rat ratio;
};

// Both distance measures between exact pmfs.
Comparison compare(const Pmf& a, const Pmf& b);

struct ComparisonF {
    double l1;
    double ratio;
};

// L1 and ratio closeness of an exact pmf against an empirical one.
ComparisonF compare_empirical(const Pmf& exact, const std::map<Count, double>& empirical);

} // namespace crndist

#endif
