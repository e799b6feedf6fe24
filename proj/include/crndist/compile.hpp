#ifndef CRNDIST_COMPILE_HPP
#define CRNDIST_COMPILE_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crndist/analysis.hpp"
#include "crndist/crn.hpp"
#include "crndist/formula.hpp"
#include "crndist/pmf.hpp"

namespace crndist {

// The single output species of every compiled network.
inline const std::string kOut = "Out";

struct CompileOptions {
    // Encode branch weights in molecule counts with unit rates instead of in
    // the rates (direct compilation only).
    bool rate_free = false;
    // Fast/slow rate ratio for the external-variable convex combination; the
    // compiled network's error vanishes as rho grows.
    Rat rho = Rat(1'000'000);
    // Forwarded to analyses of the compiled network.
    std::uint64_t state_cap_hint = kDefaultStateCap;
};

// Provenance notes accumulated during translation, for the emitted manifest.
struct CompileMeta {
    std::vector<std::string> leaders;
    std::vector<Int> scale_factors; // K chosen by each external-choice node
    std::optional<Rat> rho;         // present iff some node is rho-dependent
    Rat mass_lost = Rat(0);
};

struct Compiled {
    Crs crs;
    CompileMeta meta;
};

// Branch-per-support-point network: a leader molecule picks support point
// z_i with probability f(z_i), after which a catalytic transfer empties the
// value species (initialized at z_i) into the output.
Crs compile_direct(const Pmf& f);

// Same shape with all rates 1: branch weights become initial counts
// f(z_i) * L of auxiliary species consumed together with the leader, where L
// clears every denominator.
Crs compile_direct_ratefree(const Pmf& f);

// Multidimensional variant: the chosen branch drives one transfer per
// dimension, so the joint limit distribution of Out1..Outm equals f.
Crs compile_joint(const Pmf& f);

// Truncates an infinite tail to lost mass < epsilon and compiles the kept
// points; the lost mass drives a branch into a non-output sink, so kept
// points keep their exact probabilities.
std::pair<Crs, Rat> compile_truncated(TailGen tail, const Rat& epsilon);

// Optimized special-distribution networks. Their outputs react, so they are
// flagged non-composable and rejected by the operators below.
Crs special_poisson(const Rat& k1, const Rat& k2);
Crs special_binomial(Count capacity, const Rat& k1, const Rat& k2);
Crs special_uniform(Count capacity, const Rat& k);
Crs special_uniform(Count capacity, const Rat& k, Count first);

// Composition operators over disjoint copies of NRO inputs (operands are
// prefixed `l.`/`r.` automatically). Each returns a network whose single
// output species Out realizes the corresponding pmf operation at steady
// state.
Crs op_sum(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2);
Crs op_min(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2);
Crs op_mul(const Crs& c, const std::string& o, Count k1);
Crs op_div(const Crs& c, const std::string& o, Count k2);
Crs op_con(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2,
           const Rat& p);
Crs op_conE(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2,
            const DExpr& d, const Environment& env, const CompileOptions& opts = {});

// Structural translation of a formula into an NRO network with output Out.
// Without external-variable choice nodes the steady-state marginal of Out
// equals eval(f, env) exactly; with them, within an error that shrinks as
// opts.rho grows.
Compiled translate(const Formula& f, const Environment& env, const CompileOptions& opts = {});

} // namespace crndist

#endif
