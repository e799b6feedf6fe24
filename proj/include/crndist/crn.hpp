#ifndef CRNDIST_CRN_HPP
#define CRNDIST_CRN_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crndist/pmf.hpp"
#include "crndist/rational.hpp"

namespace crndist {

// Molecule counts per species, indexed in species declaration order.
using State = std::vector<Count>;

// Propensity convention for reactions with repeated reactants: the literal
// falling factorial x!/(x-r)!, or the combinatorial form divided by r!.
enum class Kinetics { FallingFactorial, Combinatorial };

// A multiset of species: (species index, multiplicity), sorted by index.
struct Complex {
    std::vector<std::pair<std::uint32_t, Count>> entries;

    Count multiplicity(std::uint32_t species) const;
    bool operator==(const Complex&) const = default;
};

struct Reaction {
    Complex source;
    Complex product;
    Rat rate; // strictly positive

    bool operator==(const Reaction&) const = default;
};

// Reaction system: named species with initial counts, reactions, and a
// (possibly empty) set of output species.
class Crs {
public:
    std::uint32_t add_species(const std::string& name, Count initial = 0);
    void set_initial(const std::string& name, Count count);
    void add_reaction(const std::map<std::string, Count>& source,
                      const std::map<std::string, Count>& product, Rat rate = Rat(1));
    void mark_output(const std::string& name);

    std::size_t species_count() const { return species_.size(); }
    const std::vector<std::string>& species() const { return species_; }
    const std::string& species_name(std::uint32_t i) const { return species_[i]; }
    std::uint32_t species_index(const std::string& name) const;
    bool has_species(const std::string& name) const { return index_.count(name) > 0; }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const State& initial() const { return initial_; }
    const std::vector<std::uint32_t>& outputs() const { return outputs_; }
    bool is_output(std::uint32_t species) const;

    Kinetics kinetics() const { return kinetics_; }
    void set_kinetics(Kinetics k) { kinetics_ = k; }

    // Cleared by the optimized special-distribution networks, whose outputs
    // react and therefore cannot feed the composition operators.
    bool composable() const { return composable_; }
    void set_composable(bool c) { composable_ = c; }

    bool operator==(const Crs&) const = default;

private:
    std::vector<std::string> species_;
    std::map<std::string, std::uint32_t> index_;
    std::vector<Reaction> reactions_;
    State initial_;
    std::vector<std::uint32_t> outputs_; // sorted
    Kinetics kinetics_ = Kinetics::FallingFactorial;
    bool composable_ = true;
};

bool valid_species_name(const std::string& name);

// Mass-action propensity; 0 whenever some reactant count is below its
// stoichiometry.
Rat propensity(const Crs& crs, const Reaction& r, const State& x);

// Indices of reactions with positive propensity at x.
std::vector<std::size_t> enabled(const Crs& crs, const State& x);

// x + (product - source); requires the reaction to be enabled at x.
State apply(const Crs& crs, const Reaction& r, const State& x);

struct NroViolation {
    std::string species;
    std::size_t reaction;
};

// Empty when no output species occurs in any source complex.
std::optional<NroViolation> nro_violation(const Crs& crs);
bool is_nro(const Crs& crs);

// Substitutes every occurrence of `old_name` (complexes, initial condition,
// output set) with the previously absent `fresh`.
Crs rename_species(const Crs& crs, const std::string& fresh, const std::string& old_name);

// Projects a distribution over states onto one species.
Pmf marginal(const std::vector<std::pair<State, Rat>>& dist, std::uint32_t species);

// Extra key/value lines emitted as comments at the top of a CRN file.
struct CrnManifest {
    std::vector<std::pair<std::string, std::string>> fields;
    void add(std::string key, std::string value) {
        fields.emplace_back(std::move(key), std::move(value));
    }
};

// Text format:
//   species A, Z, Out
//   init A = 3
//   rxn Z -> A11 @ 1/6
//   rxn 2 X -> Y        # rate defaults to 1; `0` denotes the empty complex
//   output Out
Crs parse_crn(const std::string& text);
std::string crn_to_text(const Crs& crs, const CrnManifest* manifest = nullptr);

} // namespace crndist

#endif
