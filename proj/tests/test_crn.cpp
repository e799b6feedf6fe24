#include "doctest.h"

#include <random>

#include "crndist/compile.hpp"
#include "crndist/crn.hpp"
#include "crndist/errors.hpp"
#include "support.hpp"

using namespace crndist;
using namespace crndist::testing;

namespace {

Crs two_species_net() {
    Crs crs;
    crs.add_species("A", 2);
    crs.add_species("B", 3);
    crs.add_species("Y", 0);
    crs.add_reaction({{"A", 1}, {"B", 1}}, {{"Y", 1}}, Rat(1));
    return crs;
}

} // namespace

TEST_CASE("mass-action propensities") {
    Crs crs = two_species_net();
    const Reaction& r = crs.reactions()[0];
    CHECK(propensity(crs, r, State{2, 3, 0}) == Rat(6));
    CHECK(propensity(crs, r, State{0, 3, 0}) == Rat(0));

    Crs unary;
    unary.add_species("A", 5);
    unary.add_reaction({{"A", 1}}, {}, Rat(2));
    CHECK(propensity(unary, unary.reactions()[0], State{5}) == Rat(10));

    Crs pair;
    pair.add_species("A", 4);
    pair.add_species("Y", 0);
    pair.add_reaction({{"A", 2}}, {{"Y", 1}}, Rat(1));
    // Falling factorial 4*3, no symmetry division by default.
    CHECK(propensity(pair, pair.reactions()[0], State{4, 0}) == Rat(12));
    pair.set_kinetics(Kinetics::Combinatorial);
    CHECK(propensity(pair, pair.reactions()[0], State{4, 0}) == Rat(6));

    Crs birth;
    birth.add_species("P", 0);
    birth.add_reaction({}, {{"P", 1}}, Rat(5));
    CHECK(propensity(birth, birth.reactions()[0], State{0}) == Rat(5));
}

TEST_CASE("enabled reactions") {
    Crs none;
    none.add_species("A", 1);
    CHECK(enabled(none, State{1}).empty());

    // Branch-per-point network: only the leader races fire initially.
    Pmf f = make_pmf({{2, Rat(1, 6)}, {5, Rat(1, 3)}, {10, Rat(1, 2)}});
    Crs compiled = compile_direct(f);
    auto on = enabled(compiled, compiled.initial());
    CHECK(on.size() == 3);
    for (std::size_t i : on)
        CHECK(compiled.reactions()[i].source.entries[0].first ==
              compiled.species_index("Z"));

    Crs uniform = special_uniform(4, Rat(1));
    auto first = enabled(uniform, uniform.initial()); // state (4,0)
    CHECK(first == std::vector<std::size_t>{0});
}

TEST_CASE("applying reactions") {
    Crs crs;
    crs.add_species("Z", 1);
    crs.add_species("A11", 0);
    crs.add_reaction({{"Z", 1}}, {{"A11", 1}}, Rat(1, 6));
    State next = apply(crs, crs.reactions()[0], State{1, 0});
    CHECK(next == State{0, 1});
    CHECK_THROWS_AS(apply(crs, crs.reactions()[0], State{0, 1}), NotEnabled);

    Crs cat;
    cat.add_species("A", 2);
    cat.add_species("A11", 1);
    cat.add_species("Out", 0);
    cat.add_reaction({{"A", 1}, {"A11", 1}}, {{"A11", 1}, {"Out", 1}}, Rat(1));
    CHECK(apply(cat, cat.reactions()[0], State{2, 1, 0}) == State{1, 1, 1});

    Crs identity;
    identity.add_species("A", 1);
    identity.add_reaction({{"A", 1}}, {{"A", 1}}, Rat(1));
    CHECK(apply(identity, identity.reactions()[0], State{1}) == State{1});
}

TEST_CASE("non-reacting output classification") {
    Pmf f = make_pmf({{2, Rat(1, 6)}, {5, Rat(1, 3)}, {10, Rat(1, 2)}});
    CHECK(is_nro(compile_direct(f)));

    Crs bad;
    bad.add_species("Out", 0);
    bad.add_species("X", 1);
    bad.add_species("Y", 0);
    bad.add_reaction({{"Out", 1}, {"X", 1}}, {{"Y", 1}}, Rat(1));
    bad.mark_output("Out");
    auto witness = nro_violation(bad);
    REQUIRE(witness.has_value());
    CHECK(witness->species == "Out");
    CHECK(witness->reaction == 0);

    Crs uniform = special_uniform(3, Rat(1));
    CHECK_FALSE(is_nro(uniform)); // U1 is both an output and a reactant
}

TEST_CASE("renaming is exact and involutive") {
    Pmf f = make_pmf({{2, Rat(1, 2)}, {3, Rat(1, 2)}});
    Crs crs = compile_direct(f);
    Crs renamed = rename_species(crs, "o1", "Out");
    CHECK(renamed.has_species("o1"));
    CHECK_FALSE(renamed.has_species("Out"));
    CHECK(renamed.reactions().size() == crs.reactions().size());
    CHECK(renamed.is_output(renamed.species_index("o1")));
    CHECK(is_nro(renamed));

    Crs back = rename_species(renamed, "Out", "o1");
    CHECK(back == crs);

    CHECK_THROWS_AS(rename_species(crs, "Z", "Out"), NotFresh);
    CHECK_THROWS_AS(rename_species(crs, "Fresh", "Missing"), UnknownSpecies);
}

TEST_CASE("marginal projection") {
    // Point distribution.
    CHECK(marginal({{State{7, 1}, Rat(1)}}, 0) == Pmf::point_mass(Count(7)));

    // Uniform over the anti-diagonal states (K - j, j).
    std::vector<std::pair<State, Rat>> uniform;
    const Count k = 4;
    for (Count j = 0; j <= k; ++j) uniform.emplace_back(State{k - j, j}, Rat(1, 5));
    Pmf m0 = marginal(uniform, 0);
    Pmf m1 = marginal(uniform, 1);
    CHECK(m0 == m1);
    for (Count y = 0; y <= k; ++y) CHECK(m0.at(y) == Rat(1, 5));

    // Mass aggregation across states with equal counts.
    CHECK(marginal({{State{3, 0}, Rat(1, 2)}, {State{3, 5}, Rat(1, 2)}}, 0) ==
          Pmf::point_mass(Count(3)));

    CHECK_THROWS_AS(marginal({{State{1}, Rat(1, 2)}}, 0), NotNormalized);
}

TEST_CASE("uniform network conserves total count") {
    Crs uniform = special_uniform(6, Rat(1), 4); // split (4,2)
    State x = uniform.initial();
    std::mt19937_64 rng(99);
    for (int step = 0; step < 200; ++step) {
        auto on = enabled(uniform, x);
        if (on.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, on.size() - 1);
        x = apply(uniform, uniform.reactions()[on[pick(rng)]], x);
        CHECK(x[0] + x[1] == 6);
    }
}

TEST_CASE("output counts never influence propensities of an NRO network") {
    Pmf f = make_pmf({{1, Rat(1, 4)}, {4, Rat(3, 4)}});
    Crs crs = op_sum(compile_direct(f), "Out", compile_direct(f), "Out");
    REQUIRE(is_nro(crs));
    std::uint32_t out = crs.species_index("Out");

    std::mt19937_64 rng(2024);
    State x = crs.initial();
    for (int step = 0; step < 50; ++step) {
        State bumped = x;
        bumped[out] += 17;
        for (const auto& r : crs.reactions())
            CHECK(propensity(crs, r, x) == propensity(crs, r, bumped));
        auto on = enabled(crs, x);
        if (on.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, on.size() - 1);
        x = apply(crs, crs.reactions()[on[pick(rng)]], x);
    }
}

TEST_CASE("CRN text format round-trips") {
    const char* text =
        "# a comment\n"
        "species A, Z, Out\n"
        "init A = 3\n"
        "init Z = 1\n"
        "rxn Z -> A @ 1/6\n"
        "rxn A + Z -> Z + Out\n"
        "rxn 2 A -> Out @ 1\n"
        "rxn Z -> 0\n"
        "output Out\n";
    Crs crs = parse_crn(text);
    CHECK(crs.species_count() == 3);
    CHECK(crs.initial()[crs.species_index("A")] == 3);
    CHECK(crs.reactions().size() == 4);
    CHECK(crs.reactions()[0].rate == Rat(1, 6));
    CHECK(crs.reactions()[1].rate == Rat(1)); // omitted rate defaults to 1
    CHECK(crs.reactions()[2].source.multiplicity(crs.species_index("A")) == 2);
    CHECK(crs.reactions()[3].product.entries.empty());
    CHECK(crs.outputs().size() == 1);

    Crs again = parse_crn(crn_to_text(crs));
    CHECK(again == crs);

    // Compiled networks round-trip as well (manifest comments are ignored).
    Pmf f = make_pmf({{2, Rat(1, 6)}, {5, Rat(1, 3)}, {10, Rat(1, 2)}});
    Crs compiled = compile_direct(f);
    CrnManifest manifest;
    manifest.add("outputs", "Out");
    CHECK(parse_crn(crn_to_text(compiled, &manifest)) == compiled);

    CHECK_THROWS_AS(parse_crn("rxn A -> B\n"), UnknownSpecies);
    CHECK_THROWS_AS(parse_crn("species A\ninit A = x\n"), SyntaxError);
    CHECK_THROWS_AS(parse_crn("species A\nrxn A -> 0 @ 0\n"), SyntaxError);
    CHECK_THROWS_AS(parse_crn("species A, A\n"), SyntaxError);
}

TEST_CASE("kinetics directive survives the format round-trip") {
    Crs crs = parse_crn("species A, Y\ninit A = 4\nrxn 2 A -> Y\nkinetics combinatorial\n");
    CHECK(crs.kinetics() == Kinetics::Combinatorial);
    CHECK(propensity(crs, crs.reactions()[0], State{4, 0}) == Rat(6));
    Crs again = parse_crn(crn_to_text(crs));
    CHECK(again == crs);
    CHECK(again.kinetics() == Kinetics::Combinatorial);
}

TEST_CASE("species names") {
    CHECK(valid_species_name("A"));
    CHECK(valid_species_name("l.r.Out"));
    CHECK(valid_species_name("A1'"));
    CHECK(valid_species_name("_x"));
    CHECK_FALSE(valid_species_name(""));
    CHECK_FALSE(valid_species_name("1A"));
    CHECK_FALSE(valid_species_name("a b"));
    CHECK_FALSE(valid_species_name(".x"));
}
