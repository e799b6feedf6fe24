#include "doctest.h"

#include "crndist/errors.hpp"
#include "crndist/formula.hpp"
#include "formula_gen.hpp"
#include "support.hpp"

using namespace crndist;
using namespace crndist::testing;

TEST_CASE("parsing atoms and choices") {
    CHECK(parse_formula("one")->kind() == Formula::Kind::One);
    CHECK(parse_formula(" zero # trailing comment\n")->kind() == Formula::Kind::Zero);

    FormulaPtr bern = parse_formula("(one)_[1/3]:(zero)");
    REQUIRE(bern->kind() == Formula::Kind::Choice);
    CHECK(bern->lhs()->kind() == Formula::Kind::One);
    CHECK(bern->rhs()->kind() == Formula::Kind::Zero);
    CHECK(bern->weight().constant() == Rat(1, 3));
    CHECK(bern->weight().is_constant());

    FormulaPtr p1 = parse_formula(
        "(one)_[1/1000*c + 1/5]:(4*one) + (2*one)_[2/5]:(3*one)");
    REQUIRE(p1->kind() == Formula::Kind::Sum);
    REQUIRE(p1->lhs()->kind() == Formula::Kind::Choice);
    const DExpr& d = p1->lhs()->weight();
    CHECK(d.constant() == Rat(1, 5));
    REQUIRE(d.terms().size() == 1);
    CHECK(d.terms()[0].coeff == Rat(1, 1000));
    CHECK(d.terms()[0].var == "c");
    CHECK(p1->rhs()->kind() == Formula::Kind::Choice);
}

TEST_CASE("decimal literals convert exactly") {
    FormulaPtr f = parse_formula("(one)_[0.2]:(zero)");
    CHECK(f->weight().constant() == Rat(1, 5));
    FormulaPtr g = parse_formula("0.25*one");
    CHECK(g->coefficient() == Rat(1, 4));
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_formula("(one"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("one + "), SyntaxError);
    CHECK_THROWS_AS(parse_formula("two"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("one zero"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("min(one)"), SyntaxError);
    // Weight sum above 1 violates the D constraint.
    CHECK_THROWS_AS(parse_formula("(one)_[1/2*a + 2/3]:(zero)"), InvalidWeight);
    CHECK_THROWS_AS(parse_formula("(one)_[3/2]:(zero)"), InvalidWeight);
    CHECK_THROWS_AS(parse_formula("(one)_[1/2*a + 1/3*a]:(zero)"), InvalidWeight);
}

TEST_CASE("free variables") {
    CHECK(free_vars(*parse_formula("one")).empty());
    auto p1 = parse_formula("(one)_[1/1000*c + 1/5]:(4*one) + (2*one)_[2/5]:(3*one)");
    CHECK(free_vars(*p1) == std::set<std::string>{"c"});
    auto two = parse_formula("(one)_[1/2*a + 1/4*b + 0]:(zero)");
    CHECK(free_vars(*two) == std::set<std::string>{"a", "b"});
}

TEST_CASE("evaluation follows the semantics") {
    Environment empty;
    CHECK(eval(*parse_formula("one"), empty) == Pmf::point_mass(Count(1)));
    CHECK(eval(*parse_formula("zero"), empty) == Pmf::point_mass(Count(0)));
    CHECK(eval(*parse_formula("(one)_[1/3]:(zero)"), empty) ==
          make_pmf({{1, Rat(1, 3)}, {0, Rat(2, 3)}}));

    auto p1 = parse_formula("(one)_[1/1000*c + 1/5]:(4*one) + (2*one)_[2/5]:(3*one)");
    Environment env{{"c", Rat(1, 2)}};
    CHECK(eval(*p1, env) == make_pmf({{3, Rat(401, 5000)},
                                      {4, Rat(1203, 10000)},
                                      {6, Rat(1599, 5000)},
                                      {7, Rat(4797, 10000)}}));

    CHECK_THROWS_AS(eval(*p1, empty), UnboundVariable);
}

TEST_CASE("environment values outside [0,1] are rejected") {
    CHECK_THROWS_AS(validate_environment(Environment{{"c", Rat(3, 2)}}),
                    ProbabilityOutOfRange);
}

TEST_CASE("printer and parser round-trip") {
    const char* samples[] = {
        "one",
        "zero",
        "min(one, zero)",
        "2*one + 3*one",
        "3/2*(one + zero)",
        "(one)_[1/3]:(zero)",
        "(one)_[1/1000*c + 1/5]:(4*one) + (2*one)_[2/5]:(3*one)",
        "2*(one)_[1/2]:(zero)",
        "min(2*one, (zero)_[1/4]:(one)) + one",
    };
    for (const char* text : samples) {
        FormulaPtr f = parse_formula(text);
        FormulaPtr again = parse_formula(formula_to_text(*f));
        CHECK(structurally_equal(*f, *again));
    }

    std::mt19937_64 rng(424242);
    FormulaGenOptions opt;
    opt.allow_variables = true;
    opt.variables = {"c", "x"};
    for (int round = 0; round < 300; ++round) {
        FormulaPtr f = random_formula_node(rng, 4, opt);
        FormulaPtr again = parse_formula(formula_to_text(*f));
        CHECK(structurally_equal(*f, *again));
    }
}

TEST_CASE("pmf encoding evaluates back to the input") {
    Pmf f = make_pmf({{2, Rat(1, 6)}, {5, Rat(1, 3)}, {10, Rat(1, 2)}});
    FormulaPtr encoded = encode_pmf(f);
    CHECK(formula_to_text(*encoded) == "(2*one)_[1/6]:((5*one)_[2/5]:(10*one))");
    CHECK(eval(*encoded, {}) == f);

    CHECK(formula_to_text(*encode_pmf(Pmf::point_mass(Count(0)))) == "0*one");
    CHECK(formula_to_text(*encode_pmf(Pmf::point_mass(Count(7)))) == "7*one");
    CHECK(eval(*encode_pmf(Pmf::point_mass(Count(7))), {}) == Pmf::point_mass(Count(7)));

    std::mt19937_64 rng(777);
    for (int round = 0; round < 500; ++round) {
        Pmf sample = random_pmf(rng, 6, 20);
        CHECK(eval(*encode_pmf(sample), {}) == sample);
    }
}

TEST_CASE("formula-level convex identities") {
    std::mt19937_64 rng(31337);
    Environment empty;
    for (int round = 0; round < 50; ++round) {
        FormulaPtr f1 = encode_pmf(random_pmf(rng));
        FormulaPtr f2 = encode_pmf(random_pmf(rng));
        Rat p = random_weight(rng);
        std::uniform_int_distribution<int> k_num(0, 4);
        std::uniform_int_distribution<int> k_den(1, 4);
        Rat k(k_num(rng), k_den(rng));

        FormulaPtr lhs = Formula::scale(k, Formula::choice(f1, DExpr(p), f2));
        FormulaPtr rhs = Formula::choice(Formula::scale(k, f1), DExpr(p),
                                         Formula::scale(k, f2));
        CHECK(eval(*lhs, empty) == eval(*rhs, empty));

        FormulaPtr sym_l = Formula::choice(f1, DExpr(p), f2);
        FormulaPtr sym_r = Formula::choice(f2, DExpr(1 - p), f1);
        CHECK(eval(*sym_l, empty) == eval(*sym_r, empty));

        CHECK(eval(*Formula::choice(f1, DExpr(p), f1), empty) == eval(*f1, empty));
    }
}

TEST_CASE("choice weight responds monotonically to the environment") {
    auto f = parse_formula("(one)_[c]:(zero)");
    Rat previous(-1);
    for (int i = 0; i <= 4; ++i) {
        Environment env{{"c", Rat(i, 4)}};
        Pmf result = eval(*f, env);
        Rat mass_at_one = result.at(Count(1));
        CHECK(mass_at_one == Rat(i, 4));
        CHECK(mass_at_one >= previous);
        previous = mass_at_one;
    }
}
