#ifndef CRNDIST_TESTS_FORMULA_GEN_HPP
#define CRNDIST_TESTS_FORMULA_GEN_HPP

#include <random>
#include <string>
#include <vector>

#include "crndist/formula.hpp"

namespace crndist::testing {

struct FormulaGenOptions {
    int max_depth = 4;
    int max_constant = 6;      // bound on scale numerators and denominators
    bool allow_variables = false;
    std::vector<std::string> variables;
    // Resample whenever the evaluated support exceeds this value, to keep the
    // compiled state spaces at desk scale.
    Count max_support_value = 60;
};

inline FormulaPtr random_formula_node(std::mt19937_64& rng, int depth,
                                      const FormulaGenOptions& opt) {
    std::uniform_int_distribution<int> leaf(0, 1);
    if (depth <= 0) return leaf(rng) ? Formula::one() : Formula::zero();

    std::uniform_int_distribution<int> pick(0, opt.allow_variables ? 6 : 5);
    switch (pick(rng)) {
    case 0:
        return Formula::one();
    case 1:
        return Formula::zero();
    case 2:
        return Formula::sum(random_formula_node(rng, depth - 1, opt),
                            random_formula_node(rng, depth - 1, opt));
    case 3:
        return Formula::min(random_formula_node(rng, depth - 1, opt),
                            random_formula_node(rng, depth - 1, opt));
    case 4: {
        std::uniform_int_distribution<int> num(0, opt.max_constant);
        std::uniform_int_distribution<int> den(1, opt.max_constant);
        return Formula::scale(Rat(num(rng), den(rng)),
                              random_formula_node(rng, depth - 1, opt));
    }
    case 5: {
        std::uniform_int_distribution<int> den(1, 9);
        int d = den(rng);
        std::uniform_int_distribution<int> num(0, d);
        return Formula::choice(random_formula_node(rng, depth - 1, opt),
                               DExpr(Rat(num(rng), d)),
                               random_formula_node(rng, depth - 1, opt));
    }
    default: {
        // One-variable affine weight with small denominators.
        std::uniform_int_distribution<std::size_t> var(0, opt.variables.size() - 1);
        std::uniform_int_distribution<int> c_num(0, 2);
        std::uniform_int_distribution<int> p_num(0, 1);
        Rat coeff(c_num(rng), 4);
        Rat constant(p_num(rng), 2);
        if (constant + coeff > 1) constant = 1 - coeff;
        std::vector<DTerm> terms{DTerm{coeff, opt.variables[var(rng)]}};
        return Formula::choice(random_formula_node(rng, depth - 1, opt),
                               DExpr(constant, std::move(terms)),
                               random_formula_node(rng, depth - 1, opt));
    }
    }
}

inline Count max_support_value(const Pmf& f) {
    Count best = 0;
    for (const auto& [point, mass] : f.entries())
        for (Count v : point) best = std::max(best, v);
    return best;
}

inline FormulaPtr random_formula(std::mt19937_64& rng, const FormulaGenOptions& opt,
                                 const Environment& env) {
    while (true) {
        FormulaPtr f = random_formula_node(rng, opt.max_depth, opt);
        if (max_support_value(eval(*f, env)) <= opt.max_support_value) return f;
    }
}

} // namespace crndist::testing

#endif
