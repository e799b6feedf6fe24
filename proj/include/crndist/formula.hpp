#ifndef CRNDIST_FORMULA_HPP
#define CRNDIST_FORMULA_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "crndist/pmf.hpp"
#include "crndist/rational.hpp"

namespace crndist {

// Environment for the choice weights: variable name -> value in [0,1].
using Environment = std::map<std::string, Rat>;

void validate_environment(const Environment& env);

struct DTerm {
    Rat coeff;
    std::string var;
};

// Affine weight expression `p + p1*c1 + ... + pn*cn`. The constant and every
// coefficient lie in [0,1] and their total is at most 1, so the expression
// evaluates into [0,1] for any environment.
class DExpr {
public:
    DExpr(Rat constant, std::vector<DTerm> terms);
    explicit DExpr(Rat constant) : DExpr(std::move(constant), {}) {}

    const Rat& constant() const { return constant_; }
    const std::vector<DTerm>& terms() const { return terms_; }
    bool is_constant() const { return terms_.empty(); }

    Rat eval(const Environment& env) const;
    std::set<std::string> vars() const;

    bool operator==(const DExpr& other) const;

private:
    Rat constant_;
    std::vector<DTerm> terms_;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable formula tree of the distribution calculus.
class Formula {
public:
    enum class Kind { One, Zero, Sum, Min, Scale, Choice };

    static FormulaPtr one();
    static FormulaPtr zero();
    static FormulaPtr sum(FormulaPtr lhs, FormulaPtr rhs);
    static FormulaPtr min(FormulaPtr lhs, FormulaPtr rhs);
    static FormulaPtr scale(Rat k, FormulaPtr body);
    static FormulaPtr choice(FormulaPtr lhs, DExpr weight, FormulaPtr rhs);

    Kind kind() const { return kind_; }
    const FormulaPtr& lhs() const { return lhs_; }
    const FormulaPtr& rhs() const { return rhs_; }
    const Rat& coefficient() const { return k_; }
    const DExpr& weight() const { return weight_; }

private:
    Formula(Kind kind, FormulaPtr lhs, FormulaPtr rhs, Rat k, DExpr weight)
        : kind_(kind), lhs_(std::move(lhs)), rhs_(std::move(rhs)),
          k_(std::move(k)), weight_(std::move(weight)) {}

    Kind kind_;
    FormulaPtr lhs_, rhs_;
    Rat k_;
    DExpr weight_{Rat(0)};
};

bool structurally_equal(const Formula& a, const Formula& b);

// Concrete syntax:
//   one | zero | P + P | min(P, P) | k*P | (P)_[D]:(P)
// with k a rational (`a/b`, integer, or decimal) and
// D = `p` or a `+`-separated list of `p*var` terms with an optional trailing
// constant. `*` binds tighter than `+`; `#` starts a comment.
FormulaPtr parse_formula(const std::string& text);
std::string formula_to_text(const Formula& f);

std::set<std::string> free_vars(const Formula& f);

// Exact semantics; requires free_vars(f) to be bound in env.
Pmf eval(const Formula& f, const Environment& env);

// Builds a nested-choice formula over `z*one` atoms whose evaluation equals
// the given dim-1 pmf exactly. Support points are taken in ascending order.
FormulaPtr encode_pmf(const Pmf& f);

} // namespace crndist

#endif
