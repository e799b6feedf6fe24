#include "crndist/formula.hpp"

#include <cctype>
#include <sstream>

#include "crndist/errors.hpp"

namespace crndist {

void validate_environment(const Environment& env) {
    for (const auto& [name, value] : env)
        if (value < 0 || value > 1)
            throw ProbabilityOutOfRange("environment value " + name + "=" +
                                        rat_str(value) + " outside [0,1]");
}

DExpr::DExpr(Rat constant, std::vector<DTerm> terms)
    : constant_(std::move(constant)), terms_(std::move(terms)) {
    if (constant_ < 0 || constant_ > 1)
        throw InvalidWeight("weight constant " + rat_str(constant_) + " outside [0,1]");
    Rat total = constant_;
    std::set<std::string> seen;
    for (const auto& term : terms_) {
        if (term.coeff < 0 || term.coeff > 1)
            throw InvalidWeight("weight coefficient " + rat_str(term.coeff) +
                                " outside [0,1]");
        if (!seen.insert(term.var).second)
            throw InvalidWeight("variable " + term.var + " repeated in weight");
        total += term.coeff;
    }
    if (total > 1)
        throw InvalidWeight("weight coefficients sum to " + rat_str(total) +
                            ", must be at most 1");
}

Rat DExpr::eval(const Environment& env) const {
    Rat value = constant_;
    for (const auto& term : terms_) {
        auto it = env.find(term.var);
        if (it == env.end()) throw UnboundVariable("unbound variable " + term.var);
        value += term.coeff * it->second;
    }
    if (value < 0 || value > 1)
        throw InvalidWeight("weight evaluated to " + rat_str(value) + ", outside [0,1]");
    return value;
}

std::set<std::string> DExpr::vars() const {
    std::set<std::string> names;
    for (const auto& term : terms_) names.insert(term.var);
    return names;
}

bool DExpr::operator==(const DExpr& other) const {
    if (constant_ != other.constant_ || terms_.size() != other.terms_.size())
        return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].coeff != other.terms_[i].coeff || terms_[i].var != other.terms_[i].var)
            return false;
    return true;
}

FormulaPtr Formula::one() {
    static FormulaPtr instance(new Formula(Kind::One, nullptr, nullptr, Rat(0), DExpr(Rat(0))));
    return instance;
}

FormulaPtr Formula::zero() {
    static FormulaPtr instance(new Formula(Kind::Zero, nullptr, nullptr, Rat(0), DExpr(Rat(0))));
    return instance;
}

FormulaPtr Formula::sum(FormulaPtr lhs, FormulaPtr rhs) {
    return FormulaPtr(new Formula(Kind::Sum, std::move(lhs), std::move(rhs), Rat(0), DExpr(Rat(0))));
}

FormulaPtr Formula::min(FormulaPtr lhs, FormulaPtr rhs) {
    return FormulaPtr(new Formula(Kind::Min, std::move(lhs), std::move(rhs), Rat(0), DExpr(Rat(0))));
}

FormulaPtr Formula::scale(Rat k, FormulaPtr body) {
    if (k < 0) throw InvalidWeight("scale coefficient must be nonnegative");
    return FormulaPtr(new Formula(Kind::Scale, std::move(body), nullptr, std::move(k), DExpr(Rat(0))));
}

FormulaPtr Formula::choice(FormulaPtr lhs, DExpr weight, FormulaPtr rhs) {
    return FormulaPtr(new Formula(Kind::Choice, std::move(lhs), std::move(rhs), Rat(0), std::move(weight)));
}

bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Formula::Kind::One:
    case Formula::Kind::Zero:
        return true;
    case Formula::Kind::Sum:
    case Formula::Kind::Min:
        return structurally_equal(*a.lhs(), *b.lhs()) && structurally_equal(*a.rhs(), *b.rhs());
    case Formula::Kind::Scale:
        return a.coefficient() == b.coefficient() && structurally_equal(*a.lhs(), *b.lhs());
    case Formula::Kind::Choice:
        return a.weight() == b.weight() && structurally_equal(*a.lhs(), *b.lhs()) &&
               structurally_equal(*a.rhs(), *b.rhs());
    }
    return false;
}

namespace {

struct Token {
    enum class Type { Ident, Number, Symbol, End };
    Type type = Type::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_space_and_comments();
        current_.line = line_;
        current_.col = col_;
        if (pos_ >= text_.size()) {
            current_ = Token{Token::Type::End, "", line_, col_};
            return;
        }
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string number = lex_digits();
            if (pos_ < text_.size() && (text_[pos_] == '/' || text_[pos_] == '.')) {
                number.push_back(text_[pos_]);
                bump();
                number += lex_digits();
            }
            current_ = Token{Token::Type::Number, number, current_.line, current_.col};
            return;
        }
        // '_' directly followed by '[' is the choice subscript, not an identifier.
        bool subscript = c == '_' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '[';
        if (!subscript && (std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
            std::string ident;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ident.push_back(text_[pos_]);
                bump();
            }
            current_ = Token{Token::Type::Ident, ident, current_.line, current_.col};
            return;
        }
        bump();
        current_ = Token{Token::Type::Symbol, std::string(1, c), current_.line, current_.col};
    }

    std::string lex_digits() {
        std::string out;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            out.push_back(text_[pos_]);
            bump();
        }
        if (out.empty()) throw SyntaxError("expected digits", line_, col_);
        return out;
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token current_;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    FormulaPtr parse() {
        FormulaPtr f = parse_formula();
        expect_end();
        return f;
    }

private:
    FormulaPtr parse_formula() {
        FormulaPtr f = parse_term();
        while (is_symbol("+")) {
            lex_.take();
            f = Formula::sum(std::move(f), parse_term());
        }
        return f;
    }

    FormulaPtr parse_term() {
        if (lex_.peek().type == Token::Type::Number) {
            Token k = lex_.take();
            expect_symbol("*");
            return Formula::scale(parse_rat(k.text), parse_term());
        }
        return parse_atom();
    }

    FormulaPtr parse_atom() {
        const Token& t = lex_.peek();
        if (t.type == Token::Type::Ident) {
            if (t.text == "one") {
                lex_.take();
                return Formula::one();
            }
            if (t.text == "zero") {
                lex_.take();
                return Formula::zero();
            }
            if (t.text == "min") {
                lex_.take();
                expect_symbol("(");
                FormulaPtr a = parse_formula();
                expect_symbol(",");
                FormulaPtr b = parse_formula();
                expect_symbol(")");
                return Formula::min(std::move(a), std::move(b));
            }
            throw SyntaxError("unexpected identifier '" + t.text + "'", t.line, t.col);
        }
        if (is_symbol("(")) {
            lex_.take();
            FormulaPtr inner = parse_formula();
            expect_symbol(")");
            if (is_symbol("_")) {
                lex_.take();
                expect_symbol("[");
                DExpr weight = parse_dexpr();
                expect_symbol("]");
                expect_symbol(":");
                expect_symbol("(");
                FormulaPtr rhs = parse_formula();
                expect_symbol(")");
                return Formula::choice(std::move(inner), std::move(weight), std::move(rhs));
            }
            return inner;
        }
        throw SyntaxError("expected a formula", t.line, t.col);
    }

    DExpr parse_dexpr() {
        Rat constant(0);
        bool have_constant = false;
        std::vector<DTerm> terms;
        while (true) {
            const Token& t = lex_.peek();
            if (t.type == Token::Type::Number) {
                Token k = lex_.take();
                Rat value = parse_rat(k.text);
                if (is_symbol("*")) {
                    lex_.take();
                    Token var = lex_.take();
                    if (var.type != Token::Type::Ident)
                        throw SyntaxError("expected variable after '*'", var.line, var.col);
                    terms.push_back(DTerm{std::move(value), var.text});
                } else {
                    if (have_constant)
                        throw SyntaxError("multiple constants in weight", k.line, k.col);
                    constant = std::move(value);
                    have_constant = true;
                }
            } else if (t.type == Token::Type::Ident) {
                Token var = lex_.take();
                terms.push_back(DTerm{Rat(1), var.text});
            } else {
                throw SyntaxError("expected a weight term", t.line, t.col);
            }
            if (!is_symbol("+")) break;
            lex_.take();
        }
        return DExpr(std::move(constant), std::move(terms));
    }

    bool is_symbol(const char* s) const {
        return lex_.peek().type == Token::Type::Symbol && lex_.peek().text == s;
    }

    void expect_symbol(const char* s) {
        if (!is_symbol(s)) {
            const Token& t = lex_.peek();
            throw SyntaxError("expected '" + std::string(s) + "'", t.line, t.col);
        }
        lex_.take();
    }

    void expect_end() {
        const Token& t = lex_.peek();
        if (t.type != Token::Type::End)
            throw SyntaxError("trailing input after formula", t.line, t.col);
    }

    Lexer lex_;
};

std::string show_rat_short(const Rat& q) {
    return den(q) == 1 ? num(q).str() : rat_str(q);
}

std::string show_dexpr(const DExpr& d) {
    std::ostringstream out;
    bool first = true;
    for (const auto& term : d.terms()) {
        if (!first) out << " + ";
        out << show_rat_short(term.coeff) << "*" << term.var;
        first = false;
    }
    if (first || d.constant() != 0) {
        if (!first) out << " + ";
        out << show_rat_short(d.constant());
    }
    return out.str();
}

void show_formula(const Formula& f, std::ostream& out) {
    switch (f.kind()) {
    case Formula::Kind::One:
        out << "one";
        break;
    case Formula::Kind::Zero:
        out << "zero";
        break;
    case Formula::Kind::Sum:
        show_formula(*f.lhs(), out);
        out << " + ";
        if (f.rhs()->kind() == Formula::Kind::Sum) {
            out << "(";
            show_formula(*f.rhs(), out);
            out << ")";
        } else {
            show_formula(*f.rhs(), out);
        }
        break;
    case Formula::Kind::Min:
        out << "min(";
        show_formula(*f.lhs(), out);
        out << ", ";
        show_formula(*f.rhs(), out);
        out << ")";
        break;
    case Formula::Kind::Scale:
        out << show_rat_short(f.coefficient()) << "*";
        if (f.lhs()->kind() == Formula::Kind::Sum) {
            out << "(";
            show_formula(*f.lhs(), out);
            out << ")";
        } else {
            show_formula(*f.lhs(), out);
        }
        break;
    case Formula::Kind::Choice:
        out << "(";
        show_formula(*f.lhs(), out);
        out << ")_[" << show_dexpr(f.weight()) << "]:(";
        show_formula(*f.rhs(), out);
        out << ")";
        break;
    }
}

} // namespace

FormulaPtr parse_formula(const std::string& text) { return Parser(text).parse(); }

std::string formula_to_text(const Formula& f) {
    std::ostringstream out;
    show_formula(f, out);
    return out.str();
}

std::set<std::string> free_vars(const Formula& f) {
    std::set<std::string> names;
    switch (f.kind()) {
    case Formula::Kind::One:
    case Formula::Kind::Zero:
        break;
    case Formula::Kind::Scale:
        return free_vars(*f.lhs());
    case Formula::Kind::Sum:
    case Formula::Kind::Min: {
        names = free_vars(*f.lhs());
        auto rhs = free_vars(*f.rhs());
        names.insert(rhs.begin(), rhs.end());
        break;
    }
    case Formula::Kind::Choice: {
        names = f.weight().vars();
        auto l = free_vars(*f.lhs());
        auto r = free_vars(*f.rhs());
        names.insert(l.begin(), l.end());
        names.insert(r.begin(), r.end());
        break;
    }
    }
    return names;
}

Pmf eval(const Formula& f, const Environment& env) {
    switch (f.kind()) {
    case Formula::Kind::One:
        return Pmf::point_mass(Count(1));
    case Formula::Kind::Zero:
        return Pmf::point_mass(Count(0));
    case Formula::Kind::Sum:
        return pmf_sum(eval(*f.lhs(), env), eval(*f.rhs(), env));
    case Formula::Kind::Min:
        return pmf_min(eval(*f.lhs(), env), eval(*f.rhs(), env));
    case Formula::Kind::Scale:
        return pmf_scale_rat(eval(*f.lhs(), env), f.coefficient());
    case Formula::Kind::Choice:
        return pmf_convex(eval(*f.lhs(), env), eval(*f.rhs(), env), f.weight().eval(env));
    }
    throw Error("unreachable formula kind");
}

FormulaPtr encode_pmf(const Pmf& f) {
    if (f.dim() != 1)
        throw DimensionMismatch("formula encoding requires a dim-1 pmf");
    std::vector<std::pair<Count, Rat>> points;
    points.reserve(f.entries().size());
    for (const auto& [y, m] : f.entries()) points.emplace_back(y[0], m);

    // Innermost branch is the largest support point; weight of level i is its
    // mass divided by the remaining tail mass, so the product of the
    // pass-through factors reproduces each mass exactly.
    FormulaPtr acc = Formula::scale(Rat(points.back().first), Formula::one());
    Rat tail = points.back().second;
    for (std::size_t i = points.size() - 1; i-- > 0;) {
        tail += points[i].second;
        if (tail == 0) throw DegenerateWeight("zero tail mass while encoding pmf");
        Rat weight = points[i].second / tail;
        acc = Formula::choice(Formula::scale(Rat(points[i].first), Formula::one()),
                              DExpr(std::move(weight)), std::move(acc));
    }
    return acc;
}

} // namespace crndist
