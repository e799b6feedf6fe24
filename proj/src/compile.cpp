#include "crndist/compile.hpp"

#include <algorithm>

#include "crndist/errors.hpp"

namespace crndist {

namespace {

void require_dim1_pmf(const Pmf& f, const char* what) {
    if (f.dim() != 1)
        throw DimensionMismatch(std::string(what) + " requires a dim-1 pmf, got dim " +
                                std::to_string(f.dim()));
    if (f.entries().empty()) throw EmptySupport("pmf has empty support");
}

// Injective renaming of every species with a fixed prefix; keeps reactions,
// initial condition and output set aligned.
Crs prefix_all(const Crs& crs, const std::string& prefix) {
    Crs out;
    for (std::uint32_t i = 0; i < crs.species_count(); ++i)
        out.add_species(prefix + crs.species_name(i), crs.initial()[i]);
    for (const auto& r : crs.reactions()) {
        std::map<std::string, Count> source, product;
        for (const auto& [s, n] : r.source.entries) source[prefix + crs.species_name(s)] = n;
        for (const auto& [s, n] : r.product.entries) product[prefix + crs.species_name(s)] = n;
        out.add_reaction(source, product, r.rate);
    }
    for (std::uint32_t s : crs.outputs()) out.mark_output(prefix + crs.species_name(s));
    out.set_kinetics(crs.kinetics());
    out.set_composable(crs.composable());
    return out;
}

void check_operand(const Crs& crs, const std::string& o) {
    if (!crs.composable())
        throw NotNro("operand is a non-composable special network");
    if (auto v = nro_violation(crs))
        throw NotNro("operand is not non-reacting output: species " + v->species +
                     " is a reactant in reaction " + std::to_string(v->reaction));
    if (!crs.has_species(o) || !crs.is_output(crs.species_index(o)))
        throw OutputNotFound("species " + o + " is not an output of the operand");
}

// Copies species, initial counts and reactions of src into dst. Output
// markers are deliberately not copied: a composed network declares its own.
void append_network(Crs& dst, const Crs& src) {
    for (std::uint32_t i = 0; i < src.species_count(); ++i)
        dst.add_species(src.species_name(i), src.initial()[i]);
    for (const auto& r : src.reactions()) {
        std::map<std::string, Count> source, product;
        for (const auto& [s, n] : r.source.entries) source[src.species_name(s)] = n;
        for (const auto& [s, n] : r.product.entries) product[src.species_name(s)] = n;
        dst.add_reaction(source, product, r.rate);
    }
}

Crs merge(const Crs& a, const Crs& b) {
    Crs out;
    append_network(out, a);
    append_network(out, b);
    out.set_kinetics(a.kinetics());
    return out;
}

std::string value_species(std::size_t i) { return "A" + std::to_string(i); }

std::string catalyst_species(std::size_t i) {
    return "A" + std::to_string(i) + "_" + std::to_string(i);
}

} // namespace

Crs compile_direct(const Pmf& f) {
    require_dim1_pmf(f, "direct compilation");
    Crs crs;
    crs.add_species("Z", 1);
    crs.add_species(kOut, 0);
    std::size_t i = 0;
    for (const auto& [y, mass] : f.entries()) {
        ++i;
        crs.add_species(value_species(i), y[0]);
        crs.add_species(catalyst_species(i), 0);
        crs.add_reaction({{"Z", 1}}, {{catalyst_species(i), 1}}, mass);
        crs.add_reaction({{value_species(i), 1}, {catalyst_species(i), 1}},
                         {{catalyst_species(i), 1}, {kOut, 1}}, Rat(1));
    }
    crs.mark_output(kOut);
    return crs;
}

Crs compile_direct_ratefree(const Pmf& f) {
    require_dim1_pmf(f, "rate-free compilation");
    Int l(1);
    for (const auto& [y, mass] : f.entries()) l = lcm(l, den(mass));
    Crs crs;
    crs.add_species("Z", 1);
    crs.add_species(kOut, 0);
    std::size_t i = 0;
    for (const auto& [y, mass] : f.entries()) {
        ++i;
        std::string weight = "C" + std::to_string(i);
        crs.add_species(value_species(i), y[0]);
        crs.add_species(catalyst_species(i), 0);
        crs.add_species(weight, to_count(mass * Rat(l)));
        crs.add_reaction({{"Z", 1}, {weight, 1}}, {{catalyst_species(i), 1}}, Rat(1));
        crs.add_reaction({{value_species(i), 1}, {catalyst_species(i), 1}},
                         {{catalyst_species(i), 1}, {kOut, 1}}, Rat(1));
    }
    crs.mark_output(kOut);
    return crs;
}

Crs compile_joint(const Pmf& f) {
    if (f.entries().empty()) throw EmptySupport("pmf has empty support");
    const int m = f.dim();
    Crs crs;
    crs.add_species("Z", 1);
    for (int d = 1; d <= m; ++d) crs.add_species(kOut + std::to_string(d), 0);
    std::size_t i = 0;
    for (const auto& [point, mass] : f.entries()) {
        ++i;
        std::string selector = "S" + std::to_string(i);
        crs.add_species(selector, 0);
        crs.add_reaction({{"Z", 1}}, {{selector, 1}}, mass);
        for (int d = 1; d <= m; ++d) {
            std::string value = "A" + std::to_string(i) + "_" + std::to_string(d);
            crs.add_species(value, point[static_cast<std::size_t>(d - 1)]);
            crs.add_reaction({{value, 1}, {selector, 1}},
                             {{selector, 1}, {kOut + std::to_string(d), 1}}, Rat(1));
        }
    }
    for (int d = 1; d <= m; ++d) crs.mark_output(kOut + std::to_string(d));
    return crs;
}

std::pair<Crs, Rat> compile_truncated(TailGen tail, const Rat& epsilon) {
    TruncationResult trunc = truncate(std::move(tail), epsilon);
    if (trunc.kept.empty()) throw EmptySupport("truncation kept no support points");

    Crs crs;
    crs.add_species("Z", 1);
    crs.add_species(kOut, 0);
    std::size_t i = 0;
    for (const auto& [value, mass] : trunc.kept) {
        ++i;
        crs.add_species(value_species(i), value);
        crs.add_species(catalyst_species(i), 0);
        crs.add_reaction({{"Z", 1}}, {{catalyst_species(i), 1}}, mass);
        crs.add_reaction({{value_species(i), 1}, {catalyst_species(i), 1}},
                         {{catalyst_species(i), 1}, {kOut, 1}}, Rat(1));
    }
    if (trunc.mass_lost > 0) {
        crs.add_species("Sink", 0);
        crs.add_reaction({{"Z", 1}}, {{"Sink", 1}}, trunc.mass_lost);
    }
    crs.mark_output(kOut);
    return {std::move(crs), trunc.mass_lost};
}

Crs special_poisson(const Rat& k1, const Rat& k2) {
    if (k1 <= 0 || k2 <= 0) throw NonPositiveRate("Poisson network needs positive rates");
    Crs crs;
    crs.add_species("P", 0);
    crs.add_reaction({}, {{"P", 1}}, k1);
    crs.add_reaction({{"P", 1}}, {}, k2);
    crs.mark_output("P");
    crs.set_composable(false);
    return crs;
}

Crs special_binomial(Count capacity, const Rat& k1, const Rat& k2) {
    if (k1 <= 0 || k2 <= 0) throw NonPositiveRate("binomial network needs positive rates");
    Crs crs;
    crs.add_species("B1", capacity);
    crs.add_species("B2", 0);
    crs.add_reaction({{"B1", 1}}, {{"B2", 1}}, k1);
    crs.add_reaction({{"B2", 1}}, {{"B1", 1}}, k2);
    crs.mark_output("B1");
    crs.mark_output("B2");
    crs.set_composable(false);
    return crs;
}

Crs special_uniform(Count capacity, const Rat& k) {
    return special_uniform(capacity, k, capacity);
}

Crs special_uniform(Count capacity, const Rat& k, Count first) {
    if (k <= 0) throw NonPositiveRate("uniform network needs a positive rate");
    if (first > capacity) throw Error("initial split exceeds total molecule count");
    Crs crs;
    crs.add_species("U1", first);
    crs.add_species("U2", capacity - first);
    crs.add_reaction({{"U1", 1}}, {{"U2", 1}}, k);
    crs.add_reaction({{"U2", 1}}, {{"U1", 1}}, k);
    crs.add_reaction({{"U1", 1}, {"U2", 1}}, {{"U1", 2}}, k);
    crs.add_reaction({{"U1", 1}, {"U2", 1}}, {{"U2", 2}}, k);
    crs.mark_output("U1");
    crs.mark_output("U2");
    crs.set_composable(false);
    return crs;
}

Crs op_sum(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2) {
    check_operand(c1, o1);
    check_operand(c2, o2);
    Crs crs = merge(prefix_all(c1, "l."), prefix_all(c2, "r."));
    crs.add_species(kOut, 0);
    crs.add_reaction({{"l." + o1, 1}}, {{kOut, 1}}, Rat(1));
    crs.add_reaction({{"r." + o2, 1}}, {{kOut, 1}}, Rat(1));
    crs.mark_output(kOut);
    return crs;
}

Crs op_min(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2) {
    check_operand(c1, o1);
    check_operand(c2, o2);
    Crs crs = merge(prefix_all(c1, "l."), prefix_all(c2, "r."));
    crs.add_species(kOut, 0);
    crs.add_reaction({{"l." + o1, 1}, {"r." + o2, 1}}, {{kOut, 1}}, Rat(1));
    crs.mark_output(kOut);
    return crs;
}

Crs op_mul(const Crs& c, const std::string& o, Count k1) {
    check_operand(c, o);
    Crs crs;
    append_network(crs, prefix_all(c, "l."));
    crs.set_kinetics(c.kinetics());
    crs.add_species(kOut, 0);
    // k1 = 0 converts to the empty complex: nothing is ever produced.
    std::map<std::string, Count> product;
    if (k1 > 0) product.emplace(kOut, k1);
    crs.add_reaction({{"l." + o, 1}}, product, Rat(1));
    crs.mark_output(kOut);
    return crs;
}

Crs op_div(const Crs& c, const std::string& o, Count k2) {
    check_operand(c, o);
    if (k2 == 0) throw DivisorZero("division operator requires k2 >= 1");
    Crs crs;
    append_network(crs, prefix_all(c, "l."));
    crs.set_kinetics(c.kinetics());
    crs.add_species(kOut, 0);
    crs.add_reaction({{"l." + o, k2}}, {{kOut, 1}}, Rat(1));
    crs.mark_output(kOut);
    return crs;
}

Crs op_con(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2,
           const Rat& p) {
    check_operand(c1, o1);
    check_operand(c2, o2);
    if (p < 0 || p > 1)
        throw ProbabilityOutOfRange("convex weight " + rat_str(p) + " outside [0,1]");
    Crs crs = merge(prefix_all(c1, "l."), prefix_all(c2, "r."));
    crs.add_species("Z", 1);
    crs.add_species("R1", 0);
    crs.add_species("R2", 0);
    crs.add_species(kOut, 0);
    if (p > 0) crs.add_reaction({{"Z", 1}}, {{"R1", 1}}, p);
    if (p < 1) crs.add_reaction({{"Z", 1}}, {{"R2", 1}}, 1 - p);
    crs.add_reaction({{"l." + o1, 1}, {"R1", 1}}, {{"R1", 1}, {kOut, 1}}, Rat(1));
    crs.add_reaction({{"r." + o2, 1}, {"R2", 1}}, {{"R2", 1}, {kOut, 1}}, Rat(1));
    crs.mark_output(kOut);
    return crs;
}

namespace {

Crs op_conE_impl(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2,
                 const DExpr& d, const Environment& env, const CompileOptions& opts,
                 Int* scale_out) {
    check_operand(c1, o1);
    check_operand(c2, o2);
    if (opts.rho < 1) throw Error("rate separation rho must be at least 1");
    validate_environment(env);
    d.eval(env); // surfaces UnboundVariable and range violations up front

    // K clears every denominator in sight, so the weight counts K*p_i*E(c_i)
    // and the baseline K*p0 are all naturals and the branch probabilities are
    // represented exactly.
    Int k_scale = den(d.constant());
    std::vector<Count> weight_counts;
    for (const auto& term : d.terms()) {
        const Rat& value = env.at(term.var);
        k_scale = lcm(k_scale, den(term.coeff));
        k_scale = lcm(k_scale, den(value));
        k_scale = lcm(k_scale, den(term.coeff * value));
    }
    for (const auto& term : d.terms()) {
        Rat count = Rat(k_scale) * term.coeff * env.at(term.var);
        if (!is_integer(count))
            throw NonRepresentableCount("count " + rat_str(count) + " for variable " +
                                        term.var + " is not a natural");
        weight_counts.push_back(to_count(count));
    }

    Crs crs = merge(prefix_all(c1, "l."), prefix_all(c2, "r."));
    Count baseline = to_count(Rat(k_scale) * d.constant());
    crs.add_species("Z", 1);
    crs.add_species("R1", baseline);
    crs.add_species("R2", to_count(k_scale));
    crs.add_species("RT", baseline);
    crs.add_species("Cat1", 0);
    crs.add_species("Cat2", 0);
    crs.add_species(kOut, 0);

    // Fast phase (rate rho): each weight molecule contributes one (R1, RT)
    // pair, and RT cancels R2, leaving R1 = K*[[D]] and R2 = K*(1-[[D]]).
    for (std::size_t i = 0; i < d.terms().size(); ++i) {
        std::string weight = "C" + std::to_string(i + 1);
        crs.add_species(weight, weight_counts[i]);
        crs.add_reaction({{weight, 1}}, {{"R1", 1}, {"RT", 1}}, opts.rho);
    }
    crs.add_reaction({{"RT", 1}, {"R2", 1}}, {}, opts.rho);

    // Slow race on the leader, then catalytic transfer of the chosen branch.
    crs.add_reaction({{"Z", 1}, {"R1", 1}}, {{"Cat1", 1}}, Rat(1));
    crs.add_reaction({{"Z", 1}, {"R2", 1}}, {{"Cat2", 1}}, Rat(1));
    crs.add_reaction({{"l." + o1, 1}, {"Cat1", 1}}, {{"Cat1", 1}, {kOut, 1}}, Rat(1));
    crs.add_reaction({{"r." + o2, 1}, {"Cat2", 1}}, {{"Cat2", 1}, {kOut, 1}}, Rat(1));
    crs.mark_output(kOut);
    if (scale_out) *scale_out = k_scale;
    return crs;
}

} // namespace

Crs op_conE(const Crs& c1, const std::string& o1, const Crs& c2, const std::string& o2,
            const DExpr& d, const Environment& env, const CompileOptions& opts) {
    if (d.is_constant()) return op_con(c1, o1, c2, o2, d.constant());
    return op_conE_impl(c1, o1, c2, o2, d, env, opts, nullptr);
}

namespace {

std::vector<std::string> prefixed(const std::vector<std::string>& names,
                                  const std::string& prefix) {
    std::vector<std::string> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(prefix + n);
    return out;
}

CompileMeta merge_meta(const CompileMeta& left, const CompileMeta& right) {
    CompileMeta meta;
    meta.leaders = prefixed(left.leaders, "l.");
    auto r = prefixed(right.leaders, "r.");
    meta.leaders.insert(meta.leaders.end(), r.begin(), r.end());
    meta.scale_factors = left.scale_factors;
    meta.scale_factors.insert(meta.scale_factors.end(), right.scale_factors.begin(),
                              right.scale_factors.end());
    if (left.rho) meta.rho = left.rho;
    if (right.rho) meta.rho = right.rho;
    meta.mass_lost = left.mass_lost + right.mass_lost;
    return meta;
}

CompileMeta wrap_meta(const CompileMeta& inner) {
    CompileMeta meta = inner;
    meta.leaders = prefixed(inner.leaders, "l.");
    return meta;
}

} // namespace

Compiled translate(const Formula& f, const Environment& env, const CompileOptions& opts) {
    switch (f.kind()) {
    case Formula::Kind::One: {
        Crs crs;
        crs.add_species(kOut, 1);
        crs.mark_output(kOut);
        return Compiled{std::move(crs), {}};
    }
    case Formula::Kind::Zero: {
        Crs crs;
        crs.add_species(kOut, 0);
        crs.mark_output(kOut);
        return Compiled{std::move(crs), {}};
    }
    case Formula::Kind::Sum: {
        Compiled a = translate(*f.lhs(), env, opts);
        Compiled b = translate(*f.rhs(), env, opts);
        return Compiled{op_sum(a.crs, kOut, b.crs, kOut), merge_meta(a.meta, b.meta)};
    }
    case Formula::Kind::Min: {
        Compiled a = translate(*f.lhs(), env, opts);
        Compiled b = translate(*f.rhs(), env, opts);
        return Compiled{op_min(a.crs, kOut, b.crs, kOut), merge_meta(a.meta, b.meta)};
    }
    case Formula::Kind::Scale: {
        Compiled a = translate(*f.lhs(), env, opts);
        Crs multiplied = op_mul(a.crs, kOut, to_count(num(f.coefficient())));
        Crs divided = op_div(multiplied, kOut, to_count(den(f.coefficient())));
        return Compiled{std::move(divided), wrap_meta(wrap_meta(a.meta))};
    }
    case Formula::Kind::Choice: {
        Compiled a = translate(*f.lhs(), env, opts);
        Compiled b = translate(*f.rhs(), env, opts);
        CompileMeta meta = merge_meta(a.meta, b.meta);
        meta.leaders.push_back("Z");
        if (f.weight().is_constant())
            return Compiled{op_con(a.crs, kOut, b.crs, kOut, f.weight().constant()),
                            std::move(meta)};
        Int k_scale(0);
        Crs crs = op_conE_impl(a.crs, kOut, b.crs, kOut, f.weight(), env, opts, &k_scale);
        meta.scale_factors.push_back(k_scale);
        meta.rho = opts.rho;
        return Compiled{std::move(crs), std::move(meta)};
    }
    }
    throw Error("unreachable formula kind");
}

} // namespace crndist
