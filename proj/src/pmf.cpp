#include "crndist/pmf.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include "crndist/errors.hpp"

namespace crndist {

namespace {

void require_dim1(const Pmf& a, const char* op) {
    if (a.dim() != 1)
        throw DimensionMismatch(std::string(op) + " requires dim-1 pmfs, got dim " +
                                std::to_string(a.dim()));
}

void require_same_dim(const Pmf& a, const Pmf& b, const char* op) {
    if (a.dim() != b.dim())
        throw DimensionMismatch(std::string(op) + ": dims " + std::to_string(a.dim()) +
                                " and " + std::to_string(b.dim()) + " differ");
}

Count mul_checked(Count a, Count b) {
    Count r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error("support value overflow");
    return r;
}

} // namespace

Pmf Pmf::point_mass(Point value) {
    Entries e;
    e.emplace(std::move(value), Rat(1));
    int dim = static_cast<int>(e.begin()->first.size());
    return from_entries(dim, std::move(e));
}

Pmf Pmf::from_entries(int dim, Entries entries) {
    if (dim <= 0) throw DimensionMismatch("pmf dimension must be positive");
    if (entries.empty()) throw NotNormalized("empty pmf has total mass 0");
    Rat total(0);
    for (const auto& [point, mass] : entries) {
        if (static_cast<int>(point.size()) != dim)
            throw DimensionMismatch("support tuple of length " +
                                    std::to_string(point.size()) + " in dim-" +
                                    std::to_string(dim) + " pmf");
        if (mass <= 0)
            throw NotNormalized("nonpositive mass " + rat_str(mass) + " in pmf");
        total += mass;
    }
    if (total != 1)
        throw NotNormalized("pmf total is " + rat_str(total) + ", expected 1");
    return Pmf(dim, std::move(entries));
}

Rat Pmf::at(const Point& p) const {
    auto it = entries_.find(p);
    return it == entries_.end() ? Rat(0) : it->second;
}

Pmf pmf_sum(const Pmf& a, const Pmf& b) {
    require_dim1(a, "sum");
    require_dim1(b, "sum");
    Pmf::Entries out;
    for (const auto& [ya, pa] : a.entries())
        for (const auto& [yb, pb] : b.entries())
            out[Point{ya[0] + yb[0]}] += pa * pb;
    return Pmf::from_entries(1, std::move(out));
}

Pmf pmf_min(const Pmf& a, const Pmf& b) {
    require_dim1(a, "min");
    require_dim1(b, "min");
    Pmf::Entries out;
    for (const auto& [ya, pa] : a.entries())
        for (const auto& [yb, pb] : b.entries())
            out[Point{std::min(ya[0], yb[0])}] += pa * pb;
    return Pmf::from_entries(1, std::move(out));
}

Pmf pmf_mul_nat(const Pmf& a, Count k1) {
    require_dim1(a, "mul");
    Pmf::Entries out;
    for (const auto& [y, p] : a.entries()) out[Point{mul_checked(y[0], k1)}] += p;
    return Pmf::from_entries(1, std::move(out));
}

Pmf pmf_div_nat(const Pmf& a, Count k2) {
    require_dim1(a, "div");
    if (k2 == 0) throw DivisorZero("division of a pmf by 0");
    Pmf::Entries out;
    for (const auto& [y, p] : a.entries()) out[Point{y[0] / k2}] += p;
    return Pmf::from_entries(1, std::move(out));
}

Pmf pmf_scale_rat(const Pmf& a, const Rat& k) {
    require_dim1(a, "scale");
    if (k < 0) throw ProbabilityOutOfRange("scale coefficient must be nonnegative");
    return pmf_div_nat(pmf_mul_nat(a, to_count(num(k))), to_count(den(k)));
}

Pmf pmf_convex(const Pmf& a, const Pmf& b, const Rat& p) {
    require_same_dim(a, b, "convex combination");
    if (p < 0 || p > 1)
        throw ProbabilityOutOfRange("convex weight " + rat_str(p) + " outside [0,1]");
    Pmf::Entries out;
    if (p > 0)
        for (const auto& [y, m] : a.entries()) out[y] += p * m;
    if (p < 1)
        for (const auto& [y, m] : b.entries()) out[y] += (1 - p) * m;
    return Pmf::from_entries(a.dim(), std::move(out));
}

Rat l1_distance(const Pmf& a, const Pmf& b) {
    require_same_dim(a, b, "L1 distance");
    Rat total(0);
    for (const auto& [y, m] : a.entries()) total += abs(m - b.at(y));
    for (const auto& [y, m] : b.entries())
        if (a.at(y) == 0) total += m;
    return total;
}

namespace {

Rat point_ratio(const Rat& x, const Rat& y) {
    if (x == 0 && y == 0) return Rat(1);
    if (x == 0 || y == 0) return Rat(0);
    return x < y ? x / y : y / x;
}

} // namespace

Rat ratio_closeness(const Pmf& a, const Pmf& b) {
    require_same_dim(a, b, "ratio closeness");
    Rat worst(1);
    for (const auto& [y, m] : a.entries()) worst = std::min(worst, point_ratio(m, b.at(y)));
    for (const auto& [y, m] : b.entries())
        if (a.at(y) == 0) worst = Rat(0);
    return worst;
}

Rat ratio_closeness_max(const Pmf& a, const Pmf& b) {
    require_same_dim(a, b, "ratio closeness");
    Rat best(0);
    for (const auto& [y, m] : a.entries()) best = std::max(best, point_ratio(m, b.at(y)));
    for (const auto& [y, m] : b.entries())
        if (a.at(y) == 0) best = std::max(best, Rat(0));
    return best;
}

std::vector<Count> TruncationResult::kept_support() const {
    std::vector<Count> support;
    support.reserve(kept.size());
    for (const auto& [v, m] : kept) support.push_back(v);
    return support;
}

Pmf TruncationResult::renormalized() const {
    Rat total = 1 - mass_lost;
    Pmf::Entries out;
    for (const auto& [v, m] : kept) out[Point{v}] = m / total;
    return Pmf::from_entries(1, std::move(out));
}

TruncationResult truncate(TailGen gen, const Rat& epsilon) {
    if (epsilon <= 0 || epsilon >= 1)
        throw EpsilonOutOfRange("epsilon " + rat_str(epsilon) + " outside (0,1)");
    TruncationResult result;
    Rat kept_mass(0);
    while (1 - kept_mass >= epsilon) {
        auto next = gen();
        if (!next) break; // generator exhausted: the full support was kept
        auto [value, mass] = *next;
        if (mass <= 0) throw NotNormalized("nonpositive mass in truncation stream");
        if (result.kept.count(value))
            throw NotNormalized("duplicate support value in truncation stream");
        result.kept.emplace(value, mass);
        kept_mass += mass;
    }
    if (kept_mass > 1) throw NotNormalized("truncation stream mass exceeds 1");
    result.mass_lost = 1 - kept_mass;
    return result;
}

TruncationResult truncate(const Pmf& a, const Rat& epsilon) {
    if (a.dim() != 1) throw DimensionMismatch("truncate requires a dim-1 pmf");
    if (epsilon <= 0 || epsilon >= 1)
        throw EpsilonOutOfRange("epsilon " + rat_str(epsilon) + " outside (0,1)");
    TruncationResult result;
    result.mass_lost = 0;
    for (const auto& [y, m] : a.entries()) result.kept.emplace(y[0], m);
    return result;
}

TailGen geometric_tail(const Rat& p) {
    if (p <= 0 || p > 1)
        throw ProbabilityOutOfRange("geometric parameter " + rat_str(p) + " outside (0,1]");
    struct GeomState {
        Rat mass;
        Rat ratio;
        Count k = 0;
    };
    auto state = std::make_shared<GeomState>(GeomState{p, 1 - p});
    return [state]() -> std::optional<std::pair<Count, Rat>> {
        if (state->mass == 0) return std::nullopt;
        auto item = std::make_pair(state->k, state->mass);
        state->mass *= state->ratio;
        ++state->k;
        return item;
    };
}

Pmf parse_pmf(const std::string& text) {
    Pmf::Entries entries;
    int dim = -1;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto colon = line.find(':');
        std::string values = colon == std::string::npos ? line : line.substr(0, colon);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (trim(values).empty() && colon == std::string::npos) continue;
        if (colon == std::string::npos)
            throw SyntaxError("missing ':' in pmf entry", lineno, 1);

        Point point;
        std::istringstream vs(values);
        std::string part;
        while (std::getline(vs, part, ',')) {
            part = trim(part);
            if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
                throw SyntaxError("malformed support value '" + part + "'", lineno, 1);
            point.push_back(to_count(Int(part)));
        }
        if (point.empty()) throw SyntaxError("empty support tuple", lineno, 1);
        if (dim < 0) dim = static_cast<int>(point.size());
        if (static_cast<int>(point.size()) != dim)
            throw SyntaxError("support tuple arity differs from first entry", lineno, 1);

        Rat mass = parse_rat(trim(line.substr(colon + 1)));
        if (!entries.emplace(std::move(point), mass).second)
            throw SyntaxError("duplicate support value", lineno, 1);
    }
    if (entries.empty()) throw SyntaxError("pmf file has no entries", lineno, 1);
    return Pmf::from_entries(dim, std::move(entries));
}

std::string pmf_to_text(const Pmf& pmf) {
    std::ostringstream out;
    for (const auto& [point, mass] : pmf.entries()) {
        for (std::size_t i = 0; i < point.size(); ++i) {
            if (i) out << ',';
            out << point[i];
        }
        out << " : " << rat_str(mass) << "\n";
    }
    return out.str();
}

} // namespace crndist
