#include "crndist/crn.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "crndist/errors.hpp"

namespace crndist {

Count Complex::multiplicity(std::uint32_t species) const {
    for (const auto& [s, n] : entries)
        if (s == species) return n;
    return 0;
}

bool valid_species_name(const std::string& name) {
    if (name.empty()) return false;
    char c0 = name[0];
    if (!std::isalpha(static_cast<unsigned char>(c0)) && c0 != '_') return false;
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '\'')
            return false;
    return true;
}

std::uint32_t Crs::add_species(const std::string& name, Count initial) {
    if (!valid_species_name(name)) throw Error("invalid species name '" + name + "'");
    if (index_.count(name)) throw NotFresh("species " + name + " already declared");
    auto idx = static_cast<std::uint32_t>(species_.size());
    species_.push_back(name);
    index_.emplace(name, idx);
    initial_.push_back(initial);
    return idx;
}

std::uint32_t Crs::species_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnknownSpecies("unknown species " + name);
    return it->second;
}

void Crs::set_initial(const std::string& name, Count count) {
    initial_[species_index(name)] = count;
}

namespace {

Complex make_complex(const Crs& crs, const std::map<std::string, Count>& spec) {
    Complex c;
    for (const auto& [name, n] : spec) {
        if (n == 0) continue;
        c.entries.emplace_back(crs.species_index(name), n);
    }
    std::sort(c.entries.begin(), c.entries.end());
    return c;
}

} // namespace

void Crs::add_reaction(const std::map<std::string, Count>& source,
                       const std::map<std::string, Count>& product, Rat rate) {
    if (rate <= 0) throw NonPositiveRate("reaction rate must be positive, got " + rat_str(rate));
    reactions_.push_back(Reaction{make_complex(*this, source), make_complex(*this, product),
                                  std::move(rate)});
}

void Crs::mark_output(const std::string& name) {
    std::uint32_t idx = species_index(name);
    auto it = std::lower_bound(outputs_.begin(), outputs_.end(), idx);
    if (it == outputs_.end() || *it != idx) outputs_.insert(it, idx);
}

bool Crs::is_output(std::uint32_t species) const {
    return std::binary_search(outputs_.begin(), outputs_.end(), species);
}

Rat propensity(const Crs& crs, const Reaction& r, const State& x) {
    Int combinations = 1;
    for (const auto& [s, n] : r.source.entries) {
        if (x[s] < n) return Rat(0);
        // Falling factorial x(x-1)...(x-n+1).
        for (Count i = 0; i < n; ++i) combinations *= Int(x[s] - i);
        if (crs.kinetics() == Kinetics::Combinatorial)
            for (Count i = 2; i <= n; ++i) combinations /= Int(i);
    }
    return r.rate * Rat(combinations);
}

std::vector<std::size_t> enabled(const Crs& crs, const State& x) {
    std::vector<std::size_t> result;
    for (std::size_t i = 0; i < crs.reactions().size(); ++i) {
        bool ok = true;
        for (const auto& [s, n] : crs.reactions()[i].source.entries)
            if (x[s] < n) {
                ok = false;
                break;
            }
        if (ok) result.push_back(i);
    }
    return result;
}

State apply(const Crs& crs, const Reaction& r, const State& x) {
    for (const auto& [s, n] : r.source.entries)
        if (x[s] < n)
            throw NotEnabled("reaction not enabled: needs " + std::to_string(n) + " of " +
                             crs.species_name(s));
    State next = x;
    for (const auto& [s, n] : r.source.entries) next[s] -= n;
    for (const auto& [s, n] : r.product.entries) next[s] += n;
    return next;
}

std::optional<NroViolation> nro_violation(const Crs& crs) {
    for (std::size_t i = 0; i < crs.reactions().size(); ++i)
        for (const auto& [s, n] : crs.reactions()[i].source.entries)
            if (crs.is_output(s)) return NroViolation{crs.species_name(s), i};
    return std::nullopt;
}

bool is_nro(const Crs& crs) { return !nro_violation(crs).has_value(); }

Crs rename_species(const Crs& crs, const std::string& fresh, const std::string& old_name) {
    if (!valid_species_name(fresh)) throw Error("invalid species name '" + fresh + "'");
    if (crs.has_species(fresh)) throw NotFresh("species " + fresh + " already declared");
    std::uint32_t idx = crs.species_index(old_name);

    // Complexes, initial condition and outputs are index-based, so swapping
    // the name at its index is the whole renaming.
    Crs renamed;
    for (std::uint32_t i = 0; i < crs.species_count(); ++i)
        renamed.add_species(i == idx ? fresh : crs.species_name(i), crs.initial()[i]);
    for (const auto& r : crs.reactions()) {
        std::map<std::string, Count> source, product;
        for (const auto& [s, n] : r.source.entries) source[renamed.species_name(s)] = n;
        for (const auto& [s, n] : r.product.entries) product[renamed.species_name(s)] = n;
        renamed.add_reaction(source, product, r.rate);
    }
    for (std::uint32_t s : crs.outputs()) renamed.mark_output(renamed.species_name(s));
    renamed.set_kinetics(crs.kinetics());
    renamed.set_composable(crs.composable());
    return renamed;
}

Pmf marginal(const std::vector<std::pair<State, Rat>>& dist, std::uint32_t species) {
    Rat total(0);
    Pmf::Entries entries;
    for (const auto& [state, mass] : dist) {
        total += mass;
        if (mass > 0) entries[Point{state[species]}] += mass;
    }
    if (total != 1)
        throw NotNormalized("state distribution sums to " + rat_str(total) + ", expected 1");
    return Pmf::from_entries(1, std::move(entries));
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Parses `2 X + Y` or `0` into a species multiset.
std::map<std::string, Count> parse_side(const std::string& side, int lineno) {
    std::map<std::string, Count> result;
    std::string text = trim(side);
    if (text == "0" || text.empty()) return result;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, '+')) {
        part = trim(part);
        if (part.empty()) throw SyntaxError("empty term in complex", lineno, 1);
        Count coeff = 1;
        std::size_t i = 0;
        if (std::isdigit(static_cast<unsigned char>(part[0]))) {
            std::size_t end = 0;
            while (end < part.size() && std::isdigit(static_cast<unsigned char>(part[end]))) ++end;
            coeff = to_count(Int(part.substr(0, end)));
            i = end;
            while (i < part.size() && std::isspace(static_cast<unsigned char>(part[i]))) ++i;
        }
        std::string name = trim(part.substr(i));
        if (!valid_species_name(name))
            throw SyntaxError("malformed species term '" + part + "'", lineno, 1);
        result[name] += coeff;
    }
    return result;
}

} // namespace

Crs parse_crn(const std::string& text) {
    Crs crs;
    struct PendingReaction {
        std::map<std::string, Count> source, product;
        Rat rate;
    };
    std::vector<PendingReaction> pending;
    std::vector<std::string> outputs;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::istringstream ls(line);
        std::string keyword;
        ls >> keyword;
        std::string rest = trim(line.substr(keyword.size()));

        if (keyword == "species") {
            std::istringstream names(rest);
            std::string name;
            while (std::getline(names, name, ',')) {
                name = trim(name);
                if (!valid_species_name(name))
                    throw SyntaxError("invalid species name '" + name + "'", lineno, 1);
                if (crs.has_species(name))
                    throw SyntaxError("species " + name + " declared twice", lineno, 1);
                crs.add_species(name);
            }
        } else if (keyword == "init") {
            auto eq = rest.find('=');
            if (eq == std::string::npos) throw SyntaxError("expected '=' in init", lineno, 1);
            std::string name = trim(rest.substr(0, eq));
            std::string value = trim(rest.substr(eq + 1));
            if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
                throw SyntaxError("malformed initial count '" + value + "'", lineno, 1);
            if (!crs.has_species(name))
                throw SyntaxError("init of undeclared species " + name, lineno, 1);
            crs.set_initial(name, to_count(Int(value)));
        } else if (keyword == "rxn") {
            auto arrow = rest.find("->");
            if (arrow == std::string::npos)
                throw SyntaxError("expected '->' in reaction", lineno, 1);
            std::string lhs = rest.substr(0, arrow);
            std::string rhs = rest.substr(arrow + 2);
            Rat rate(1);
            auto at = rhs.find('@');
            if (at != std::string::npos) {
                rate = parse_rat(trim(rhs.substr(at + 1)));
                rhs = rhs.substr(0, at);
            }
            if (rate <= 0) throw SyntaxError("reaction rate must be positive", lineno, 1);
            pending.push_back(PendingReaction{parse_side(lhs, lineno), parse_side(rhs, lineno),
                                              std::move(rate)});
        } else if (keyword == "output") {
            std::istringstream names(rest);
            std::string name;
            while (std::getline(names, name, ',')) outputs.push_back(trim(name));
        } else if (keyword == "kinetics") {
            if (rest == "falling")
                crs.set_kinetics(Kinetics::FallingFactorial);
            else if (rest == "combinatorial")
                crs.set_kinetics(Kinetics::Combinatorial);
            else
                throw SyntaxError("unknown kinetics '" + rest + "'", lineno, 1);
        } else {
            throw SyntaxError("unknown directive '" + keyword + "'", lineno, 1);
        }
    }

    for (const auto& r : pending) {
        for (const auto& [name, n] : r.source)
            if (!crs.has_species(name))
                throw UnknownSpecies("reaction references undeclared species " + name);
        for (const auto& [name, n] : r.product)
            if (!crs.has_species(name))
                throw UnknownSpecies("reaction references undeclared species " + name);
        crs.add_reaction(r.source, r.product, r.rate);
    }
    for (const auto& name : outputs) {
        if (!crs.has_species(name))
            throw UnknownSpecies("output references undeclared species " + name);
        crs.mark_output(name);
    }
    return crs;
}

namespace {

void show_side(const Crs& crs, const Complex& c, std::ostream& out) {
    if (c.entries.empty()) {
        out << "0";
        return;
    }
    bool first = true;
    for (const auto& [s, n] : c.entries) {
        if (!first) out << " + ";
        if (n != 1) out << n << " ";
        out << crs.species_name(s);
        first = false;
    }
}

} // namespace

std::string crn_to_text(const Crs& crs, const CrnManifest* manifest) {
    std::ostringstream out;
    if (manifest)
        for (const auto& [key, value] : manifest->fields)
            out << "# " << key << ": " << value << "\n";
    out << "species ";
    for (std::size_t i = 0; i < crs.species_count(); ++i) {
        if (i) out << ", ";
        out << crs.species_name(static_cast<std::uint32_t>(i));
    }
    out << "\n";
    if (crs.kinetics() == Kinetics::Combinatorial) out << "kinetics combinatorial\n";
    for (std::uint32_t i = 0; i < crs.species_count(); ++i)
        if (crs.initial()[i] != 0)
            out << "init " << crs.species_name(i) << " = " << crs.initial()[i] << "\n";
    for (const auto& r : crs.reactions()) {
        out << "rxn ";
        show_side(crs, r.source, out);
        out << " -> ";
        show_side(crs, r.product, out);
        out << " @ " << rat_str(r.rate) << "\n";
    }
    for (std::uint32_t s : crs.outputs()) out << "output " << crs.species_name(s) << "\n";
    return out.str();
}

} // namespace crndist
