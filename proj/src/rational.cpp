#include "crndist/rational.hpp"

#include <cctype>
#include <limits>

#include "crndist/errors.hpp"

namespace crndist {

std::string rat_str(const Rat& q) {
    return num(q).str() + "/" + den(q).str();
}

Rat parse_rat(std::string_view text) {
    auto fail = [&]() -> Rat {
        throw SyntaxError("malformed rational '" + std::string(text) + "'", 1, 1);
    };
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    auto digits = [&](std::string& out) {
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            out.push_back(text[i]);
            ++i;
        }
        return i > start;
    };
    std::string whole;
    if (!digits(whole)) return fail();

    Rat value;
    if (i < text.size() && text[i] == '/') {
        ++i;
        std::string d;
        if (!digits(d) || i != text.size()) return fail();
        Int numerator(whole), denominator(d);
        if (denominator == 0) throw DivisorZero("denominator is zero in '" + std::string(text) + "'");
        value = Rat(numerator, denominator);
    } else if (i < text.size() && text[i] == '.') {
        ++i;
        std::string frac;
        if (!digits(frac) || i != text.size()) return fail();
        Int scale = 1;
        for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
        value = Rat(Int(whole) * scale + Int(frac), scale);
    } else {
        if (i != text.size()) return fail();
        value = Rat(Int(whole));
    }
    if (negative) value = -value;
    return value;
}

Int lcm(const Int& a, const Int& b) {
    if (a == 0 || b == 0) return 0;
    Int g = gcd(a, b);
    return abs(a / g * b);
}

std::uint64_t to_count(const Rat& q) {
    if (!is_integer(q)) throw Error("expected a natural number, got " + rat_str(q));
    return to_count(num(q));
}

std::uint64_t to_count(const Int& n) {
    if (n < 0 || n > std::numeric_limits<std::uint64_t>::max())
        throw Error("count out of range: " + n.str());
    return n.convert_to<std::uint64_t>();
}

} // namespace crndist
