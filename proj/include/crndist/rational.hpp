#ifndef CRNDIST_RATIONAL_HPP
#define CRNDIST_RATIONAL_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace crndist {

// Exact arbitrary-precision arithmetic. All probabilities and rates in the
// library are Rat; doubles appear only in the simulator and the float
// fallback of the stationary solver.
using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

inline Int num(const Rat& q) { return numerator(q); }
inline Int den(const Rat& q) { return denominator(q); }

inline bool is_integer(const Rat& q) { return den(q) == 1; }

// Renders as "num/den", always with an explicit denominator.
std::string rat_str(const Rat& q);

// Accepts "a/b", integers, and decimal literals such as "0.25" (converted
// exactly). Throws SyntaxError on anything else.
Rat parse_rat(std::string_view text);

Int lcm(const Int& a, const Int& b);

// Exact conversion of an integral Rat to a 64-bit count; throws Error if the
// value is not a natural that fits.
std::uint64_t to_count(const Rat& q);

std::uint64_t to_count(const Int& n);

} // namespace crndist

#endif
