#ifndef CRNDIST_PMF_HPP
#define CRNDIST_PMF_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crndist/rational.hpp"

namespace crndist {

using Count = std::uint64_t;
using Point = std::vector<Count>;

// Finite-support probability mass function over tuples of naturals.
// Canonical representation: only strictly positive entries are stored and the
// stored masses add up to exactly 1, so structural equality is distribution
// equality.
class Pmf {
public:
    using Entries = std::map<Point, Rat>;

    static Pmf point_mass(Point value);
    static Pmf point_mass(Count value) { return point_mass(Point{value}); }

    // Validates the invariants (dim > 0, tuples of length dim, positive
    // masses, unit total) and drops nothing: zero entries are rejected.
    static Pmf from_entries(int dim, Entries entries);

    int dim() const { return dim_; }
    const Entries& entries() const { return entries_; }
    Rat at(const Point& p) const;
    Rat at(Count v) const { return at(Point{v}); }

    bool operator==(const Pmf& other) const = default;

private:
    Pmf(int dim, Entries entries) : dim_(dim), entries_(std::move(entries)) {}
    int dim_;
    Entries entries_;
};

// Convolution: (a+b)(y) = sum over yi+yj=y of a(yi)b(yj). Dim-1 only.
Pmf pmf_sum(const Pmf& a, const Pmf& b);

// min(a,b)(y) = sum over min(yi,yj)=y of a(yi)b(yj). Dim-1 only.
Pmf pmf_min(const Pmf& a, const Pmf& b);

// Moves mass at y to k1*y; k1 = 0 collapses everything onto 0.
Pmf pmf_mul_nat(const Pmf& a, Count k1);

// (a/k2)(y) = sum over floor(yi/k2)=y of a(yi); k2 must be positive.
Pmf pmf_div_nat(const Pmf& a, Count k2);

// Multiplication by a nonnegative rational k = k1/k2 in lowest terms:
// multiply by k1, then divide by k2.
Pmf pmf_scale_rat(const Pmf& a, const Rat& k);

// p*a + (1-p)*b with p in [0,1]; dims must agree.
Pmf pmf_convex(const Pmf& a, const Pmf& b, const Rat& p);

// Sum of absolute differences over the union of supports; in [0,2].
Rat l1_distance(const Pmf& a, const Pmf& b);

// Closeness measure: over the union of supports, the minimum of the
// per-point ratios min(a(n)/b(n), b(n)/a(n)) with x/0 = 0 for x > 0.
// Equals 1 iff the pmfs are identical.
Rat ratio_closeness(const Pmf& a, const Pmf& b);

// The max-over-points variant of the same per-point ratio. A single agreeing
// support point makes this 1, which is why ratio_closeness above is the
// working measure; this form is kept under its own name.
Rat ratio_closeness_max(const Pmf& a, const Pmf& b);

// Result of dropping the tail of a dim-1 pmf. The kept weights are NOT
// renormalized (their total is 1 - mass_lost); renormalized() is the
// explicit opt-in.
struct TruncationResult {
    std::map<Count, Rat> kept;
    Rat mass_lost;

    std::vector<Count> kept_support() const;
    Pmf renormalized() const;
};

// Streams (value, mass) pairs; nullopt signals exhaustion. Pairs must be
// emitted in an order whose remaining tail mass is nonincreasing.
using TailGen = std::function<std::optional<std::pair<Count, Rat>>()>;

// Keeps the shortest prefix whose lost mass is < epsilon (0 < epsilon < 1).
TruncationResult truncate(TailGen gen, const Rat& epsilon);

// Finite pmfs are kept whole (mass_lost = 0).
TruncationResult truncate(const Pmf& a, const Rat& epsilon);

// Tail generator for the geometric pmf p*(1-p)^k, k = 0, 1, 2, ...
TailGen geometric_tail(const Rat& p);

// Text format: one `value[,value...] : num/den` entry per line, `#` comments.
Pmf parse_pmf(const std::string& text);
std::string pmf_to_text(const Pmf& pmf);

} // namespace crndist

#endif
