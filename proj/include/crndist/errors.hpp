#ifndef CRNDIST_ERRORS_HPP
#define CRNDIST_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crndist {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct DivisorZero : Error { using Error::Error; };
struct ProbabilityOutOfRange : Error { using Error::Error; };
struct EpsilonOutOfRange : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };

struct SyntaxError : Error {
    SyntaxError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};
struct InvalidWeight : Error { using Error::Error; };
struct UnboundVariable : Error { using Error::Error; };
struct DegenerateWeight : Error { using Error::Error; };

struct NotEnabled : Error { using Error::Error; };
struct NotFresh : Error { using Error::Error; };
struct UnknownSpecies : Error { using Error::Error; };

struct EmptySupport : Error { using Error::Error; };
struct NonPositiveRate : Error { using Error::Error; };
struct NotNro : Error { using Error::Error; };
struct OutputNotFound : Error { using Error::Error; };
struct NonRepresentableCount : Error { using Error::Error; };

struct StateCapExceeded : Error {
    explicit StateCapExceeded(std::uint64_t cap)
        : Error("state space exceeds cap of " + std::to_string(cap) +
                " states"),
          cap(cap) {}
    std::uint64_t cap;
};

} // namespace crndist

#endif
