#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ambisql {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LexError : Error {
    LexError(const std::string& msg, size_t offset)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    size_t offset;
};

struct ParseError : Error {
    ParseError(const std::string& expected, const std::string& found)
        : Error("parse error: expected " + expected + ", found '" + found + "'"),
          expected(expected),
          found(found) {}
    std::string expected;
    std::string found;
};

struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string& construct)
        : Error("unsupported construct: " + construct), construct(construct) {}
    std::string construct;
};

struct VocabError : Error {
    using Error::Error;
};

struct TemplateMalformed : Error {
    using Error::Error;
};

struct NameResolutionError : Error {
    using Error::Error;
};

struct TypeMismatchError : Error {
    using Error::Error;
};

struct EmptyTargetsError : Error {
    using Error::Error;
};

struct TransportError : Error {
    using Error::Error;
};

struct TimeoutError : Error {
    using Error::Error;
};

struct ShapeMismatchError : Error {
    using Error::Error;
};

struct EmptyResultError : Error {
    using Error::Error;
};

struct ProviderFailure : Error {
    using Error::Error;
};

// Benchmark-generation eligibility failures. The CLI tallies these per kind.
struct GenError : Error {
    enum class Reason {
        NoEligibleColumn,
        NoEligibleTable,
        NoEligibleSelection,
        NoAggregate,
        MultiTableAggregate,
    };
    GenError(Reason reason, const std::string& msg) : Error(msg), reason(reason) {}
    Reason reason;
};

}  // namespace ambisql
