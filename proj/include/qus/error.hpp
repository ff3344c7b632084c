#pragma once

#include <stdexcept>
#include <string>

namespace qus {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A precondition on spaces, points or shapes was violated by the caller.
struct DomainError : Error {
    using Error::Error;
};

// Constructing a product/exponential would exceed the cardinality cap.
struct CapError : Error {
    using Error::Error;
};

// Model-text rejection with a source position (1-based).
struct DslError : Error {
    int line;
    int col;
    DslError(int line_, int col_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_),
          col(col_) {}
};

// An internal invariant broke; indicates a bug, not bad input.
struct InternalError : Error {
    using Error::Error;
};

} // namespace qus
