#pragma once

#include <stdexcept>
#include <string>

namespace delfi {

// Base class for all engine failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Some 1 + lambda'(x - mu) <= 0: lambda is outside the dual domain.
struct InfeasibleMultiplier : Error {
    int machine_id;  // -1 when not attributable to a machine
    explicit InfeasibleMultiplier(const std::string& what, int machine = -1)
        : Error(what), machine_id(machine) {}
};

// The dual iteration diverged: mu is outside (or on the boundary of) the
// convex hull of the data, where the dual is unbounded below.
struct HullViolation : Error {
    int machine_id;
    explicit HullViolation(const std::string& what, int machine = -1)
        : Error(what), machine_id(machine) {}
};

// Neither convergence nor divergence within the iteration cap.
struct MaxIterations : Error {
    int machine_id;
    explicit MaxIterations(const std::string& what, int machine = -1)
        : Error(what), machine_id(machine) {}
};

struct InvalidConfig : Error {
    using Error::Error;
};

// |S| <= K/2: the honest-majority premise of the selection rule is violated.
struct SelectionDegenerate : Error {
    using Error::Error;
};

struct CenterOutsideRegion : Error {
    using Error::Error;
};

struct ParseError : Error {
    std::string file;
    int line;    // 1-based
    int column;  // 1-based
    ParseError(const std::string& what, std::string file_, int line_, int column_)
        : Error(what), file(std::move(file_)), line(line_), column(column_) {}
};

struct DimensionMismatch : Error {
    std::string file;
    DimensionMismatch(const std::string& what, std::string file_)
        : Error(what), file(std::move(file_)) {}
};

}  // namespace delfi
