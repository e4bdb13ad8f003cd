#pragma once

#include <stdexcept>
#include <string>

namespace pixie {

// Malformed or invariant-violating input data (sembank lines, benchmark rows,
// checkpoints, configs). The CLI maps this to exit status 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter or input shapes that do not agree with each other.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A brute-force enumeration would exceed its configured size limit.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pixie
