#pragma once

#include <stdexcept>
#include <string>

namespace gtreg {

/// Invalid configuration: bad basis spec, bad solver settings, bad CLI flags.
struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Unusable input data: non-finite cells, missing columns, empty samples.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Likelihood evaluated outside the effective domain (some b't(x_i,y_i) <= 0).
struct DomainError : std::runtime_error {
    DomainError(int row, double eta)
        : std::runtime_error("coefficients outside effective domain: row " + std::to_string(row) +
                             " has derivative " + std::to_string(eta)),
          row(row),
          eta(eta) {}
    int row;
    double eta;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace gtreg
