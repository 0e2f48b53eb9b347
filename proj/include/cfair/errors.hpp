#pragma once

#include <stdexcept>
#include <string>

namespace cfair {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t row)
        : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row(row) {}
    std::size_t row;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LookupError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Raised by the minimax trainer when a loss leaves the finite/bounded range.
struct DivergenceError : NumericError {
    DivergenceError(std::size_t epoch, std::string phase, double value)
        : NumericError("training diverged at epoch " + std::to_string(epoch) + ", phase " + phase +
                       " (loss " + std::to_string(value) + ")"),
          epoch(epoch),
          phase(std::move(phase)) {}
    std::size_t epoch;
    std::string phase;
};

}  // namespace cfair
