#pragma once

#include <stdexcept>
#include <string>

namespace wavecluster {

// Error raised by bad input data (malformed rows, degenerate series, ...).
// Contract violations on function arguments use std::invalid_argument instead;
// the CLI maps DataError -> exit 1 and invalid_argument -> exit 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wavecluster
