#pragma once

#include <stdexcept>
#include <string>

namespace camsearch {

// Bad input data: malformed files, violated invariants, checksum mismatches.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid arguments or configuration supplied by the caller.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace camsearch
