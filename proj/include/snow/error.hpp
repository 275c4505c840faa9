#pragma once

#include <stdexcept>
#include <string>

namespace snow {

// Exit-code mapping used by the CLI: usage 1, data 2, numeric 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

// Malformed input, failed invariant, bad file format.
class DataError : public Error {
public:
    using Error::Error;
};

// Non-convergence or an undefined metric.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace snow
