#pragma once

#include <stdexcept>
#include <string>

namespace randclust {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or model specs; the CLI maps this to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed input files (carries a line number in the message); exit code 2.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A dense-reconstruction guard was exceeded.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Numerically degenerate input (rank-deficient model, degenerate sketch).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace randclust
