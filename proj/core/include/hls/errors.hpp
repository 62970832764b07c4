#pragma once

#include <stdexcept>
#include <string>

namespace hls {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid static configuration: bad manifold parameters, inadmissible alpha, bad resolution.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Geometric input outside the admissible domain (off-manifold point, chart radius too large).
class DomainError : public Error {
public:
    using Error::Error;
};

/// API misuse: mismatched dimensions, incompatible grids, violated call contracts.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Lebesgue exponents outside the admissible range.
class ExponentError : public Error {
public:
    using Error::Error;
};

/// Degenerate numerical input, e.g. an identically-zero density.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

} // namespace hls
