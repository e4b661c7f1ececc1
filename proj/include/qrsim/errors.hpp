#pragma once

#include <stdexcept>
#include <string>

namespace qrsim {

/// Base class for all simulator-specific error conditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Werner parameter below 1/4: the state is still a valid mixture but the
/// purification formulas assume F >= 1/4.
class UnphysicalWernerError : public Error {
public:
    using Error::Error;
};

/// Purification succeeded with probability zero; there is no kept outcome
/// to normalize.
class NoKeepOutcomeError : public Error {
public:
    using Error::Error;
};

/// Bell coefficients fail the normalization tolerance.
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// A bracketed root search found no sign change.
class NoCrossingError : public Error {
public:
    using Error::Error;
};

class UnknownNodeError : public Error {
public:
    using Error::Error;
};

/// Two endpoints are not connected once isolation is applied.
class PartitionedError : public Error {
public:
    using Error::Error;
};

/// Recursive tomography hit a level with fidelity at or below 1/4.
class InsufficientFidelityError : public Error {
public:
    using Error::Error;
};

/// A check schedule needs more pair indices than the stream provides.
class InsufficientStreamError : public Error {
public:
    using Error::Error;
};

/// Scenario or input document failed schema validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace qrsim
