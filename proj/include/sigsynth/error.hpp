#pragma once

#include <stdexcept>
#include <string>

namespace sigsynth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON syntax, wrong field type, unknown enum value).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A graph or table that would break a structural invariant (dangling edge, duplicate id, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Hard clauses of a MaxSAT instance are unsatisfiable. For encoder output this means
/// the encoding itself is broken.
class HardUnsatError : public Error {
public:
    using Error::Error;
};

/// Quantized or flattened weights do not fit in 64 bits.
class WeightOverflowError : public Error {
public:
    using Error::Error;
};

/// Brute-force oracle refuses instances beyond its size guard.
class TooLargeError : public Error {
public:
    using Error::Error;
};

/// Similarity against a signature whose weighted size is zero.
class ZeroSignatureError : public Error {
public:
    using Error::Error;
};

class InsufficientFamiliesError : public Error {
public:
    using Error::Error;
};

/// Post-condition failure inside the synthesis pipeline.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace sigsynth
