#pragma once

#include <stdexcept>
#include <string>

namespace clear {

/// Bad argument value (out-of-range octave, duration, rt60, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Attribute annotation impossible (e.g. silent waveform).
class UndefinedAttribute : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A label that is not part of the attribute taxonomy.
class UnknownLabel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed program: wrong arity, type mismatch, cycle, dangling input.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidBinding : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingSound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data failed validation (duplicate ids, malformed records).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace clear
