#pragma once

#include <stdexcept>
#include <string>

namespace spde {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: the caller handed over something outside an operation's domain.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A computation that should have succeeded on valid input did not.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

class NonMonotonePartition : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class EmptyPartition : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class CholeskyFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class ConvergenceFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class SolverBreakdown : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class InsufficientBatches : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class TailNotConverged : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class DegenerateFit : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class InsufficientSignal : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace spde
