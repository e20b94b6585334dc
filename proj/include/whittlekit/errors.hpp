#pragma once

#include <stdexcept>
#include <string>

namespace whittlekit {

/// Base class for all domain errors raised by this library. The CLI maps
/// each concrete class to a distinct process exit code.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual int exit_code() const { return 1; }
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
};

/// A transition-matrix row deviates from stochasticity by more than 1e-9.
class NotStochastic : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

/// A linear system that should be regular is singular. For the gain/bias
/// system this signals a non-unichain induced chain.
class SingularSystem : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 5; }
};

class NotUnichain : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 7; }
};

/// The index sweep found no state whose advantage line crosses zero at or
/// beyond the current threshold while the policy is still nonempty.
class NoCrossing : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 5; }
};

class IterationLimit : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 5; }
};

/// Sherman-Morrison denominator is too close to zero; the caller must fall
/// back to a full re-factorization.
class DegenerateUpdate : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 8; }
};

/// Brute-force enumeration requested on a state space above the 2^S limit.
class TooLarge : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 6; }
};

class NotFound : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 8; }
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 8; }
};

class StructureMismatch : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 8; }
};

}  // namespace whittlekit
