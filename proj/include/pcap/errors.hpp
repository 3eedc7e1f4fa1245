#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: empty windows, non-positive steps, bad descriptors.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Evaluation of a finite table or sampled body outside its domain.
class OutOfWindow : public Error {
 public:
  using Error::Error;
};

/// A mathematical hypothesis of an operation failed at a specific index.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& what, std::int64_t index)
      : Error(what), index_(index) {}
  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

/// a(n) vanished (numerically) in x(n) = a(n) x(n-1).
class ZeroCoefficient : public HypothesisViolation {
 public:
  using HypothesisViolation::HypothesisViolation;
};

/// |1 + b_i(n)| vanished (numerically) for an impulsive jump coefficient.
class DegenerateJump : public HypothesisViolation {
 public:
  using HypothesisViolation::HypothesisViolation;
};

/// A scan window contained no nonzero almost period.
class NoAlmostPeriod : public Error {
 public:
  using Error::Error;
};

/// Assumption (A2) failed for at least one component.
class A2Failure : public Error {
 public:
  using Error::Error;
};

/// A right-hand side failed or produced a non-finite state during
/// integration; the message carries the time stamp.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Domain error in a logarithmic transform (zero value).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcap
