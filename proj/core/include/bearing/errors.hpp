#pragma once

#include <stdexcept>
#include <string>

namespace bearing {

// Base for every error raised by the toolkit. The subclasses map onto the
// CLI exit codes: InputError -> 2, InfeasibleError -> 3, RuntimeEventError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (bad indices, self-loops, bad files).
class InputError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that admits no solution (non-localizable, singular K_i).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A run-time condition that makes a law undefined (collocation, divergence).
class RuntimeEventError : public Error {
 public:
  using Error::Error;
};

class CollocationError : public RuntimeEventError {
 public:
  CollocationError(int i, int j, double distance);
  int first() const { return i_; }
  int second() const { return j_; }
  double distance() const { return distance_; }

 private:
  int i_;
  int j_;
  double distance_;
};

class SingularGainError : public InfeasibleError {
 public:
  explicit SingularGainError(int follower);
  int follower() const { return follower_; }

 private:
  int follower_;
};

}  // namespace bearing
