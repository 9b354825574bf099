#ifndef MSLAB_ERRORS_HPP
#define MSLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mslab {

// Unknown mode id, generator name, region label or scenario name.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Problem size beyond what an exhaustive or dense routine accepts.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Inputs violate an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A single-particle spectrum has an eigenvalue at (or within tolerance of)
// zero, so the half-filled ground state is ambiguous.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, double eigenvalue, int winding = 0)
      : std::runtime_error(what), eigenvalue_(eigenvalue), winding_(winding) {}
  double eigenvalue() const noexcept { return eigenvalue_; }
  int winding() const noexcept { return winding_; }

 private:
  double eigenvalue_;
  int winding_;
};

// Too few valid ensemble members, or an ill-conditioned Renyi-2 denominator.
class EnsembleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration document. key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace mslab

#endif  // MSLAB_ERRORS_HPP
