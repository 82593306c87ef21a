#pragma once

#include <stdexcept>
#include <string>

namespace critheat {

// Error categories. The CLI maps these onto its exit-code taxonomy.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A field, functional or step produced NaN/Inf.
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two routes to the same quantity disagree (usually: grid too coarse).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Adaptive step fell below dt_min. Not fatal for a run: it feeds blowup detection.
class StepCollapse : public std::runtime_error {
 public:
  StepCollapse(const std::string& what, double t, double dt)
      : std::runtime_error(what), t_(t), dt_(dt) {}
  double t() const noexcept { return t_; }
  double dt() const noexcept { return dt_; }

 private:
  double t_;
  double dt_;
};

class TailMassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingCheckpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WindowTooShort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace critheat
