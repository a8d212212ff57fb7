#pragma once

#include <stdexcept>
#include <string>

namespace cohortlab {

// Invalid inputs: parameters outside their documented domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file or in-memory dataset violates its declared schema or a structural
// rule (empty cells, missing columns, bad header).
class DataContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Synthetic-panel generation could not satisfy its constraints.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver ran out of iterations. Carries the last iterate so
// callers can report how far it got.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_iterate, int iterations)
      : std::runtime_error(what), last_iterate_(last_iterate), iterations_(iterations) {}
  double last_iterate() const { return last_iterate_; }
  int iterations() const { return iterations_; }

 private:
  double last_iterate_;
  int iterations_;
};

// A simulated spell exceeded the configured maximum duration.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int max_duration)
      : std::runtime_error(what), max_duration_(max_duration) {}
  int max_duration() const { return max_duration_; }

 private:
  int max_duration_;
};

}  // namespace cohortlab
