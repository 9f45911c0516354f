#pragma once

#include <stdexcept>
#include <string>

namespace cpac {

// Base class for all domain errors raised by the workbench. CLI maps these
// to exit code 1; anything else escaping is a bug.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A machine-backed computation ran out of its step budget. Never converted
// into a silent default value.
struct BudgetExhausted : Error {
  explicit BudgetExhausted(const std::string& what) : Error(what) {}
};

// An exhaustive enumeration (|support|^m sequences, labelings, ...) would
// exceed the configured enumeration budget.
struct EnumerationBudgetExceeded : Error {
  explicit EnumerationBudgetExceeded(const std::string& what) : Error(what) {}
};

// A tri-state consistency/minimum query could not be resolved below the
// supplied cutoff and the caller required a definitive answer.
struct UnknownAtCutoff : Error {
  explicit UnknownAtCutoff(const std::string& what) : Error(what) {}
};

// Empirical risk minimization over an empty hypothesis class.
struct NoHypothesisFound : Error {
  explicit NoHypothesisFound(const std::string& what) : Error(what) {}
};

// ERM extraction needs the learner's sample-complexity function.
struct MissingSampleComplexity : Error {
  explicit MissingSampleComplexity(const std::string& what) : Error(what) {}
};

// Learner synthesis requires a finite VC dimension.
struct InfiniteVc : Error {
  explicit InfiniteVc(const std::string& what) : Error(what) {}
};

// An exact VC search needs candidate points beyond the supplied domain bound.
struct DomainBoundTooSmall : Error {
  explicit DomainBoundTooSmall(const std::string& what) : Error(what) {}
};

// A membership or consistency oracle failed to answer.
struct OracleFailure : Error {
  explicit OracleFailure(const std::string& what) : Error(what) {}
};

// Malformed input file (program text, class spec, sample, distribution,
// formula).
struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace cpac
