#pragma once

#include <stdexcept>
#include <string>

namespace bpb {

/// Raised when a b-adapted average is requested against a weight whose
/// mass over the relevant cube or rectangle vanishes.
class DegenerateWeightError : public std::runtime_error {
public:
  explicit DegenerateWeightError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a randomized generator exhausts its resampling budget.
class GenerationFailureError : public std::runtime_error {
public:
  explicit GenerationFailureError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an iteration produces a non-finite intermediate value.
class NumericFailureError : public std::runtime_error {
public:
  explicit NumericFailureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bpb
