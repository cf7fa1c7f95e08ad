#pragma once

#include <stdexcept>
#include <string>

namespace sica {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-side contract violation: bad argument, unmet precondition,
/// inconsistent configuration. The CLI maps these to exit code 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Requested more components than the data supports.
class RankError : public InvalidArgument {
 public:
  RankError(const std::string& what, std::size_t achievable)
      : InvalidArgument(what), achievable_rank_(achievable) {}
  std::size_t achievable_rank() const { return achievable_rank_; }

 private:
  std::size_t achievable_rank_;
};

/// Null model too coarse to resolve the requested tail (too few directions
/// or too few pooled samples for the requested p-value).
class UnstableTailError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Data is numerically degenerate (constant input, collapsed variance).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Failures reading or writing the SICA1 matrix format.
class FormatError : public Error {
 public:
  enum class Kind { io, bad_magic, unsupported_version, truncated, dimension_mismatch, non_finite };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace sica
