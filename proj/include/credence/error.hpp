// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace credence {

enum class ErrorCode {
  // numerical failures
  NotPositiveDefinite,
  Separation,
  NonConvergence,
  RankDeficient,
  DegenerateDistribution,
  IdentityLinkOutOfRange,
  SlopeUndefined,
  UndefinedMetric,
  // input errors
  InvalidArgument,
  DomainError,
  DimensionMismatch,
  ParseError,
  RangeError,
  EmptyDataset,
  MissingColumn,
  ConstantPredictor,
  InsufficientRows,
  ConfigError,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  /// Numerical failures map to exit code 1, input errors to exit code 2.
  bool is_numerical() const noexcept;

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace credence
