// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/error.hpp"

namespace credence {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Separation: return "Separation";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::IdentityLinkOutOfRange: return "IdentityLinkOutOfRange";
    case ErrorCode::SlopeUndefined: return "SlopeUndefined";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ConstantPredictor: return "ConstantPredictor";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

bool Error::is_numerical() const noexcept {
  switch (code_) {
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::Separation:
    case ErrorCode::NonConvergence:
    case ErrorCode::RankDeficient:
    case ErrorCode::DegenerateDistribution:
    case ErrorCode::IdentityLinkOutOfRange:
    case ErrorCode::SlopeUndefined:
    case ErrorCode::UndefinedMetric:
      return true;
    default:
      return false;
  }
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace credence
