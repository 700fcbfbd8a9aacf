// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/sobol.hpp"

#include <bit>
#include <string>

#include "credence/error.hpp"

namespace credence {
namespace {

struct DirectionEntry {
  int degree;
  std::uint32_t poly;
  std::array<std::uint32_t, 10> m;
};

constexpr DirectionEntry kDirections[SobolSequence::kMaxDimension] = {
#include "sobol_directions.inc"
};

std::array<std::uint32_t, 32> build_directions(const DirectionEntry& e) {
  std::array<std::uint32_t, 32> v{};
  if (e.degree == 0) {
    for (int k = 0; k < 32; ++k) v[k] = 1u << (31 - k);
    return v;
  }
  const int s = e.degree;
  for (int k = 0; k < s && k < 32; ++k) v[k] = e.m[k] << (31 - k);
  for (int k = s; k < 32; ++k) {
    std::uint32_t x = v[k - s] ^ (v[k - s] >> s);
    for (int l = 1; l < s; ++l)
      if ((e.poly >> (s - 1 - l)) & 1u) x ^= v[k - l];
    v[k] = x;
  }
  return v;
}

}  // namespace

SobolSequence::SobolSequence(std::size_t dimension)
    : SobolSequence(dimension, std::span<const std::uint32_t>{}) {}

SobolSequence::SobolSequence(std::size_t dimension,
                             std::span<const std::uint32_t> digital_shift)
    : dimension_(dimension), state_(dimension, 0u), shift_(dimension, 0u) {
  if (dimension == 0 || dimension > kMaxDimension)
    fail(ErrorCode::InvalidArgument,
         "Sobol dimension must be in [1, 64], got " + std::to_string(dimension));
  if (!digital_shift.empty()) {
    if (digital_shift.size() != dimension)
      fail(ErrorCode::DimensionMismatch, "Sobol digital shift has wrong length");
    shift_.assign(digital_shift.begin(), digital_shift.end());
  }
  directions_.reserve(dimension);
  for (std::size_t j = 0; j < dimension; ++j)
    directions_.push_back(build_directions(kDirections[j]));
}

void SobolSequence::next(std::span<double> out) {
  if (out.size() != dimension_)
    fail(ErrorCode::DimensionMismatch, "Sobol output buffer has wrong length");
  // Gray code: point i differs from point i-1 by direction c, where c is the
  // position of the lowest zero bit of i-1. Index 0 (all zeros) is skipped.
  const int c = std::countr_one(index_);
  if (c >= 32) fail(ErrorCode::InvalidArgument, "Sobol sequence exhausted (2^32 points)");
  ++index_;
  constexpr double scale = 1.0 / 4294967296.0;
  for (std::size_t j = 0; j < dimension_; ++j) {
    state_[j] ^= directions_[j][c];
    out[j] = static_cast<double>(state_[j] ^ shift_[j]) * scale;
  }
}

std::vector<double> SobolSequence::next() {
  std::vector<double> out(dimension_);
  next(out);
  return out;
}

}  // namespace credence
