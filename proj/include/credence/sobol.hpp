// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace credence {

/// Gray-code Sobol generator with Joe-Kuo direction numbers (32-bit).
/// The all-zero initial point is skipped, so the first point emitted in
/// dimension 0 is 0.5. An optional digital shift (XOR per coordinate) gives
/// randomized but still low-discrepancy streams.
class SobolSequence {
 public:
  static constexpr std::size_t kMaxDimension = 64;

  explicit SobolSequence(std::size_t dimension);
  SobolSequence(std::size_t dimension, std::span<const std::uint32_t> digital_shift);

  std::size_t dimension() const noexcept { return dimension_; }
  /// Number of points emitted so far.
  std::uint64_t index() const noexcept { return index_; }

  /// Writes the next point into out (size = dimension), each coordinate in [0,1).
  void next(std::span<double> out);
  std::vector<double> next();

 private:
  std::size_t dimension_;
  std::uint64_t index_ = 0;
  std::vector<std::array<std::uint32_t, 32>> directions_;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shift_;
};

}  // namespace credence
