// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "credence/linalg.hpp"

namespace credence {

enum class TermKind { Continuous, Binary, Ordinal };

const char* to_string(TermKind kind);
TermKind parse_term_kind(std::string_view text);

struct Transform {
  enum class Kind { None, CapAbove, CapBelow };
  Kind kind = Kind::None;
  double value = 0.0;

  static Transform none() { return {}; }
  static Transform cap_above(double c) { return {Kind::CapAbove, c}; }
  static Transform cap_below(double c) { return {Kind::CapBelow, c}; }

  double apply(double x) const;
  std::string describe() const;
  bool operator==(const Transform&) const = default;
};

struct TermSpec {
  std::string name;
  TermKind kind = TermKind::Continuous;
  Transform transform;

  bool operator==(const TermSpec&) const = default;
};

/// Checks that names are unique and transform parameters finite.
void validate_terms(std::span<const TermSpec> terms);

/// Parses "name[:kind[:cap_above=c|cap_below=c]]" items separated by commas,
/// e.g. "age,sbp:continuous:cap_above=100,female:binary".
std::vector<TermSpec> parse_term_list(std::string_view text);

/// Index of a term by name, or nullopt.
std::optional<std::size_t> find_term(std::span<const TermSpec> terms, std::string_view name);

/// Applies the term's transform and checks the value is admissible for the
/// term kind (binary in {0,1}, ordinal integral). Throws RangeError if not.
double prepare_feature(const TermSpec& term, double raw);

/// Design matrix with intercept column, responses in [0,1], positive weights.
struct Dataset {
  std::vector<TermSpec> terms;
  Matrix x;  // n x (p+1), column 0 all ones
  Vector y;
  Vector w;

  std::size_t rows() const noexcept { return x.rows(); }
  std::size_t num_terms() const noexcept { return terms.size(); }

  /// Throws on any broken invariant (shape, intercept, label range, weights).
  void validate() const;
};

/// Builds a dataset from raw predictor columns (n x p, no intercept).
/// Transforms are applied. Weights default to 1.
Dataset make_dataset(std::vector<TermSpec> terms, const Matrix& predictors,
                     std::span<const double> y, std::span<const double> w = {});

/// Subset of terms (by name) with the intercept retained.
Dataset select_terms(const Dataset& ds, std::span<const std::string> names);

struct CsvOptions {
  std::string outcome;
  std::optional<std::string> weight_column;
};

/// Reads a comma-separated file with a header row. When terms is empty every
/// column except the outcome (and weight) becomes a term; 0/1-valued columns
/// are typed binary, all others continuous.
Dataset load_csv(const std::string& path, std::vector<TermSpec> terms,
                 const CsvOptions& options);
Dataset parse_csv(std::string_view text, std::vector<TermSpec> terms,
                  const CsvOptions& options);

/// Raw numeric table (header + rows), no dataset semantics.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv_table(std::string_view text);
CsvTable read_csv_table(const std::string& path);

/// Per-column center and scale; entry 0 (intercept) is (0, 1).
/// Uses the sample standard deviation (divisor n - 1).
struct Standardization {
  Vector center;
  Vector scale;

  /// Maps natural-scale design rows to the standardized scale.
  Matrix apply(const Matrix& x) const;
  Matrix revert(const Matrix& x_std) const;
  /// T such that beta_natural = T beta_standardized.
  Matrix coefficient_map() const;
  Vector to_natural(std::span<const double> beta_std) const;
  Matrix covariance_to_natural(const Matrix& sigma_std) const;
};

/// Throws ConstantPredictor when a non-intercept column has zero spread.
std::pair<Dataset, Standardization> standardize(const Dataset& ds);

}  // namespace credence
