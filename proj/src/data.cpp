// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "credence/error.hpp"

namespace credence {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view text, double& out) {
  const std::string buf(text);
  if (buf.empty()) return false;
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && std::isfinite(out);
}

}  // namespace

const char* to_string(TermKind kind) {
  switch (kind) {
    case TermKind::Continuous: return "continuous";
    case TermKind::Binary: return "binary";
    case TermKind::Ordinal: return "ordinal";
  }
  return "continuous";
}

TermKind parse_term_kind(std::string_view text) {
  if (text == "continuous") return TermKind::Continuous;
  if (text == "binary") return TermKind::Binary;
  if (text == "ordinal") return TermKind::Ordinal;
  fail(ErrorCode::ParseError, "unknown term kind '" + std::string(text) + "'");
}

double Transform::apply(double x) const {
  switch (kind) {
    case Kind::None: return x;
    case Kind::CapAbove: return std::min(x, value);
    case Kind::CapBelow: return std::max(x, value);
  }
  return x;
}

std::string Transform::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::None: return "none";
    case Kind::CapAbove: out << "capped above at " << value; break;
    case Kind::CapBelow: out << "capped below at " << value; break;
  }
  return out.str();
}

void validate_terms(std::span<const TermSpec> terms) {
  std::set<std::string> seen;
  for (const auto& t : terms) {
    if (t.name.empty()) fail(ErrorCode::InvalidArgument, "term with empty name");
    if (!seen.insert(t.name).second)
      fail(ErrorCode::InvalidArgument, "duplicate term name '" + t.name + "'");
    if (!std::isfinite(t.transform.value))
      fail(ErrorCode::InvalidArgument, "non-finite transform parameter on '" + t.name + "'");
  }
}

std::vector<TermSpec> parse_term_list(std::string_view text) {
  std::vector<TermSpec> terms;
  if (trim(text).empty()) return terms;
  for (std::string_view item : split(text, ',')) {
    item = trim(item);
    const auto parts = split(item, ':');
    TermSpec term;
    term.name = std::string(trim(parts[0]));
    if (parts.size() > 1) term.kind = parse_term_kind(trim(parts[1]));
    if (parts.size() > 2) {
      const std::string_view tr = trim(parts[2]);
      const std::size_t eq = tr.find('=');
      double c = 0.0;
      if (eq == std::string_view::npos || !parse_double(tr.substr(eq + 1), c))
        fail(ErrorCode::ParseError, "bad transform '" + std::string(tr) + "'");
      const std::string_view key = tr.substr(0, eq);
      if (key == "cap_above")
        term.transform = Transform::cap_above(c);
      else if (key == "cap_below")
        term.transform = Transform::cap_below(c);
      else
        fail(ErrorCode::ParseError, "unknown transform '" + std::string(key) + "'");
    }
    if (parts.size() > 3)
      fail(ErrorCode::ParseError, "malformed term '" + std::string(item) + "'");
    terms.push_back(std::move(term));
  }
  validate_terms(terms);
  return terms;
}

std::optional<std::size_t> find_term(std::span<const TermSpec> terms, std::string_view name) {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i].name == name) return i;
  return std::nullopt;
}

double prepare_feature(const TermSpec& term, double raw) {
  if (!std::isfinite(raw))
    fail(ErrorCode::RangeError, "term '" + term.name + "': value is not finite");
  const double v = term.transform.apply(raw);
  if (term.kind == TermKind::Binary && v != 0.0 && v != 1.0) {
    std::ostringstream msg;
    msg << "term '" << term.name << "': binary value must be 0 or 1, got " << raw;
    fail(ErrorCode::RangeError, msg.str());
  }
  if (term.kind == TermKind::Ordinal && v != std::round(v)) {
    std::ostringstream msg;
    msg << "term '" << term.name << "': ordinal value must be an integer, got " << raw;
    fail(ErrorCode::RangeError, msg.str());
  }
  return v;
}

void Dataset::validate() const {
  const std::size_t n = x.rows();
  if (n == 0) fail(ErrorCode::EmptyDataset, "dataset has no rows");
  if (x.cols() != terms.size() + 1)
    fail(ErrorCode::DimensionMismatch, "design matrix must have one column per term plus intercept");
  if (y.size() != n || w.size() != n)
    fail(ErrorCode::DimensionMismatch, "responses/weights do not match row count");
  validate_terms(terms);
  for (std::size_t i = 0; i < n; ++i) {
    if (x(i, 0) != 1.0)
      fail(ErrorCode::InvalidArgument, "first design column must be the intercept (all ones)");
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (!std::isfinite(x(i, j)))
        fail(ErrorCode::RangeError, "non-finite design value at row " + std::to_string(i + 1));
    if (!(y[i] >= 0.0 && y[i] <= 1.0))
      fail(ErrorCode::RangeError, "response outside [0,1] at row " + std::to_string(i + 1));
    if (!(w[i] > 0.0) || !std::isfinite(w[i]))
      fail(ErrorCode::RangeError, "weight must be positive at row " + std::to_string(i + 1));
  }
}

Dataset make_dataset(std::vector<TermSpec> terms, const Matrix& predictors,
                     std::span<const double> y, std::span<const double> w) {
  const std::size_t n = predictors.rows();
  if (predictors.cols() != terms.size())
    fail(ErrorCode::DimensionMismatch, "predictor columns do not match terms");
  Dataset ds;
  ds.terms = std::move(terms);
  ds.x = Matrix(n, ds.terms.size() + 1);
  for (std::size_t i = 0; i < n; ++i) {
    ds.x(i, 0) = 1.0;
    for (std::size_t j = 0; j < ds.terms.size(); ++j)
      ds.x(i, j + 1) = prepare_feature(ds.terms[j], predictors(i, j));
  }
  ds.y.assign(y.begin(), y.end());
  if (w.empty())
    ds.w.assign(n, 1.0);
  else
    ds.w.assign(w.begin(), w.end());
  ds.validate();
  return ds;
}

Dataset select_terms(const Dataset& ds, std::span<const std::string> names) {
  std::vector<std::size_t> cols{0};
  Dataset out;
  for (const auto& name : names) {
    const auto idx = find_term(ds.terms, name);
    if (!idx) fail(ErrorCode::MissingColumn, "term '" + name + "' not in dataset");
    cols.push_back(*idx + 1);
    out.terms.push_back(ds.terms[*idx]);
  }
  out.x = Matrix(ds.rows(), cols.size());
  for (std::size_t i = 0; i < ds.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out.x(i, j) = ds.x(i, cols[j]);
  out.y = ds.y;
  out.w = ds.w;
  return out;
}

CsvTable parse_csv_table(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF")
      line.remove_prefix(3);
    if (trim(line).empty()) {
      if (pos > text.size()) break;
      continue;
    }
    const auto cells = split(line, ',');
    if (!have_header) {
      for (auto c : cells) table.header.emplace_back(trim(c));
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(table.header.size()) + " cells, got " +
                                      std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string_view cell = trim(cells[j]);
      if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan")
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column '" +
                                        table.header[j] + "': missing value");
      if (!parse_double(cell, row[j]))
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column '" +
                                        table.header[j] + "': non-numeric value '" +
                                        std::string(cell) + "'");
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) fail(ErrorCode::EmptyDataset, "CSV input is empty");
  return table;
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_table(buf.str());
}

namespace {

Dataset dataset_from_table(const CsvTable& table, std::vector<TermSpec> terms,
                           const CsvOptions& options) {
  if (table.rows.empty()) fail(ErrorCode::EmptyDataset, "CSV input has no data rows");
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) fail(ErrorCode::MissingColumn, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const std::size_t outcome = column(options.outcome);
  std::optional<std::size_t> weight;
  if (options.weight_column) weight = column(*options.weight_column);

  if (terms.empty()) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (j == outcome || (weight && j == *weight)) continue;
      TermSpec t{table.header[j], TermKind::Binary, {}};
      for (const auto& row : table.rows)
        if (row[j] != 0.0 && row[j] != 1.0) {
          t.kind = TermKind::Continuous;
          break;
        }
      terms.push_back(std::move(t));
    }
  }
  validate_terms(terms);

  std::vector<std::size_t> cols;
  for (const auto& t : terms) cols.push_back(column(t.name));

  const std::size_t n = table.rows.size();
  Dataset ds;
  ds.terms = std::move(terms);
  ds.x = Matrix(n, cols.size() + 1);
  ds.y.resize(n);
  ds.w.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    const std::string where = "data row " + std::to_string(i + 1);
    ds.x(i, 0) = 1.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      try {
        ds.x(i, j + 1) = prepare_feature(ds.terms[j], row[cols[j]]);
      } catch (const Error& e) {
        fail(e.code(), where + ": " + e.what());
      }
    }
    ds.y[i] = row[outcome];
    if (!(ds.y[i] >= 0.0 && ds.y[i] <= 1.0)) {
      std::ostringstream msg;
      msg << where << ": outcome '" << options.outcome << "' = " << ds.y[i]
          << " is outside [0,1]";
      fail(ErrorCode::RangeError, msg.str());
    }
    if (weight) {
      ds.w[i] = row[*weight];
      if (!(ds.w[i] > 0.0))
        fail(ErrorCode::RangeError, where + ": weight must be positive");
    }
  }
  ds.validate();
  return ds;
}

}  // namespace

Dataset parse_csv(std::string_view text, std::vector<TermSpec> terms, const CsvOptions& options) {
  return dataset_from_table(parse_csv_table(text), std::move(terms), options);
}

Dataset load_csv(const std::string& path, std::vector<TermSpec> terms, const CsvOptions& options) {
  return dataset_from_table(read_csv_table(path), std::move(terms), options);
}

Matrix Standardization::apply(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 1; j < x.cols(); ++j) out(i, j) = (x(i, j) - center[j]) / scale[j];
  return out;
}

Matrix Standardization::revert(const Matrix& x_std) const {
  Matrix out = x_std;
  for (std::size_t i = 0; i < x_std.rows(); ++i)
    for (std::size_t j = 1; j < x_std.cols(); ++j)
      out(i, j) = x_std(i, j) * scale[j] + center[j];
  return out;
}

Matrix Standardization::coefficient_map() const {
  // eta = b0 + sum_j b_j (x_j - c_j)/s_j
  //     = (b0 - sum_j b_j c_j/s_j) + sum_j (b_j/s_j) x_j
  const std::size_t k = center.size();
  Matrix t(k, k);
  t(0, 0) = 1.0;
  for (std::size_t j = 1; j < k; ++j) {
    t(0, j) = -center[j] / scale[j];
    t(j, j) = 1.0 / scale[j];
  }
  return t;
}

Vector Standardization::to_natural(std::span<const double> beta_std) const {
  const Matrix t = coefficient_map();
  Vector out(t.rows(), 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) out[i] += t(i, j) * beta_std[j];
  return out;
}

Matrix Standardization::covariance_to_natural(const Matrix& sigma_std) const {
  const Matrix t = coefficient_map();
  return multiply(multiply(t, sigma_std), transpose(t));
}

std::pair<Dataset, Standardization> standardize(const Dataset& ds) {
  const std::size_t n = ds.rows();
  const std::size_t k = ds.x.cols();
  if (n < 2) fail(ErrorCode::InsufficientRows, "standardization needs at least two rows");
  Standardization s;
  s.center.assign(k, 0.0);
  s.scale.assign(k, 1.0);
  for (std::size_t j = 1; j < k; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ds.x(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (ds.x(i, j) - mean) * (ds.x(i, j) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
      fail(ErrorCode::ConstantPredictor,
           "term '" + ds.terms[j - 1].name + "' is constant and cannot be standardized");
    s.center[j] = mean;
    s.scale[j] = sd;
  }
  Dataset out = ds;
  out.x = s.apply(ds.x);
  return {std::move(out), std::move(s)};
}

}  // namespace credence
