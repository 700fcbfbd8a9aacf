// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON model-exchange document. Numbers are written with 17 significant
// digits so that every double survives a write/read cycle exactly, and the
// writer emits a fixed key order so re-serialization is byte-identical.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "credence/predict.hpp"
#include "credence/priors.hpp"
#include "credence/projection.hpp"

namespace credence {

inline constexpr std::string_view kSchemaVersion = "1";

struct Provenance {
  std::string created_at;  // ISO-8601 UTC
  std::string software_version;
  FitDiagnostics diagnostics;
  /// Path of the training file; stripped when the document is served.
  std::string training_data;
};

struct ProjectionInfo {
  std::string source_fingerprint;
  double mean_residual_kl = 0.0;
  int iterations = 0;
};

struct ModelDocument {
  /// For projected documents: prior variant Projected, zero covariance.
  PackagedModel model;
  Provenance provenance;
  std::optional<ProjectionInfo> projection;

  bool is_projected() const noexcept { return projection.has_value(); }
  /// The projected equation carried by a projected document.
  ProjectedModel projected_model() const;
};

/// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

ModelDocument make_document(const PackagedModel& model, std::string training_data = {});
ModelDocument make_projected_document(const ProjectedModel& projected, int quadrature_k = 30);

struct WriteOptions {
  bool include_training_data = true;
};

std::string write_model_document(const ModelDocument& doc, const WriteOptions& opts = {});
/// Throws ParseError with a field-specific message on malformed input.
ModelDocument parse_model_document(std::string_view text);

ModelDocument load_model_document(const std::string& path);
void save_model_document(const ModelDocument& doc, const std::string& path);

/// Prediction from a document, shared by the CLI and the HTTP service. A
/// projected document yields its equation's value for both plug-in and
/// posterior mean (zero-width interval); method is then Projected.
PredictionSummary predict_document(const ModelDocument& doc, std::span<const double> features,
                                   const PredictOptions& opts = {});

/// "%.17g" with -0 normalized to 0; throws RangeError for non-finite values.
std::string format_double(double v);

}  // namespace credence
