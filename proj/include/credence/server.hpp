// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Read-only HTTP prediction service over one immutable model document.
//   GET  /health    -> {"status": "ok"}
//   GET  /model     -> model document without the training-data path
//   POST /predict   {"features": {name: value}, "method"?, "level"?}
//   POST /decision  {"features": {name: value}, "threshold": z}
// Malformed requests answer 400 with per-field messages; values outside a
// term's domain (or an invalid threshold/level) answer 422.

#pragma once

#include <string>
#include <string_view>

#include "credence/model_io.hpp"

namespace credence {

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

inline constexpr int kDensityGridPoints = 101;
inline constexpr double kDensityGridLo = 0.005;
inline constexpr double kDensityGridHi = 0.995;

class ModelService {
 public:
  explicit ModelService(ModelDocument doc);

  /// Pure request handler shared by the HTTP server and tests.
  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

  const ModelDocument& document() const noexcept { return doc_; }

 private:
  HttpResponse predict(std::string_view body) const;
  HttpResponse decide(std::string_view body) const;

  ModelDocument doc_;
  std::string model_json_;
};

/// Blocks serving on host:port until the process is stopped. Throws Io if the
/// socket cannot be bound.
void serve(const ModelService& service, const std::string& host, int port);

}  // namespace credence
