// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "credence/error.hpp"

#ifndef CREDENCE_VERSION
#define CREDENCE_VERSION "0.0.0"
#endif

namespace credence {

using nlohmann::json;

namespace {

std::string quote(std::string_view s) { return json(std::string(s)).dump(); }

std::string number_array(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

const char* transform_name(Transform::Kind k) {
  switch (k) {
    case Transform::Kind::None: return "none";
    case Transform::Kind::CapAbove: return "cap_above";
    case Transform::Kind::CapBelow: return "cap_below";
  }
  return "none";
}

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  fail(ErrorCode::ParseError, "model document: field '" + field + "' " + why);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(where.empty() ? key : where + "." + key, "is missing");
  return *it;
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(field, "must be finite");
  return v;
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "must be a string");
  return j.get<std::string>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "must be an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) bad(field, "must be true or false");
  return j.get<bool>();
}

Vector get_numbers(const json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "must be an array of numbers");
  Vector out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

template <class F>
auto rethrow_as_parse(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    bad(field, e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::RangeError, "cannot serialize a non-finite number");
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ProjectedModel ModelDocument::projected_model() const {
  if (!projection) fail(ErrorCode::InvalidArgument, "model document is not a projected model");
  ProjectedModel p;
  p.terms = model.terms;
  p.beta = model.beta;
  p.link = model.link;
  p.source_fingerprint = projection->source_fingerprint;
  p.mean_residual_kl = projection->mean_residual_kl;
  p.iterations = projection->iterations;
  return p;
}

ModelDocument make_document(const PackagedModel& model, std::string training_data) {
  ModelDocument doc;
  doc.model = model;
  doc.provenance.created_at = utc_timestamp();
  doc.provenance.software_version = CREDENCE_VERSION;
  doc.provenance.diagnostics = model.diagnostics;
  doc.provenance.training_data = std::move(training_data);
  return doc;
}

ModelDocument make_projected_document(const ProjectedModel& projected, int quadrature_k) {
  ModelDocument doc;
  doc.model.terms = projected.terms;
  doc.model.beta = projected.beta;
  doc.model.sigma = Matrix(projected.beta.size(), projected.beta.size());
  doc.model.link = projected.link;
  doc.model.prior.variant = PriorVariant::Projected;
  doc.model.quadrature_k = quadrature_k;
  doc.model.diagnostics.converged = true;
  doc.model.diagnostics.iterations = projected.iterations;
  doc.projection = ProjectionInfo{projected.source_fingerprint, projected.mean_residual_kl,
                                  projected.iterations};
  doc.provenance.created_at = utc_timestamp();
  doc.provenance.software_version = CREDENCE_VERSION;
  doc.provenance.diagnostics = doc.model.diagnostics;
  return doc;
}

std::string write_model_document(const ModelDocument& doc, const WriteOptions& opts) {
  const PackagedModel& m = doc.model;
  m.validate();
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema_version\": " << quote(m.schema_version) << ",\n";
  out << "  \"link\": " << quote(to_string(m.link)) << ",\n";
  out << "  \"terms\": [";
  for (std::size_t j = 0; j < m.terms.size(); ++j) {
    const TermSpec& t = m.terms[j];
    out << (j ? ",\n    " : "\n    ") << "{\"name\": " << quote(t.name)
        << ", \"kind\": " << quote(to_string(t.kind)) << ", \"transform\": {\"type\": "
        << quote(transform_name(t.transform.kind));
    if (t.transform.kind != Transform::Kind::None)
      out << ", \"value\": " << format_double(t.transform.value);
    out << "}}";
  }
  out << (m.terms.empty() ? "],\n" : "\n  ],\n");
  out << "  \"beta\": " << number_array(m.beta) << ",\n";
  Vector lower;
  for (std::size_t i = 0; i < m.sigma.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) lower.push_back(m.sigma(i, j));
  out << "  \"sigma\": " << number_array(lower) << ",\n";

  const PriorInfo& p = m.prior;
  out << "  \"prior\": {\"variant\": " << quote(to_string(p.variant));
  if (p.m) out << ", \"m\": " << format_double(*p.m);
  if (!p.penalised_terms.empty()) {
    out << ", \"penalised_terms\": [";
    for (std::size_t j = 0; j < p.penalised_terms.size(); ++j)
      out << (j ? ", " : "") << quote(p.penalised_terms[j]);
    out << "]";
  }
  if (p.lambda_hat) out << ", \"lambda_hat\": " << format_double(*p.lambda_hat);
  if (p.var_log_lambda) out << ", \"var_log_lambda\": " << format_double(*p.var_log_lambda);
  if (p.flat_marginal) out << ", \"flat_marginal\": true";
  out << "},\n";
  out << "  \"quadrature_k\": " << m.quadrature_k << ",\n";
  if (doc.projection) {
    out << "  \"projection\": {\"source_fingerprint\": " << quote(doc.projection->source_fingerprint)
        << ", \"mean_residual_kl\": " << format_double(doc.projection->mean_residual_kl)
        << ", \"iterations\": " << doc.projection->iterations << "},\n";
  }
  const Provenance& pv = doc.provenance;
  const FitDiagnostics& d = pv.diagnostics;
  out << "  \"provenance\": {\n";
  out << "    \"created_at\": " << quote(pv.created_at) << ",\n";
  out << "    \"software_version\": " << quote(pv.software_version) << ",\n";
  if (opts.include_training_data && !pv.training_data.empty())
    out << "    \"training_data\": " << quote(pv.training_data) << ",\n";
  out << "    \"diagnostics\": {\"converged\": " << (d.converged ? "true" : "false")
      << ", \"iterations\": " << d.iterations << ", \"deviance\": " << format_double(d.deviance)
      << ", \"max_score\": " << format_double(d.max_score) << ", \"rows\": " << d.rows
      << ", \"augmentation_rows\": " << d.augmentation_rows
      << ", \"tolerance\": " << format_double(d.tolerance)
      << ", \"max_iterations\": " << d.max_iterations << "}\n";
  out << "  }\n";
  out << "}\n";
  return out.str();
}

ModelDocument parse_model_document(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("model document is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorCode::ParseError, "model document must be a JSON object");

  ModelDocument doc;
  PackagedModel& m = doc.model;
  m.schema_version = get_string(member(root, "schema_version", ""), "schema_version");
  if (m.schema_version != kSchemaVersion)
    bad("schema_version", "is '" + m.schema_version + "', expected '" + std::string(kSchemaVersion) + "'");
  m.link = rethrow_as_parse("link", [&] { return parse_link(get_string(member(root, "link", ""), "link")); });

  const json& terms = member(root, "terms", "");
  if (!terms.is_array()) bad("terms", "must be an array");
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const std::string where = "terms[" + std::to_string(j) + "]";
    const json& t = terms[j];
    if (!t.is_object()) bad(where, "must be an object");
    TermSpec spec;
    spec.name = get_string(member(t, "name", where), where + ".name");
    spec.kind = rethrow_as_parse(where + ".kind", [&] {
      return parse_term_kind(get_string(member(t, "kind", where), where + ".kind"));
    });
    const json& tr = member(t, "transform", where);
    if (!tr.is_object()) bad(where + ".transform", "must be an object");
    const std::string type = get_string(member(tr, "type", where + ".transform"), where + ".transform.type");
    if (type == "none") {
      spec.transform = Transform::none();
    } else if (type == "cap_above" || type == "cap_below") {
      const double v = get_number(member(tr, "value", where + ".transform"), where + ".transform.value");
      spec.transform = type == "cap_above" ? Transform::cap_above(v) : Transform::cap_below(v);
    } else {
      bad(where + ".transform.type", "is unknown ('" + type + "')");
    }
    m.terms.push_back(std::move(spec));
  }
  rethrow_as_parse("terms", [&] { validate_terms(m.terms); return 0; });

  m.beta = get_numbers(member(root, "beta", ""), "beta");
  const std::size_t k = m.beta.size();
  if (k != m.terms.size() + 1)
    bad("beta", "has " + std::to_string(k) + " entries, expected terms + 1 = " +
                    std::to_string(m.terms.size() + 1));
  const Vector lower = get_numbers(member(root, "sigma", ""), "sigma");
  if (lower.size() != k * (k + 1) / 2)
    bad("sigma", "has " + std::to_string(lower.size()) + " entries, expected " +
                     std::to_string(k * (k + 1) / 2) + " (lower triangle)");
  m.sigma = Matrix(k, k);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      m.sigma(i, j) = lower[pos];
      m.sigma(j, i) = lower[pos];
      ++pos;
    }

  const json& prior = member(root, "prior", "");
  if (!prior.is_object()) bad("prior", "must be an object");
  m.prior.variant = rethrow_as_parse("prior.variant", [&] {
    return parse_prior_variant(get_string(member(prior, "variant", "prior"), "prior.variant"));
  });
  if (prior.contains("m")) m.prior.m = get_number(prior["m"], "prior.m");
  if (prior.contains("penalised_terms")) {
    const json& pt = prior["penalised_terms"];
    if (!pt.is_array()) bad("prior.penalised_terms", "must be an array of strings");
    for (const auto& s : pt) m.prior.penalised_terms.push_back(get_string(s, "prior.penalised_terms"));
  }
  if (prior.contains("lambda_hat")) m.prior.lambda_hat = get_number(prior["lambda_hat"], "prior.lambda_hat");
  if (prior.contains("var_log_lambda"))
    m.prior.var_log_lambda = get_number(prior["var_log_lambda"], "prior.var_log_lambda");
  if (prior.contains("flat_marginal"))
    m.prior.flat_marginal = get_bool(prior["flat_marginal"], "prior.flat_marginal");

  m.quadrature_k = get_int(member(root, "quadrature_k", ""), "quadrature_k");
  if (m.quadrature_k < 1 || m.quadrature_k > 100) bad("quadrature_k", "must lie in [1, 100]");

  if (root.contains("projection")) {
    const json& pj = root["projection"];
    if (!pj.is_object()) bad("projection", "must be an object");
    ProjectionInfo info;
    info.source_fingerprint =
        get_string(member(pj, "source_fingerprint", "projection"), "projection.source_fingerprint");
    info.mean_residual_kl =
        get_number(member(pj, "mean_residual_kl", "projection"), "projection.mean_residual_kl");
    info.iterations = get_int(member(pj, "iterations", "projection"), "projection.iterations");
    doc.projection = info;
  }
  if (doc.projection.has_value() != (m.prior.variant == PriorVariant::Projected))
    bad("projection", "must be present exactly when prior.variant is \"projected\"");
  if (m.link == Link::Identity && !doc.projection)
    bad("link", "identity link is only valid for projected models");

  if (root.contains("provenance")) {
    const json& pv = root["provenance"];
    if (!pv.is_object()) bad("provenance", "must be an object");
    if (pv.contains("created_at")) doc.provenance.created_at = get_string(pv["created_at"], "provenance.created_at");
    if (pv.contains("software_version"))
      doc.provenance.software_version = get_string(pv["software_version"], "provenance.software_version");
    if (pv.contains("training_data"))
      doc.provenance.training_data = get_string(pv["training_data"], "provenance.training_data");
    if (pv.contains("diagnostics")) {
      const json& d = pv["diagnostics"];
      if (!d.is_object()) bad("provenance.diagnostics", "must be an object");
      FitDiagnostics& fd = doc.provenance.diagnostics;
      const std::string w = "provenance.diagnostics";
      if (d.contains("converged")) fd.converged = get_bool(d["converged"], w + ".converged");
      if (d.contains("iterations")) fd.iterations = get_int(d["iterations"], w + ".iterations");
      if (d.contains("deviance")) fd.deviance = get_number(d["deviance"], w + ".deviance");
      if (d.contains("max_score")) fd.max_score = get_number(d["max_score"], w + ".max_score");
      if (d.contains("rows")) fd.rows = static_cast<std::size_t>(get_int(d["rows"], w + ".rows"));
      if (d.contains("augmentation_rows"))
        fd.augmentation_rows = static_cast<std::size_t>(get_int(d["augmentation_rows"], w + ".augmentation_rows"));
      if (d.contains("tolerance")) fd.tolerance = get_number(d["tolerance"], w + ".tolerance");
      if (d.contains("max_iterations")) fd.max_iterations = get_int(d["max_iterations"], w + ".max_iterations");
      m.diagnostics = fd;
    }
  }

  if (!is_symmetric(m.sigma) || !is_positive_semidefinite(m.sigma))
    bad("sigma", "does not reconstruct to a positive semi-definite matrix");
  if (doc.projection)
    for (double v : lower)
      if (v != 0.0) bad("sigma", "must be zero for a projected model");
  return doc;
}

PredictionSummary predict_document(const ModelDocument& doc, std::span<const double> features,
                                   const PredictOptions& opts) {
  if (!doc.projection) return predict(doc.model, features, opts);
  if (!(opts.level > 0.0 && opts.level < 1.0))
    fail(ErrorCode::InvalidArgument, "credible level must be in (0,1)");
  const ProjectedModel proj = doc.projected_model();
  const double v = proj.predict(features);
  PredictionSummary s;
  s.method = Method::Projected;
  s.level = opts.level;
  s.quadrature_k = doc.model.quadrature_k;
  s.dist = {proj.link == Link::Logit ? logit(v) : 0.0, 0.0};
  s.plug_in = s.post_mean = s.cri_lo = s.cri_hi = v;
  return s;
}

ModelDocument load_model_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open model file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model_document(text.str());
}

void save_model_document(const ModelDocument& doc, const std::string& path) {
  const std::string text = write_model_document(doc);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write model file '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::Io, "failed writing model file '" + path + "'");
}

}  // namespace credence
