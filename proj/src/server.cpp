// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/server.hpp"

#include <map>

#include "httplib.h"
#include "json.hpp"

#include "credence/decision.hpp"
#include "credence/error.hpp"

namespace credence {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

HttpResponse error_response(int status, const std::string& message,
                            const std::map<std::string, std::string>& fields = {}) {
  json body{{"error", message}};
  if (!fields.empty()) body["fields"] = fields;
  return json_response(status, body);
}

/// Thrown inside request handling to short-circuit with a response.
struct RequestFailure {
  HttpResponse response;
};

json parse_body(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    throw RequestFailure{error_response(400, "request body is not valid JSON")};
  }
  if (!j.is_object()) throw RequestFailure{error_response(400, "request body must be a JSON object")};
  return j;
}

/// Raw feature values in model term order; 400 for missing/ill-typed or
/// unknown fields, 422 for values outside a term's domain.
Vector extract_features(const PackagedModel& model, const json& req) {
  const auto it = req.find("features");
  if (it == req.end())
    throw RequestFailure{error_response(400, "missing field 'features'", {{"features", "required"}})};
  if (!it->is_object())
    throw RequestFailure{
        error_response(400, "'features' must be an object of name: number", {{"features", "must be an object"}})};

  std::map<std::string, std::string> problems;
  Vector raw(model.terms.size());
  for (std::size_t j = 0; j < model.terms.size(); ++j) {
    const std::string& name = model.terms[j].name;
    const auto f = it->find(name);
    if (f == it->end()) {
      problems[name] = "missing";
    } else if (!f->is_number()) {
      problems[name] = "must be a number";
    } else {
      raw[j] = f->get<double>();
    }
  }
  for (const auto& [name, value] : it->items())
    if (!find_term(model.terms, name)) problems[name] = "unknown term";
  if (!problems.empty()) throw RequestFailure{error_response(400, "invalid features", problems)};

  for (std::size_t j = 0; j < model.terms.size(); ++j) {
    try {
      prepare_feature(model.terms[j], raw[j]);
    } catch (const Error& e) {
      problems[model.terms[j].name] = e.what();
    }
  }
  if (!problems.empty())
    throw RequestFailure{error_response(422, "feature values outside their domain", problems)};
  return raw;
}

double number_field(const json& req, const char* key, double fallback, bool required) {
  const auto it = req.find(key);
  if (it == req.end()) {
    if (required)
      throw RequestFailure{error_response(400, std::string("missing field '") + key + "'", {{key, "required"}})};
    return fallback;
  }
  if (!it->is_number())
    throw RequestFailure{error_response(400, std::string("'") + key + "' must be a number", {{key, "must be a number"}})};
  return it->get<double>();
}

}  // namespace

ModelService::ModelService(ModelDocument doc) : doc_(std::move(doc)) {
  model_json_ = write_model_document(doc_, WriteOptions{.include_training_data = false});
}

HttpResponse ModelService::handle(std::string_view method, std::string_view path,
                                  std::string_view body) const {
  try {
    if (path == "/health") {
      if (method != "GET") return error_response(405, "use GET");
      return json_response(200, json{{"status", "ok"}});
    }
    if (path == "/model") {
      if (method != "GET") return error_response(405, "use GET");
      return {200, model_json_, "application/json"};
    }
    if (path == "/predict") {
      if (method != "POST") return error_response(405, "use POST");
      return predict(body);
    }
    if (path == "/decision") {
      if (method != "POST") return error_response(405, "use POST");
      return decide(body);
    }
    return error_response(404, "no such endpoint");
  } catch (const RequestFailure& f) {
    return f.response;
  } catch (const Error& e) {
    return error_response(e.is_numerical() ? 500 : 422, e.what());
  }
}

HttpResponse ModelService::predict(std::string_view body) const {
  const json req = parse_body(body);
  const Vector raw = extract_features(doc_.model, req);
  PredictOptions opts;
  if (const auto m = req.find("method"); m != req.end()) {
    if (!m->is_string())
      throw RequestFailure{error_response(400, "'method' must be a string", {{"method", "must be a string"}})};
    try {
      opts.method = parse_method(m->get<std::string>());
    } catch (const Error& e) {
      throw RequestFailure{error_response(422, e.what(), {{"method", e.what()}})};
    }
    if (opts.method == Method::Projected && !doc_.is_projected())
      throw RequestFailure{error_response(422, "this service holds no projected model",
                                          {{"method", "projected is unavailable"}})};
  }
  opts.level = number_field(req, "level", 0.95, false);
  if (!(opts.level > 0.0 && opts.level < 1.0))
    throw RequestFailure{error_response(422, "level must lie in (0,1)", {{"level", "must lie in (0,1)"}})};

  const PredictionSummary s = predict_document(doc_, raw, opts);
  json density = json::array();
  if (s.dist.sigma > 0.0) {
    const double step = (kDensityGridHi - kDensityGridLo) / (kDensityGridPoints - 1);
    for (int g = 0; g < kDensityGridPoints; ++g) {
      const double p = kDensityGridLo + step * g;
      density.push_back(json::array({p, posterior_density(s.dist, p)}));
    }
  }
  json out{{"plug_in", s.plug_in},
           {"post_mean", s.post_mean},
           {"cri", json::array({s.cri_lo, s.cri_hi})},
           {"level", s.level},
           {"method", s.method_tag()},
           {"mu", s.dist.mu},
           {"sigma", s.dist.sigma},
           {"point_mass", !(s.dist.sigma > 0.0)},
           {"density", std::move(density)}};
  return json_response(200, out);
}

HttpResponse ModelService::decide(std::string_view body) const {
  const json req = parse_body(body);
  const Vector raw = extract_features(doc_.model, req);
  const double z_value = number_field(req, "threshold", 0.0, true);
  if (!(z_value > 0.0 && z_value < 1.0))
    throw RequestFailure{error_response(422, "threshold must lie in (0,1)", {{"threshold", "must lie in (0,1)"}})};
  const Threshold z(z_value);
  const PredictionSummary s = predict_document(doc_, raw);
  json out{{"decision", to_string(treat_decision(s.post_mean, z))},
           {"post_mean", s.post_mean},
           {"threshold", z.value()},
           {"net_benefit", net_benefit(s.post_mean, z)},
           {"method", s.method_tag()}};
  return json_response(200, out);
}

void serve(const ModelService& service, const std::string& host, int port) {
  httplib::Server server;
  auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body, r.content_type);
  };
  server.Get("/health", route);
  server.Get("/model", route);
  server.Post("/predict", route);
  server.Post("/decision", route);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  if (!server.bind_to_port(host, port))
    fail(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  server.listen_after_bind();
}

}  // namespace credence
