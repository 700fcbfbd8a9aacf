// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "credence/decision.hpp"
#include "credence/error.hpp"
#include "credence/model_io.hpp"
#include "credence/predict.hpp"
#include "credence/projection.hpp"
#include "credence/server.hpp"
#include "credence/sim.hpp"

#ifndef CREDENCE_VERSION
#define CREDENCE_VERSION "0.0.0"
#endif

namespace credence {

namespace {

const char* remediation(ErrorCode code) {
  switch (code) {
    case ErrorCode::Separation:
      return "the outcome is (quasi-)separated by the predictors; refit with --prior jeffreys or "
             "--prior logf";
    case ErrorCode::RankDeficient:
      return "the design is rank deficient; drop collinear or constant terms";
    case ErrorCode::NonConvergence:
      return "the fit did not converge; a shrinkage prior (--prior jeffreys, logf or ridge) "
             "usually stabilizes it";
    case ErrorCode::NotPositiveDefinite:
      return "the information matrix is singular; consider a shrinkage prior or fewer terms";
    case ErrorCode::IdentityLinkOutOfRange:
      return "the identity-link projection leaves (0,1); use --link logit";
    default:
      return nullptr;
  }
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string resolve_model_path(const std::string& given) {
  if (!given.empty()) return given;
  if (const char* env = std::getenv("CREDENCE_MODEL"); env && *env) return env;
  fail(ErrorCode::InvalidArgument, "no model given: pass --model or set CREDENCE_MODEL");
}

/// Rows of raw features in model term order, taken by column name from a CSV.
Matrix features_from_csv(const std::vector<TermSpec>& terms, const std::string& path) {
  const CsvTable table = read_csv_table(path);
  std::vector<std::size_t> cols;
  for (const auto& t : terms) {
    const auto it = std::find(table.header.begin(), table.header.end(), t.name);
    if (it == table.header.end())
      fail(ErrorCode::MissingColumn, "input '" + path + "' has no column '" + t.name + "'");
    cols.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  Matrix out(table.rows.size(), terms.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = table.rows[i][cols[j]];
  return out;
}

/// "name=value,name=value" in model term order.
Vector features_inline(const PackagedModel& model, const std::string& text) {
  std::vector<std::pair<std::string, double>> values;
  for (const auto& item : split_names(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ParseError, "feature '" + item + "' is not of the form name=value");
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v))
      fail(ErrorCode::ParseError, "feature '" + name + "' has non-numeric value '" + value + "'");
    if (!find_term(model.terms, name)) fail(ErrorCode::InvalidArgument, "unknown feature '" + name + "'");
    values.emplace_back(name, v);
  }
  return features_by_name(model, values);
}

struct FitArgs {
  std::string data, outcome, weight, terms, prior = "flat", logf_skip, out;
  double logf_m = 2.0;
  bool logf_intercept = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  CsvOptions csv;
  csv.outcome = a.outcome;
  if (!a.weight.empty()) csv.weight_column = a.weight;
  const Dataset ds = load_csv(a.data, a.terms.empty() ? std::vector<TermSpec>{} : parse_term_list(a.terms), csv);
  PriorSpec prior;
  prior.variant = parse_prior_variant(a.prior);
  prior.logf.m = a.logf_m;
  prior.logf.skip = split_names(a.logf_skip);
  prior.logf.penalise_intercept = a.logf_intercept;
  const PackagedModel model = fit_model(ds, prior);
  const ModelDocument doc = make_document(model, a.data);
  if (!a.out.empty()) save_model_document(doc, a.out);

  out << "prior: " << to_string(model.prior.variant);
  if (model.prior.m) out << " (m = " << *model.prior.m << ")";
  if (model.prior.lambda_hat)
    out << " (lambda = " << *model.prior.lambda_hat << ", var log lambda = " << *model.prior.var_log_lambda
        << (model.prior.flat_marginal ? ", flat marginal" : "") << ")";
  out << "\nrows: " << model.diagnostics.rows
      << ", augmentation rows: " << model.diagnostics.augmentation_rows
      << ", iterations: " << model.diagnostics.iterations
      << ", deviance: " << std::setprecision(10) << model.diagnostics.deviance << "\n";
  std::size_t width = 9;
  for (const auto& t : model.terms) width = std::max(width, t.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "term" << std::right << std::setw(14)
      << "estimate" << std::setw(14) << "se" << "\n";
  out << std::fixed << std::setprecision(6);
  for (std::size_t j = 0; j < model.dim(); ++j) {
    const std::string name = j == 0 ? "intercept" : model.terms[j - 1].name;
    out << std::left << std::setw(static_cast<int>(width)) << name << std::right << std::setw(14)
        << model.beta[j] << std::setw(14) << std::sqrt(model.sigma(j, j)) << "\n";
  }
  out.unsetf(std::ios::floatfield);
  if (!a.out.empty()) out << "wrote " << a.out << "\n";
  return kExitOk;
}

/// User-supplied settings such as levels and thresholds, in shortest form.
std::string format_setting(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

struct PredictArgs {
  std::string model, input, features, method = "quadrature", projected_model, format = "csv";
  double level = 0.95;
  std::optional<double> threshold;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const ModelDocument doc = load_model_document(resolve_model_path(a.model));
  PredictOptions opts;
  opts.method = parse_method(a.method);
  opts.level = a.level;
  std::optional<ProjectedModel> projected;
  if (opts.method == Method::Projected && !doc.is_projected()) {
    if (a.projected_model.empty())
      fail(ErrorCode::InvalidArgument, "--method projected requires --projected-model <file>");
    const ModelDocument pdoc = load_model_document(a.projected_model);
    projected = pdoc.projected_model();
    if (projected->source_fingerprint != model_fingerprint(doc.model))
      fail(ErrorCode::InvalidArgument, "projected model was not derived from this model");
    opts.projected = &*projected;
  }
  std::optional<Threshold> z;
  if (a.threshold) z.emplace(*a.threshold);

  Matrix rows;
  if (!a.input.empty() && !a.features.empty())
    fail(ErrorCode::InvalidArgument, "pass either --input or --features, not both");
  if (!a.input.empty()) {
    rows = features_from_csv(doc.model.terms, a.input);
  } else if (!a.features.empty()) {
    const Vector f = features_inline(doc.model, a.features);
    rows = Matrix(1, f.size());
    for (std::size_t j = 0; j < f.size(); ++j) rows(0, j) = f[j];
  } else {
    fail(ErrorCode::InvalidArgument, "pass --input <csv> or --features name=value,...");
  }

  std::vector<PredictionSummary> results;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    try {
      results.push_back(predict_document(doc, rows.row(i), opts));
    } catch (const Error& e) {
      fail(e.code(), "row " + std::to_string(i + 1) + ": " + e.what());
    }
  }

  if (a.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& s = results[i];
      nlohmann::json row{{"row", i + 1},
                         {"plug_in", s.plug_in},
                         {"post_mean", s.post_mean},
                         {"cri", {s.cri_lo, s.cri_hi}},
                         {"level", s.level},
                         {"method", s.method_tag()}};
      if (z) {
        row["threshold"] = z->value();
        row["decision"] = to_string(treat_decision(s.post_mean, *z));
        row["net_benefit"] = net_benefit(s.post_mean, *z);
      }
      arr.push_back(std::move(row));
    }
    out << arr.dump(2) << "\n";
  } else if (a.format == "csv") {
    out << "row,plug_in,post_mean,cri_lo,cri_hi,level,method";
    if (z) out << ",threshold,decision,net_benefit";
    out << "\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& s = results[i];
      out << i + 1 << ',' << format_double(s.plug_in) << ',' << format_double(s.post_mean) << ','
          << format_double(s.cri_lo) << ',' << format_double(s.cri_hi) << ',' << format_setting(s.level)
          << ',' << s.method_tag();
      if (z)
        out << ',' << format_setting(z->value()) << ',' << to_string(treat_decision(s.post_mean, *z))
            << ',' << format_double(net_benefit(s.post_mean, *z));
      out << "\n";
    }
  } else {
    fail(ErrorCode::InvalidArgument, "--format must be csv or json");
  }
  return kExitOk;
}

struct ProjectArgs {
  std::string model, case_mix, terms, link = "logit", out;
};

int cmd_project(const ProjectArgs& a, std::ostream& out) {
  const ModelDocument doc = load_model_document(resolve_model_path(a.model));
  if (doc.is_projected()) fail(ErrorCode::InvalidArgument, "cannot project an already projected model");
  const Matrix raw = features_from_csv(doc.model.terms, a.case_mix);
  const Vector zeros(raw.rows(), 0.0);
  const Dataset case_mix = make_dataset(doc.model.terms, raw, zeros);
  const std::vector<std::string> names = split_names(a.terms);
  const ProjectedModel proj = self_project(doc.model, case_mix, names, parse_link(a.link));
  ModelDocument pdoc = make_projected_document(proj, doc.model.quadrature_k);
  pdoc.provenance.training_data = a.case_mix;
  if (!a.out.empty()) save_model_document(pdoc, a.out);
  out << "projected onto " << proj.terms.size() << " term(s), link " << to_string(proj.link)
      << ", mean residual KL " << std::setprecision(6) << proj.mean_residual_kl << " nats\n";
  out << "source fingerprint " << proj.source_fingerprint << "\n";
  for (std::size_t j = 0; j < proj.beta.size(); ++j)
    out << (j == 0 ? std::string("intercept") : proj.terms[j - 1].name) << " "
        << format_double(proj.beta[j]) << "\n";
  if (!a.out.empty()) out << "wrote " << a.out << "\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string config, out_dir;
  int threads = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  std::vector<ScenarioConfig> grid = load_scenario_config(a.config);
  std::filesystem::create_directories(a.out_dir);
  const std::string results_path = (std::filesystem::path(a.out_dir) / "results.csv").string();
  std::ofstream results(results_path);
  if (!results) fail(ErrorCode::Io, "cannot write '" + results_path + "'");

  out << "scenario,prior,estimator,mse,c_statistic,oe_median,slope_median,coverage,cdf_0.5,failures\n";
  bool header = true;
  auto num = [](double v) {
    if (!std::isfinite(v)) return std::string("NA");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  for (ScenarioConfig& cfg : grid) {
    if (a.threads > 0) cfg.threads = a.threads;
    const ScenarioResult res = run_scenario(cfg);
    write_results_csv(results, cfg.name, res.rows, header);
    header = false;
    for (std::size_t k = 0; k < kSimulationPriors.size(); ++k)
      for (Estimator e : kEstimators) {
        if (e == Estimator::Projection && !cfg.run_projection) continue;
        const PriorVariant p = kSimulationPriors[k];
        const bool has_cov = e != Estimator::Projection;
        out << cfg.name << ',' << to_string(p) << ',' << to_string(e) << ','
            << num(res.find(p, e, "mse").center) << ',' << num(res.find(p, e, "c_statistic").center)
            << ',' << num(res.find(p, e, "oe_ratio").center) << ','
            << num(res.find(p, e, "calibration_slope").center) << ','
            << (has_cov ? num(res.find(p, e, "coverage").center) : "NA") << ','
            << (has_cov ? num(res.find(p, e, "cdf_0.5").center) : "NA") << ',' << res.fit_failures[k]
            << "\n";
      }
  }
  if (!results) fail(ErrorCode::Io, "failed writing '" + results_path + "'");
  out << "wrote " << results_path << "\n";
  return kExitOk;
}

struct ServeArgs {
  std::string model, bind = "127.0.0.1";
  int port = 8080;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  const ModelService service(load_model_document(resolve_model_path(a.model)));
  out << "serving on http://" << a.bind << ":" << a.port << std::endl;
  serve(service, a.bind, a.port);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian risk-prediction models with posterior-mean predictions", "credence"};
  app.set_version_flag("--version", CREDENCE_VERSION);
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model from a CSV file and write a model document");
  fit_cmd->add_option("--data", fit.data, "Training CSV with a header row")->required();
  fit_cmd->add_option("--outcome", fit.outcome, "Outcome column (0/1 or probability)")->required();
  fit_cmd->add_option("--weight", fit.weight, "Optional row-weight column");
  fit_cmd->add_option("--terms", fit.terms,
                      "Term list name[:kind[:cap_above=c|cap_below=c]],...; default: all other columns");
  fit_cmd->add_option("--prior", fit.prior, "flat, jeffreys, logf or ridge")->capture_default_str();
  fit_cmd->add_option("--logf-m", fit.logf_m, "Degrees of freedom m of the log-F(m,m) prior")
      ->capture_default_str();
  fit_cmd->add_option("--logf-skip", fit.logf_skip, "Comma-separated terms left unpenalised");
  fit_cmd->add_flag("--logf-intercept", fit.logf_intercept, "Also penalise the intercept");
  fit_cmd->add_option("--out", fit.out, "Model document to write");

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "Predict from a model document");
  pred_cmd->add_option("--model", pred.model, "Model document (default: $CREDENCE_MODEL)");
  pred_cmd->add_option("--input", pred.input, "CSV with one column per model term");
  pred_cmd->add_option("--features", pred.features, "Inline features name=value,...");
  pred_cmd->add_option("--method", pred.method, "quadrature, mackay or projected")->capture_default_str();
  pred_cmd->add_option("--level", pred.level, "Credible level")->capture_default_str();
  pred_cmd->add_option("--threshold", pred.threshold, "Decision threshold z in (0,1)");
  pred_cmd->add_option("--projected-model", pred.projected_model, "Projected model document");
  pred_cmd->add_option("--format", pred.format, "csv or json")->capture_default_str();

  ProjectArgs proj;
  auto* proj_cmd = app.add_subcommand("project", "Self-project a model onto a simpler equation");
  proj_cmd->add_option("--model", proj.model, "Model document (default: $CREDENCE_MODEL)");
  proj_cmd->add_option("--case-mix", proj.case_mix, "CSV of predictor values")->required();
  proj_cmd->add_option("--terms", proj.terms, "Comma-separated subset of terms; default: all");
  proj_cmd->add_option("--link", proj.link, "logit or identity")->capture_default_str();
  proj_cmd->add_option("--out", proj.out, "Projected model document to write");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run simulation scenarios from a config file");
  sim_cmd->add_option("--config", sim.config, "Key-value scenario config")->required();
  sim_cmd->add_option("--out", sim.out_dir, "Output directory")->required();
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");

  ServeArgs srv;
  auto* srv_cmd = app.add_subcommand("serve", "Serve predictions over HTTP");
  srv_cmd->add_option("--model", srv.model, "Model document (default: $CREDENCE_MODEL)");
  srv_cmd->add_option("--port", srv.port, "TCP port")->capture_default_str();
  srv_cmd->add_option("--bind", srv.bind, "Bind address")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << CREDENCE_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*pred_cmd) return cmd_predict(pred, out);
    if (*proj_cmd) return cmd_project(proj, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*srv_cmd) return cmd_serve(srv, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    if (const char* hint = remediation(e.code())) err << "hint: " << hint << "\n";
    return e.is_numerical() ? kExitNumerical : kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error [io]: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace credence
