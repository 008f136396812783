#pragma once

// Subcommand implementations for the caselasso executable.
// Exit codes: 0 ok, 2 usage or input error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "caselasso/caselasso.hpp"
#include "caselasso/io/config.hpp"
#include "caselasso/io/csv.hpp"
#include "caselasso/io/serialize.hpp"
#include "caselasso/io/svg.hpp"

namespace caselasso::cli {

namespace cl = caselasso;
namespace io = caselasso::io;

namespace detail {

struct Globals {
  bool standardize = false;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  bool verify = false;
  std::string output;
  std::string format;
  std::string response;
};

struct Penalty {
  std::optional<double> lambda;
  std::optional<double> fraction;
};

struct Args {
  std::string csv;
  Penalty penalty;
  int case_number = 0;
  std::string svg;
  int folds = 10;
  bool loo = false;
  std::size_t grid = 101;
  std::string variance_mode = "pooled";
  std::string config;
};

inline cl::Dataset load(const Globals& g, const std::string& path) {
  return io::to_dataset(io::read_csv_file(path), g.response, g.standardize);
}

inline double resolve_lambda(const cl::Dataset& data, const Penalty& pen) {
  if (pen.lambda.has_value() == pen.fraction.has_value())
    throw cl::InputError("give exactly one of --lambda and --fraction");
  if (pen.lambda) {
    if (!(*pen.lambda >= 0.0)) throw cl::InputError("--lambda must be nonnegative");
    return *pen.lambda;
  }
  return cl::lambda_at_fraction(cl::lambda_path(data), *pen.fraction).lambda;
}

inline cl::ThresholdMode parse_threshold_mode(const std::string& s) {
  if (s == "pooled") return cl::ThresholdMode::kPooled;
  if (s == "externally_normalized") return cl::ThresholdMode::kExternallyNormalized;
  throw cl::InputError("unknown --variance-mode '" + s + "'");
}

inline bool want_json(const Globals& g, bool json_default) {
  if (g.format.empty()) return json_default;
  return g.format == "json";
}

inline void emit(const Globals& g, const std::string& text, std::ostream& out_stream) {
  if (g.output.empty()) {
    out_stream << text;
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw cl::InputError("cannot write '" + g.output + "'");
  out << text;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cl::InputError("cannot write '" + path + "'");
  out << text;
}

inline std::string dump(const io::Json& j) { return j.dump(2) + "\n"; }

inline std::string fit_command(const Globals& g, const Args& a) {
  const cl::Dataset data = load(g, a.csv);
  const double lambda = resolve_lambda(data, a.penalty);
  const cl::LassoSolution s = cl::fit_lasso(data, lambda);
  if (want_json(g, true)) {
    io::Json j = io::to_json(s);
    j["names"] = io::names_json(data);
    j["response"] = data.response_name();
    return dump(j);
  }
  std::ostringstream o;
  io::write_row(o, {"term", "coefficient"});
  io::write_row(o, {"(intercept)", io::number(s.beta0)});
  for (cl::Index j = 0; j < data.p(); ++j)
    io::write_row(o, {data.column_names()[static_cast<std::size_t>(j)], io::number(s.beta(j))});
  return o.str();
}

inline cl::Index case_index(const cl::Dataset& data, int number) {
  if (number < 1 || number > data.n())
    throw cl::InputError("--case must lie in [1, " + std::to_string(data.n()) + "]");
  return number - 1;
}

inline std::string path_command(const Globals& g, const Args& a) {
  const cl::Dataset data = load(g, a.csv);
  const double lambda = resolve_lambda(data, a.penalty);
  const cl::Index k = case_index(data, a.case_number);
  const cl::LassoSolution full = cl::fit_lasso(data, lambda);
  cl::PathOptions opt;
  opt.verify = g.verify;
  const cl::WeightPath path = cl::compute_path(data, lambda, k, full, opt);
  if (!a.svg.empty()) write_file(a.svg, io::coefficient_path_svg(path, data.column_names()));
  if (want_json(g, true)) return dump(io::to_json(path));
  std::ostringstream o;
  std::vector<std::string> head{"omega_hi", "omega_lo", "event", "variable"};
  for (const auto& n : data.column_names()) head.push_back(n);
  io::write_row(o, head);
  for (const auto& s : path.segments) {
    std::vector<std::string> row{io::number(s.omega_hi), io::number(s.omega_lo), cl::to_string(s.event.kind),
                                 s.event.variable < 0 ? "" : std::to_string(s.event.variable + 1)};
    for (cl::Index j = 0; j < data.p(); ++j) row.push_back(io::number(s.beta_at_lo(j)));
    io::write_row(o, row);
  }
  return o.str();
}

inline std::string records_csv(const std::vector<cl::InfluenceRecord>& records) {
  std::ostringstream o;
  io::write_row(o, {"case", "cooks_exact", "cooks_approx", "local_influence", "leverage", "studentized_residual",
                    "path_updates", "threshold", "flagged"});
  for (const auto& r : records)
    io::write_row(o, {std::to_string(r.case_index + 1), io::number(r.cooks_exact), io::number(r.cooks_approx),
                      io::number(r.local_influence), io::number(r.leverage), io::number(r.studentized_residual),
                      std::to_string(r.path_updates), io::number(r.threshold), r.flagged ? "1" : "0"});
  return o.str();
}

inline std::string influence_command(const Globals& g, const Args& a) {
  const cl::Dataset data = load(g, a.csv);
  const double lambda = resolve_lambda(data, a.penalty);
  const cl::LassoSolution full = cl::fit_lasso(data, lambda);
  const cl::VarianceEstimate var = cl::default_variance(data, full);
  if (var.degenerate || !(var.s2 > 0.0)) throw cl::NumericalError("error variance estimate is zero");
  const auto records = cl::influence_records(data, full, var.s2, parse_threshold_mode(a.variance_mode));
  if (!want_json(g, true)) return records_csv(records);
  io::Json j = io::header("influence_records");
  j["lambda"] = lambda;
  j["s2"] = var.s2;
  j["s2_mode"] = cl::to_string(var.mode);
  j["records"] = io::records_json(records);
  return dump(j);
}

inline double max_abs_delta(const cl::Vector& a, const cl::Vector& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

inline std::string detect_command(const Globals& g, const Args& a) {
  const cl::Dataset data = load(g, a.csv);
  cl::DetectOptions opt;
  opt.folds = a.folds;
  opt.seed = g.seed;
  opt.threshold_mode = parse_threshold_mode(a.variance_mode);
  opt.grid_points = a.grid;
  const cl::DetectionReport rep = cl::detect(data, opt);
  if (!want_json(g, true)) return records_csv(rep.records);
  io::Json j = io::to_json(rep);
  if (g.verify) {
    // Every exact distance and every deleted fit against direct refits.
    const cl::Vector refit = cl::oracle::cooks_by_refit_all(data, rep.lambda_hat, rep.s2);
    cl::Vector exact(data.n());
    for (cl::Index k = 0; k < data.n(); ++k) exact(k) = rep.records[static_cast<std::size_t>(k)].cooks_exact;
    const cl::LassoSolution full = cl::fit_lasso(data, rep.lambda_hat);
    const cl::PathContext context = cl::make_context(data, rep.lambda_hat, full);
    cl::PathOptions popt;
    popt.context = &context;
    std::vector<double> fitted_delta(static_cast<std::size_t>(data.n()), 0.0);
    cl::parallel_for(fitted_delta.size(), [&](std::size_t k) {
      const auto idx = static_cast<cl::Index>(k);
      const cl::WeightPath path = cl::compute_path(data, rep.lambda_hat, idx, full, popt);
      const cl::LassoSolution del = cl::oracle::deleted_lasso_refit(data, rep.lambda_hat, idx);
      fitted_delta[k] = max_abs_delta(path.loo_solution.fitted, del.fitted);
    });
    double worst_fit = 0.0;
    for (double d : fitted_delta) worst_fit = std::max(worst_fit, d);
    j["verification"] = {{"max_cooks_delta", max_abs_delta(exact, refit)},
                         {"max_deleted_fit_delta", worst_fit},
                         {"full_fit_delta", max_abs_delta(full.fitted, cl::oracle::full_refit(data, rep.lambda_hat).fitted)}};
  }
  return dump(j);
}

inline std::string graph_command(const Globals& g, const Args& a) {
  const cl::Dataset data = load(g, a.csv);
  const cl::LassoSolution fit0 = cl::fit_lasso(data, 0.0);
  const cl::VarianceEstimate var = cl::default_variance(data, fit0);
  if (var.degenerate || !(var.s2 > 0.0)) throw cl::NumericalError("error variance estimate is zero");
  const cl::InfluenceGraph graph = cl::influence_graph(data, cl::fraction_grid(a.grid), var.s2);
  if (!a.svg.empty()) write_file(a.svg, io::influence_graph_svg(graph));
  if (want_json(g, false)) return dump(io::to_json(graph));
  std::ostringstream o;
  std::vector<std::string> head{"fraction", "lambda", "threshold", "d_bar"};
  for (cl::Index k = 0; k < data.n(); ++k) head.push_back("case" + std::to_string(k + 1));
  io::write_row(o, head);
  for (std::size_t i = 0; i < graph.fractions.size(); ++i) {
    std::vector<std::string> row{io::number(graph.fractions[i]), io::number(graph.lambdas[i]),
                                 io::number(graph.thresholds[i]), io::number(graph.d_bar[i])};
    for (cl::Index k = 0; k < data.n(); ++k) row.push_back(io::number(graph.distances(static_cast<cl::Index>(i), k)));
    io::write_row(o, row);
  }
  return o.str();
}

inline std::string cv_command(const Globals& g, const Args& a) {
  const cl::Dataset data = load(g, a.csv);
  const auto grid = cl::fraction_grid(a.grid);
  const cl::CvCurve curve = a.loo ? cl::loo_cv(data, grid) : cl::kfold_cv(data, a.folds, grid, g.seed);
  if (want_json(g, false)) {
    io::Json j = io::header("cv_curve");
    j["method"] = a.loo ? "loo" : "kfold";
    j["folds"] = curve.folds;
    j["seed"] = a.loo ? 0 : g.seed;
    j["lambda_hat"] = curve.lambda_hat;
    j["fraction_hat"] = curve.fraction_hat;
    j["fractions"] = curve.fractions;
    j["lambdas"] = curve.lambdas;
    j["mse"] = curve.mse;
    return dump(j);
  }
  std::ostringstream o;
  io::write_row(o, {"fraction", "lambda", "mse", "selected"});
  for (std::size_t i = 0; i < curve.mse.size(); ++i)
    io::write_row(o, {io::number(curve.fractions[i]), io::number(curve.lambdas[i]), io::number(curve.mse[i]),
                      i == curve.best ? "1" : "0"});
  return o.str();
}

inline std::string join_vector(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + io::number(v[i]);
  return out;
}

inline std::string simulate_command(const Globals& g, const Args& a) {
  const auto configs = io::read_sim_config_file(a.config);
  std::vector<cl::sim::DetectionRates> rates;
  rates.reserve(configs.size());
  for (const auto& c : configs) rates.push_back(cl::sim::detection_experiment(c));
  if (want_json(g, false)) {
    io::Json j = io::header("simulation");
    io::Json runs = io::Json::array();
    for (std::size_t i = 0; i < configs.size(); ++i)
      runs.push_back({{"config", io::to_json(configs[i])},
                      {"rate_case1", rates[i].rate_case1},
                      {"mean_rate_others", rates[i].mean_rate_others},
                      {"completed", rates[i].completed},
                      {"failed", rates[i].failed}});
    j["runs"] = std::move(runs);
    return dump(j);
  }
  std::ostringstream o;
  io::write_row(o, {"n", "p", "a", "b", "q", "v", "replicates", "seed", "correlation_base", "folds",
                    "threshold_mode", "grid_points", "rate_case1", "mean_rate_others", "completed", "failed"});
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    io::write_row(o, {std::to_string(c.n), std::to_string(c.p), io::number(c.a), io::number(c.b),
                      std::to_string(c.q), join_vector(c.v), std::to_string(c.replicates), std::to_string(c.seed),
                      io::number(c.correlation_base), std::to_string(c.folds), cl::to_string(c.threshold_mode),
                      std::to_string(c.grid_points), io::number(rates[i].rate_case1),
                      io::number(rates[i].mean_rate_others), std::to_string(rates[i].completed),
                      std::to_string(rates[i].failed)});
  }
  return o.str();
}

inline void add_penalty(CLI::App* cmd, Penalty& pen) {
  auto* l = cmd->add_option("--lambda", pen.lambda, "penalty level");
  auto* f = cmd->add_option("--fraction", pen.fraction, "l1-norm fraction in [0, 1]");
  l->excludes(f);
}

}  // namespace detail

/// Parses `args` (without the program name) and runs one subcommand.
/// Returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Exact case-influence diagnostics for the Lasso"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  Args a;
  app.add_flag("--standardize", g.standardize, "scale predictors to unit norm after centering");
  app.add_option("--threads", g.threads, "worker cap (0 = hardware concurrency)");
  app.add_option("--seed", g.seed, "seed for fold assignment");
  app.add_flag("--verify", g.verify, "cross-check against direct refits");
  app.add_option("--output", g.output, "write to this file instead of stdout");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--response", g.response, "response column (default: last)");

  auto* fit = app.add_subcommand("fit", "Lasso fit at one penalty");
  fit->add_option("csv", a.csv)->required();
  add_penalty(fit, a.penalty);

  auto* path = app.add_subcommand("path", "case-weight path for one case");
  path->add_option("csv", a.csv)->required();
  add_penalty(path, a.penalty);
  path->add_option("--case", a.case_number, "1-based case number")->required();
  path->add_option("--svg", a.svg, "write the coefficient-vs-omega plot here");

  auto* influence = app.add_subcommand("influence", "exact Cook's distances at one penalty");
  influence->add_option("csv", a.csv)->required();
  add_penalty(influence, a.penalty);
  influence->add_option("--variance-mode", a.variance_mode, "pooled or externally_normalized");

  auto* graph = app.add_subcommand("graph", "Cook's distances over a fraction grid");
  graph->add_option("csv", a.csv)->required();
  graph->add_option("--grid", a.grid, "grid points including both endpoints");
  graph->add_option("--svg", a.svg, "write the influence graph here");

  auto* detect = app.add_subcommand("detect", "cross-validated influential-case detection");
  detect->add_option("csv", a.csv)->required();
  detect->add_option("--folds", a.folds, "cross-validation folds");
  detect->add_option("--grid", a.grid, "fraction grid points for cross-validation");
  detect->add_option("--variance-mode", a.variance_mode, "pooled or externally_normalized");

  auto* cv = app.add_subcommand("cv", "cross-validation curve over a fraction grid");
  cv->add_option("csv", a.csv)->required();
  auto* loo = cv->add_flag("--loo", a.loo, "exact leave-one-out from case-weight paths");
  cv->add_option("--folds", a.folds, "K-fold cross-validation")->excludes(loo);
  cv->add_option("--grid", a.grid, "grid points including both endpoints");

  auto* simulate = app.add_subcommand("simulate", "detection-rate simulation from a config file");
  simulate->add_option("config", a.config)->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    cl::thread_limit().store(g.threads);
    std::string text;
    if (fit->parsed()) text = fit_command(g, a);
    else if (path->parsed()) text = path_command(g, a);
    else if (influence->parsed()) text = influence_command(g, a);
    else if (graph->parsed()) text = graph_command(g, a);
    else if (detect->parsed()) text = detect_command(g, a);
    else if (cv->parsed()) text = cv_command(g, a);
    else if (simulate->parsed()) text = simulate_command(g, a);
    emit(g, text, out);
  } catch (const cl::InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const cl::NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const io::Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace caselasso::cli
