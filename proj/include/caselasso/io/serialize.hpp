#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/simulate.hpp"
#include "caselasso/types.hpp"

// JSON documents for the CLI. Case and variable indices are 1-based on the
// wire and 0-based in memory. Doubles are written in shortest round-trip form;
// +inf is encoded as the string "inf".
namespace caselasso::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline Json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double read_number(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw InputError("unexpected string '" + s + "' where a number was expected");
  }
  if (j.is_null()) return std::nan("");
  return j.get<double>();
}

inline Json vector(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

inline Vector read_vector(const Json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = read_number(j[i]);
  return v;
}

inline Json one_based(const std::vector<Index>& idx) {
  Json out = Json::array();
  for (Index i : idx) out.push_back(i + 1);
  return out;
}

inline std::vector<Index> read_one_based(const Json& j) {
  std::vector<Index> out;
  for (const auto& e : j) out.push_back(e.get<Index>() - 1);
  return out;
}

inline EventKind parse_event(const std::string& s) {
  if (s == "drop") return EventKind::kDrop;
  if (s == "add+") return EventKind::kAddPositive;
  if (s == "add-") return EventKind::kAddNegative;
  if (s == "terminal") return EventKind::kTerminal;
  throw InputError("unknown event kind '" + s + "'");
}

inline void check_header(const Json& j, const std::string& kind) {
  if (!j.is_object() || j.value("kind", std::string()) != kind)
    throw InputError("expected a '" + kind + "' document");
  if (j.value("schema_version", 0) != kSchemaVersion)
    throw InputError("unsupported schema_version for '" + kind + "'");
}

}  // namespace detail

inline Json header(const std::string& kind) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

inline Json names_json(const Dataset& data) {
  Json out = Json::array();
  for (const auto& n : data.column_names()) out.push_back(n);
  return out;
}

inline Json to_json(const LassoSolution& s) {
  Json j = header("lasso_solution");
  j["lambda"] = detail::number(s.lambda);
  j["beta0"] = detail::number(s.beta0);
  j["beta"] = detail::vector(s.beta);
  j["active_set"] = detail::one_based(s.active_set);
  j["signs"] = detail::vector(s.signs);
  j["fitted"] = detail::vector(s.fitted);
  j["kkt_violation"] = detail::number(s.kkt_violation);
  return j;
}

inline LassoSolution solution_from_json(const Json& j) {
  detail::check_header(j, "lasso_solution");
  LassoSolution s;
  s.lambda = detail::read_number(j.at("lambda"));
  s.beta0 = detail::read_number(j.at("beta0"));
  s.beta = detail::read_vector(j.at("beta"));
  s.active_set = detail::read_one_based(j.at("active_set"));
  s.signs = detail::read_vector(j.at("signs"));
  s.fitted = detail::read_vector(j.at("fitted"));
  s.kkt_violation = detail::read_number(j.at("kkt_violation"));
  return s;
}

inline Json to_json(const WeightPath& path) {
  Json j = header("weight_path");
  j["case"] = path.case_index + 1;
  j["lambda"] = detail::number(path.lambda);
  j["update_count"] = path.update_count();
  Json bp = Json::array();
  for (double w : path.breakpoints) bp.push_back(detail::number(w));
  j["breakpoints"] = std::move(bp);
  j["full_fitted"] = detail::vector(path.full_fitted);
  Json segs = Json::array();
  for (const auto& s : path.segments) {
    Json e;
    e["omega_hi"] = detail::number(s.omega_hi);
    e["omega_lo"] = detail::number(s.omega_lo);
    e["xi_start"] = detail::number(s.xi_start);
    e["xi_end"] = detail::number(s.xi_end);
    e["h_kk"] = detail::number(s.h_kk);
    e["residual"] = detail::number(s.residual);
    e["active_set"] = detail::one_based(s.active_set);
    e["signs"] = detail::vector(s.signs);
    e["beta0_at_hi"] = detail::number(s.beta0_at_hi);
    e["beta_at_hi"] = detail::vector(s.beta_at_hi);
    e["beta0_at_lo"] = detail::number(s.beta0_at_lo);
    e["beta_at_lo"] = detail::vector(s.beta_at_lo);
    e["fitted_at_hi"] = detail::vector(s.fitted_at_hi);
    e["fitted_at_lo"] = detail::vector(s.fitted_at_lo);
    e["event"] = {{"kind", to_string(s.event.kind)},
                  {"variable", s.event.variable < 0 ? Json(nullptr) : Json(s.event.variable + 1)}};
    segs.push_back(std::move(e));
  }
  j["segments"] = std::move(segs);
  j["loo_solution"] = to_json(path.loo_solution);
  return j;
}

inline WeightPath path_from_json(const Json& j) {
  detail::check_header(j, "weight_path");
  WeightPath p;
  p.case_index = j.at("case").get<Index>() - 1;
  p.lambda = detail::read_number(j.at("lambda"));
  for (const auto& w : j.at("breakpoints")) p.breakpoints.push_back(detail::read_number(w));
  p.full_fitted = detail::read_vector(j.at("full_fitted"));
  for (const auto& e : j.at("segments")) {
    WeightPathSegment s;
    s.omega_hi = detail::read_number(e.at("omega_hi"));
    s.omega_lo = detail::read_number(e.at("omega_lo"));
    s.xi_start = detail::read_number(e.at("xi_start"));
    s.xi_end = detail::read_number(e.at("xi_end"));
    s.h_kk = detail::read_number(e.at("h_kk"));
    s.residual = detail::read_number(e.at("residual"));
    s.active_set = detail::read_one_based(e.at("active_set"));
    s.signs = detail::read_vector(e.at("signs"));
    s.beta0_at_hi = detail::read_number(e.at("beta0_at_hi"));
    s.beta_at_hi = detail::read_vector(e.at("beta_at_hi"));
    s.beta0_at_lo = detail::read_number(e.at("beta0_at_lo"));
    s.beta_at_lo = detail::read_vector(e.at("beta_at_lo"));
    s.fitted_at_hi = detail::read_vector(e.at("fitted_at_hi"));
    s.fitted_at_lo = detail::read_vector(e.at("fitted_at_lo"));
    const auto& ev = e.at("event");
    s.event.kind = detail::parse_event(ev.at("kind").get<std::string>());
    s.event.variable = ev.at("variable").is_null() ? -1 : ev.at("variable").get<Index>() - 1;
    p.segments.push_back(std::move(s));
  }
  p.loo_solution = solution_from_json(j.at("loo_solution"));
  return p;
}

inline Json to_json(const InfluenceRecord& r) {
  Json j;
  j["case"] = r.case_index + 1;
  j["cooks_exact"] = detail::number(r.cooks_exact);
  j["cooks_approx"] = detail::number(r.cooks_approx);
  j["local_influence"] = detail::number(r.local_influence);
  j["leverage"] = detail::number(r.leverage);
  j["studentized_residual"] = detail::number(r.studentized_residual);
  j["path_updates"] = r.path_updates;
  j["threshold"] = detail::number(r.threshold);
  j["flagged"] = r.flagged;
  return j;
}

inline Json records_json(const std::vector<InfluenceRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) out.push_back(to_json(r));
  return out;
}

inline Json to_json(const DetectionReport& rep) {
  Json j = header("detection_report");
  j["lambda_hat"] = detail::number(rep.lambda_hat);
  j["fraction_hat"] = detail::number(rep.fraction_hat);
  j["s2"] = detail::number(rep.s2);
  j["s2_mode"] = to_string(rep.s2_mode);
  j["variance_mode"] = to_string(rep.variance_mode);
  j["threshold"] = detail::number(rep.threshold);
  j["folds"] = rep.folds;
  j["seed"] = rep.seed;
  Json flagged = Json::array();
  for (Index k : rep.flagged()) flagged.push_back(k + 1);
  j["flagged"] = std::move(flagged);
  j["records"] = records_json(rep.records);
  return j;
}

inline Json to_json(const InfluenceGraph& g) {
  Json j = header("influence_graph");
  j["s2"] = detail::number(g.s2);
  Json rows = Json::array();
  for (std::size_t i = 0; i < g.fractions.size(); ++i) {
    Json r;
    r["fraction"] = detail::number(g.fractions[i]);
    r["lambda"] = detail::number(g.lambdas[i]);
    r["threshold"] = detail::number(g.thresholds[i]);
    r["d_bar"] = detail::number(g.d_bar[i]);
    r["distances"] = detail::vector(g.distances.row(static_cast<Index>(i)).transpose());
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline Json to_json(const sim::SimConfig& c) {
  Json j;
  j["n"] = c.n;
  j["p"] = c.p;
  j["a"] = detail::number(c.a);
  j["b"] = detail::number(c.b);
  j["q"] = c.q;
  j["v"] = c.v;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["correlation_base"] = detail::number(c.correlation_base);
  j["folds"] = c.folds;
  j["threshold_mode"] = to_string(c.threshold_mode);
  j["grid_points"] = c.grid_points;
  return j;
}

}  // namespace caselasso::io
