#pragma once

// JSON configuration loading, schema-versioned JSON reports, CSV tables and
// hand-rolled SVG line plots.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vconv/closure.hpp"
#include "vconv/convergence.hpp"
#include "vconv/corpus.hpp"
#include "vconv/space.hpp"
#include "vconv/vmetric.hpp"

namespace vconv {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

// ---------------------------------------------------------------- parsing

namespace detail {

[[noreturn]] inline void bad_config(const std::string& what) { throw Error(Errc::malformed_config, what); }

template <class T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad_config("field '" + key + "': " + e.what());
  }
}

template <class T>
void read_opt(const Json& j, const std::string& key, T& out) {
  if (j.is_object() && j.contains(key)) out = get_as<T>(j, key);
}

}  // namespace detail

/// A point is a number (dimension 1) or an array of numbers.
inline Point point_from_json(const Json& j) {
  try {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) return j.get<Point>();
  } catch (const nlohmann::json::exception& e) {
    detail::bad_config(std::string("point: ") + e.what());
  }
  detail::bad_config("point must be a number or an array of numbers");
}

inline std::vector<Point> points_from_json(const Json& j) {
  if (!j.is_array()) detail::bad_config("point list must be an array");
  std::vector<Point> out;
  for (const auto& p : j) out.push_back(point_from_json(p));
  return out;
}

/// {"kind": "box", "lower": [..], "upper": [..], "r0": .., "beta": ..} or
/// {"kind": "finite", "points": [[..], ..], "distances": [[..], ..], ...}.
inline DomainSpec domain_from_json(const Json& j) {
  if (!j.is_object()) detail::bad_config("domain must be an object");
  const std::string kind = j.contains("kind") ? detail::get_as<std::string>(j, "kind") : "box";
  std::optional<double> r0;
  if (j.contains("r0")) r0 = detail::get_as<double>(j, "r0");
  double beta = 0.5;
  detail::read_opt(j, "beta", beta);
  if (!(beta > 0.0 && beta < 1.0)) detail::bad_config("domain beta must lie in (0, 1)");
  if (r0 && !(*r0 > 0.0)) detail::bad_config("domain r0 must be > 0");
  if (kind == "box") {
    if (!j.contains("lower") || !j.contains("upper")) detail::bad_config("box domain needs lower and upper");
    return DomainSpec::box(point_from_json(j.at("lower")), point_from_json(j.at("upper")), r0, beta);
  }
  if (kind == "finite") {
    if (!j.contains("points")) detail::bad_config("finite domain needs points");
    std::optional<std::vector<std::vector<double>>> table;
    if (j.contains("distances")) table = detail::get_as<std::vector<std::vector<double>>>(j, "distances");
    return DomainSpec::finite_set(points_from_json(j.at("points")), std::move(table), r0, beta);
  }
  detail::bad_config("unknown domain kind '" + kind + "'");
}

/// {"dimension": m, "members": [{"kind": "sup-norm"}, {"kind": "projection", "index": 0},
///  {"kind": "linear", "weights": [..]}, {"kind": "euclidean"}]}
inline SemidistanceFamily family_from_json(const Json& j) {
  if (!j.is_object()) detail::bad_config("codomain must be an object");
  std::size_t dim = 1;
  detail::read_opt(j, "dimension", dim);
  std::vector<SemidistanceMember> members;
  if (j.contains("members")) {
    for (const auto& mj : j.at("members")) {
      SemidistanceMember m;
      const std::string kind = detail::get_as<std::string>(mj, "kind");
      if (kind == "sup-norm") m.kind = SemidistanceMember::Kind::sup_norm;
      else if (kind == "euclidean") m.kind = SemidistanceMember::Kind::euclidean;
      else if (kind == "projection") m.kind = SemidistanceMember::Kind::projection;
      else if (kind == "linear") m.kind = SemidistanceMember::Kind::linear;
      else detail::bad_config("unknown semidistance kind '" + kind + "'");
      detail::read_opt(mj, "index", m.index);
      detail::read_opt(mj, "weights", m.weights);
      detail::read_opt(mj, "name", m.name);
      members.push_back(std::move(m));
    }
  } else {
    members.push_back(SemidistanceMember{});
  }
  return SemidistanceFamily(dim, std::move(members));
}

inline void scale_options_from_json(const Json& j, ScaleOptions& o) {
  if (!j.is_object()) detail::bad_config("scale options must be an object");
  detail::read_opt(j, "k_max", o.k_max);
  detail::read_opt(j, "tol_stall", o.tol_stall);
  detail::read_opt(j, "stall_span", o.stall_span);
  detail::read_opt(j, "base_depth", o.base_depth);
  detail::read_opt(j, "max_depth", o.max_depth);
  detail::read_opt(j, "min_scales", o.min_scales);
  detail::read_opt(j, "margin", o.margin);
  detail::read_opt(j, "max_samples", o.max_samples);
}

inline void convergence_options_from_json(const Json& j, ConvergenceOptions& o) {
  if (!j.is_object()) detail::bad_config("convergence options must be an object");
  detail::read_opt(j, "min_tail", o.min_tail);
  detail::read_opt(j, "lu_depth", o.lu_depth);
  detail::read_opt(j, "uniform_depth", o.uniform_depth);
  detail::read_opt(j, "cauchy_k_max", o.cauchy_k_max);
  detail::read_opt(j, "probe_span", o.probe_span);
  detail::read_opt(j, "cauchy_n_ratio", o.cauchy_n_ratio);
  detail::read_opt(j, "cauchy_depth", o.cauchy_depth);
  detail::read_opt(j, "tail_window", o.tail_window);
  detail::read_opt(j, "stab_tol", o.stab_tol);
  detail::read_opt(j, "osc_tol", o.osc_tol);
  detail::read_opt(j, "decay_tol", o.decay_tol);
  detail::read_opt(j, "growth_tol", o.growth_tol);
  detail::read_opt(j, "ball_scale", o.ball_scale);
  detail::read_opt(j, "interchange_tol", o.interchange_tol);
}

inline void validate(const ConvergenceOptions& o) {
  const auto& s = o.scale;
  if (!(o.eps > 0.0) || !(s.tol_stall > 0.0) || !(s.margin >= 0.0) || !(o.stab_tol > 0.0) || !(o.osc_tol > 0.0) ||
      !(o.decay_tol > 0.0) || !(o.growth_tol >= 0.0) || !(o.interchange_tol > 0.0))
    throw Error(Errc::invalid_argument, "tolerances must be > 0");
  if (s.k_max < 0 || s.stall_span < 1 || s.base_depth < 0 || s.max_depth < s.base_depth || s.min_scales < 1 ||
      o.cauchy_k_max < 0 || o.ball_scale < 0 || o.lu_depth < 0 || o.uniform_depth < 0 || o.tail_window < 1 ||
      o.cauchy_n_ratio < 1)
    throw Error(Errc::invalid_argument, "horizons and depths must be nonnegative and ordered");
}

/// Ordered cover: [{"center": c, "radius": r, "approximant": "name" | "name:n", "params": {..}}, ..].
inline std::vector<CoverPiece> cover_from_json(const Json& j, const DomainSpec& domain) {
  if (!j.is_array() || j.empty()) detail::bad_config("cover must be a nonempty array");
  std::vector<CoverPiece> out;
  for (const auto& pj : j) {
    const Point c = point_from_json(pj.at("center"));
    const double r = detail::get_as<double>(pj, "radius");
    CorpusParams params;
    detail::read_opt(pj, "params", params);
    out.push_back(CoverPiece{ball(domain, c, r), corpus_function(detail::get_as<std::string>(pj, "approximant"), params)});
  }
  return out;
}

// ---------------------------------------------------------------- serialization

inline Json to_json(const DomainSpec& d) {
  Json j;
  if (d.kind() == DomainKind::box) {
    j["kind"] = "box";
    j["lower"] = d.lower();
    j["upper"] = d.upper();
  } else {
    j["kind"] = "finite";
    j["points"] = d.points();
    j["distances"] = d.distances();
  }
  j["r0"] = d.r0();
  j["beta"] = d.beta();
  return j;
}

inline Json to_json(const SemidistanceFamily& f) {
  Json j;
  j["dimension"] = f.dimension();
  Json members = Json::array();
  for (const auto& m : f.members()) {
    Json mj;
    mj["kind"] = member_kind_name(m.kind);
    mj["name"] = m.name;
    if (m.kind == SemidistanceMember::Kind::projection) mj["index"] = m.index;
    if (m.kind == SemidistanceMember::Kind::linear) mj["weights"] = m.weights;
    members.push_back(std::move(mj));
  }
  j["members"] = std::move(members);
  return j;
}

inline Json to_json(const ScaleOptions& o) {
  return Json{{"k_max", o.k_max},         {"tol_stall", o.tol_stall}, {"stall_span", o.stall_span},
              {"base_depth", o.base_depth}, {"max_depth", o.max_depth}, {"min_scales", o.min_scales},
              {"margin", o.margin},       {"max_samples", o.max_samples}};
}

inline Json to_json(const ConvergenceOptions& o) {
  Json j;
  j["scale"] = to_json(o.scale);
  j["member"] = o.member;
  j["eps"] = o.eps;
  j["min_tail"] = o.min_tail;
  j["lu_depth"] = o.lu_depth;
  j["uniform_depth"] = o.uniform_depth;
  j["cauchy_k_max"] = o.cauchy_k_max;
  j["probe_span"] = o.probe_span;
  j["cauchy_n_ratio"] = o.cauchy_n_ratio;
  j["cauchy_depth"] = o.cauchy_depth;
  j["tail_window"] = o.tail_window;
  j["stab_tol"] = o.stab_tol;
  j["osc_tol"] = o.osc_tol;
  j["decay_tol"] = o.decay_tol;
  j["growth_tol"] = o.growth_tol;
  j["ball_scale"] = o.ball_scale;
  j["interchange_tol"] = o.interchange_tol;
  return j;
}

inline Json to_json(const SupEstimate& e) {
  Json j;
  j["k"] = e.scale;
  j["radius"] = e.radius;
  j["s_k"] = e.value;
  j["sampled"] = e.sampled;
  j["rigorous_upper"] = e.rigorous_upper ? Json(*e.rigorous_upper) : Json(nullptr);
  j["depth"] = e.depth;
  j["samples"] = e.samples;
  j["mesh"] = e.mesh;
  j["argmax"] = e.argmax;
  return j;
}

inline Json to_json(const ScaleProfile& p) {
  Json j;
  j["probe"] = p.probe;
  j["delta_hat"] = p.delta_hat;
  j["stalled"] = p.stalled;
  Json s = Json::array();
  for (const auto& e : p.scales) s.push_back(to_json(e));
  j["scales"] = std::move(s);
  return j;
}

inline Json to_json(const VDistanceReport& r) {
  Json j;
  j["member"] = r.member;
  j["probes"] = r.probes;
  j["delta"] = r.delta;
  Json ps = Json::array();
  for (const auto& p : r.profiles) ps.push_back(to_json(p));
  j["profiles"] = std::move(ps);
  return j;
}

inline Json to_json(const EntourageResult& r) {
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  j["entourage"] = {{"member", r.entourage.member}, {"radius", r.entourage.radius}};
  j["report"] = to_json(r.report);
  if (r.witness) {
    Json w;
    w["probe"] = r.witness->probe;
    Json v = Json::array();
    for (const auto& e : r.witness->violations) v.push_back({{"k", e.scale}, {"x", e.argmax}, {"value", e.sampled}});
    w["violations"] = std::move(v);
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

inline Json to_json(const TailVerdict& t) {
  Json j;
  j["verdict"] = verdict_name(t.verdict);
  j["settle_index"] = t.settle_index ? Json(*t.settle_index) : Json(nullptr);
  j["witness_index"] = t.witness_index ? Json(*t.witness_index) : Json(nullptr);
  j["witness_value"] = t.witness_value;
  return j;
}

inline Json to_json(const ConvergenceVerdict& cv) {
  Json j;
  j["sequence"] = cv.sequence;
  j["limit"] = cv.limit;
  j["eps"] = cv.eps;
  j["first"] = cv.first;
  j["horizon"] = cv.horizon;
  j["probes"] = cv.probes;
  Json vec;
  for (const auto& m : cv.modes) vec[mode_name(m.mode)] = verdict_name(m.verdict);
  j["modes"] = std::move(vec);
  Json detail_j = Json::array();
  for (const auto& m : cv.modes) {
    Json mj;
    mj["mode"] = mode_name(m.mode);
    mj["verdict"] = verdict_name(m.verdict);
    mj["coerced"] = m.coerced;
    mj["tail"] = to_json(m.tail);
    if (m.witness) {
      mj["witness"] = {{"n", m.witness->n},
                       {"probe", m.witness->probe},
                       {"scale", m.witness->scale},
                       {"x", m.witness->point},
                       {"value", m.witness->value}};
    } else {
      mj["witness"] = nullptr;
    }
    mj["profile"] = m.profile;
    detail_j.push_back(std::move(mj));
  }
  j["details"] = std::move(detail_j);
  return j;
}

inline Json to_json(const VLimitResult& r) {
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  j["eps"] = r.eps;
  j["first"] = r.first;
  j["horizon"] = r.horizon;
  j["tail"] = to_json(r.tail);
  j["deltas"] = r.deltas;
  j["worst_probe"] = r.worst_probe;
  return j;
}

inline Json to_json(const CauchyViolation& v) {
  return Json{{"n", v.n}, {"k", v.scale}, {"x", v.x}, {"tail_deviation", v.deviation}};
}

inline Json to_json(const CauchyWitness& w) {
  Json j;
  j["verdict"] = verdict_name(w.verdict);
  j["probe"] = w.probe;
  j["eps"] = w.eps;
  j["first"] = w.first;
  j["n_limit"] = w.n_limit;
  j["horizon"] = w.horizon;
  j["tail_window"] = w.tail_window;
  j["k_max"] = w.k_max;
  j["N"] = w.chosen_n ? Json(*w.chosen_n) : Json(nullptr);
  Json checked = Json::array();
  for (const auto& iw : w.checked) {
    Json ij;
    ij["n"] = iw.n;
    ij["k_n"] = iw.scale;
    // the sample with the latest tail start stands for the whole ball
    const CauchyPointWitness* worst = nullptr;
    double dev = 0.0;
    for (const auto& p : iw.points) {
      if (!worst || p.tail_start > worst->tail_start) worst = &p;
      dev = std::max(dev, p.deviation);
    }
    ij["samples"] = iw.points.size();
    ij["max_deviation"] = dev;
    ij["latest_tail"] = worst ? Json{{"x", worst->x}, {"P_x", worst->tail_start}, {"deviation", worst->deviation}}
                              : Json(nullptr);
    checked.push_back(std::move(ij));
  }
  j["checked"] = std::move(checked);
  Json fails = Json::array();
  for (const auto& f : w.failures) {
    Json fj;
    fj["n"] = f.n;
    Json ps = Json::array();
    for (const auto& v : f.per_scale) ps.push_back(to_json(v));
    fj["per_scale"] = std::move(ps);
    fails.push_back(std::move(fj));
  }
  j["failures"] = std::move(fails);
  j["certificate"] = w.certificate ? to_json(*w.certificate) : Json(nullptr);
  return j;
}

inline Json to_json(const SeriesReport& r) {
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  j["series"] = r.series;
  j["member"] = r.member;
  j["horizon"] = r.horizon;
  j["hypothesis"] = verdict_name(r.hypothesis);
  j["hypothesis_failures"] = r.hypothesis_failures;
  j["conclusion_claimed"] = r.conclusion_claimed;
  j["conclusion"] = r.conclusion ? to_json(*r.conclusion) : Json(nullptr);
  Json ps = Json::array();
  for (const auto& p : r.probes) {
    ps.push_back({{"probe", p.probe},
                  {"norm_sum", p.norm_sum},
                  {"norm_spread", p.norm_spread},
                  {"norm_stable", p.norm_stable},
                  {"ball_spread", p.ball_spread},
                  {"ball_worst", p.ball_worst},
                  {"ball_stable", p.ball_stable},
                  {"norm_oscillation", p.norm_oscillation},
                  {"norm_continuous", p.norm_continuous},
                  {"limit", p.limit}});
  }
  j["probes"] = std::move(ps);
  return j;
}

inline Json to_json(const AbelReport& r) {
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  j["series"] = r.series;
  j["weights"] = r.weights;
  j["member"] = r.member;
  j["horizon"] = r.horizon;
  j["hypothesis"] = verdict_name(r.hypothesis);
  j["hypothesis_failures"] = r.hypothesis_failures;
  j["max_identity_error"] = r.max_identity_error;
  Json ps = Json::array();
  for (const auto& p : r.probes) {
    ps.push_back({{"probe", p.probe},
                  {"direct", p.direct},
                  {"by_parts", p.by_parts},
                  {"identity_error", p.identity_error},
                  {"continuity_defect", p.continuity_defect},
                  {"bound", p.bound},
                  {"bound_first_half", p.bound_first_half},
                  {"bounded", p.bounded},
                  {"ball_bound", p.ball_bound},
                  {"ball_bounded", p.ball_bounded},
                  {"eps_tail", p.eps_tail},
                  {"eps_decays", p.eps_decays},
                  {"variation", p.variation},
                  {"variation_spread", p.variation_spread},
                  {"variation_stable", p.variation_stable},
                  {"variation_oscillation", p.variation_oscillation},
                  {"variation_continuous", p.variation_continuous}});
  }
  j["probes"] = std::move(ps);
  return j;
}

inline Json to_json(const InterchangeReport& r) {
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  j["sequence"] = r.sequence;
  j["limit"] = r.limit;
  j["points"] = r.points;
  j["point_limit"] = r.point_limit;
  j["precondition_violated"] = r.precondition_violated;
  j["precondition"] = to_json(r.precondition);
  j["lhs"] = r.lhs;
  j["lhs_spread"] = r.lhs_spread;
  j["lhs_stable"] = r.lhs_stable;
  j["rhs"] = r.rhs;
  j["rhs_spread"] = r.rhs_spread;
  j["rhs_stable"] = r.rhs_stable;
  j["discrepancy"] = r.discrepancy;
  j["unstable_p"] = r.unstable_p ? Json(*r.unstable_p) : Json(nullptr);
  j["note"] = r.note;
  Json inner = Json::array();
  for (const auto& il : r.inner) inner.push_back({{"p", il.p}, {"value", il.value}, {"spread", il.spread}});
  j["inner"] = std::move(inner);
  return j;
}

inline Json to_json(const OscillationProfile& p) {
  Json j;
  j["x"] = p.x;
  j["defect"] = p.defect;
  j["stalled"] = p.stalled;
  Json s = Json::array();
  for (const auto& e : p.scales) s.push_back(to_json(e));
  j["scales"] = std::move(s);
  return j;
}

inline Json to_json(const SemicontinuityResult& r) {
  return Json{{"kind", r.kind == SemicontinuityKind::upper ? "upper" : "lower"},
              {"value", r.value},
              {"limit_estimate", r.limit_estimate},
              {"defect", r.defect},
              {"profile", to_json(r.profile)}};
}

inline Json to_json(const SemilocalResult& r) {
  Json j;
  j["verdict"] = verdict_name(r.verdict);
  j["oracle"] = r.oracle;
  j["membership"] = membership_name(r.membership);
  j["entourage"] = {{"member", r.entourage.member}, {"radius", r.entourage.radius}};
  Json ps = Json::array();
  for (const auto& p : r.probes)
    ps.push_back({{"probe", p.probe},
                  {"verdict", verdict_name(p.verdict)},
                  {"scale", p.scale ? Json(*p.scale) : Json(nullptr)},
                  {"sups", p.sups}});
  j["probes"] = std::move(ps);
  j["conclusion"] = r.conclusion;
  return j;
}

inline Json to_json(const PatchReport& r) {
  return Json{{"verdict", verdict_name(r.verdict)},
              {"pieces", r.pieces},
              {"samples", r.samples},
              {"uncovered", r.uncovered},
              {"piece_errors", r.piece_errors},
              {"piece_bound", r.piece_bound},
              {"sup_error", r.sup_error},
              {"argmax", r.argmax},
              {"slack", r.slack},
              {"rigorous", r.rigorous}};
}

inline Json to_json(const CorpusEntry& e) {
  Json j;
  j["name"] = e.name;
  j["kind"] = corpus_kind_name(e.kind);
  j["description"] = e.description;
  j["phenomena"] = e.phenomena;
  Json ps = Json::array();
  for (const auto& p : e.params) ps.push_back({{"name", p.name}, {"default", p.value}, {"description", p.description}});
  j["params"] = std::move(ps);
  if (e.kind != CorpusKind::function) {
    j["domain"] = to_json(e.domain);
    j["first"] = e.first;
    j["horizon"] = e.horizon;
  }
  j["limit"] = e.limit.empty() ? Json(nullptr) : Json(e.limit);
  j["weights"] = e.weights.empty() ? Json(nullptr) : Json(e.weights);
  return j;
}

/// Wrap a report body with the schema header.
inline Json envelope(const std::string& command, Json body) {
  Json j;
  j["schema_version"] = schema_version;
  j["command"] = command;
  for (auto& [k, v] : body.items()) j[k] = std::move(v);
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- CSV and SVG

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string point_label(const Point& p) {
  std::string s;
  for (std::size_t j = 0; j < p.size(); ++j) s += (j ? ";" : "") + num(p[j]);
  return s;
}

}  // namespace detail

inline std::string profiles_csv(const std::vector<ScaleProfile>& profiles) {
  std::string s = "probe,k,s_k\n";
  for (const auto& p : profiles)
    for (const auto& e : p.scales) s += detail::point_label(p.probe) + "," + std::to_string(e.scale) + "," + detail::num(e.value) + "\n";
  return s;
}

inline std::string profiles_csv(const VDistanceReport& r) { return profiles_csv(r.profiles); }

/// One row per n with every mode's estimate.
inline std::string modes_csv(const ConvergenceVerdict& cv) {
  std::string s = "n";
  for (const auto& m : cv.modes) s += std::string(",") + mode_name(m.mode);
  s += "\n";
  for (std::size_t k = 0; k < cv.modes[0].profile.size(); ++k) {
    s += std::to_string(cv.first + k);
    for (const auto& m : cv.modes) s += "," + detail::num(m.profile[k]);
    s += "\n";
  }
  return s;
}

inline std::string deltas_csv(const VLimitResult& r, const std::vector<Point>& probes) {
  std::string s = "probe,n,delta\n";
  for (std::size_t k = 0; k < r.deltas.size(); ++k)
    s += detail::point_label(probes[r.worst_probe[k]]) + "," + std::to_string(r.first + k) + "," +
         detail::num(r.deltas[k]) + "\n";
  return s;
}

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

/// Line plot with one polyline per series, linear axes, fixed 640x400 canvas.
inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      if (!any) {
        x0 = x1 = s.x[k];
        y0 = y1 = s.y[k];
        any = true;
      }
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  auto f = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return std::string(b);
  };
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  o << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  o << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<text x=\"320\" y=\"390\" text-anchor=\"middle\" font-size=\"12\">" << esc(xlabel) << "</text>\n";
  o << "<text x=\"14\" y=\"200\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 200)\">" << esc(ylabel)
    << "</text>\n";
  o << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << detail::num(x0) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" font-size=\"10\" text-anchor=\"end\">" << detail::num(x1)
    << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"10\" text-anchor=\"end\">" << detail::num(y0)
    << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << T + 4 << "\" font-size=\"10\" text-anchor=\"end\">" << detail::num(y1)
    << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < series[s].x.size(); ++k) {
      if (!std::isfinite(series[s].x[k]) || !std::isfinite(series[s].y[k])) continue;
      o << (first ? "" : " ") << f(px(series[s].x[k])) << "," << f(py(series[s].y[k]));
      first = false;
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (s + 1) << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
      << c << "\">" << esc(series[s].name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline std::vector<PlotSeries> profile_series(const std::vector<ScaleProfile>& profiles) {
  std::vector<PlotSeries> out;
  for (const auto& p : profiles) {
    PlotSeries s;
    s.name = "a = " + detail::point_label(p.probe);
    for (const auto& e : p.scales) {
      s.x.push_back(e.scale);
      s.y.push_back(e.value);
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_failure, "cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error(Errc::io_failure, "write to '" + path + "' failed");
}

inline Json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_failure, "cannot open '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_config, "'" + path + "': " + e.what());
  }
}

}  // namespace vconv
