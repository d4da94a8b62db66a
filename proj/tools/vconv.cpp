// vconv: command-line driver for the V-convergence diagnostics.
//
// Exit status: 0 holds, 1 fails, 2 inconclusive, 3 usage or configuration
// error, 4 I/O error, 5 evaluation failure.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vconv.hpp"

namespace {

using namespace vconv;

constexpr int exit_usage = 3;
constexpr int exit_io = 4;
constexpr int exit_eval = 5;

struct Flags {
  std::string config;
  std::string family;
  std::vector<std::string> params;
  std::string limit;
  std::string other;
  std::string weights;
  std::string points;
  std::string cover;
  std::vector<double> probes;
  std::optional<double> eps;
  std::optional<std::size_t> member;
  std::optional<std::size_t> horizon;
  std::optional<int> k_max;
  std::optional<double> tol_stall;
  std::optional<std::size_t> points_last;
  std::optional<std::size_t> grid;
  std::string out, csv, svg;
};

/// Effective run configuration after defaults, config file and flags.
struct RunConfig {
  std::string family;
  CorpusParams params;
  std::string limit;
  std::string other;
  std::string weights;
  std::string points = "reciprocal";
  std::size_t points_last = 10000000;
  std::optional<DomainSpec> domain;
  std::optional<SemidistanceFamily> codomain;
  std::vector<Point> probes;
  std::optional<std::size_t> horizon;
  ConvergenceOptions opts;
  Json cover;
  std::size_t grid = 10000;
  std::string out, csv, svg;
};

CorpusParams parse_params(const std::vector<std::string>& kv) {
  CorpusParams p;
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(Errc::invalid_argument, "parameter '" + s + "' must be name=value");
    try {
      p[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, "parameter '" + s + "' needs a numeric value");
    }
  }
  return p;
}

RunConfig resolve(const Flags& f) {
  RunConfig rc;
  if (!f.config.empty()) {
    const Json j = read_json_file(f.config);
    if (!j.is_object()) throw Error(Errc::malformed_config, "config must be a JSON object");
    detail::read_opt(j, "family", rc.family);
    detail::read_opt(j, "params", rc.params);
    detail::read_opt(j, "limit", rc.limit);
    detail::read_opt(j, "other", rc.other);
    detail::read_opt(j, "weights", rc.weights);
    detail::read_opt(j, "points", rc.points);
    detail::read_opt(j, "points_last", rc.points_last);
    if (j.contains("domain")) rc.domain = domain_from_json(j.at("domain"));
    if (j.contains("codomain")) rc.codomain = family_from_json(j.at("codomain"));
    if (j.contains("probes")) rc.probes = points_from_json(j.at("probes"));
    if (j.contains("horizon")) rc.horizon = detail::get_as<std::size_t>(j, "horizon");
    detail::read_opt(j, "eps", rc.opts.eps);
    detail::read_opt(j, "member", rc.opts.member);
    if (j.contains("scale")) scale_options_from_json(j.at("scale"), rc.opts.scale);
    if (j.contains("convergence")) convergence_options_from_json(j.at("convergence"), rc.opts);
    if (j.contains("cover")) rc.cover = j.at("cover");
    detail::read_opt(j, "grid", rc.grid);
    detail::read_opt(j, "out", rc.out);
    detail::read_opt(j, "csv", rc.csv);
    detail::read_opt(j, "svg", rc.svg);
  }
  if (!f.family.empty()) rc.family = f.family;
  if (!f.params.empty()) {
    for (const auto& [k, v] : parse_params(f.params)) rc.params[k] = v;
  }
  if (!f.limit.empty()) rc.limit = f.limit;
  if (!f.other.empty()) rc.other = f.other;
  if (!f.weights.empty()) rc.weights = f.weights;
  if (!f.points.empty()) rc.points = f.points;
  if (f.points_last) rc.points_last = *f.points_last;
  if (!f.probes.empty()) {
    rc.probes.clear();
    for (double x : f.probes) rc.probes.push_back({x});
  }
  if (f.horizon) rc.horizon = *f.horizon;
  if (f.eps) rc.opts.eps = *f.eps;
  if (f.member) rc.opts.member = *f.member;
  if (f.k_max) rc.opts.scale.k_max = *f.k_max;
  if (f.tol_stall) rc.opts.scale.tol_stall = *f.tol_stall;
  if (!f.cover.empty()) rc.cover = read_json_file(f.cover);
  if (f.grid) rc.grid = *f.grid;
  if (!f.out.empty()) rc.out = f.out;
  if (!f.csv.empty()) rc.csv = f.csv;
  if (!f.svg.empty()) rc.svg = f.svg;
  validate(rc.opts);
  return rc;
}

const CorpusEntry& family_entry(const RunConfig& rc) {
  if (rc.family.empty()) throw Error(Errc::invalid_argument, "--family is required");
  const auto colon = rc.family.find(':');
  return corpus_lookup(colon == std::string::npos ? rc.family : rc.family.substr(0, colon));
}

DomainSpec run_domain(const RunConfig& rc, const CorpusEntry& e) { return rc.domain ? *rc.domain : e.domain; }

Space run_space(const RunConfig& rc, const DomainSpec& d, std::size_t dim) {
  Space s{d, rc.codomain ? *rc.codomain : SemidistanceFamily::sup_norm(dim)};
  if (s.family.dimension() != dim) throw Error(Errc::dimension_mismatch, "codomain dimension differs from the family");
  return s;
}

ProbeSet run_probes(const RunConfig& rc, const DomainSpec& d) {
  if (!rc.probes.empty()) return ProbeSet(d, rc.probes);
  if (d.kind() == DomainKind::finite_set) return ProbeSet(d, {d.points().front()});
  Point c(d.dimension());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = 0.5 * (d.lower()[j] + d.upper()[j]);
  return ProbeSet(d, {c});
}

FnSequence run_sequence(const RunConfig& rc, const CorpusEntry& e) {
  FnSequence s = e.sequence(rc.params);
  if (rc.horizon) s = s.with_horizon(*rc.horizon);
  return s;
}

Json config_json(const RunConfig& rc, const Space& space, const ProbeSet& probes) {
  Json j;
  j["family"] = rc.family;
  j["params"] = rc.params;
  j["domain"] = to_json(space.domain);
  j["codomain"] = to_json(space.family);
  j["probes"] = probes.points();
  j["options"] = to_json(rc.opts);
  return j;
}

void emit(const RunConfig& rc, const std::string& command, Json body) {
  const std::string text = dump(envelope(command, std::move(body)));
  if (rc.out.empty() || rc.out == "-")
    std::cout << text;
  else
    write_text(rc.out, text);
}

Verdict combine(const std::vector<Verdict>& vs) {
  bool inc = false;
  for (auto v : vs) {
    if (v == Verdict::fails) return Verdict::fails;
    inc |= v == Verdict::inconclusive;
  }
  return inc ? Verdict::inconclusive : Verdict::holds;
}

int cmd_vdist(const RunConfig& rc) {
  const auto& e = family_entry(rc);
  const FnObject f = corpus_function(rc.family, rc.params);
  std::string other = rc.other;
  if (other.empty()) other = e.limit.empty() ? "zero" : e.limit;
  const FnObject g = corpus_function(other);
  const DomainSpec d = run_domain(rc, e);
  const Space space = run_space(rc, d, f.codomain_dim());
  const ProbeSet probes = run_probes(rc, d);
  const auto r = entourage_test(space, f, g, Entourage{rc.opts.member, rc.opts.eps}, probes, rc.opts.scale);
  Json body;
  body["verdict"] = verdict_name(r.verdict);
  body["f"] = f.name();
  body["g"] = g.name();
  body["config"] = config_json(rc, space, probes);
  body["entourage"] = to_json(r);
  if (!rc.csv.empty()) write_text(rc.csv, profiles_csv(r.report));
  if (!rc.svg.empty())
    write_text(rc.svg, svg_plot("s_k for " + f.name() + " vs " + g.name(), "k", "s_k", profile_series(r.report.profiles)));
  emit(rc, "vdist", std::move(body));
  return exit_code(r.verdict);
}

int cmd_classify(const RunConfig& rc) {
  const auto& e = family_entry(rc);
  const FnSequence seq = run_sequence(rc, e);
  const std::string lname = rc.limit.empty() ? e.limit : rc.limit;
  if (lname.empty()) throw Error(Errc::invalid_argument, "family '" + e.name + "' has no known limit; pass --limit");
  const FnObject g = corpus_function(lname);
  const DomainSpec d = run_domain(rc, e);
  const Space space = run_space(rc, d, seq.codomain_dim());
  const ProbeSet probes = run_probes(rc, d);
  const auto cv = classify(space, seq, g, probes, rc.opts);
  Json body;
  body["verdict"] = verdict_name(cv.verdict(Mode::v));
  body["config"] = config_json(rc, space, probes);
  body["classification"] = to_json(cv);
  if (!rc.csv.empty()) write_text(rc.csv, modes_csv(cv));
  if (!rc.svg.empty()) {
    std::vector<PlotSeries> series;
    for (const auto& m : cv.modes) {
      PlotSeries s;
      s.name = mode_name(m.mode);
      for (std::size_t k = 0; k < m.profile.size(); ++k) {
        s.x.push_back(static_cast<double>(cv.first + k));
        s.y.push_back(m.profile[k]);
      }
      series.push_back(std::move(s));
    }
    write_text(rc.svg, svg_plot(seq.name() + " vs " + g.name(), "n", "sup distance", series));
  }
  emit(rc, "classify", std::move(body));
  return exit_code(cv.verdict(Mode::v));
}

int cmd_cauchy(const RunConfig& rc) {
  const auto& e = family_entry(rc);
  const FnSequence seq = run_sequence(rc, e);
  const DomainSpec d = run_domain(rc, e);
  const Space space = run_space(rc, d, seq.codomain_dim());
  const ProbeSet probes = run_probes(rc, d);
  Json body;
  Json ws = Json::array();
  std::vector<Verdict> vs;
  std::string csv = "probe,n,k,max_deviation\n";
  for (const auto& a : probes) {
    const auto w = v_cauchy_sequence(space, seq, a, rc.opts.eps, rc.opts);
    vs.push_back(w.verdict);
    for (const auto& f : w.failures)
      for (const auto& v : f.per_scale)
        csv += detail::point_label(a) + "," + std::to_string(v.n) + "," + std::to_string(v.scale) + "," +
               detail::num(v.deviation) + "\n";
    ws.push_back(to_json(w));
  }
  const Verdict v = combine(vs);
  body["verdict"] = verdict_name(v);
  body["config"] = config_json(rc, space, probes);
  body["witnesses"] = std::move(ws);
  if (!rc.csv.empty()) write_text(rc.csv, csv);
  emit(rc, "cauchy", std::move(body));
  return exit_code(v);
}

int cmd_series(const RunConfig& rc) {
  const auto& e = family_entry(rc);
  const FnSequence seq = run_sequence(rc, e);
  const DomainSpec d = run_domain(rc, e);
  const Space space = run_space(rc, d, seq.codomain_dim());
  const ProbeSet probes = run_probes(rc, d);
  const auto r = normal_series_test(space, seq, probes, rc.opts);
  Json body;
  body["verdict"] = verdict_name(r.verdict);
  body["config"] = config_json(rc, space, probes);
  body["series"] = to_json(r);
  if (!rc.csv.empty() && r.conclusion) write_text(rc.csv, deltas_csv(*r.conclusion, probes.points()));
  emit(rc, "series", std::move(body));
  return exit_code(r.verdict);
}

int cmd_abel(const RunConfig& rc) {
  const auto& e = family_entry(rc);
  const FnSequence seq = run_sequence(rc, e);
  const std::string wname = rc.weights.empty() ? e.weights : rc.weights;
  if (wname.empty()) throw Error(Errc::invalid_argument, "family '" + e.name + "' has no weights; pass --weights");
  FnSequence w = corpus_lookup(wname).sequence();
  w = w.with_horizon(seq.horizon());
  const DomainSpec d = run_domain(rc, e);
  const Space space = run_space(rc, d, seq.codomain_dim());
  const ProbeSet probes = run_probes(rc, d);
  const auto r = abel_series(space, seq, w, probes, rc.opts);
  Json body;
  body["verdict"] = verdict_name(r.verdict);
  body["config"] = config_json(rc, space, probes);
  body["abel"] = to_json(r);
  if (!rc.csv.empty()) {
    std::string csv = "probe,direct,by_parts,continuity_defect\n";
    for (const auto& p : r.probes)
      csv += detail::point_label(p.probe) + "," + detail::num(p.direct[0]) + "," + detail::num(p.by_parts[0]) + "," +
             detail::num(p.continuity_defect) + "\n";
    write_text(rc.csv, csv);
  }
  emit(rc, "abel", std::move(body));
  return exit_code(r.verdict);
}

int cmd_interchange(const RunConfig& rc) {
  const auto& e = family_entry(rc);
  const FnSequence seq = run_sequence(rc, e);
  const std::string lname = rc.limit.empty() ? e.limit : rc.limit;
  if (lname.empty()) throw Error(Errc::invalid_argument, "family '" + e.name + "' has no known limit; pass --limit");
  const FnObject g = corpus_function(lname);
  const DomainSpec d = run_domain(rc, e);
  const Space space = run_space(rc, d, seq.codomain_dim());
  const PointSequence a = point_sequence(rc.points, rc.points_last);
  const auto r = interchange_check(space, seq, g, a, rc.opts);
  Json body;
  body["verdict"] = verdict_name(r.verdict);
  body["config"] = config_json(rc, space, ProbeSet(d, {a.limit}));
  body["interchange"] = to_json(r);
  if (!rc.csv.empty()) {
    std::string csv = "p,inner_limit,spread\n";
    for (const auto& il : r.inner) csv += std::to_string(il.p) + "," + detail::num(il.value[0]) + "," + detail::num(il.spread) + "\n";
    write_text(rc.csv, csv);
  }
  emit(rc, "interchange", std::move(body));
  return exit_code(r.verdict);
}

int cmd_patch(const RunConfig& rc) {
  const auto& e = family_entry(rc);
  const FnObject f = corpus_function(rc.family, rc.params);
  const DomainSpec d = run_domain(rc, e);
  if (d.kind() != DomainKind::box || d.dimension() != 1)
    throw Error(Errc::invalid_argument, "patch grid checks need a one-dimensional box domain");
  const Space space = run_space(rc, d, f.codomain_dim());
  if (rc.cover.is_null()) throw Error(Errc::invalid_argument, "patch needs a cover (--cover or config 'cover')");
  const Json& cj = rc.cover.is_object() && rc.cover.contains("pieces") ? rc.cover.at("pieces") : rc.cover;
  const auto pieces = cover_from_json(cj, d);
  if (rc.grid < 2) throw Error(Errc::invalid_argument, "grid needs at least two points");
  std::vector<Point> samples;
  const double lo = d.lower()[0], hi = d.upper()[0];
  const double mesh = (hi - lo) / static_cast<double>(rc.grid - 1);
  for (std::size_t k = 0; k < rc.grid; ++k) samples.push_back({k + 1 == rc.grid ? hi : lo + mesh * static_cast<double>(k)});
  const auto r = patch_report(space, pieces, f, samples, mesh, rc.opts.eps, rc.opts.member);
  Json body;
  body["verdict"] = verdict_name(r.verdict);
  body["config"] = config_json(rc, space, ProbeSet{});
  body["eps"] = rc.opts.eps;
  body["grid"] = rc.grid;
  Json pj = Json::array();
  for (const auto& p : pieces)
    pj.push_back({{"center", p.region.center}, {"radius", p.region.radius}, {"approximant", p.approximant.name()}});
  body["cover"] = std::move(pj);
  body["patch"] = to_json(r);
  if (!rc.csv.empty()) {
    const FnObject g = patch(pieces);
    std::string csv = "x,f,patch,owner\n";
    for (const auto& x : samples) {
      const auto owner = patch_owner(pieces, x);
      csv += detail::num(x[0]) + "," + detail::num(f(x)[0]) + "," + (owner ? detail::num(g(x)[0]) : "") + "," +
             (owner ? std::to_string(*owner) : "") + "\n";
    }
    write_text(rc.csv, csv);
  }
  emit(rc, "patch", std::move(body));
  return exit_code(r.verdict);
}

int cmd_corpus(const RunConfig& rc) {
  Json body;
  Json list = Json::array();
  if (!rc.family.empty()) {
    list.push_back(to_json(corpus_lookup(rc.family)));
  } else {
    for (const auto& e : corpus_families()) list.push_back(to_json(e));
  }
  body["families"] = std::move(list);
  emit(rc, "corpus", std::move(body));
  return 0;
}

void add_common(CLI::App* sub, Flags& f, bool sequence_flags) {
  sub->add_option("--config", f.config, "JSON run configuration");
  sub->add_option("--family", f.family, "corpus family (name, or name:n for one member)");
  sub->add_option("--param", f.params, "family parameter name=value (repeatable)");
  sub->add_option("--probes", f.probes, "probe points (one-dimensional domains)")->expected(1, -1);
  sub->add_option("--eps", f.eps, "tolerance eps");
  sub->add_option("--member", f.member, "semidistance member index");
  sub->add_option("--k-max", f.k_max, "largest scale index");
  sub->add_option("--tol-stall", f.tol_stall, "stall tolerance");
  sub->add_option("--out", f.out, "JSON report path (default stdout)");
  sub->add_option("--csv", f.csv, "CSV table path");
  if (sequence_flags) sub->add_option("--horizon", f.horizon, "largest sequence index");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"V-convergence diagnostics for function sequences"};
  app.require_subcommand(1);
  Flags f;
  std::string which;

  auto* vdist = app.add_subcommand("vdist", "V-semidistance of two functions and entourage membership");
  add_common(vdist, f, false);
  vdist->add_option("--other", f.other, "second function (default: the family's limit, else zero)");
  vdist->add_option("--svg", f.svg, "SVG plot of s_k profiles");

  auto* cls = app.add_subcommand("classify", "classify convergence modes of a sequence");
  add_common(cls, f, true);
  cls->add_option("--limit", f.limit, "candidate limit function");
  cls->add_option("--svg", f.svg, "SVG plot of per-n estimates");

  auto* cauchy = app.add_subcommand("cauchy", "sequence Cauchy criterion with witnesses");
  add_common(cauchy, f, true);

  auto* series = app.add_subcommand("series", "normal-convergence rule for a series");
  add_common(series, f, true);

  auto* abel = app.add_subcommand("abel", "Abel summation by parts");
  add_common(abel, f, true);
  abel->add_option("--weights", f.weights, "weight sequence (default: the family's companion)");

  auto* inter = app.add_subcommand("interchange", "iterated limits along a point sequence");
  add_common(inter, f, true);
  inter->add_option("--limit", f.limit, "limit function");
  inter->add_option("--points", f.points, "point sequence: reciprocal, one-minus-reciprocal, constant:<c>");
  inter->add_option("--points-last", f.points_last, "last index of the point sequence");

  auto* pat = app.add_subcommand("patch", "first-match patching over a cover");
  add_common(pat, f, false);
  pat->add_option("--cover", f.cover, "cover JSON file");
  pat->add_option("--grid", f.grid, "number of grid points");

  auto* corpus = app.add_subcommand("corpus", "list corpus families");
  corpus->add_option("--family", f.family, "show one family");
  corpus->add_option("--out", f.out, "JSON path (default stdout)");

  for (auto* s : {vdist, cls, cauchy, series, abel, inter, pat, corpus})
    s->callback([&which, s] { which = s->get_name(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    const RunConfig rc = resolve(f);
    if (which == "vdist") return cmd_vdist(rc);
    if (which == "classify") return cmd_classify(rc);
    if (which == "cauchy") return cmd_cauchy(rc);
    if (which == "series") return cmd_series(rc);
    if (which == "abel") return cmd_abel(rc);
    if (which == "interchange") return cmd_interchange(rc);
    if (which == "patch") return cmd_patch(rc);
    if (which == "corpus") return cmd_corpus(rc);
    return exit_usage;
  } catch (const EvaluationError& e) {
    std::cerr << "vconv: " << e.what() << "\n";
    return exit_eval;
  } catch (const Error& e) {
    std::cerr << "vconv: " << e.what() << "\n";
    return e.code() == Errc::io_failure ? exit_io : exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "vconv: " << e.what() << "\n";
    return exit_usage;
  }
}
