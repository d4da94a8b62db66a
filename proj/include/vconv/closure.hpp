#pragma once

// Closure checks: first-match patching over a finite cover, oscillation and
// semicontinuity defects, and the semi-local approximation condition.

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vconv/space.hpp"
#include "vconv/verdict.hpp"
#include "vconv/vmetric.hpp"

namespace vconv {

/// One (region, approximant) pair. Regions are open for patching.
struct CoverPiece {
  Region region;
  FnObject approximant;
};

/// g(x) = approximant_k(x) for the smallest k with x in the open region_k,
/// i.e. approximant_k on V_k minus the union of the earlier V_i.
inline FnObject patch(std::vector<CoverPiece> pieces, std::string name = "patch") {
  if (pieces.empty()) throw Error(Errc::invalid_argument, "patch needs at least one cover piece");
  const std::size_t m = pieces.front().approximant.codomain_dim();
  for (const auto& p : pieces)
    if (p.approximant.codomain_dim() != m)
      throw Error(Errc::dimension_mismatch, "cover approximants must share a codomain");
  auto shared = std::make_shared<const std::vector<CoverPiece>>(std::move(pieces));
  auto fn_name = name;
  return FnObject(std::move(name), m, [shared, fn_name](std::span<const double> x, std::span<double> out) {
    for (const auto& p : *shared) {
      if (p.region.contains_open(x)) {
        p.approximant.eval_into(x, out);
        return;
      }
    }
    throw EvaluationError(fn_name, Point(x.begin(), x.end()), "point outside the union of cover regions");
  });
}

/// Index of the piece whose approximant the patch uses at x, if any.
inline std::optional<std::size_t> patch_owner(const std::vector<CoverPiece>& pieces, std::span<const double> x) {
  for (std::size_t k = 0; k < pieces.size(); ++k)
    if (pieces[k].region.contains_open(x)) return k;
  return std::nullopt;
}

struct PatchReport {
  std::size_t pieces = 0;
  std::size_t samples = 0;
  std::size_t uncovered = 0;
  std::vector<double> piece_errors;  // sup over samples in region_k of d_i(approximant_k, f)
  double piece_bound = 0.0;          // max of piece_errors
  double sup_error = 0.0;            // sup over covered samples of d_i(patch, f)
  Point argmax;
  double slack = 0.0;   // Lipschitz mesh term, 0 without certificates
  bool rigorous = false;
  Verdict verdict = Verdict::inconclusive;
};

/// Error of the patched function against f on a sample set with spacing
/// `mesh`. Holds when the patch is within eps + slack of f on every covered
/// sample; uncovered samples make the verdict inconclusive.
inline PatchReport patch_report(const Space& space, const std::vector<CoverPiece>& pieces, const FnObject& f,
                                const std::vector<Point>& samples, double mesh, double eps, std::size_t member = 0) {
  if (member >= space.family.size()) throw Error(Errc::index_out_of_range, "semidistance member index");
  const FnObject g = patch(pieces);
  PatchReport r;
  r.pieces = pieces.size();
  r.samples = samples.size();
  r.piece_errors.assign(pieces.size(), 0.0);
  const std::size_t m = space.family.dimension();
  std::vector<double> fv(m), gv(m);
  for (const auto& x : samples) {
    f.eval_into(x, fv);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (!pieces[k].region.contains_open(x)) continue;
      pieces[k].approximant.eval_into(x, gv);
      r.piece_errors[k] = std::max(r.piece_errors[k], space.family.eval(member, fv, gv));
    }
    if (!patch_owner(pieces, x)) {
      ++r.uncovered;
      continue;
    }
    g.eval_into(x, gv);
    const double d = space.family.eval(member, fv, gv);
    if (r.argmax.empty() || d > r.sup_error) {
      r.sup_error = std::max(r.sup_error, d);
      r.argmax = x;
    }
  }
  for (double e : r.piece_errors) r.piece_bound = std::max(r.piece_bound, e);
  double lip = f.lipschitz_bound().value_or(-1.0);
  bool all_lip = lip >= 0.0;
  double worst = 0.0;
  for (const auto& p : pieces) {
    if (auto l = p.approximant.lipschitz_bound())
      worst = std::max(worst, *l);
    else
      all_lip = false;
  }
  r.rigorous = all_lip;
  if (all_lip) r.slack = (lip + worst) * mesh / 2.0;
  if (r.uncovered > 0)
    r.verdict = Verdict::inconclusive;
  else
    r.verdict = r.sup_error <= eps + r.slack ? Verdict::holds : Verdict::fails;
  return r;
}

struct OscillationProfile {
  Point x;
  std::vector<SupEstimate> scales;
  double defect = 0.0;
  bool stalled = false;
};

namespace detail {

/// sup over sample pairs of d_i(f(u), f(v)).
inline double sampled_oscillation(const SemidistanceFamily& family, std::size_t i,
                                  const std::vector<double>& values, std::size_t count) {
  const std::size_t m = family.dimension();
  if (count < 2) return 0.0;
  const auto& mem = family.member(i);
  if (mem.kind == SemidistanceMember::Kind::euclidean) {
    double best = 0.0;
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b)
        best = std::max(best, family.eval(i, std::span<const double>(values).subspan(a * m, m),
                                          std::span<const double>(values).subspan(b * m, m)));
    return best;
  }
  auto phi = [&](std::size_t s, std::size_t j) -> double {
    const double* v = values.data() + s * m;
    if (mem.kind == SemidistanceMember::Kind::projection) return v[mem.index];
    if (mem.kind == SemidistanceMember::Kind::linear) {
      double acc = 0.0;
      for (std::size_t c = 0; c < m; ++c) acc += mem.weights[c] * v[c];
      return acc;
    }
    return v[j];
  };
  const std::size_t channels = mem.kind == SemidistanceMember::Kind::sup_norm ? m : 1;
  double best = 0.0;
  for (std::size_t j = 0; j < channels; ++j) {
    double lo = phi(0, j), hi = lo;
    for (std::size_t s = 1; s < count; ++s) {
      const double v = phi(s, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

}  // namespace detail

/// Shrinking-scale oscillation of f at x: osc_k = sup over sampled pairs in
/// B(x, r_k) of d_i(f(u), f(v)). Vanishing defect means continuity at x at
/// the probed resolution.
inline OscillationProfile oscillation_defect(const Space& space, const FnObject& f, std::span<const double> x,
                                             std::size_t member = 0, const ScaleOptions& opts = {}) {
  detail::check_member(space, member);
  detail::check_dims(space, f);
  if (!space.domain.contains(x)) throw Error(Errc::point_outside_domain, "oscillation point outside the domain");
  const std::size_t m = space.family.dimension();
  detail::ProfileBuilder builder(opts);
  std::vector<double> values;
  for (int k = 0; !builder.done(); ++k) {
    const Region region = neighborhood(space.domain, x, k);
    const int depth = depth_for_scale(opts, k, space.domain.dimension());
    const auto pts = sample_region(region, depth);
    values.resize(pts.size() * m);
    for (std::size_t s = 0; s < pts.size(); ++s) f.eval_into(pts[s], std::span<double>(values).subspan(s * m, m));
    SupEstimate e;
    e.scale = k;
    e.radius = region.radius;
    e.depth = depth;
    e.samples = pts.size();
    e.mesh = sample_mesh(region, depth);
    e.sampled = detail::sampled_oscillation(space.family, member, values, pts.size());
    e.value = e.sampled;
    e.argmax = Point(x.begin(), x.end());
    builder.push(std::move(e));
  }
  std::optional<double> lip;
  if (auto l = f.lipschitz_bound()) lip = 2.0 * *l;
  auto prof = builder.finish(Point(x.begin(), x.end()), lip);
  OscillationProfile out;
  out.x = std::move(prof.probe);
  out.scales = std::move(prof.scales);
  out.defect = prof.delta_hat;
  out.stalled = prof.stalled;
  return out;
}

enum class SemicontinuityKind { lower, upper };

struct SemicontinuityResult {
  SemicontinuityKind kind = SemicontinuityKind::upper;
  double value = 0.0;           // f(x)
  double limit_estimate = 0.0;  // limsup (upper) or liminf (lower) over punctured balls
  double defect = 0.0;
  ScaleProfile profile;         // punctured sup of f (upper) or of -f (lower)
};

/// Upper: max(0, limsup_{y->x} f(y) - f(x)). Lower: max(0, f(x) - liminf_{y->x} f(y)).
/// The center is excluded from ball samples.
inline SemicontinuityResult semicontinuity_defect(const Space& space, const FnObject& f, std::span<const double> x,
                                                  SemicontinuityKind kind, const ScaleOptions& opts = {}) {
  if (f.codomain_dim() != 1) throw Error(Errc::dimension_mismatch, "semicontinuity needs a scalar function");
  if (!space.domain.contains(x)) throw Error(Errc::point_outside_domain, "semicontinuity point outside the domain");
  const double sign = kind == SemicontinuityKind::upper ? 1.0 : -1.0;
  const double fx = f(x)[0];
  detail::ProfileBuilder builder(opts);
  double v = 0.0;
  for (int k = 0; !builder.done(); ++k) {
    const Region region = neighborhood(space.domain, x, k);
    const int depth = depth_for_scale(opts, k, space.domain.dimension());
    const auto pts = sample_region(region, depth);
    SupEstimate e;
    e.scale = k;
    e.radius = region.radius;
    e.depth = depth;
    e.mesh = sample_mesh(region, depth);
    e.sampled = -std::numeric_limits<double>::infinity();
    for (const auto& y : pts) {
      if (std::equal(y.begin(), y.end(), x.begin(), x.end())) continue;
      ++e.samples;
      f.eval_into(y, std::span<double>(&v, 1));
      if (sign * v > e.sampled) {
        e.sampled = sign * v;
        e.argmax = y;
      }
    }
    e.value = e.sampled;
    builder.push(std::move(e));
  }
  SemicontinuityResult r;
  r.kind = kind;
  r.value = fx;
  r.profile = builder.finish(Point(x.begin(), x.end()), std::nullopt);
  const double tail = r.profile.delta_hat;
  if (!std::isfinite(tail)) {
    // isolated point: no punctured samples at fine scales
    r.limit_estimate = fx;
    r.defect = 0.0;
    return r;
  }
  r.limit_estimate = sign * tail;
  r.defect = kind == SemicontinuityKind::upper ? std::max(0.0, r.limit_estimate - fx)
                                               : std::max(0.0, fx - r.limit_estimate);
  return r;
}

enum class Membership { in, out, unknown };

inline const char* membership_name(Membership m) {
  switch (m) {
    case Membership::in: return "in";
    case Membership::out: return "out";
    case Membership::unknown: return "unknown";
  }
  return "?";
}

/// A class P of functions: a membership procedure and a generator of local
/// approximants g in P near f at (point, scale).
struct PropertyOracle {
  std::string name;
  std::function<Membership(const FnObject&)> membership;
  std::function<std::optional<FnObject>(const Point&, int, const FnObject&)> approximant;
};

/// Continuous functions. Lipschitz-certified functions are members and are
/// their own approximant; otherwise the approximant is the constant f(x).
inline PropertyOracle continuous_oracle() {
  PropertyOracle o;
  o.name = "continuous";
  o.membership = [](const FnObject& f) {
    return f.lipschitz_bound() ? Membership::in : Membership::unknown;
  };
  o.approximant = [](const Point& x, int, const FnObject& f) -> std::optional<FnObject> {
    if (f.lipschitz_bound()) return f;
    return FnObject::constant("const(" + f.name() + ")", f(x));
  };
  return o;
}

/// Piecewise-constant functions. The approximant near x is the constant equal
/// to the one-sided value of f just right of x (left at the upper boundary),
/// taken at the scale's sampling mesh.
inline PropertyOracle piecewise_constant_oracle(const DomainSpec& domain, ScaleOptions opts = {}) {
  PropertyOracle o;
  o.name = "piecewise-constant";
  o.membership = [](const FnObject&) { return Membership::unknown; };
  o.approximant = [domain, opts](const Point& x, int k, const FnObject& f) -> std::optional<FnObject> {
    if (domain.kind() != DomainKind::box) return std::nullopt;
    const Region r = neighborhood(domain, x, k);
    const double h = sample_mesh(r, depth_for_scale(opts, k, domain.dimension()));
    Point y = x;
    y[0] = x[0] + h;
    if (!domain.contains(y)) y[0] = x[0] - h;
    if (!domain.contains(y)) return std::nullopt;
    return FnObject::constant("one-sided-const(" + f.name() + ")", f(y));
  };
  return o;
}

struct SemilocalProbe {
  Point probe;
  Verdict verdict = Verdict::inconclusive;
  std::optional<int> scale;  // first scale with an approximant within the entourage
  std::vector<double> sups;  // sampled sup of d_i(f, g) per scale tried
};

struct SemilocalResult {
  Verdict verdict = Verdict::inconclusive;
  std::string oracle;
  Membership membership = Membership::unknown;
  Entourage entourage;
  std::vector<SemilocalProbe> probes;
  std::string conclusion;
};

/// For every probe x, search a scale k with an approximant g in P such that f
/// and g are W-close on B(x, r_k). Holding at every probe for every W is the
/// semi-local condition, which places f in the V-closure of P.
inline SemilocalResult semilocal_condition(const Space& space, const FnObject& f, const PropertyOracle& oracle,
                                           const ProbeSet& probes, const Entourage& w,
                                           const ScaleOptions& opts = {}) {
  detail::check_member(space, w.member);
  detail::check_dims(space, f);
  if (!(w.radius > 0.0)) throw Error(Errc::invalid_argument, "entourage radius must be > 0");
  if (!oracle.approximant) throw Error(Errc::invalid_argument, "oracle needs an approximant generator");
  SemilocalResult r;
  r.oracle = oracle.name;
  r.entourage = w;
  if (oracle.membership) r.membership = oracle.membership(f);
  bool any_inconclusive = false, any_fail = false;
  for (const auto& x : probes) {
    SemilocalProbe pr;
    pr.probe = x;
    bool generator_failed = false;
    for (int k = 0; k <= opts.k_max; ++k) {
      std::optional<FnObject> g;
      try {
        g = oracle.approximant(x, k, f);
      } catch (const std::exception&) {
        g.reset();
      }
      if (!g) {
        generator_failed = true;
        break;
      }
      const Region region = neighborhood(space.domain, x, k);
      const auto e = sup_over_region(space, f, *g, w.member, region,
                                     depth_for_scale(opts, k, space.domain.dimension()));
      pr.sups.push_back(e.sampled);
      if (e.sampled <= w.radius) {
        pr.scale = k;
        pr.verdict = Verdict::holds;
        break;
      }
    }
    if (!pr.scale) {
      const bool all_above = !pr.sups.empty() && std::all_of(pr.sups.begin(), pr.sups.end(), [&](double s) {
        return s > w.radius + opts.margin;
      });
      pr.verdict = (!generator_failed && all_above) ? Verdict::fails : Verdict::inconclusive;
    }
    any_fail |= pr.verdict == Verdict::fails;
    any_inconclusive |= pr.verdict == Verdict::inconclusive;
    r.probes.push_back(std::move(pr));
  }
  r.verdict = any_fail ? Verdict::fails : any_inconclusive ? Verdict::inconclusive : Verdict::holds;
  r.conclusion = r.verdict == Verdict::holds
                     ? "f is W-approximable by '" + oracle.name + "' near every probe: consistent with f in its V-closure"
                     : "no closure conclusion";
  return r;
}

}  // namespace vconv
