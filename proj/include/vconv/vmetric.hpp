#pragma once

// V-convergence semidistance
//
//   delta_{i,A}(f, g) = inf_{V_k in V(a_k)} sup_{x in U V_k} d_i(f(x), g(x))
//
// estimated by sampling the nested base balls of every probe at shrinking
// scales. The inf decouples over probes, so delta is the max over probes of
// the per-probe limit lim_k sup_{B(a, r_k)} d_i(f, g).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "vconv/space.hpp"
#include "vconv/verdict.hpp"

namespace vconv {

struct ScaleOptions {
  int k_max = 24;
  double tol_stall = 1e-6;
  int stall_span = 3;
  int base_depth = 4;
  int max_depth = 6;
  // Stall stopping is not allowed before this many scales have been sampled.
  int min_scales = 8;
  double margin = 1e-6;
  // Cap on grid points per region in dimension > 1.
  std::size_t max_samples = std::size_t{1} << 16;
};

/// W = {(u, v) : d_i(u, v) <= radius}.
struct Entourage {
  std::size_t member = 0;
  double radius = 0.0;
};

struct SupEstimate {
  int scale = 0;
  double radius = 0.0;
  double value = 0.0;    // recorded (non-increasing along a profile)
  double sampled = 0.0;  // raw max over this scale's samples
  std::optional<double> rigorous_upper;
  int depth = 0;
  std::size_t samples = 0;
  double mesh = 0.0;
  Point argmax;  // sample realizing `sampled`
};

struct ScaleProfile {
  Point probe;
  std::vector<SupEstimate> scales;
  double delta_hat = 0.0;
  bool stalled = false;
};

struct VDistanceReport {
  std::vector<Point> probes;
  std::size_t member = 0;
  std::vector<ScaleProfile> profiles;
  double delta = 0.0;
};

/// Sampling depth at scale k: base_depth + k, capped by max_depth and by the
/// sample budget in higher dimensions.
inline int depth_for_scale(const ScaleOptions& opts, int k, std::size_t dim) {
  int d = std::min(opts.base_depth + k, opts.max_depth);
  d = std::max(d, 0);
  auto count = [dim](int depth) {
    const double per_axis = std::ldexp(1.0, depth + 1) + 1.0;
    return std::pow(per_axis, static_cast<double>(dim));
  };
  while (d > 0 && dim > 1 && count(d) > static_cast<double>(opts.max_samples)) --d;
  return d;
}

namespace detail {

inline void check_dims(const Space& space, const FnObject& f) {
  if (f.codomain_dim() != space.family.dimension())
    throw Error(Errc::dimension_mismatch, "function '" + f.name() + "' codomain differs from the family dimension");
}

inline void check_member(const Space& space, std::size_t i) {
  if (i >= space.family.size()) throw Error(Errc::index_out_of_range, "semidistance member index");
}

inline std::optional<double> lipschitz_sum(const FnObject& f, const FnObject& g) {
  auto lf = f.lipschitz_bound(), lg = g.lipschitz_bound();
  if (lf && lg) return *lf + *lg;
  return std::nullopt;
}

/// Accumulates raw per-scale sups, applies the stall rule, and finalizes the
/// recorded sequence as suffix maxima. Samples at scale j >= k lie in the
/// scale-k ball, so every suffix max is still a lower bound for that ball's
/// sup, and the recorded sequence is non-increasing by construction.
class ProfileBuilder {
 public:
  explicit ProfileBuilder(const ScaleOptions& opts) : opts_(&opts) {}

  /// Returns true once the profile is complete.
  bool push(SupEstimate e) {
    if (!scales_.empty()) {
      const double prev = scales_.back().sampled;
      if (e.sampled == prev || std::abs(e.sampled - prev) < opts_->tol_stall)
        ++calm_;
      else
        calm_ = 0;
    }
    scales_.push_back(std::move(e));
    const int count = static_cast<int>(scales_.size());
    if (calm_ >= opts_->stall_span && count >= opts_->min_scales) {
      stalled_ = true;
      done_ = true;
    }
    if (count > opts_->k_max) done_ = true;
    return done_;
  }

  bool done() const noexcept { return done_; }

  ScaleProfile finish(Point probe, std::optional<double> lipschitz) {
    ScaleProfile p;
    p.probe = std::move(probe);
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t k = scales_.size(); k-- > 0;) {
      run = std::max(run, scales_[k].sampled);
      scales_[k].value = run;
      if (lipschitz) scales_[k].rigorous_upper = run + *lipschitz * scales_[k].mesh / 2.0;
    }
    p.scales = std::move(scales_);
    p.delta_hat = p.scales.empty() ? 0.0 : p.scales.back().value;
    p.stalled = stalled_;
    return p;
  }

 private:
  const ScaleOptions* opts_;
  std::vector<SupEstimate> scales_;
  int calm_ = 0;
  bool stalled_ = false;
  bool done_ = false;
};

inline SupEstimate sampled_sup(const Space& space, const FnObject& f, const FnObject& g, std::size_t i,
                               const Region& region, int depth) {
  const auto pts = sample_region(region, depth);
  const std::size_t m = space.family.dimension();
  std::vector<double> fv(m), gv(m);
  SupEstimate e;
  e.scale = region.scale;
  e.radius = region.radius;
  e.depth = depth;
  e.samples = pts.size();
  e.mesh = sample_mesh(region, depth);
  bool first = true;
  for (const auto& x : pts) {
    f.eval_into(x, fv);
    g.eval_into(x, gv);
    const double d = space.family.eval(i, fv, gv);
    if (first || d > e.sampled) {
      e.sampled = d;
      e.argmax = x;
      first = false;
    }
  }
  e.value = e.sampled;
  return e;
}

}  // namespace detail

/// sup over a region of d_i(f(x), g(x)), as the max over sample_region(region, depth).
inline SupEstimate sup_over_region(const Space& space, const FnObject& f, const FnObject& g, std::size_t i,
                                   const Region& region, int depth) {
  detail::check_member(space, i);
  detail::check_dims(space, f);
  detail::check_dims(space, g);
  auto e = detail::sampled_sup(space, f, g, i, region, depth);
  if (auto l = detail::lipschitz_sum(f, g)) e.rigorous_upper = e.value + *l * e.mesh / 2.0;
  return e;
}

/// Shrinking-scale profile of sup_{B(a, r_k)} d_i(f, g); its limit is the
/// single-probe factor of delta_{i,A}.
inline ScaleProfile point_v_semidistance(const Space& space, const FnObject& f, const FnObject& g, std::size_t i,
                                         std::span<const double> a, const ScaleOptions& opts = {}) {
  detail::check_member(space, i);
  detail::check_dims(space, f);
  detail::check_dims(space, g);
  if (!space.domain.contains(a)) throw Error(Errc::point_outside_domain, "probe outside the domain");
  detail::ProfileBuilder builder(opts);
  for (int k = 0; !builder.done(); ++k) {
    const Region region = neighborhood(space.domain, a, k);
    builder.push(detail::sampled_sup(space, f, g, i, region, depth_for_scale(opts, k, space.domain.dimension())));
  }
  return builder.finish(Point(a.begin(), a.end()), detail::lipschitz_sum(f, g));
}

inline VDistanceReport v_semidistance(const Space& space, const FnObject& f, const FnObject& g, std::size_t i,
                                      const ProbeSet& probes, const ScaleOptions& opts = {}) {
  detail::check_member(space, i);
  VDistanceReport r;
  r.member = i;
  r.probes = probes.points();
  for (const auto& a : probes) {
    r.profiles.push_back(point_v_semidistance(space, f, g, i, a, opts));
    r.delta = std::max(r.delta, r.profiles.back().delta_hat);
  }
  return r;
}

/// Profiles of f_n against g at one probe for every n in [first, hi], computed
/// in lockstep over shared samples. Each profile equals
/// point_v_semidistance(space, seq.at(n), g, i, a, opts).
inline std::vector<ScaleProfile> sequence_profiles(const Space& space, const FnSequence& seq, const FnObject& g,
                                                   std::size_t i, std::span<const double> a, std::size_t hi,
                                                   const ScaleOptions& opts = {}) {
  detail::check_member(space, i);
  detail::check_dims(space, g);
  if (seq.codomain_dim() != space.family.dimension())
    throw Error(Errc::dimension_mismatch, "sequence codomain differs from the family dimension");
  if (!space.domain.contains(a)) throw Error(Errc::point_outside_domain, "probe outside the domain");

  const SequenceTable table(seq, hi);
  const std::size_t count = table.count();
  const std::size_t m = space.family.dimension();
  std::vector<detail::ProfileBuilder> builders(count, detail::ProfileBuilder(opts));
  std::vector<std::optional<double>> lips(count);
  for (std::size_t n = 0; n < count; ++n) lips[n] = detail::lipschitz_sum(seq.at(seq.first() + n), g);

  std::vector<double> buf(count * m), gv(m);
  std::vector<SupEstimate> cur(count);
  std::vector<char> seen(count);
  std::size_t active = count;
  for (int k = 0; active > 0; ++k) {
    const Region region = neighborhood(space.domain, a, k);
    const int depth = depth_for_scale(opts, k, space.domain.dimension());
    const auto pts = sample_region(region, depth);
    std::fill(seen.begin(), seen.end(), 0);
    for (const auto& x : pts) {
      table.values(x, buf);
      g.eval_into(x, gv);
      for (std::size_t n = 0; n < count; ++n) {
        if (builders[n].done()) continue;
        const double d = space.family.eval(i, std::span<const double>(buf).subspan(n * m, m), gv);
        if (!seen[n] || d > cur[n].sampled) {
          cur[n].sampled = d;
          cur[n].argmax = x;
          seen[n] = 1;
        }
      }
    }
    for (std::size_t n = 0; n < count; ++n) {
      if (builders[n].done()) continue;
      SupEstimate e = std::move(cur[n]);
      e.scale = k;
      e.radius = region.radius;
      e.depth = depth;
      e.samples = pts.size();
      e.mesh = sample_mesh(region, depth);
      e.value = e.sampled;
      cur[n] = SupEstimate{};
      if (builders[n].push(std::move(e))) --active;
    }
  }
  std::vector<ScaleProfile> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) out.push_back(builders[n].finish(Point(a.begin(), a.end()), lips[n]));
  return out;
}

struct EntourageWitness {
  Point probe;
  // (scale, sample point, d_i value) at every sampled scale, all above radius + margin
  std::vector<SupEstimate> violations;
};

struct EntourageResult {
  Verdict verdict = Verdict::inconclusive;
  Entourage entourage;
  VDistanceReport report;
  std::optional<EntourageWitness> witness;
};

/// Membership of (f, g) in U_{W,A}. Holds when delta <= radius - margin.
/// Fails when some probe shows a violating sample at every sampled scale:
/// the finest-scale violator lies in every base ball of that probe.
inline EntourageResult entourage_test(const Space& space, const FnObject& f, const FnObject& g, const Entourage& w,
                                      const ProbeSet& probes, const ScaleOptions& opts = {}) {
  if (!(w.radius > 0.0)) throw Error(Errc::invalid_argument, "entourage radius must be > 0");
  EntourageResult r;
  r.entourage = w;
  r.report = v_semidistance(space, f, g, w.member, probes, opts);
  if (r.report.delta <= w.radius - opts.margin) {
    r.verdict = Verdict::holds;
    return r;
  }
  for (const auto& prof : r.report.profiles) {
    const bool every_scale =
        std::all_of(prof.scales.begin(), prof.scales.end(),
                    [&](const SupEstimate& e) { return e.value > w.radius + opts.margin; }) &&
        !prof.scales.empty() && prof.scales.back().sampled > w.radius + opts.margin;
    if (every_scale) {
      EntourageWitness wit;
      wit.probe = prof.probe;
      for (const auto& e : prof.scales)
        if (e.sampled > w.radius + opts.margin) wit.violations.push_back(e);
      r.witness = std::move(wit);
      r.verdict = Verdict::fails;
      return r;
    }
  }
  r.verdict = Verdict::inconclusive;
  return r;
}

}  // namespace vconv
