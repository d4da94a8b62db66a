#pragma once

// Convergence diagnostics for function sequences: mode classification along
// uniform => locally uniform => V => pointwise, the sequence form of the
// V-convergence criterion with quantifier witnesses, the normal and Abel
// series rules, and the limit-interchange check.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vconv/closure.hpp"
#include "vconv/space.hpp"
#include "vconv/verdict.hpp"
#include "vconv/vmetric.hpp"

namespace vconv {

struct ConvergenceOptions {
  ScaleOptions scale;
  std::size_t member = 0;
  double eps = 1e-2;
  // A tail verdict needs at least this many indices after the settling index.
  std::size_t min_tail = 16;
  int lu_depth = 10;
  int uniform_depth = 10;
  // Cauchy search: admissible scales 0..cauchy_k_max, indices n up to
  // first + (horizon - first) / cauchy_n_ratio, blocks of probe_span + 1.
  int cauchy_k_max = 8;
  std::size_t probe_span = 8;
  std::size_t cauchy_n_ratio = 8;
  // Sampling depth of every Cauchy ball; boundary layers of width ~1/horizon
  // must be resolved at every admissible scale.
  int cauchy_depth = 10;
  // Window of last indices used for limits and stabilization.
  std::size_t tail_window = 16;
  double stab_tol = 1e-3;
  double osc_tol = 1e-2;
  double decay_tol = 1e-2;
  double growth_tol = 0.05;
  // Base-ball scale for neighborhood hypothesis checks in the series rules.
  int ball_scale = 2;
  double interchange_tol = 1e-3;
};

/// Tail behaviour of an index-labelled profile against a tolerance.
struct TailVerdict {
  Verdict verdict = Verdict::inconclusive;
  std::optional<std::size_t> settle_index;  // smallest N with values[n] <= eps for n >= N
  std::optional<std::size_t> witness_index; // last index in the tail window above eps + margin
  double witness_value = 0.0;
};

/// holds: values settle below eps at some N <= last - min_tail.
/// fails: some index in [last - min_tail, last] exceeds eps + margin, which
/// refutes every admissible N. inconclusive otherwise.
inline TailVerdict tail_verdict(std::span<const double> values, std::size_t first, double eps,
                                std::size_t min_tail, double margin) {
  if (values.size() <= min_tail)
    throw Error(Errc::horizon_mismatch, "sequence horizon shorter than the minimal tail");
  TailVerdict t;
  const std::size_t last = first + values.size() - 1;
  std::size_t settle = last + 1;
  for (std::size_t k = values.size(); k-- > 0;) {
    if (values[k] <= eps)
      settle = first + k;
    else
      break;
  }
  if (settle <= last) t.settle_index = settle;
  if (settle <= last - min_tail) {
    t.verdict = Verdict::holds;
    return t;
  }
  for (std::size_t n = last + 1; n-- > last - min_tail;) {
    const double v = values[n - first];
    if (v > eps + margin) {
      t.verdict = Verdict::fails;
      t.witness_index = n;
      t.witness_value = v;
      return t;
    }
  }
  t.verdict = Verdict::inconclusive;
  return t;
}

enum class Mode { pointwise = 0, v = 1, locally_uniform = 2, uniform = 3 };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::pointwise: return "pointwise";
    case Mode::v: return "V";
    case Mode::locally_uniform: return "locally-uniform";
    case Mode::uniform: return "uniform";
  }
  return "?";
}

struct ModeWitness {
  std::size_t n = 0;
  Point probe;  // empty for the uniform mode
  int scale = 0;
  Point point;
  double value = 0.0;
};

struct ModeResult {
  Mode mode = Mode::pointwise;
  Verdict verdict = Verdict::inconclusive;
  bool coerced = false;
  TailVerdict tail;
  std::vector<double> profile;  // per n, from first to horizon
  std::optional<ModeWitness> witness;
};

struct ConvergenceVerdict {
  std::string sequence;
  std::string limit;
  double eps = 0.0;
  std::size_t first = 0, horizon = 0;
  std::vector<Point> probes;
  std::array<ModeResult, 4> modes;

  const ModeResult& mode(Mode m) const { return modes[static_cast<std::size_t>(m)]; }
  Verdict verdict(Mode m) const { return mode(m).verdict; }
};

struct VLimitResult {
  Verdict verdict = Verdict::inconclusive;
  double eps = 0.0;
  std::size_t first = 0, horizon = 0;
  TailVerdict tail;
  std::vector<double> deltas;            // delta_{i,A}(f_n, candidate) per n
  std::vector<std::size_t> worst_probe;  // probe index attaining delta, per n
};

namespace detail {

inline void check_sequence(const Space& space, const FnSequence& seq) {
  if (seq.codomain_dim() != space.family.dimension())
    throw Error(Errc::dimension_mismatch, "sequence codomain differs from the family dimension");
}

/// delta_n = max over probes of the lockstep profile limits, with the
/// per-probe profiles kept for witnesses.
struct SequenceDeltas {
  std::vector<double> delta;
  std::vector<std::size_t> worst_probe;
  std::vector<std::vector<ScaleProfile>> per_probe;  // [probe][n]
};

inline SequenceDeltas sequence_deltas(const Space& space, const FnSequence& seq, const FnObject& g,
                                      const ProbeSet& probes, const ConvergenceOptions& opts) {
  SequenceDeltas s;
  s.delta.assign(seq.size(), 0.0);
  s.worst_probe.assign(seq.size(), 0);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    s.per_probe.push_back(
        sequence_profiles(space, seq, g, opts.member, probes.points()[p], seq.horizon(), opts.scale));
    const auto& profs = s.per_probe.back();
    for (std::size_t n = 0; n < profs.size(); ++n) {
      if (p == 0 || profs[n].delta_hat > s.delta[n]) {
        s.delta[n] = profs[n].delta_hat;
        s.worst_probe[n] = p;
      }
    }
  }
  return s;
}

/// max over samples of d_i(f_n, g) for all n, over one sample set.
inline void sequence_region_sup(const Space& space, const SequenceTable& table, const FnObject& g, std::size_t i,
                                const std::vector<Point>& pts, std::vector<double>& best,
                                std::vector<Point>& argmax) {
  const std::size_t m = space.family.dimension();
  const std::size_t count = table.count();
  std::vector<double> buf(count * m), gv(m);
  for (const auto& x : pts) {
    table.values(x, buf);
    g.eval_into(x, gv);
    for (std::size_t n = 0; n < count; ++n) {
      const double d = space.family.eval(i, std::span<const double>(buf).subspan(n * m, m), gv);
      if (d > best[n] || argmax[n].empty()) {
        best[n] = std::max(best[n], d);
        argmax[n] = x;
      }
    }
  }
}

}  // namespace detail

/// Does f_n V-converge to `candidate` at tolerance eps on the probes?
inline VLimitResult v_limit_test(const Space& space, const FnSequence& seq, const FnObject& candidate,
                                 const ProbeSet& probes, const ConvergenceOptions& opts = {}) {
  detail::check_sequence(space, seq);
  VLimitResult r;
  r.eps = opts.eps;
  r.first = seq.first();
  r.horizon = seq.horizon();
  auto d = detail::sequence_deltas(space, seq, candidate, probes, opts);
  r.deltas = std::move(d.delta);
  r.worst_probe = std::move(d.worst_probe);
  r.tail = tail_verdict(r.deltas, seq.first(), opts.eps, opts.min_tail, opts.scale.margin);
  r.verdict = r.tail.verdict;
  return r;
}

/// Classify the convergence of f_n to `limit` in the four modes. The locally
/// uniform mode uses the fixed scale-0 ball about each probe; the uniform mode
/// uses a whole-domain grid. Each estimate is a max over every sample known to
/// lie in the relevant set, so per n: uniform >= locally-uniform >= V >= pointwise.
inline ConvergenceVerdict classify(const Space& space, const FnSequence& seq, const FnObject& limit,
                                   const ProbeSet& probes, const ConvergenceOptions& opts = {}) {
  detail::check_sequence(space, seq);
  detail::check_dims(space, limit);
  detail::check_member(space, opts.member);
  if (probes.empty()) throw Error(Errc::invalid_argument, "classification needs at least one probe");
  if (seq.size() <= opts.min_tail) throw Error(Errc::horizon_mismatch, "horizon shorter than the minimal tail");

  ConvergenceVerdict cv;
  cv.sequence = seq.name();
  cv.limit = limit.name();
  cv.eps = opts.eps;
  cv.first = seq.first();
  cv.horizon = seq.horizon();
  cv.probes = probes.points();
  const std::size_t count = seq.size();
  const std::size_t m = space.family.dimension();
  const std::size_t i = opts.member;
  const SequenceTable table(seq, seq.horizon());

  // pointwise
  std::vector<double> pw(count, 0.0);
  std::vector<std::size_t> pw_probe(count, 0);
  {
    std::vector<double> buf(count * m), gv(m);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const auto& a = probes.points()[p];
      table.values(a, buf);
      limit.eval_into(a, gv);
      for (std::size_t n = 0; n < count; ++n) {
        const double d = space.family.eval(i, std::span<const double>(buf).subspan(n * m, m), gv);
        if (p == 0 || d > pw[n]) {
          pw[n] = d;
          pw_probe[n] = p;
        }
      }
    }
  }

  // V
  auto vd = detail::sequence_deltas(space, seq, limit, probes, opts);

  // locally uniform on the scale-0 balls
  std::vector<double> lu(count, 0.0);
  std::vector<Point> lu_arg(count);
  std::vector<std::size_t> lu_probe(count, 0);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Region r0 = neighborhood(space.domain, probes.points()[p], 0);
    std::vector<double> best(count, 0.0);
    std::vector<Point> arg(count);
    detail::sequence_region_sup(space, table, limit, i, sample_region(r0, opts.lu_depth), best, arg);
    for (std::size_t n = 0; n < count; ++n) {
      const auto& s0 = vd.per_probe[p][n].scales.front();
      if (s0.value > best[n]) {
        best[n] = s0.value;
        arg[n] = s0.argmax;
      }
      if (best[n] > lu[n] || lu_arg[n].empty()) {
        lu[n] = std::max(lu[n], best[n]);
        lu_arg[n] = arg[n];
        lu_probe[n] = p;
      }
    }
  }

  // uniform on a whole-domain grid
  std::vector<double> un(count, 0.0);
  std::vector<Point> un_arg(count);
  detail::sequence_region_sup(space, table, limit, i, sample_region(whole_domain(space.domain), opts.uniform_depth),
                              un, un_arg);
  for (std::size_t n = 0; n < count; ++n) {
    if (lu[n] > un[n]) {
      un[n] = lu[n];
      un_arg[n] = lu_arg[n];
    }
  }

  auto fill = [&](Mode mode, std::vector<double> prof) {
    auto& mr = cv.modes[static_cast<std::size_t>(mode)];
    mr.mode = mode;
    mr.profile = std::move(prof);
    mr.tail = tail_verdict(mr.profile, seq.first(), opts.eps, opts.min_tail, opts.scale.margin);
    mr.verdict = mr.tail.verdict;
    if (mr.tail.witness_index) {
      const std::size_t n = *mr.tail.witness_index;
      const std::size_t idx = n - seq.first();
      ModeWitness w;
      w.n = n;
      w.value = mr.profile[idx];
      switch (mode) {
        case Mode::pointwise:
          w.probe = probes.points()[pw_probe[idx]];
          w.point = w.probe;
          break;
        case Mode::v: {
          const auto& prof = vd.per_probe[vd.worst_probe[idx]][idx];
          w.probe = prof.probe;
          w.scale = prof.scales.back().scale;
          w.point = prof.scales.back().argmax;
          break;
        }
        case Mode::locally_uniform:
          w.probe = probes.points()[lu_probe[idx]];
          w.point = lu_arg[idx];
          break;
        case Mode::uniform:
          w.point = un_arg[idx];
          break;
      }
      mr.witness = std::move(w);
    }
  };
  fill(Mode::pointwise, std::move(pw));
  fill(Mode::v, vd.delta);
  fill(Mode::locally_uniform, std::move(lu));
  fill(Mode::uniform, std::move(un));

  // a stronger mode that holds forces every weaker mode to hold
  for (int strong = 3; strong > 0; --strong) {
    if (cv.modes[strong].verdict != Verdict::holds) continue;
    for (int weak = strong - 1; weak >= 0; --weak) {
      if (cv.modes[weak].verdict != Verdict::holds) {
        cv.modes[weak].verdict = Verdict::holds;
        cv.modes[weak].coerced = true;
      }
    }
  }
  return cv;
}

struct CauchyPointWitness {
  Point x;
  std::size_t tail_start = 0;  // P_x
  double deviation = 0.0;      // max_{p in [P_x, horizon]} d(f_n(x), f_p(x))
};

struct CauchyIndexWitness {
  std::size_t n = 0;
  int scale = 0;  // k_n, the chosen V_a^n
  std::vector<CauchyPointWitness> points;
};

struct CauchyViolation {
  std::size_t n = 0;
  int scale = 0;
  Point x;
  double deviation = 0.0;  // max over the tail window [horizon - w, horizon]
};

struct CauchyFailure {
  std::size_t n = 0;
  std::vector<CauchyViolation> per_scale;  // worst sample at every admissible scale
};

struct CauchyWitness {
  Point probe;
  double eps = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::size_t first = 0, n_limit = 0, horizon = 0, tail_window = 0;
  int k_max = 0;
  std::optional<std::size_t> chosen_n;    // N
  std::vector<CauchyIndexWitness> checked;  // n in [N, N + span] when holding
  std::vector<CauchyFailure> failures;      // refutation chain when failing
  std::optional<CauchyViolation> certificate;
};

/// Sequence form of the V-convergence criterion at one point:
///   exists N, for all n >= N, exists scale k_n, for all sampled x in B(a, r_{k_n}),
///   exists P_x, for all p in [P_x, horizon]: d(f_n(x), f_p(x)) <= eps.
/// n ranges over [first, n_limit] with n_limit = first + (horizon - first) / cauchy_n_ratio,
/// so the tail [horizon - w, horizon] stays far beyond every checked n. Scales
/// range over 0..cauchy_k_max.
inline CauchyWitness v_cauchy_sequence(const Space& space, const FnSequence& seq, std::span<const double> a,
                                       double eps, const ConvergenceOptions& opts = {}) {
  detail::check_sequence(space, seq);
  detail::check_member(space, opts.member);
  if (!(eps > 0.0)) throw Error(Errc::invalid_argument, "eps must be > 0");
  if (!space.domain.contains(a)) throw Error(Errc::point_outside_domain, "Cauchy probe outside the domain");
  const std::size_t first = seq.first(), H = seq.horizon(), w = opts.tail_window;
  if (H < first + w + 1) throw Error(Errc::horizon_mismatch, "horizon shorter than the tail window");
  const std::size_t ratio = std::max<std::size_t>(opts.cauchy_n_ratio, 1);
  const std::size_t n_limit = std::min(first + (H - first) / ratio, H - w);
  const std::size_t span = std::min(opts.probe_span, n_limit - first);
  const std::size_t n_count = n_limit - first + 1;
  const std::size_t m = space.family.dimension();
  const std::size_t i = opts.member;
  const double margin = opts.scale.margin;

  CauchyWitness cw;
  cw.probe.assign(a.begin(), a.end());
  cw.eps = eps;
  cw.first = first;
  cw.n_limit = n_limit;
  cw.horizon = H;
  cw.tail_window = w;
  cw.k_max = opts.cauchy_k_max;

  ScaleOptions cauchy_scale = opts.scale;
  cauchy_scale.base_depth = cauchy_scale.max_depth = std::max(opts.cauchy_depth, 0);
  const int cauchy_depth = depth_for_scale(cauchy_scale, 0, space.domain.dimension());

  // Search phase: only indices [first, n_limit] and the tail window are needed.
  const SequenceTable head(seq, n_limit);
  std::vector<FnObject> tail;
  for (std::size_t p = H - w; p <= H; ++p) tail.push_back(seq.at(p));
  std::vector<double> hbuf(head.count() * m), tbuf(tail.size() * m);

  const int scales = opts.cauchy_k_max + 1;
  // worst[n][k]
  std::vector<std::vector<CauchyViolation>> worst(n_count, std::vector<CauchyViolation>(scales));
  for (int k = 0; k < scales; ++k) {
    const Region region = neighborhood(space.domain, a, k);
    const auto pts = sample_region(region, cauchy_depth);
    for (const auto& x : pts) {
      head.values(x, hbuf);
      for (std::size_t t = 0; t < tail.size(); ++t) tail[t].eval_into(x, std::span<double>(tbuf).subspan(t * m, m));
      for (std::size_t n = first; n <= n_limit; ++n) {
        const auto fn = std::span<const double>(hbuf).subspan((n - first) * m, m);
        double dev = 0.0;
        for (std::size_t t = 0; t < tail.size(); ++t)
          dev = std::max(dev, space.family.eval(i, fn, std::span<const double>(tbuf).subspan(t * m, m)));
        auto& cell = worst[n - first][k];
        if (cell.x.empty() || dev > cell.deviation) {
          cell.n = n;
          cell.scale = k;
          cell.x = x;
          cell.deviation = dev;
        }
      }
    }
  }

  std::vector<std::optional<int>> good(n_count);
  std::vector<char> failing(n_count, 0);
  for (std::size_t idx = 0; idx < n_count; ++idx) {
    bool all_bad = true;
    for (int k = 0; k < scales; ++k) {
      if (!good[idx] && worst[idx][k].deviation <= eps) good[idx] = k;
      if (!(worst[idx][k].deviation > eps + margin)) all_bad = false;
    }
    failing[idx] = all_bad ? 1 : 0;
  }

  std::vector<std::size_t> refuting;
  bool all_refuted = true;
  for (std::size_t N = first; N + span <= n_limit;) {
    bool ok = true;
    std::optional<std::size_t> fail_n;
    for (std::size_t n = N; n <= N + span; ++n) {
      if (!good[n - first]) ok = false;
      if (failing[n - first] && !fail_n) fail_n = n;
    }
    if (ok) {
      cw.chosen_n = N;
      break;
    }
    if (fail_n) {
      if (refuting.empty() || refuting.back() != *fail_n) refuting.push_back(*fail_n);
      N = *fail_n + 1;
    } else {
      all_refuted = false;
      ++N;
    }
  }

  if (cw.chosen_n) {
    cw.verdict = Verdict::holds;
    // Witness phase: minimal P_x by a downward scan over the full index range,
    // one table pass per distinct ball.
    const SequenceTable table(seq, H);
    std::vector<double> buf(table.count() * m);
    auto val = [&](std::size_t n) { return std::span<const double>(buf).subspan((n - first) * m, m); };
    const std::size_t N = *cw.chosen_n;
    for (std::size_t n = N; n <= N + span; ++n) {
      CauchyIndexWitness iw;
      iw.n = n;
      iw.scale = *good[n - first];
      cw.checked.push_back(std::move(iw));
    }
    for (int k = 0; k < scales; ++k) {
      if (std::none_of(cw.checked.begin(), cw.checked.end(), [k](const auto& c) { return c.scale == k; })) continue;
      const auto pts = sample_region(neighborhood(space.domain, a, k), cauchy_depth);
      for (const auto& x : pts) {
        table.values(x, buf);
        for (auto& iw : cw.checked) {
          if (iw.scale != k) continue;
          CauchyPointWitness pw;
          pw.x = x;
          double run = 0.0;
          std::size_t start = first;
          for (std::size_t p = H + 1; p-- > first;) {
            const double d = space.family.eval(i, val(iw.n), val(p));
            if (d > eps) {
              start = p + 1;
              break;
            }
            run = std::max(run, d);
          }
          pw.tail_start = start;
          pw.deviation = run;
          iw.points.push_back(std::move(pw));
        }
      }
    }
    return cw;
  }

  if (all_refuted && !refuting.empty()) {
    cw.verdict = Verdict::fails;
    for (std::size_t n : refuting) {
      CauchyFailure f;
      f.n = n;
      f.per_scale = worst[n - first];
      cw.failures.push_back(std::move(f));
    }
    cw.certificate = cw.failures.front().per_scale.back();
    return cw;
  }
  cw.verdict = Verdict::inconclusive;
  return cw;
}

namespace detail {

/// Scalar sequence n -> d_i(f_n(x), 0), i.e. the pointwise norms of the terms.
inline FnSequence norm_sequence(const FnSequence& terms, const SemidistanceFamily& family, std::size_t i) {
  const std::size_t m = terms.codomain_dim();
  auto table = std::make_shared<SequenceTable>(terms, terms.horizon());
  const std::size_t first = terms.first();
  auto fam = std::make_shared<SemidistanceFamily>(family);
  auto range = [table, fam, i, m, first](std::span<const double> x, std::size_t hi, std::span<double> out) {
    std::vector<double> buf(table->count() * m), zero(m, 0.0);
    table->values(x, buf);
    for (std::size_t n = first; n <= hi; ++n)
      out[n - first] = fam->eval(i, std::span<const double>(buf).subspan((n - first) * m, m), zero);
  };
  auto gen = [terms, fam, i, m](std::size_t n) {
    auto f = terms.at(n);
    return FnObject("|" + f.name() + "|", 1, [f, fam, i, m](std::span<const double> x, std::span<double> out) {
      std::vector<double> v(m), zero(m, 0.0);
      f.eval_into(x, v);
      out[0] = fam->eval(i, v, zero);
    }, f.lipschitz_bound());
  };
  return FnSequence("norms(" + terms.name() + ")", first, terms.horizon(), 1, std::move(gen), std::move(range));
}

/// max - min over the last `w + 1` entries of a scalar column (stride m, channel j).
inline double window_spread(std::span<const double> vals, std::size_t count, std::size_t m, std::size_t j,
                            std::size_t w) {
  const std::size_t start = count > w + 1 ? count - w - 1 : 0;
  double lo = vals[start * m + j], hi = lo;
  for (std::size_t k = start; k < count; ++k) {
    lo = std::min(lo, vals[k * m + j]);
    hi = std::max(hi, vals[k * m + j]);
  }
  return hi - lo;
}

inline FnObject sequence_member_at_horizon(const FnSequence& seq, std::string name) {
  auto f = seq.at(seq.horizon());
  const std::size_t m = f.codomain_dim();
  return FnObject(std::move(name), m, [f](std::span<const double> x, std::span<double> out) { f.eval_into(x, out); },
                  f.lipschitz_bound());
}

}  // namespace detail

struct SeriesProbe {
  Point probe;
  double norm_sum = 0.0;      // sum_{n <= horizon} ||f_n(a)||
  double norm_spread = 0.0;   // tail-window spread of the norm partial sums at a
  bool norm_stable = false;
  double ball_spread = 0.0;   // worst tail-window spread over the ball samples
  Point ball_worst;
  bool ball_stable = false;
  double norm_oscillation = 0.0;  // oscillation defect of the truncated norm series at a
  bool norm_continuous = false;
  Value limit;  // vector partial sum at the horizon
};

struct SeriesReport {
  std::string series;
  std::size_t member = 0;
  std::size_t horizon = 0;
  std::vector<SeriesProbe> probes;
  Verdict hypothesis = Verdict::inconclusive;
  std::vector<std::string> hypothesis_failures;
  bool conclusion_claimed = false;
  std::optional<VLimitResult> conclusion;  // partial sums vs their horizon truncation
  Verdict verdict = Verdict::inconclusive;
};

/// Normal-convergence rule. Hypotheses: the norm series sum ||f_n|| stabilizes
/// at each probe and on the surrounding base ball, and its truncated limit is
/// continuous at the probes. Only when they pass is the conclusion checked:
/// the vector partial sums V-converge to their horizon truncation.
inline SeriesReport normal_series_test(const Space& space, const FnSequence& seq, const ProbeSet& probes,
                                       const ConvergenceOptions& opts = {}) {
  detail::check_sequence(space, seq);
  std::size_t i = opts.member;
  if (!space.family.is_norm(i)) {
    auto n = space.family.first_norm();
    if (!n) throw Error(Errc::invalid_argument, "normal series rule needs a norm-like family member");
    i = *n;
  }
  if (seq.size() <= opts.tail_window + 1) throw Error(Errc::horizon_mismatch, "horizon shorter than the tail window");
  SeriesReport r;
  r.series = seq.name();
  r.member = i;
  r.horizon = seq.horizon();

  const Space scalar{space.domain, SemidistanceFamily::sup_norm(1)};
  const FnSequence norms = partial_sums(detail::norm_sequence(seq, space.family, i));
  const FnSequence sums = partial_sums(seq);
  const SequenceTable norm_table(norms, norms.horizon());
  const SequenceTable sum_table(sums, sums.horizon());
  const std::size_t count = norms.size();
  const std::size_t m = space.family.dimension();
  const FnObject norm_limit = detail::sequence_member_at_horizon(norms, "norm-series@" + std::to_string(r.horizon));
  std::vector<double> nb(count), vb(count * m);

  for (const auto& a : probes) {
    SeriesProbe sp;
    sp.probe = a;
    norm_table.values(a, nb);
    sp.norm_sum = nb.back();
    sp.norm_spread = detail::window_spread(nb, count, 1, 0, opts.tail_window);
    sp.norm_stable = std::isfinite(sp.norm_spread) && sp.norm_spread <= opts.stab_tol;
    const Region ball = neighborhood(space.domain, a, opts.ball_scale);
    for (const auto& x : sample_region(ball, opts.scale.base_depth)) {
      norm_table.values(x, nb);
      const double s = detail::window_spread(nb, count, 1, 0, opts.tail_window);
      if (sp.ball_worst.empty() || !(s <= sp.ball_spread)) {
        sp.ball_spread = s;
        sp.ball_worst = x;
      }
    }
    sp.ball_stable = std::isfinite(sp.ball_spread) && sp.ball_spread <= opts.stab_tol;
    sp.norm_oscillation = oscillation_defect(scalar, norm_limit, a, 0, opts.scale).defect;
    sp.norm_continuous = sp.norm_oscillation <= opts.osc_tol;
    sum_table.values(a, vb);
    sp.limit.assign(vb.end() - static_cast<std::ptrdiff_t>(m), vb.end());
    r.probes.push_back(std::move(sp));
  }

  for (const auto& sp : r.probes) {
    std::string where = "probe (";
    for (std::size_t j = 0; j < sp.probe.size(); ++j) where += (j ? ", " : "") + std::to_string(sp.probe[j]);
    where += ")";
    if (!sp.norm_stable) r.hypothesis_failures.push_back("norm series does not stabilize at " + where);
    if (!sp.ball_stable) r.hypothesis_failures.push_back("norm series does not stabilize near " + where);
    if (!sp.norm_continuous) r.hypothesis_failures.push_back("norm-series limit oscillates at " + where);
  }
  r.hypothesis = r.hypothesis_failures.empty() ? Verdict::holds : Verdict::fails;
  if (r.hypothesis == Verdict::holds) {
    r.conclusion_claimed = true;
    const FnObject target = detail::sequence_member_at_horizon(sums, "partial-sum@" + std::to_string(r.horizon));
    ConvergenceOptions o = opts;
    o.member = i;
    r.conclusion = v_limit_test(space, sums, target, probes, o);
    r.verdict = r.conclusion->verdict;
  } else {
    r.verdict = Verdict::inconclusive;
  }
  return r;
}

struct AbelProbe {
  Point probe;
  double bound = 0.0;             // A-hat(a) = max_n ||S_n(a)||
  double bound_first_half = 0.0;  // max over n <= midpoint
  bool bounded = false;
  double ball_bound = 0.0;        // max over ball samples of A-hat
  bool ball_bounded = false;
  double eps_tail = 0.0;          // max |eps_n(a)| over the tail window
  bool eps_decays = false;
  double variation = 0.0;         // sum |eps_n - eps_{n-1}| at the horizon
  double variation_spread = 0.0;
  bool variation_stable = false;
  double variation_oscillation = 0.0;
  bool variation_continuous = false;
  Value direct;    // sum_{n <= H} f_n eps_n
  Value by_parts;  // S_H eps_H + sum_{n < H} S_n (eps_n - eps_{n+1})
  double identity_error = 0.0;  // max over N <= H, relative to the term scale
  double continuity_defect = 0.0;
};

struct AbelReport {
  std::string series;
  std::string weights;
  std::size_t member = 0;
  std::size_t horizon = 0;
  std::vector<AbelProbe> probes;
  double max_identity_error = 0.0;
  Verdict hypothesis = Verdict::inconclusive;
  std::vector<std::string> hypothesis_failures;
  Verdict verdict = Verdict::inconclusive;
};

namespace detail {

struct AbelColumns {
  std::vector<double> direct, by_parts, partial, scale_direct, scale_parts;  // [N][j]
};

/// Direct and summation-by-parts partial sums for every N in [first, H].
inline AbelColumns abel_columns(std::span<const double> f, std::span<const double> e, std::size_t count,
                                std::size_t m) {
  AbelColumns c;
  c.direct.assign(count * m, 0.0);
  c.by_parts.assign(count * m, 0.0);
  c.partial.assign(count * m, 0.0);
  c.scale_direct.assign(count * m, 0.0);
  c.scale_parts.assign(count * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0, d = 0.0, dabs = 0.0, t = 0.0, tabs = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      s += f[k * m + j];
      d += f[k * m + j] * e[k];
      dabs += std::abs(f[k * m + j] * e[k]);
      c.partial[k * m + j] = s;
      c.direct[k * m + j] = d;
      c.scale_direct[k * m + j] = dabs;
      c.by_parts[k * m + j] = s * e[k] + t;
      c.scale_parts[k * m + j] = std::abs(s * e[k]) + tabs;
      if (k + 1 < count) {
        t += s * (e[k] - e[k + 1]);
        tabs += std::abs(s * (e[k] - e[k + 1]));
      }
    }
  }
  return c;
}

}  // namespace detail

/// Abel summation over horizon: f_n with partial sums bounded by A(x), scalar
/// weights eps_n -> 0 of bounded variation. Checks the hypotheses at probes
/// and on base balls, evaluates the series both directly and by parts, and
/// measures the continuity defect of the evaluated limit.
inline AbelReport abel_series(const Space& space, const FnSequence& seq, const FnSequence& eps,
                              const ProbeSet& probes, const ConvergenceOptions& opts = {}) {
  detail::check_sequence(space, seq);
  if (eps.codomain_dim() != 1) throw Error(Errc::dimension_mismatch, "Abel weights must be scalar");
  if (eps.first() != seq.first() || eps.horizon() != seq.horizon())
    throw Error(Errc::horizon_mismatch, "term and weight sequences must share first index and horizon");
  if (seq.size() <= opts.tail_window + 1) throw Error(Errc::horizon_mismatch, "horizon shorter than the tail window");
  std::size_t i = opts.member;
  if (!space.family.is_norm(i)) {
    auto n = space.family.first_norm();
    if (!n) throw Error(Errc::invalid_argument, "Abel rule needs a norm-like family member");
    i = *n;
  }

  AbelReport r;
  r.series = seq.name();
  r.weights = eps.name();
  r.member = i;
  r.horizon = seq.horizon();
  const std::size_t m = space.family.dimension();
  const std::size_t count = seq.size();
  const std::size_t half = count / 2;
  auto ftab = std::make_shared<SequenceTable>(seq, seq.horizon());
  auto etab = std::make_shared<SequenceTable>(eps, eps.horizon());
  const Space scalar{space.domain, SemidistanceFamily::sup_norm(1)};
  const auto fam = space.family;

  auto bounds = [&, fam](std::span<const double> partial, double& all, double& first_half) {
    std::vector<double> zero(m, 0.0);
    all = first_half = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const double nrm = fam.eval(i, partial.subspan(k * m, m), zero);
      all = std::max(all, nrm);
      if (k < half) first_half = std::max(first_half, nrm);
    }
  };

  const FnObject limit("abel-limit", m, [ftab, etab, m, count](std::span<const double> x, std::span<double> out) {
    std::vector<double> f(count * m), e(count);
    ftab->values(x, f);
    etab->values(x, e);
    const auto c = detail::abel_columns(f, e, count, m);
    for (std::size_t j = 0; j < m; ++j) out[j] = c.by_parts[(count - 1) * m + j];
  });
  const FnObject variation("weight-variation", 1, [etab, count](std::span<const double> x, std::span<double> out) {
    std::vector<double> e(count);
    etab->values(x, e);
    double v = 0.0;
    for (std::size_t k = 1; k < count; ++k) v += std::abs(e[k] - e[k - 1]);
    out[0] = v;
  });

  std::vector<double> fb(count * m), eb(count);
  for (const auto& a : probes) {
    AbelProbe ap;
    ap.probe = a;
    ftab->values(a, fb);
    etab->values(a, eb);
    const auto c = detail::abel_columns(fb, eb, count, m);
    for (std::size_t k = 0; k < count * m; ++k) {
      const double scale = std::max(c.scale_direct[k], c.scale_parts[k]);
      const double err = std::abs(c.direct[k] - c.by_parts[k]);
      if (err > 0.0) ap.identity_error = std::max(ap.identity_error, scale > 0.0 ? err / scale : err);
    }
    ap.direct.assign(c.direct.end() - static_cast<std::ptrdiff_t>(m), c.direct.end());
    ap.by_parts.assign(c.by_parts.end() - static_cast<std::ptrdiff_t>(m), c.by_parts.end());

    bounds(c.partial, ap.bound, ap.bound_first_half);
    ap.bounded = std::isfinite(ap.bound) && ap.bound <= (1.0 + opts.growth_tol) * ap.bound_first_half + opts.scale.margin;

    ap.ball_bounded = true;
    const Region ball = neighborhood(space.domain, a, opts.ball_scale);
    std::vector<double> bf(count * m), be(count);
    for (const auto& x : sample_region(ball, opts.scale.base_depth)) {
      ftab->values(x, bf);
      etab->values(x, be);
      const auto cx = detail::abel_columns(bf, be, count, m);
      double all = 0.0, fh = 0.0;
      bounds(cx.partial, all, fh);
      ap.ball_bound = std::max(ap.ball_bound, all);
      if (!(std::isfinite(all) && all <= (1.0 + opts.growth_tol) * fh + opts.scale.margin)) ap.ball_bounded = false;
    }

    const std::size_t tail_start = count > opts.tail_window + 1 ? count - opts.tail_window - 1 : 0;
    for (std::size_t k = tail_start; k < count; ++k) ap.eps_tail = std::max(ap.eps_tail, std::abs(eb[k]));
    ap.eps_decays = ap.eps_tail <= opts.decay_tol;

    std::vector<double> var(count, 0.0);
    for (std::size_t k = 1; k < count; ++k) var[k] = var[k - 1] + std::abs(eb[k] - eb[k - 1]);
    ap.variation = var.back();
    ap.variation_spread = detail::window_spread(var, count, 1, 0, opts.tail_window);
    ap.variation_stable = ap.variation_spread <= opts.stab_tol;
    ap.variation_oscillation = oscillation_defect(scalar, variation, a, 0, opts.scale).defect;
    ap.variation_continuous = ap.variation_oscillation <= opts.osc_tol;

    ScaleOptions so = opts.scale;
    ap.continuity_defect = oscillation_defect(space, limit, a, i, so).defect;
    r.max_identity_error = std::max(r.max_identity_error, ap.identity_error);
    r.probes.push_back(std::move(ap));
  }

  for (const auto& ap : r.probes) {
    std::string where = "probe (";
    for (std::size_t j = 0; j < ap.probe.size(); ++j) where += (j ? ", " : "") + std::to_string(ap.probe[j]);
    where += ")";
    if (!ap.bounded) r.hypothesis_failures.push_back("partial sums keep growing at " + where);
    if (!ap.ball_bounded) r.hypothesis_failures.push_back("partial sums keep growing near " + where);
    if (!ap.eps_decays) r.hypothesis_failures.push_back("weights do not decay at " + where);
    if (!ap.variation_stable) r.hypothesis_failures.push_back("weight variation does not stabilize at " + where);
    if (!ap.variation_continuous) r.hypothesis_failures.push_back("weight variation limit oscillates at " + where);
  }
  r.hypothesis = r.hypothesis_failures.empty() ? Verdict::holds : Verdict::fails;
  if (r.hypothesis != Verdict::holds) {
    r.verdict = Verdict::inconclusive;
  } else {
    const bool continuous = std::all_of(r.probes.begin(), r.probes.end(),
                                        [&](const AbelProbe& ap) { return ap.continuity_defect <= opts.osc_tol; });
    r.verdict = continuous ? Verdict::holds : Verdict::fails;
  }
  return r;
}

/// Lazily evaluated point sequence a_n, n in [first, last].
struct PointSequence {
  std::string name;
  std::size_t first = 1, last = 1;
  std::function<Point(std::size_t)> at;
  Point limit;

  static PointSequence from_list(std::vector<Point> pts, Point limit, std::string name = "points") {
    if (pts.empty()) throw Error(Errc::invalid_argument, "point sequence must be nonempty");
    auto shared = std::make_shared<std::vector<Point>>(std::move(pts));
    PointSequence s;
    s.name = std::move(name);
    s.first = 0;
    s.last = shared->size() - 1;
    s.at = [shared](std::size_t n) { return (*shared)[n]; };
    s.limit = std::move(limit);
    return s;
  }
};

struct InnerLimit {
  std::size_t p = 0;
  Value value;
  double spread = 0.0;
  bool stable = false;
};

struct InterchangeReport {
  std::string sequence, limit, points;
  Point point_limit;
  Verdict verdict = Verdict::inconclusive;
  bool precondition_violated = false;
  VLimitResult precondition;
  std::vector<InnerLimit> inner;  // lim_n f_p(a_n) per p
  Value lhs;                      // lim_p lim_n f_p(a_n)
  double lhs_spread = 0.0;
  bool lhs_stable = false;
  Value rhs;                      // lim_n g(a_n)
  double rhs_spread = 0.0;
  bool rhs_stable = false;
  double discrepancy = 0.0;
  std::optional<std::size_t> unstable_p;
  std::string note;
};

namespace detail {

/// Mean and semidistance diameter of a window of values.
inline std::pair<Value, double> window_limit(const SemidistanceFamily& fam, std::size_t i,
                                             const std::vector<Value>& vals) {
  const std::size_t m = fam.dimension();
  Value mean(m, 0.0);
  for (const auto& v : vals)
    for (std::size_t j = 0; j < m; ++j) mean[j] += v[j];
  for (auto& x : mean) x /= static_cast<double>(vals.size());
  double spread = 0.0;
  for (std::size_t a = 0; a < vals.size(); ++a)
    for (std::size_t b = a + 1; b < vals.size(); ++b) spread = std::max(spread, fam.eval(i, vals[a], vals[b]));
  return {mean, spread};
}

}  // namespace detail

/// lim_p lim_n f_p(a_n) against lim_n g(a_n). The equality is predicted when
/// f_p V-converges to g at the limit point of a_n; the precondition is
/// checked with v_limit_test at that point and the double limit is always
/// reported descriptively.
inline InterchangeReport interchange_check(const Space& space, const FnSequence& seq, const FnObject& g,
                                           const PointSequence& a_seq, const ConvergenceOptions& opts = {}) {
  detail::check_sequence(space, seq);
  detail::check_dims(space, g);
  detail::check_member(space, opts.member);
  const std::size_t w = opts.tail_window;
  if (a_seq.last < a_seq.first + w) throw Error(Errc::invalid_argument, "point sequence shorter than the tail window");
  if (seq.size() <= w + 1) throw Error(Errc::horizon_mismatch, "horizon shorter than the tail window");
  const std::size_t i = opts.member;
  const std::size_t m = space.family.dimension();

  InterchangeReport r;
  r.sequence = seq.name();
  r.limit = g.name();
  r.points = a_seq.name;
  r.point_limit = a_seq.limit;
  r.precondition = v_limit_test(space, seq, g, ProbeSet(space.domain, {a_seq.limit}), opts);
  r.precondition_violated = r.precondition.verdict != Verdict::holds;

  const SequenceTable table(seq, seq.horizon());
  const std::size_t count = table.count();
  std::vector<std::vector<Value>> per_p(count);
  std::vector<Value> gvals;
  std::vector<double> buf(count * m);
  for (std::size_t n = a_seq.last - w; n <= a_seq.last; ++n) {
    const Point x = a_seq.at(n);
    if (!space.domain.contains(x)) throw Error(Errc::point_outside_domain, "point sequence leaves the domain");
    table.values(x, buf);
    for (std::size_t k = 0; k < count; ++k) per_p[k].emplace_back(buf.begin() + k * m, buf.begin() + (k + 1) * m);
    gvals.push_back(g(x));
  }
  for (std::size_t k = 0; k < count; ++k) {
    auto [mean, spread] = detail::window_limit(space.family, i, per_p[k]);
    InnerLimit il;
    il.p = seq.first() + k;
    il.value = std::move(mean);
    il.spread = spread;
    il.stable = spread <= opts.stab_tol;
    if (!il.stable && !r.unstable_p) r.unstable_p = il.p;
    r.inner.push_back(std::move(il));
  }
  std::vector<Value> outer;
  for (std::size_t k = count - w - 1; k < count; ++k) outer.push_back(r.inner[k].value);
  std::tie(r.lhs, r.lhs_spread) = detail::window_limit(space.family, i, outer);
  r.lhs_stable = r.lhs_spread <= opts.stab_tol;
  std::tie(r.rhs, r.rhs_spread) = detail::window_limit(space.family, i, gvals);
  r.rhs_stable = r.rhs_spread <= opts.stab_tol;
  r.discrepancy = space.family.eval(i, r.lhs, r.rhs);

  if (r.precondition_violated) {
    r.verdict = Verdict::inconclusive;
    r.note = "precondition violated: the sequence is not shown to V-converge to the limit at the point; "
             "values are descriptive only";
  } else if (r.unstable_p || !r.lhs_stable || !r.rhs_stable) {
    r.verdict = Verdict::inconclusive;
    r.note = "limits did not stabilize within the tail window";
  } else {
    r.verdict = r.discrepancy <= opts.interchange_tol ? Verdict::holds : Verdict::fails;
    r.note = r.verdict == Verdict::holds ? "iterated limits agree" : "iterated limits disagree";
  }
  return r;
}

}  // namespace vconv
