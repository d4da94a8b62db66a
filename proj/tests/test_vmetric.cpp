#include <gtest/gtest.h>

#include <cmath>

#include "vconv/corpus.hpp"
#include "vconv/vmetric.hpp"

using namespace vconv;

namespace {

Space unit_space() { return Space{DomainSpec::box({0.0}, {1.0}), SemidistanceFamily::sup_norm(1)}; }

FnObject scaled(const FnObject& f, double lambda) {
  std::optional<double> l;
  if (f.lipschitz_bound()) l = std::abs(lambda) * *f.lipschitz_bound();
  return FnObject(
      "scaled", f.codomain_dim(),
      [f, lambda](std::span<const double> x, std::span<double> out) {
        f.eval_into(x, out);
        for (auto& v : out) v *= lambda;
      },
      l);
}

std::vector<FnObject> scalar_functions() {
  std::vector<FnObject> out;
  for (const auto& e : corpus_families())
    if (e.kind == CorpusKind::function) out.push_back(e.function());
  for (std::size_t n : {1, 2, 5, 40}) out.push_back(corpus_lookup("power-sequence").member(n));
  for (std::size_t n : {3, 10}) out.push_back(corpus_lookup("moving-bump").member(n));
  out.push_back(corpus_lookup("shrinking-indicator").member(4));
  return out;
}

}  // namespace

TEST(SupOverRegion, IdenticalFunctionsGiveZero) {
  const auto sp = unit_space();
  const auto f = corpus_function("sin10");
  for (int depth = 0; depth <= 8; ++depth)
    for (double a : {0.0, 0.3, 1.0})
      EXPECT_EQ(sup_over_region(sp, f, f, 0, neighborhood(sp.domain, Point{a}, depth % 3), depth).value, 0.0);
}

TEST(SupOverRegion, MonotoneFunctionPeaksAtRightEndpoint) {
  const auto sp = unit_space();
  const auto r = neighborhood(sp.domain, Point{0.5}, 0);
  for (int depth = 0; depth <= 8; ++depth) {
    const auto e = sup_over_region(sp, corpus_function("identity"), corpus_function("zero"), 0, r, depth);
    EXPECT_DOUBLE_EQ(e.value, 0.75);
    EXPECT_EQ(e.argmax, Point{0.75});
  }
}

TEST(SupOverRegion, MatchesDenseGridOracle) {
  const auto sp = unit_space();
  const auto e = sup_over_region(sp, corpus_function("sin10"), corpus_function("zero"), 0, whole_domain(sp.domain), 6);
  double oracle = 0.0;
  for (int j = 0; j <= 100000; ++j) oracle = std::max(oracle, std::abs(std::sin(10.0 * j / 100000.0)));
  EXPECT_NEAR(e.value, oracle, 1e-3);
  ASSERT_TRUE(e.rigorous_upper);
  EXPECT_LE(e.value, *e.rigorous_upper);
  EXPECT_GE(*e.rigorous_upper, oracle);
}

TEST(SupOverRegion, RigorousUpperFormula) {
  const auto sp = unit_space();
  const auto r = neighborhood(sp.domain, Point{0.4}, 1);
  const auto e = sup_over_region(sp, corpus_function("square"), corpus_function("sin10"), 0, r, 3);
  ASSERT_TRUE(e.rigorous_upper);
  EXPECT_DOUBLE_EQ(*e.rigorous_upper, e.value + (2.0 + 10.0) * e.mesh / 2.0);
  EXPECT_DOUBLE_EQ(e.mesh, r.radius / 8.0);
  const auto n = sup_over_region(sp, corpus_function("step"), corpus_function("zero"), 0, r, 3);
  EXPECT_FALSE(n.rigorous_upper);
}

TEST(PointVSemidistance, ContinuousPairConvergesToPointwiseGap) {
  const auto sp = unit_space();
  const auto p = point_v_semidistance(sp, corpus_function("square"), corpus_function("identity"), 0, Point{0.5});
  EXPECT_NEAR(p.delta_hat, 0.25, 1e-3);
  EXPECT_EQ(p.delta_hat, p.scales.back().value);
}

TEST(PointVSemidistance, IndicatorOfOpenIntervalStaysAtOne) {
  const auto sp = unit_space();
  const auto p =
      point_v_semidistance(sp, corpus_function("indicator-small"), corpus_function("zero"), 0, Point{0.0});
  EXPECT_EQ(p.delta_hat, 1.0);
  for (const auto& e : p.scales) EXPECT_EQ(e.value, 1.0);
}

TEST(PointVSemidistance, SelfDistanceIsZeroAtEveryScale) {
  const auto sp = unit_space();
  const auto f = corpus_function("step");
  const auto p = point_v_semidistance(sp, f, f, 0, Point{0.5});
  EXPECT_EQ(p.delta_hat, 0.0);
  for (const auto& e : p.scales) EXPECT_EQ(e.value, 0.0);
}

TEST(PointVSemidistance, RecordedProfileIsNonIncreasing) {
  const auto sp = unit_space();
  const auto fns = scalar_functions();
  for (std::size_t a = 0; a < fns.size(); ++a)
    for (std::size_t b = 0; b < fns.size(); b += 3)
      for (double x : {0.0, 0.5, 1.0}) {
        const auto p = point_v_semidistance(sp, fns[a], fns[b], 0, Point{x});
        for (std::size_t k = 1; k < p.scales.size(); ++k) EXPECT_LE(p.scales[k].value, p.scales[k - 1].value);
        for (const auto& e : p.scales) EXPECT_GE(e.value, e.sampled);
      }
}

TEST(PointVSemidistance, StoppingRule) {
  const auto sp = unit_space();
  ScaleOptions o;
  const auto zero = corpus_function("zero");
  const auto p = point_v_semidistance(sp, zero, zero, 0, Point{0.5}, o);
  EXPECT_TRUE(p.stalled);
  EXPECT_EQ(static_cast<int>(p.scales.size()), o.min_scales);
  o.k_max = 3;
  o.min_scales = 100;
  const auto q = point_v_semidistance(sp, zero, zero, 0, Point{0.5}, o);
  EXPECT_FALSE(q.stalled);
  EXPECT_EQ(q.scales.size(), 4u);
}

TEST(VSemidistance, PowerSequenceAgainstLimitIsOneAtOne) {
  const auto sp = unit_space();
  const auto lim = corpus_function("power-limit");
  const ProbeSet A(sp.domain, {{1.0}});
  for (std::size_t n : {1, 2, 3, 10, 50, 200, 1000})
    EXPECT_NEAR(v_semidistance(sp, corpus_lookup("power-sequence").member(n), lim, 0, A).delta, 1.0, 1e-6) << n;
}

TEST(VSemidistance, ContinuousPairOnTwoProbes) {
  const auto sp = unit_space();
  const auto f = corpus_function("sin10"), g = corpus_function("cube");
  const ProbeSet A(sp.domain, {{0.2}, {0.8}});
  const double oracle =
      std::max(std::abs(std::sin(2.0) - 0.008), std::abs(std::sin(8.0) - 0.512));
  EXPECT_NEAR(v_semidistance(sp, f, g, 0, A).delta, oracle, 1e-3);
}

TEST(VSemidistance, EmptyProbeSetGivesZero) {
  const auto sp = unit_space();
  const auto r = v_semidistance(sp, corpus_function("step"), corpus_function("zero"), 0, ProbeSet{});
  EXPECT_EQ(r.delta, 0.0);
  EXPECT_TRUE(r.profiles.empty());
}

TEST(VSemidistance, DecompositionAndProbeMonotonicity) {
  const auto sp = unit_space();
  const auto fns = scalar_functions();
  const ProbeSet small(sp.domain, {{0.5}});
  const ProbeSet big(sp.domain, {{0.5}, {0.0}, {0.9}});
  for (std::size_t a = 0; a + 1 < fns.size(); a += 2) {
    const auto rs = v_semidistance(sp, fns[a], fns[a + 1], 0, small);
    const auto rb = v_semidistance(sp, fns[a], fns[a + 1], 0, big);
    double mx = 0.0;
    for (const auto& p : rb.profiles) mx = std::max(mx, p.delta_hat);
    EXPECT_EQ(rb.delta, mx);
    EXPECT_LE(rs.delta, rb.delta);
  }
}

TEST(VSemidistance, SymmetryIsExact) {
  const auto sp = unit_space();
  const auto fns = scalar_functions();
  const ProbeSet A(sp.domain, {{0.0}, {0.5}, {1.0}});
  for (std::size_t a = 0; a < fns.size(); ++a)
    for (std::size_t b = a + 1; b < fns.size(); b += 2)
      EXPECT_EQ(v_semidistance(sp, fns[a], fns[b], 0, A).delta, v_semidistance(sp, fns[b], fns[a], 0, A).delta);
}

TEST(VSemidistance, AbsoluteHomogeneity) {
  const auto sp = unit_space();
  const ProbeSet A(sp.domain, {{0.25}, {0.5}});
  const auto f = corpus_function("step"), g = corpus_function("sin10");
  const double base = v_semidistance(sp, f, g, 0, A).delta;
  for (double lambda : {-3.0, 0.5, 2.0})
    EXPECT_NEAR(v_semidistance(sp, scaled(f, lambda), scaled(g, lambda), 0, A).delta, std::abs(lambda) * base, 1e-9);
}

TEST(VSemidistance, VectorCodomainAndMembers) {
  Space sp{DomainSpec::box({0.0, 0.0}, {1.0, 1.0}),
           SemidistanceFamily(2, {{SemidistanceMember::Kind::sup_norm, 0, {}, ""},
                                  {SemidistanceMember::Kind::projection, 1, {}, ""}})};
  const FnObject f("f", 2, [](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] + x[1];
    out[1] = 3.0;
  }, 2.0);
  const auto zero = FnObject::constant("0", {0.0, 0.0});
  const ProbeSet A(sp.domain, {{0.5, 0.25}});
  EXPECT_NEAR(v_semidistance(sp, f, zero, 0, A).delta, 3.0, 1e-9);
  EXPECT_NEAR(v_semidistance(sp, f, zero, 1, A).delta, 3.0, 1e-12);
  EXPECT_THROW(v_semidistance(sp, f, zero, 2, A), Error);
  EXPECT_THROW(v_semidistance(sp, corpus_function("identity"), zero, 0, A), Error);
}

TEST(SequenceProfiles, LockstepEqualsPerMember) {
  const auto sp = unit_space();
  const auto seq = corpus_lookup("moving-bump").sequence().truncated(30);
  const auto zero = corpus_function("zero");
  for (double a : {0.0, 0.1}) {
    const auto all = sequence_profiles(sp, seq, zero, 0, Point{a}, 30);
    for (std::size_t n : {1, 7, 19, 30}) {
      const auto one = point_v_semidistance(sp, seq.at(n), zero, 0, Point{a});
      const auto& lock = all[n - 1];
      ASSERT_EQ(one.scales.size(), lock.scales.size());
      for (std::size_t k = 0; k < one.scales.size(); ++k) {
        EXPECT_EQ(one.scales[k].value, lock.scales[k].value);
        EXPECT_EQ(one.scales[k].argmax, lock.scales[k].argmax);
      }
      EXPECT_EQ(one.delta_hat, lock.delta_hat);
    }
  }
}

TEST(Entourage, SelfPairHolds) {
  const auto sp = unit_space();
  const auto f = corpus_function("staircase");
  EXPECT_EQ(entourage_test(sp, f, f, {0, 1e-3}, ProbeSet(sp.domain, {{0.25}, {0.6}})).verdict, Verdict::holds);
}

TEST(Entourage, PowerSequenceFailsWithWitnessNearOne) {
  const auto sp = unit_space();
  const auto r = entourage_test(sp, corpus_lookup("power-sequence").member(20), corpus_function("power-limit"),
                                {0, 0.5}, ProbeSet(sp.domain, {{1.0}}));
  EXPECT_EQ(r.verdict, Verdict::fails);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->probe, Point{1.0});
  ASSERT_FALSE(r.witness->violations.empty());
  for (const auto& v : r.witness->violations) {
    EXPECT_GT(v.sampled, 0.5);
    EXPECT_LE(1.0 - v.argmax[0], v.radius);
  }
  EXPECT_LT(1.0 - r.witness->violations.back().argmax[0], 1e-3);
}

TEST(Entourage, ContinuousPairWithinRadiusHolds) {
  const auto sp = unit_space();
  const auto f = corpus_function("identity");
  const auto g = FnObject::scalar("x+0.1x", [](double x) { return 1.1 * x; }, 1.1);
  // gap on A = {0.5, 1.0} is max(0.05, 0.1) = 0.1
  const auto r = entourage_test(sp, f, g, {0, 0.2}, ProbeSet(sp.domain, {{0.5}, {1.0}}));
  EXPECT_EQ(r.verdict, Verdict::holds);
  EXPECT_NEAR(r.report.delta, 0.1, 1e-3);
}

TEST(Entourage, RejectsNonPositiveRadius) {
  const auto sp = unit_space();
  const auto f = corpus_function("zero");
  EXPECT_THROW(entourage_test(sp, f, f, {0, 0.0}, ProbeSet(sp.domain, {{0.5}})), Error);
}

TEST(DepthForScale, CappedByMaxDepthAndSampleBudget) {
  ScaleOptions o;
  EXPECT_EQ(depth_for_scale(o, 0, 1), 4);
  EXPECT_EQ(depth_for_scale(o, 1, 1), 5);
  EXPECT_EQ(depth_for_scale(o, 10, 1), 6);
  o.max_samples = 100;
  EXPECT_LE(std::pow(std::ldexp(1.0, depth_for_scale(o, 10, 2) + 1) + 1.0, 2.0), 100.0);
}

TEST(FiniteSetDomain, BallsEventuallyIsolateTheProbe) {
  Space sp{DomainSpec::finite_set({{0.0}, {0.9}, {1.0}, {3.0}}), SemidistanceFamily::sup_norm(1)};
  const auto r = v_semidistance(sp, corpus_function("square"), corpus_function("zero"), 0, ProbeSet(sp.domain, {{0.9}}));
  EXPECT_DOUBLE_EQ(r.delta, 0.81);
  EXPECT_DOUBLE_EQ(r.profiles[0].scales.front().value, 1.0);
}
