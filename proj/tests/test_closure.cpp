#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "vconv/closure.hpp"
#include "vconv/corpus.hpp"

using namespace vconv;

namespace {

Space unit_space() { return Space{DomainSpec::box({0.0}, {1.0}), SemidistanceFamily::sup_norm(1)}; }

std::vector<Point> grid(std::size_t n) {
  std::vector<Point> out;
  for (std::size_t j = 0; j <= n; ++j) out.push_back({double(j) / double(n)});
  return out;
}

std::vector<CoverPiece> five_piece_cover(const DomainSpec& d) {
  std::vector<CoverPiece> out;
  const double centers[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  const int n[] = {20, 25, 40, 50, 100};
  for (int k = 0; k < 5; ++k)
    out.push_back({ball(d, Point{centers[k]}, 0.12), corpus_lookup("affine-perturbation").member(n[k])});
  return out;
}

}  // namespace

TEST(Patch, SinglePieceIsTheApproximant) {
  const auto sp = unit_space();
  const auto h = corpus_function("sin10");
  const auto g = patch({{ball(sp.domain, Point{0.5}, 0.75), h}});
  for (const auto& x : grid(1000)) EXPECT_EQ(g(x)[0], h(x)[0]);
}

TEST(Patch, OverlapUsesFirstMatch) {
  const auto sp = unit_space();
  const auto h1 = FnObject::constant("h1", {1.0});
  const auto h2 = FnObject::constant("h2", {2.0});
  const std::vector<CoverPiece> pieces{{ball(sp.domain, Point{0.3}, 0.3), h1}, {ball(sp.domain, Point{0.7}, 0.3), h2}};
  const auto g = patch(pieces);
  EXPECT_EQ(g(Point{0.5})[0], 1.0);
  EXPECT_EQ(g(Point{0.1})[0], 1.0);
  EXPECT_EQ(g(Point{0.6})[0], 2.0);
  // the boundary of the first region is not in its open ball
  EXPECT_EQ(g(Point{0.6 + 1e-12})[0], 2.0);
  EXPECT_EQ(*patch_owner(pieces, Point{0.45}), 0u);
  EXPECT_EQ(*patch_owner(pieces, Point{0.65}), 1u);
}

TEST(Patch, OutsideUnionThrowsWithPoint) {
  const auto sp = unit_space();
  const auto g = patch({{ball(sp.domain, Point{0.2}, 0.1), corpus_function("identity")}});
  try {
    g(Point{0.9});
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.point(), Point{0.9});
    EXPECT_EQ(e.code(), Errc::evaluation_failure);
  }
  EXPECT_FALSE(patch_owner({{ball(sp.domain, Point{0.2}, 0.1), corpus_function("identity")}}, Point{0.9}));
  EXPECT_THROW(patch({}), Error);
}

TEST(Patch, ErrorBoundOnFinePieces) {
  const auto sp = unit_space();
  const auto pieces = five_piece_cover(sp.domain);
  const auto f = corpus_function("identity");
  const auto samples = grid(10000);
  const auto r = patch_report(sp, pieces, f, samples, 1e-4, 0.05);
  EXPECT_EQ(r.uncovered, 0u);
  EXPECT_TRUE(r.rigorous);
  EXPECT_LE(r.piece_bound, 0.05);
  EXPECT_LE(r.sup_error, 0.05 + r.slack);
  EXPECT_EQ(r.verdict, Verdict::holds);
  // direct oracle: |x/n| on each owning region
  const auto g = patch(pieces);
  double oracle = 0.0;
  for (const auto& x : samples) oracle = std::max(oracle, std::abs(g(x)[0] - x[0]));
  EXPECT_EQ(r.sup_error, oracle);
}

TEST(Patch, UncoveredSamplesAreInconclusive) {
  const auto sp = unit_space();
  auto pieces = five_piece_cover(sp.domain);
  pieces.pop_back();
  const auto r = patch_report(sp, pieces, corpus_function("identity"), grid(1000), 1e-3, 0.05);
  EXPECT_GT(r.uncovered, 0u);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
}

TEST(Patch, CoarseApproximantFails) {
  const auto sp = unit_space();
  auto pieces = five_piece_cover(sp.domain);
  pieces[2].approximant = corpus_lookup("affine-perturbation").member(2);
  const auto r = patch_report(sp, pieces, corpus_function("identity"), grid(1000), 1e-3, 0.05);
  EXPECT_EQ(r.verdict, Verdict::fails);
  EXPECT_GT(r.piece_errors[2], 0.05);
}

TEST(Patch, ExactOnFirstMatchSets) {
  const auto sp = unit_space();
  const auto pieces = five_piece_cover(sp.domain);
  const auto g = patch(pieces);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const Point x{u(rng)};
    const auto owner = patch_owner(pieces, x);
    ASSERT_TRUE(owner);
    for (std::size_t i = 0; i < *owner; ++i) EXPECT_FALSE(pieces[i].region.contains_open(x));
    EXPECT_TRUE(pieces[*owner].region.contains_open(x));
    EXPECT_EQ(std::bit_cast<std::uint64_t>(g(x)[0]), std::bit_cast<std::uint64_t>(pieces[*owner].approximant(x)[0]));
  }
}

TEST(Oscillation, LipschitzFunctionHasSmallDefect) {
  const auto sp = unit_space();
  for (double x : {0.0, 0.3, 0.5, 1.0}) EXPECT_LE(oscillation_defect(sp, corpus_function("square"), Point{x}).defect, 1e-3);
}

TEST(Oscillation, UnitJump) {
  const auto sp = unit_space();
  const auto o = oscillation_defect(sp, corpus_function("step"), Point{0.5});
  EXPECT_NEAR(o.defect, 1.0, 1e-6);
  for (const auto& e : o.scales) EXPECT_EQ(e.sampled, 1.0);
}

TEST(Oscillation, ConstantIsZeroAtEveryScale) {
  const auto sp = unit_space();
  const auto o = oscillation_defect(sp, corpus_function("one"), Point{0.25});
  EXPECT_EQ(o.defect, 0.0);
  for (const auto& e : o.scales) EXPECT_EQ(e.value, 0.0);
}

TEST(Oscillation, StaircaseJumpsAreQuarter) {
  const auto sp = unit_space();
  EXPECT_NEAR(oscillation_defect(sp, corpus_function("staircase"), Point{0.25}).defect, 0.25, 1e-3);
  EXPECT_LE(oscillation_defect(sp, corpus_function("staircase"), Point{0.4}).defect, 1e-3);
}

TEST(Semicontinuity, UpperStep) {
  const auto sp = unit_space();
  const auto f = corpus_function("usc-step");
  const auto up = semicontinuity_defect(sp, f, Point{0.5}, SemicontinuityKind::upper);
  const auto lo = semicontinuity_defect(sp, f, Point{0.5}, SemicontinuityKind::lower);
  EXPECT_EQ(up.defect, 0.0);
  EXPECT_EQ(lo.defect, 1.0);
  EXPECT_EQ(lo.limit_estimate, 0.0);
}

TEST(Semicontinuity, StepTakesUpperValueAtJump) {
  const auto sp = unit_space();
  const auto f = corpus_function("step");
  EXPECT_EQ(semicontinuity_defect(sp, f, Point{0.5}, SemicontinuityKind::upper).defect, 0.0);
  EXPECT_EQ(semicontinuity_defect(sp, f, Point{0.5}, SemicontinuityKind::lower).defect, 1.0);
  const FnObject lsc = FnObject::scalar("lsc-step", [](double x) { return x <= 0.5 ? 0.0 : 1.0; });
  EXPECT_EQ(semicontinuity_defect(sp, lsc, Point{0.5}, SemicontinuityKind::lower).defect, 0.0);
  EXPECT_EQ(semicontinuity_defect(sp, lsc, Point{0.5}, SemicontinuityKind::upper).defect, 1.0);
}

TEST(Semicontinuity, ContinuousAndConstant) {
  const auto sp = unit_space();
  for (double x : {0.0, 0.37, 1.0}) {
    for (auto kind : {SemicontinuityKind::upper, SemicontinuityKind::lower}) {
      EXPECT_LE(semicontinuity_defect(sp, corpus_function("sin10"), Point{x}, kind).defect, 1e-3);
      EXPECT_EQ(semicontinuity_defect(sp, corpus_function("one"), Point{x}, kind).defect, 0.0);
    }
  }
  EXPECT_THROW(semicontinuity_defect(sp, corpus_function("one"), Point{2.0}, SemicontinuityKind::upper), Error);
}

TEST(Semilocal, ContinuousFunctionIsItsOwnApproximant) {
  const auto sp = unit_space();
  const auto r = semilocal_condition(sp, corpus_function("sin10"), continuous_oracle(),
                                     ProbeSet(sp.domain, {{0.0}, {0.5}, {1.0}}), {0, 1e-6});
  EXPECT_EQ(r.verdict, Verdict::holds);
  EXPECT_EQ(r.membership, Membership::in);
  for (const auto& p : r.probes) EXPECT_EQ(*p.scale, 0);
}

TEST(Semilocal, ReflexiveOnLipschitzCorpus) {
  const auto sp = unit_space();
  for (const auto& e : corpus_families()) {
    if (e.kind != CorpusKind::function || !e.domain.contains(Point{0.5})) continue;
    const auto f = e.function();
    if (!f.lipschitz_bound()) continue;
    EXPECT_EQ(semilocal_condition(sp, f, continuous_oracle(), ProbeSet(sp.domain, {{0.1}, {0.5}}), {0, 1e-9}).verdict,
              Verdict::holds)
        << e.name;
  }
}

TEST(Semilocal, StepIsNotLocallyContinuousAtTheJump) {
  const auto sp = unit_space();
  const auto r = semilocal_condition(sp, corpus_function("step"), continuous_oracle(), ProbeSet(sp.domain, {{0.5}}),
                                     {0, 0.4});
  EXPECT_EQ(r.verdict, Verdict::fails);
  for (double s : r.probes[0].sups) EXPECT_GT(s, 0.4);
}

TEST(Semilocal, StaircaseIsLocallyConstantOffJumps) {
  const auto sp = unit_space();
  const auto r = semilocal_condition(sp, corpus_function("staircase"), piecewise_constant_oracle(sp.domain),
                                     ProbeSet(sp.domain, {{0.1}, {0.4}, {0.6}, {0.9}}), {0, 1e-2});
  EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(Semilocal, GeneratorFailureIsInconclusive) {
  const auto sp = unit_space();
  PropertyOracle o;
  o.name = "broken";
  o.approximant = [](const Point&, int, const FnObject&) -> std::optional<FnObject> { throw std::runtime_error("x"); };
  const auto r = semilocal_condition(sp, corpus_function("step"), o, ProbeSet(sp.domain, {{0.5}}), {0, 0.1});
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_THROW(semilocal_condition(sp, corpus_function("step"), o, ProbeSet(sp.domain, {{0.5}}), {0, 0.0}), Error);
}
