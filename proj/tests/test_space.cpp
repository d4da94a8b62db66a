#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vconv/space.hpp"

using namespace vconv;

namespace {

DomainSpec unit() { return DomainSpec::box({0.0}, {1.0}); }

bool region_subset(const Region& inner, const Region& outer) {
  for (std::size_t j = 0; j < inner.lower.size(); ++j)
    if (inner.lower[j] < outer.lower[j] || inner.upper[j] > outer.upper[j]) return false;
  return true;
}

}  // namespace

TEST(Neighborhood, CenteredBallAtScaleZero) {
  const auto r = neighborhood(unit(), Point{0.5}, 0);
  EXPECT_DOUBLE_EQ(r.lower[0], 0.25);
  EXPECT_DOUBLE_EQ(r.upper[0], 0.75);
}

TEST(Neighborhood, ScaleTwoUsesBetaSquared) {
  const auto r = neighborhood(unit(), Point{0.5}, 2);
  EXPECT_DOUBLE_EQ(r.radius, 0.0625);
  EXPECT_DOUBLE_EQ(r.lower[0], 0.4375);
  EXPECT_DOUBLE_EQ(r.upper[0], 0.5625);
}

TEST(Neighborhood, ClippedAtBoundary) {
  const auto r = neighborhood(unit(), Point{0.0}, 0);
  EXPECT_DOUBLE_EQ(r.lower[0], 0.0);
  EXPECT_DOUBLE_EQ(r.upper[0], 0.25);
}

TEST(Neighborhood, DefaultsAreQuarterDiameterAndHalving) {
  const auto d = DomainSpec::box({0.0, -1.0}, {2.0, 3.0});
  EXPECT_DOUBLE_EQ(d.diameter(), 4.0);
  EXPECT_DOUBLE_EQ(d.r0(), 1.0);
  EXPECT_DOUBLE_EQ(d.beta(), 0.5);
}

TEST(Neighborhood, NestedAndShrinking) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto d = DomainSpec::box({0.0, 0.0}, {1.0, 2.0});
  for (int t = 0; t < 200; ++t) {
    const Point a{u(rng), 2.0 * u(rng)};
    for (int k = 0; k < 20; ++k) {
      const auto outer = neighborhood(d, a, k);
      const auto inner = neighborhood(d, a, k + 1);
      EXPECT_TRUE(region_subset(inner, outer));
      EXPECT_TRUE(inner.contains(a));
      EXPECT_DOUBLE_EQ(inner.radius, outer.radius * d.beta());
      EXPECT_LT(inner.radius, outer.radius);
    }
  }
}

TEST(Neighborhood, RejectsOutsideCenterAndNegativeScale) {
  try {
    neighborhood(unit(), Point{1.5}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::point_outside_domain);
  }
  EXPECT_THROW(neighborhood(unit(), Point{0.5}, -1), Error);
}

TEST(SampleRegion, DepthZeroIsEndpointsAndCenter) {
  const auto pts = sample_region(neighborhood(unit(), Point{0.5}, 0), 0);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_DOUBLE_EQ(pts[0][0], 0.25);
  EXPECT_DOUBLE_EQ(pts[1][0], 0.5);
  EXPECT_DOUBLE_EQ(pts[2][0], 0.75);
}

TEST(SampleRegion, DepthOneHalvesTheMesh) {
  const auto pts = sample_region(neighborhood(unit(), Point{0.5}, 0), 1);
  ASSERT_EQ(pts.size(), 5u);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(pts[j][0], 0.25 + 0.125 * static_cast<double>(j));
}

TEST(SampleRegion, FiniteSetBallEnumeratesMembers) {
  const auto d = DomainSpec::finite_set({{0.0}, {1.0}, {2.0}, {3.0}, {4.0}}, std::nullopt, 1.0);
  const auto pts = sample_region(neighborhood(d, Point{2.0}, 0), 5);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0], Point{1.0});
  EXPECT_EQ(pts[1], Point{2.0});
  EXPECT_EQ(pts[2], Point{3.0});
}

TEST(SampleRegion, DeterministicAndInsideRegion) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto d = DomainSpec::box({0.0, 0.0}, {1.0, 1.0});
  for (int t = 0; t < 50; ++t) {
    const Point a{u(rng), u(rng)};
    const int k = static_cast<int>(u(rng) * 10);
    const auto r = neighborhood(d, a, k);
    const auto p1 = sample_region(r, 3);
    const auto p2 = sample_region(r, 3);
    EXPECT_EQ(p1, p2);
    bool has_center = false;
    for (const auto& p : p1) {
      EXPECT_TRUE(r.contains(p));
      EXPECT_TRUE(d.contains(p));
      has_center |= p == a;
    }
    EXPECT_TRUE(has_center);
  }
}

TEST(SampleRegion, ClippedRegionKeepsExtremes) {
  const auto r = neighborhood(unit(), Point{0.1}, 0);
  const auto pts = sample_region(r, 2);
  EXPECT_DOUBLE_EQ(pts.front()[0], 0.0);
  EXPECT_DOUBLE_EQ(pts.back()[0], 0.35);
  EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end()));
}

TEST(Semidistance, SupNormExamples) {
  const auto fam = SemidistanceFamily::sup_norm(2);
  EXPECT_EQ(fam(0, Value{1, 2}, Value{1, 2}), 0.0);
  EXPECT_EQ(fam(0, Value{0, 3}, Value{1, 1}), 2.0);
}

TEST(Semidistance, ProjectionExample) {
  SemidistanceFamily fam(2, {{SemidistanceMember::Kind::projection, 0, {}, ""}});
  EXPECT_EQ(fam(0, Value{0, 3}, Value{1, 1}), 1.0);
}

TEST(Semidistance, AxiomsOnRandomTriples) {
  SemidistanceFamily fam(3, {{SemidistanceMember::Kind::sup_norm, 0, {}, ""},
                             {SemidistanceMember::Kind::euclidean, 0, {}, ""},
                             {SemidistanceMember::Kind::projection, 2, {}, ""},
                             {SemidistanceMember::Kind::linear, 0, {0.5, -2.0, 1.0}, ""}});
  std::mt19937 rng(3);
  std::normal_distribution<double> g(0.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const Value u{g(rng), g(rng), g(rng)}, v{g(rng), g(rng), g(rng)}, w{g(rng), g(rng), g(rng)};
    for (std::size_t i = 0; i < fam.size(); ++i) {
      EXPECT_EQ(fam(i, u, u), 0.0);
      EXPECT_EQ(fam(i, u, v), fam(i, v, u));
      EXPECT_GE(fam(i, u, v), 0.0);
      EXPECT_LE(fam(i, u, w), fam(i, u, v) + fam(i, v, w) + 1e-12);
    }
  }
}

TEST(Semidistance, ChecksIndicesAndDimensions) {
  const auto fam = SemidistanceFamily::sup_norm(2);
  EXPECT_THROW(fam(1, Value{0, 0}, Value{0, 0}), Error);
  EXPECT_THROW(fam(0, Value{0}, Value{0, 0}), Error);
  EXPECT_THROW(SemidistanceFamily(2, {{SemidistanceMember::Kind::projection, 2, {}, ""}}), Error);
  EXPECT_THROW(SemidistanceFamily(2, {{SemidistanceMember::Kind::linear, 0, {1.0}, ""}}), Error);
}

TEST(Semidistance, NormDetection) {
  SemidistanceFamily fam(2, {{SemidistanceMember::Kind::projection, 1, {}, ""},
                             {SemidistanceMember::Kind::euclidean, 0, {}, ""}});
  EXPECT_FALSE(fam.is_norm(0));
  EXPECT_TRUE(fam.is_norm(1));
  EXPECT_EQ(fam.first_norm(), 1u);
}

TEST(DomainSpec, FiniteSetValidation) {
  EXPECT_THROW(DomainSpec::finite_set({{0.0}, {1.0}, {2.0}}, std::vector<std::vector<double>>{
                                                                 {0, 1, 5}, {1, 0, 1}, {5, 1, 0}}),
               Error);
  EXPECT_THROW(DomainSpec::finite_set({{0.0}, {1.0}}, std::vector<std::vector<double>>{{0, 1}, {2, 0}}), Error);
  EXPECT_THROW(DomainSpec::finite_set({{0.0}, {0.0}}), Error);
  const auto d = DomainSpec::finite_set({{0.0}, {1.0}, {2.0}},
                                        std::vector<std::vector<double>>{{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  EXPECT_DOUBLE_EQ(d.distance(Point{0.0}, Point{2.0}), 2.0);
  EXPECT_DOUBLE_EQ(d.diameter(), 2.0);
  EXPECT_FALSE(d.contains(Point{0.5}));
}

TEST(DomainSpec, BoxValidationAndChebyshevDistance) {
  EXPECT_THROW(DomainSpec::box({1.0}, {0.0}), Error);
  EXPECT_THROW(DomainSpec::box({0.0, 0.0}, {1.0}), Error);
  const auto d = DomainSpec::box({0.0, 0.0}, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(d.distance(Point{0.0, 0.0}, Point{0.3, 0.7}), 0.7);
}

TEST(ProbeSet, DeduplicatesAndRejectsOutside) {
  const ProbeSet p(unit(), {{0.5}, {0.2}, {0.5}});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.points()[0], Point{0.5});
  try {
    ProbeSet(unit(), {{1.5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::point_outside_domain);
  }
}

TEST(FnObject, WrapsEvaluatorExceptions) {
  const auto f = FnObject::scalar("boom", [](double x) -> double {
    if (x > 0.5) throw std::domain_error("too large");
    return x;
  });
  EXPECT_DOUBLE_EQ(f({0.25})[0], 0.25);
  try {
    f({0.75});
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.function(), "boom");
    EXPECT_EQ(e.point(), Point{0.75});
    EXPECT_EQ(e.code(), Errc::evaluation_failure);
  }
}

TEST(FnSequence, IndexBoundsAndHorizon) {
  FnSequence s("sq", 1, 10, 1, [](std::size_t n) {
    return FnObject::scalar("n", [n](double) { return static_cast<double>(n); });
  });
  EXPECT_EQ(s.size(), 10u);
  EXPECT_DOUBLE_EQ(s.at(4)({0.0})[0], 4.0);
  EXPECT_THROW(s.at(0), Error);
  EXPECT_THROW(s.at(11), Error);
  EXPECT_EQ(s.truncated(5).horizon(), 5u);
  EXPECT_THROW(s.truncated(11), Error);
  EXPECT_EQ(s.with_horizon(50).size(), 50u);
}

TEST(PartialSums, RangeAgreesWithMembersBitwise) {
  FnSequence terms("t", 1, 60, 2, [](std::size_t n) {
    const double nn = static_cast<double>(n);
    return FnObject(
        "t", 2,
        [nn](std::span<const double> x, std::span<double> out) {
          out[0] = std::sin(nn * x[0]) / nn;
          out[1] = std::pow(x[0], nn) / (nn * nn);
        },
        nn);
  });
  const auto sums = partial_sums(terms);
  const SequenceTable table(sums, sums.horizon());
  std::vector<double> buf(table.count() * 2);
  for (double x : {0.0, 0.3, 0.77, 1.0}) {
    table.values(Point{x}, buf);
    for (std::size_t n = 1; n <= 60; ++n) {
      const auto v = sums.at(n)({x});
      EXPECT_EQ(v[0], buf[(n - 1) * 2]);
      EXPECT_EQ(v[1], buf[(n - 1) * 2 + 1]);
    }
  }
  // cumulative Lipschitz bound
  EXPECT_DOUBLE_EQ(*sums.at(3).lipschitz_bound(), 6.0);
}

TEST(SequenceTable, OutlivesTheSequenceItWasBuiltFrom) {
  auto make = [] {
    FnSequence s("lin", 1, 5, 1, [](std::size_t n) {
      return FnObject::scalar("lin", [n](double x) { return static_cast<double>(n) * x; });
    });
    return SequenceTable(s, 5);
  };
  const SequenceTable t = make();
  std::vector<double> buf(5);
  t.values(Point{2.0}, buf);
  EXPECT_DOUBLE_EQ(buf[4], 10.0);
}
