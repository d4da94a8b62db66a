#pragma once

// Domains with nested neighborhood bases, codomain semidistance families,
// and evaluable functions / sequences of functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vconv/error.hpp"

namespace vconv {

using Point = std::vector<double>;
using Value = std::vector<double>;

enum class DomainKind { box, finite_set };

/// A computable topological domain: an axis-aligned box in R^d with the
/// Chebyshev metric, or a finite metric set given by a distance table.
/// Every point a carries the nested base of closed balls of radius
/// r0 * beta^k, k = 0, 1, ...
class DomainSpec {
 public:
  static DomainSpec box(Point lower, Point upper, std::optional<double> r0 = std::nullopt,
                        double beta = 0.5) {
    if (lower.empty() || lower.size() != upper.size())
      throw Error(Errc::dimension_mismatch, "box corners must have the same nonzero dimension");
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (!(lower[j] < upper[j]))
        throw Error(Errc::invalid_argument, "box corners need lower < upper on every axis");
    }
    DomainSpec d;
    d.kind_ = DomainKind::box;
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    d.finish(r0, beta);
    return d;
  }

  /// Finite metric set. Without an explicit table, Euclidean distances are used.
  static DomainSpec finite_set(std::vector<Point> points,
                               std::optional<std::vector<std::vector<double>>> distances = std::nullopt,
                               std::optional<double> r0 = std::nullopt, double beta = 0.5) {
    if (points.empty()) throw Error(Errc::invalid_argument, "finite-set domain needs points");
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
      if (p.size() != dim || dim == 0)
        throw Error(Errc::dimension_mismatch, "finite-set points must share one nonzero dimension");
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (points[i] == points[j]) throw Error(Errc::invalid_argument, "finite-set points must be distinct");

    const std::size_t n = points.size();
    std::vector<std::vector<double>> table;
    if (distances) {
      table = std::move(*distances);
      if (table.size() != n)
        throw Error(Errc::dimension_mismatch, "distance table must be n x n");
      for (const auto& row : table)
        if (row.size() != n) throw Error(Errc::dimension_mismatch, "distance table must be n x n");
    } else {
      table.assign(n, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t c = 0; c < dim; ++c) s += (points[i][c] - points[j][c]) * (points[i][c] - points[j][c]);
          table[i][j] = std::sqrt(s);
        }
    }
    constexpr double tol = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
      if (table[i][i] != 0.0) throw Error(Errc::invalid_argument, "distance table needs a zero diagonal");
      for (std::size_t j = 0; j < n; ++j) {
        if (table[i][j] < 0.0 || table[i][j] != table[j][i])
          throw Error(Errc::invalid_argument, "distance table must be symmetric and nonnegative");
        if (i != j && table[i][j] == 0.0)
          throw Error(Errc::invalid_argument, "distinct points need positive distance");
        for (std::size_t k = 0; k < n; ++k)
          if (table[i][k] > table[i][j] + table[j][k] + tol)
            throw Error(Errc::invalid_argument, "distance table violates the triangle inequality");
      }
    }
    DomainSpec d;
    d.kind_ = DomainKind::finite_set;
    d.points_ = std::move(points);
    d.table_ = std::move(table);
    d.finish(r0, beta);
    return d;
  }

  DomainKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept {
    return kind_ == DomainKind::box ? lower_.size() : points_.front().size();
  }
  double r0() const noexcept { return r0_; }
  double beta() const noexcept { return beta_; }
  double diameter() const noexcept { return diameter_; }
  const Point& lower() const noexcept { return lower_; }
  const Point& upper() const noexcept { return upper_; }
  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<std::vector<double>>& distances() const noexcept { return table_; }

  /// Radius of the scale-k base ball.
  double radius(int k) const { return r0_ * std::pow(beta_, k); }

  std::optional<std::size_t> index_of(std::span<const double> x) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (std::equal(x.begin(), x.end(), points_[i].begin(), points_[i].end())) return i;
    return std::nullopt;
  }

  bool contains(std::span<const double> x) const {
    if (x.size() != dimension()) return false;
    if (kind_ == DomainKind::finite_set) return index_of(x).has_value();
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!(x[j] >= lower_[j] && x[j] <= upper_[j])) return false;
    return true;
  }

  /// Domain metric. Box: Chebyshev distance. Finite set: table lookup
  /// (both points must be members).
  double distance(std::span<const double> a, std::span<const double> b) const {
    if (a.size() != dimension() || b.size() != dimension())
      throw Error(Errc::dimension_mismatch, "point dimension differs from domain dimension");
    if (kind_ == DomainKind::box) {
      double d = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
      return d;
    }
    auto ia = index_of(a), ib = index_of(b);
    if (!ia || !ib) throw Error(Errc::point_outside_domain, "finite-set distance needs member points");
    return table_[*ia][*ib];
  }

 private:
  DomainSpec() = default;

  void finish(std::optional<double> r0, double beta) {
    if (kind_ == DomainKind::box) {
      diameter_ = 0.0;
      for (std::size_t j = 0; j < lower_.size(); ++j) diameter_ = std::max(diameter_, upper_[j] - lower_[j]);
    } else {
      diameter_ = 0.0;
      for (const auto& row : table_)
        for (double v : row) diameter_ = std::max(diameter_, v);
    }
    r0_ = r0 ? *r0 : diameter_ / 4.0;
    beta_ = beta;
    if (!(r0_ > 0.0)) throw Error(Errc::invalid_argument, "base radius r0 must be > 0");
    if (!(beta_ > 0.0 && beta_ < 1.0)) throw Error(Errc::invalid_argument, "shrink factor must lie in (0,1)");
  }

  DomainKind kind_ = DomainKind::box;
  Point lower_, upper_;
  std::vector<Point> points_;
  std::vector<std::vector<double>> table_;
  double r0_ = 0.0;
  double beta_ = 0.5;
  double diameter_ = 0.0;
};

/// Closed ball of radius `radius` about `center`, intersected with the domain.
/// Carries everything needed for sampling and membership tests.
struct Region {
  DomainKind kind = DomainKind::box;
  Point center;
  double radius = 0.0;
  int scale = 0;
  // box: clipped corners
  Point lower, upper;
  // finite set: members of the closed ball with their distance to the center
  std::vector<Point> members;
  std::vector<double> member_distance;

  bool contains(std::span<const double> x) const {
    if (x.size() != center.size()) return false;
    if (kind == DomainKind::box) {
      for (std::size_t j = 0; j < x.size(); ++j)
        if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
      return true;
    }
    for (const auto& m : members)
      if (std::equal(x.begin(), x.end(), m.begin(), m.end())) return true;
    return false;
  }

  /// Membership in the open ball (strict radius inequality) within the domain.
  bool contains_open(std::span<const double> x) const {
    if (x.size() != center.size()) return false;
    if (kind == DomainKind::box) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
        if (!(std::abs(x[j] - center[j]) < radius)) return false;
      }
      return true;
    }
    for (std::size_t i = 0; i < members.size(); ++i)
      if (std::equal(x.begin(), x.end(), members[i].begin(), members[i].end()))
        return member_distance[i] < radius;
    return false;
  }
};

/// Ball of arbitrary radius about a domain point.
inline Region ball(const DomainSpec& domain, std::span<const double> a, double radius, int scale = 0) {
  if (!domain.contains(a)) throw Error(Errc::point_outside_domain, "ball center must lie in the domain");
  if (!(radius >= 0.0)) throw Error(Errc::invalid_argument, "ball radius must be >= 0");
  Region r;
  r.kind = domain.kind();
  r.center.assign(a.begin(), a.end());
  r.radius = radius;
  r.scale = scale;
  if (domain.kind() == DomainKind::box) {
    r.lower.resize(a.size());
    r.upper.resize(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      r.lower[j] = std::max(domain.lower()[j], a[j] - radius);
      r.upper[j] = std::min(domain.upper()[j], a[j] + radius);
    }
  } else {
    const std::size_t ia = *domain.index_of(a);
    for (std::size_t i = 0; i < domain.points().size(); ++i) {
      const double d = domain.distances()[ia][i];
      if (d <= radius) {
        r.members.push_back(domain.points()[i]);
        r.member_distance.push_back(d);
      }
    }
  }
  return r;
}

/// Scale-k base neighborhood of a: closed ball of radius r0 * beta^k within the domain.
inline Region neighborhood(const DomainSpec& domain, std::span<const double> a, int k) {
  if (k < 0) throw Error(Errc::invalid_argument, "scale index must be >= 0");
  return ball(domain, a, domain.radius(k), k);
}

/// Whole domain as a region (center of the box, half the largest extent).
inline Region whole_domain(const DomainSpec& domain) {
  if (domain.kind() == DomainKind::finite_set) {
    return ball(domain, domain.points().front(), domain.diameter(), 0);
  }
  Point c(domain.dimension());
  double r = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    c[j] = 0.5 * (domain.lower()[j] + domain.upper()[j]);
    r = std::max(r, 0.5 * (domain.upper()[j] - domain.lower()[j]));
  }
  return ball(domain, c, r, 0);
}

/// Grid spacing used by sample_region at the given depth.
inline double sample_mesh(const Region& region, int depth) {
  if (region.kind == DomainKind::finite_set) return 0.0;
  return std::ldexp(region.radius, -depth);
}

/// Deterministic sample of a region. Box: per-axis regular grid of spacing
/// radius / 2^depth through the center, restricted to the region, plus the
/// clipped extremes; tensor product in lexicographic order. Finite set: every
/// member of the ball in domain order.
inline std::vector<Point> sample_region(const Region& region, int depth) {
  if (depth < 0) throw Error(Errc::invalid_argument, "sampling depth must be >= 0");
  if (region.kind == DomainKind::finite_set) return region.members;

  const std::size_t dim = region.center.size();
  const double h = sample_mesh(region, depth);
  const long steps = 1L << depth;
  std::vector<std::vector<double>> axes(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    auto& ax = axes[j];
    ax.push_back(region.lower[j]);
    ax.push_back(region.upper[j]);
    if (h > 0.0) {
      for (long t = -steps; t <= steps; ++t) {
        const double x = region.center[j] + static_cast<double>(t) * h;
        if (x >= region.lower[j] && x <= region.upper[j]) ax.push_back(x);
      }
    } else {
      ax.push_back(region.center[j]);
    }
    std::sort(ax.begin(), ax.end());
    ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
  }

  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.size();
  std::vector<Point> out;
  out.reserve(total);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t c = 0; c < total; ++c) {
    Point p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = axes[j][idx[j]];
    out.push_back(std::move(p));
    for (std::size_t j = dim; j-- > 0;) {
      if (++idx[j] < axes[j].size()) break;
      idx[j] = 0;
    }
  }
  return out;
}

/// One member of a semidistance family on R^m.
struct SemidistanceMember {
  enum class Kind { sup_norm, euclidean, projection, linear };
  Kind kind = Kind::sup_norm;
  std::size_t index = 0;        // projection coordinate
  std::vector<double> weights;  // linear functional
  std::string name;
};

inline const char* member_kind_name(SemidistanceMember::Kind k) {
  switch (k) {
    case SemidistanceMember::Kind::sup_norm: return "sup-norm";
    case SemidistanceMember::Kind::euclidean: return "euclidean";
    case SemidistanceMember::Kind::projection: return "projection";
    case SemidistanceMember::Kind::linear: return "linear";
  }
  return "?";
}

/// Finite family of semidistances d_i on the codomain R^m.
class SemidistanceFamily {
 public:
  SemidistanceFamily(std::size_t dim, std::vector<SemidistanceMember> members)
      : dim_(dim), members_(std::move(members)) {
    if (dim_ == 0) throw Error(Errc::invalid_argument, "codomain dimension must be >= 1");
    if (members_.empty()) throw Error(Errc::invalid_argument, "semidistance family needs members");
    for (auto& m : members_) {
      if (m.kind == SemidistanceMember::Kind::projection && m.index >= dim_)
        throw Error(Errc::index_out_of_range, "projection coordinate exceeds codomain dimension");
      if (m.kind == SemidistanceMember::Kind::linear && m.weights.size() != dim_)
        throw Error(Errc::dimension_mismatch, "linear functional weights must match codomain dimension");
      if (m.name.empty()) {
        m.name = member_kind_name(m.kind);
        if (m.kind == SemidistanceMember::Kind::projection) m.name += "(" + std::to_string(m.index) + ")";
      }
    }
  }

  static SemidistanceFamily sup_norm(std::size_t dim = 1) {
    return SemidistanceFamily(dim, {SemidistanceMember{}});
  }

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<SemidistanceMember>& members() const noexcept { return members_; }
  const SemidistanceMember& member(std::size_t i) const {
    if (i >= members_.size()) throw Error(Errc::index_out_of_range, "semidistance member index");
    return members_[i];
  }

  double operator()(std::size_t i, std::span<const double> u, std::span<const double> v) const {
    if (i >= members_.size()) throw Error(Errc::index_out_of_range, "semidistance member index");
    if (u.size() != dim_ || v.size() != dim_)
      throw Error(Errc::dimension_mismatch, "value dimension differs from codomain dimension");
    return eval(i, u, v);
  }

  /// Unchecked evaluation for hot loops; caller guarantees index and sizes.
  double eval(std::size_t i, std::span<const double> u, std::span<const double> v) const noexcept {
    const auto& m = members_[i];
    switch (m.kind) {
      case SemidistanceMember::Kind::sup_norm: {
        double d = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) d = std::max(d, std::abs(u[j] - v[j]));
        return d;
      }
      case SemidistanceMember::Kind::euclidean: {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) s += (u[j] - v[j]) * (u[j] - v[j]);
        return std::sqrt(s);
      }
      case SemidistanceMember::Kind::projection:
        return std::abs(u[m.index] - v[m.index]);
      case SemidistanceMember::Kind::linear: {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) s += m.weights[j] * (u[j] - v[j]);
        return std::abs(s);
      }
    }
    return 0.0;
  }

  /// True when d_i(u, 0) is a norm on R^m.
  bool is_norm(std::size_t i) const {
    const auto& m = member(i);
    switch (m.kind) {
      case SemidistanceMember::Kind::sup_norm:
      case SemidistanceMember::Kind::euclidean: return true;
      case SemidistanceMember::Kind::projection: return dim_ == 1;
      case SemidistanceMember::Kind::linear: return dim_ == 1 && m.weights[0] != 0.0;
    }
    return false;
  }

  std::optional<std::size_t> first_norm() const {
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (is_norm(i)) return i;
    return std::nullopt;
  }

  /// Scalar image used for oscillation: the semidistance equals |phi(u) - phi(v)|
  /// for projection / linear members, so extremes of phi give the sup over pairs.
  bool is_scalar_projection(std::size_t i) const {
    const auto k = member(i).kind;
    return k == SemidistanceMember::Kind::projection || k == SemidistanceMember::Kind::linear;
  }

 private:
  std::size_t dim_;
  std::vector<SemidistanceMember> members_;
};

/// Evaluable function E -> R^m. The evaluator writes into a caller buffer.
/// An optional Lipschitz bound certifies d_i(f(x), f(y)) <= L * dist(x, y)
/// for every family member.
class FnObject {
 public:
  using Evaluator = std::function<void(std::span<const double>, std::span<double>)>;

  FnObject(std::string name, std::size_t codomain_dim, Evaluator eval,
           std::optional<double> lipschitz = std::nullopt)
      : name_(std::move(name)), dim_(codomain_dim), eval_(std::move(eval)), lipschitz_(lipschitz) {
    if (dim_ == 0) throw Error(Errc::invalid_argument, "codomain dimension must be >= 1");
    if (!eval_) throw Error(Errc::invalid_argument, "function needs an evaluator");
    if (lipschitz_ && !(*lipschitz_ >= 0.0)) throw Error(Errc::invalid_argument, "Lipschitz bound must be >= 0");
  }

  /// Scalar function of the first coordinate.
  template <class F>
  static FnObject scalar(std::string name, F f, std::optional<double> lipschitz = std::nullopt) {
    return FnObject(
        std::move(name), 1,
        [f = std::move(f)](std::span<const double> x, std::span<double> out) { out[0] = f(x[0]); },
        lipschitz);
  }

  static FnObject constant(std::string name, Value c) {
    const std::size_t m = c.size();
    return FnObject(
        std::move(name), m,
        [c = std::move(c)](std::span<const double>, std::span<double> out) {
          std::copy(c.begin(), c.end(), out.begin());
        },
        0.0);
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t codomain_dim() const noexcept { return dim_; }
  std::optional<double> lipschitz_bound() const noexcept { return lipschitz_; }

  void eval_into(std::span<const double> x, std::span<double> out) const {
    try {
      eval_(x, out);
    } catch (const EvaluationError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvaluationError(name_, Point(x.begin(), x.end()), e.what());
    }
  }

  Value operator()(std::span<const double> x) const {
    Value out(dim_);
    eval_into(x, out);
    return out;
  }
  Value operator()(std::initializer_list<double> x) const {
    return (*this)(std::span<const double>(x.begin(), x.size()));
  }

 private:
  std::string name_;
  std::size_t dim_;
  Evaluator eval_;
  std::optional<double> lipschitz_;
};

/// Indexed family n -> f_n for first <= n <= horizon. An optional range
/// evaluator computes all f_n(x), n in [first, hi], in one pass; it must agree
/// bitwise with evaluating the generated members one at a time.
class FnSequence {
 public:
  using Generator = std::function<FnObject(std::size_t)>;
  using RangeEvaluator = std::function<void(std::span<const double> x, std::size_t hi, std::span<double> out)>;

  FnSequence(std::string name, std::size_t first, std::size_t horizon, std::size_t codomain_dim,
             Generator gen, RangeEvaluator range = {})
      : name_(std::move(name)),
        first_(first),
        horizon_(horizon),
        dim_(codomain_dim),
        gen_(std::move(gen)),
        range_(std::move(range)) {
    if (horizon_ < first_) throw Error(Errc::invalid_argument, "sequence horizon precedes first index");
    if (!gen_) throw Error(Errc::invalid_argument, "sequence needs a generator");
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t first() const noexcept { return first_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return horizon_ - first_ + 1; }
  std::size_t codomain_dim() const noexcept { return dim_; }
  bool has_range_evaluator() const noexcept { return static_cast<bool>(range_); }

  FnObject at(std::size_t n) const {
    if (n < first_ || n > horizon_) throw Error(Errc::index_out_of_range, "sequence index outside [first, horizon]");
    return gen_(n);
  }

  FnSequence truncated(std::size_t horizon) const {
    if (horizon < first_ || horizon > horizon_)
      throw Error(Errc::horizon_mismatch, "truncation horizon outside the sequence range");
    FnSequence s = *this;
    s.horizon_ = horizon;
    return s;
  }

  FnSequence with_horizon(std::size_t horizon) const {
    if (horizon < first_) throw Error(Errc::horizon_mismatch, "horizon precedes first index");
    FnSequence s = *this;
    s.horizon_ = horizon;
    return s;
  }

  const RangeEvaluator& range_evaluator() const noexcept { return range_; }
  const Generator& generator() const noexcept { return gen_; }

 private:
  std::string name_;
  std::size_t first_, horizon_, dim_;
  Generator gen_;
  RangeEvaluator range_;
};

/// Evaluates every member of a sequence at a point. Members are generated once.
class SequenceTable {
 public:
  SequenceTable(const FnSequence& seq, std::size_t hi) : seq_(seq), hi_(hi) {
    if (hi < seq.first() || hi > seq.horizon())
      throw Error(Errc::index_out_of_range, "sequence table upper index");
    if (!seq.has_range_evaluator()) {
      members_.reserve(hi - seq.first() + 1);
      for (std::size_t n = seq.first(); n <= hi; ++n) members_.push_back(seq.at(n));
    }
  }

  std::size_t first() const noexcept { return seq_.first(); }
  std::size_t hi() const noexcept { return hi_; }
  std::size_t count() const noexcept { return hi_ - seq_.first() + 1; }
  std::size_t dim() const noexcept { return seq_.codomain_dim(); }

  /// out[(n - first) * m + j] = f_n(x)_j for n in [first, hi].
  void values(std::span<const double> x, std::span<double> out) const {
    const std::size_t m = dim();
    if (seq_.has_range_evaluator()) {
      try {
        seq_.range_evaluator()(x, hi_, out);
      } catch (const EvaluationError&) {
        throw;
      } catch (const std::exception& e) {
        throw EvaluationError(seq_.name(), Point(x.begin(), x.end()), e.what());
      }
      return;
    }
    for (std::size_t i = 0; i < members_.size(); ++i) members_[i].eval_into(x, out.subspan(i * m, m));
  }

 private:
  FnSequence seq_;
  std::size_t hi_;
  std::vector<FnObject> members_;
};

/// Partial sums S_n = sum_{k=first}^{n} f_k of a term sequence.
inline FnSequence partial_sums(const FnSequence& terms, std::string name = {}) {
  if (name.empty()) name = "partial-sums(" + terms.name() + ")";
  const std::size_t m = terms.codomain_dim();
  auto table = std::make_shared<SequenceTable>(terms, terms.horizon());
  std::vector<std::optional<double>> lips;
  {
    std::optional<double> acc = 0.0;
    for (std::size_t n = terms.first(); n <= terms.horizon(); ++n) {
      const auto l = terms.at(n).lipschitz_bound();
      acc = (acc && l) ? std::optional<double>(*acc + *l) : std::nullopt;
      lips.push_back(acc);
    }
  }
  auto lip_ptr = std::make_shared<std::vector<std::optional<double>>>(std::move(lips));
  const std::size_t first = terms.first();

  auto range = [table, m, first](std::span<const double> x, std::size_t hi, std::span<double> out) {
    std::vector<double> buf(table->count() * m);
    table->values(x, buf);
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t n = first; n <= hi; ++n) {
        s += buf[(n - first) * m + j];
        out[(n - first) * m + j] = s;
      }
    }
  };
  auto gen = [table, m, first, lip_ptr, name](std::size_t n) {
    return FnObject(
        name + "[" + std::to_string(n) + "]", m,
        [table, m, first, n](std::span<const double> x, std::span<double> out) {
          std::vector<double> buf(table->count() * m);
          table->values(x, buf);
          for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = first; k <= n; ++k) s += buf[(k - first) * m + j];
            out[j] = s;
          }
        },
        (*lip_ptr)[n - first]);
  };
  return FnSequence(std::move(name), first, terms.horizon(), m, std::move(gen), std::move(range));
}

/// Finite probe set A, deduplicated in first-occurrence order.
class ProbeSet {
 public:
  ProbeSet() = default;
  ProbeSet(const DomainSpec& domain, const std::vector<Point>& points) {
    for (const auto& p : points) {
      if (!domain.contains(p)) throw Error(Errc::point_outside_domain, "probe outside the domain");
      if (std::find(points_.begin(), points_.end(), p) == points_.end()) points_.push_back(p);
    }
  }

  const std::vector<Point>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

 private:
  std::vector<Point> points_;
};

/// Domain plus codomain family: the ambient F(E, F).
struct Space {
  DomainSpec domain;
  SemidistanceFamily family;
};

}  // namespace vconv
