#pragma once

// Built-in function families. Sequences come with a default domain, index
// range and (when it exists) the name of their pointwise limit.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "vconv/convergence.hpp"
#include "vconv/error.hpp"
#include "vconv/space.hpp"

namespace vconv {

using CorpusParams = std::map<std::string, double>;

struct CorpusParam {
  std::string name;
  double value = 0.0;
  std::string description;
};

enum class CorpusKind { sequence, function, weights };

inline const char* corpus_kind_name(CorpusKind k) {
  switch (k) {
    case CorpusKind::sequence: return "sequence";
    case CorpusKind::function: return "function";
    case CorpusKind::weights: return "weights";
  }
  return "?";
}

struct CorpusEntry {
  std::string name;
  CorpusKind kind = CorpusKind::function;
  std::string description;
  std::vector<std::string> phenomena;
  std::vector<CorpusParam> params;
  DomainSpec domain = DomainSpec::box({0.0}, {1.0});
  std::size_t first = 1, horizon = 200;
  std::string limit;    // corpus function name of the pointwise limit, if any
  std::string weights;  // companion weight sequence for Abel summation
  std::function<FnSequence(const CorpusParams&)> make_sequence;
  std::function<FnObject(const CorpusParams&)> make_function;

  /// Parameters with defaults filled in; unknown names are rejected.
  CorpusParams resolve(const CorpusParams& given) const {
    CorpusParams out;
    for (const auto& p : params) out[p.name] = p.value;
    for (const auto& [k, v] : given) {
      if (!out.contains(k)) throw Error(Errc::invalid_argument, "corpus entry '" + name + "' has no parameter '" + k + "'");
      out[k] = v;
    }
    return out;
  }

  FnSequence sequence(const CorpusParams& p = {}) const {
    if (!make_sequence) throw Error(Errc::invalid_argument, "corpus entry '" + name + "' is not a sequence");
    return make_sequence(resolve(p));
  }

  FnObject function(const CorpusParams& p = {}) const {
    if (!make_function) throw Error(Errc::invalid_argument, "corpus entry '" + name + "' is not a single function");
    return make_function(resolve(p));
  }

  FnObject member(std::size_t n, const CorpusParams& p = {}) const { return sequence(p).at(n); }
};

namespace detail {

inline FnSequence scalar_sequence(std::string name, std::size_t first, std::size_t horizon,
                                  std::function<double(std::size_t, double)> f,
                                  std::function<std::optional<double>(std::size_t)> lip) {
  auto gen = [name, f, lip](std::size_t n) {
    return FnObject(
        name + "[" + std::to_string(n) + "]", 1,
        [f, n](std::span<const double> x, std::span<double> out) { out[0] = f(n, x[0]); }, lip(n));
  };
  auto range = [f, first](std::span<const double> x, std::size_t hi, std::span<double> out) {
    for (std::size_t n = first; n <= hi; ++n) out[n - first] = f(n, x[0]);
  };
  return FnSequence(std::move(name), first, horizon, 1, std::move(gen), std::move(range));
}

inline double power(double x, std::size_t n) { return std::pow(x, static_cast<double>(n)); }

inline CorpusEntry seq_entry(std::string name, std::string desc, std::vector<std::string> phen, std::size_t horizon,
                             std::string limit, std::function<FnSequence(const CorpusParams&)> make,
                             std::vector<CorpusParam> params = {}) {
  CorpusEntry e;
  e.name = std::move(name);
  e.kind = CorpusKind::sequence;
  e.description = std::move(desc);
  e.phenomena = std::move(phen);
  e.horizon = horizon;
  e.limit = std::move(limit);
  e.make_sequence = std::move(make);
  e.params = std::move(params);
  return e;
}

inline CorpusEntry fn_entry(std::string name, std::string desc, std::vector<std::string> phen,
                            std::function<double(double)> f, std::optional<double> lip,
                            std::vector<CorpusParam> params = {},
                            std::function<FnObject(const CorpusParams&)> make = {}) {
  CorpusEntry e;
  e.name = name;
  e.kind = CorpusKind::function;
  e.description = std::move(desc);
  e.phenomena = std::move(phen);
  e.params = std::move(params);
  e.first = e.horizon = 0;
  if (make)
    e.make_function = std::move(make);
  else
    e.make_function = [name, f, lip](const CorpusParams&) { return FnObject::scalar(name, f, lip); };
  return e;
}

inline std::vector<CorpusEntry> build_corpus() {
  std::vector<CorpusEntry> c;

  c.push_back(seq_entry(
      "power-sequence", "f_n(x) = x^n on [0, 1]",
      {"pointwise limit is discontinuous at 1", "V-convergence fails at probe 1 with delta pinned at 1",
       "Cauchy criterion fails at 1"},
      2000, "power-limit", [](const CorpusParams&) {
        return scalar_sequence("power-sequence", 1, 2000, [](std::size_t n, double x) { return power(x, n); },
                               [](std::size_t n) { return std::optional<double>(static_cast<double>(n)); });
      }));

  c.push_back(seq_entry(
      "moving-bump", "tent of height h, radius 1/(2n), centered at 1/n",
      {"pointwise and V-convergence to 0 at probe 0", "locally uniform convergence fails at 0",
       "limits interchange along a_n = 1/n"},
      200, "zero",
      [](const CorpusParams& p) {
        const double h = p.at("height");
        return scalar_sequence(
            "moving-bump", 1, 200,
            [h](std::size_t n, double x) {
              const double nn = static_cast<double>(n);
              return h * std::max(0.0, 1.0 - std::abs(x - 1.0 / nn) * 2.0 * nn);
            },
            [h](std::size_t n) { return std::optional<double>(2.0 * std::abs(h) * static_cast<double>(n)); });
      },
      {{"height", 1.0, "peak value"}}));

  c.push_back(seq_entry(
      "shrinking-indicator", "indicator of the open interval (0, 1/n)",
      {"pointwise convergence to 0 everywhere", "V-convergence fails at probe 0"}, 2000, "zero",
      [](const CorpusParams&) {
        return scalar_sequence(
            "shrinking-indicator", 1, 2000,
            [](std::size_t n, double x) { return (x > 0.0 && x < 1.0 / static_cast<double>(n)) ? 1.0 : 0.0; },
            [](std::size_t) { return std::nullopt; });
      }));

  c.push_back(seq_entry(
      "damped-oscillation", "f_n(x) = sin(n x) / n",
      {"uniform convergence to 0", "Cauchy criterion holds with the largest ball"}, 2000, "zero",
      [](const CorpusParams&) {
        return scalar_sequence(
            "damped-oscillation", 1, 2000,
            [](std::size_t n, double x) {
              const double nn = static_cast<double>(n);
              return std::sin(nn * x) / nn;
            },
            [](std::size_t) { return std::optional<double>(1.0); });
      }));

  c.push_back(seq_entry(
      "damped-power-series", "series terms f_n(x) = x^n / n^s on [0, 1]",
      {"normally convergent series", "partial sums V-converge"}, 200, "zero",
      [](const CorpusParams& p) {
        const double s = p.at("exponent");
        return scalar_sequence(
            "damped-power-series", 1, 200,
            [s](std::size_t n, double x) { return power(x, n) / std::pow(static_cast<double>(n), s); },
            [s](std::size_t n) {
              const double nn = static_cast<double>(n);
              return std::optional<double>(nn / std::pow(nn, s));
            });
      },
      {{"exponent", 2.0, "damping exponent s"}}));

  {
    auto e = seq_entry(
        "dirichlet-kernel", "series terms f_n(x) = sin(n x) on [0.5, 5.5], Abel weights 1/n",
        {"bounded partial sums, harmonic weights", "Abel sum equals (pi - x) / 2"}, 2000, "",
        [](const CorpusParams&) {
          return scalar_sequence(
              "dirichlet-kernel", 1, 2000, [](std::size_t n, double x) { return std::sin(static_cast<double>(n) * x); },
              [](std::size_t n) { return std::optional<double>(static_cast<double>(n)); });
        });
    e.domain = DomainSpec::box({0.5}, {5.5});
    e.weights = "harmonic";
    c.push_back(std::move(e));
  }

  c.push_back(seq_entry(
      "alternating-unit", "f_n(x) = (-1)^n", {"no pointwise limit", "Cauchy criterion fails everywhere"}, 200, "",
      [](const CorpusParams&) {
        return scalar_sequence(
            "alternating-unit", 1, 200, [](std::size_t n, double) { return n % 2 == 0 ? 1.0 : -1.0; },
            [](std::size_t) { return std::optional<double>(0.0); });
      }));

  c.push_back(seq_entry(
      "affine-perturbation", "f_n(x) = x + x / n", {"uniform convergence to the identity"}, 200, "identity",
      [](const CorpusParams&) {
        return scalar_sequence(
            "affine-perturbation", 1, 200, [](std::size_t n, double x) { return x + x / static_cast<double>(n); },
            [](std::size_t n) { return std::optional<double>(1.0 + 1.0 / static_cast<double>(n)); });
      }));

  c.push_back(seq_entry("zero-sequence", "f_n = 0", {"trivially uniform"}, 200, "zero", [](const CorpusParams&) {
    return scalar_sequence(
        "zero-sequence", 1, 200, [](std::size_t, double) { return 0.0; },
        [](std::size_t) { return std::optional<double>(0.0); });
  }));

  {
    CorpusEntry e;
    e.name = "harmonic";
    e.kind = CorpusKind::weights;
    e.description = "scalar weights eps_n = 1/n";
    e.phenomena = {"decreasing to 0 with bounded variation"};
    e.horizon = 2000;
    e.make_sequence = [](const CorpusParams&) {
      return scalar_sequence(
          "harmonic", 1, 2000, [](std::size_t n, double) { return 1.0 / static_cast<double>(n); },
          [](std::size_t) { return std::optional<double>(0.0); });
    };
    c.push_back(std::move(e));
  }
  {
    CorpusEntry e;
    e.name = "unit-weights";
    e.kind = CorpusKind::weights;
    e.description = "scalar weights eps_n = 1";
    e.phenomena = {"no decay: the Abel hypotheses fail"};
    e.horizon = 2000;
    e.make_sequence = [](const CorpusParams&) {
      return scalar_sequence(
          "unit-weights", 1, 2000, [](std::size_t, double) { return 1.0; },
          [](std::size_t) { return std::optional<double>(0.0); });
    };
    c.push_back(std::move(e));
  }

  const auto cont = std::vector<std::string>{"continuous"};
  c.push_back(fn_entry("zero", "0", cont, [](double) { return 0.0; }, 0.0));
  c.push_back(fn_entry("one", "1", cont, [](double) { return 1.0; }, 0.0));
  c.push_back(fn_entry("identity", "x", cont, [](double x) { return x; }, 1.0));
  c.push_back(fn_entry("square", "x^2 on [0, 1]", cont, [](double x) { return x * x; }, 2.0));
  c.push_back(fn_entry("cube", "x^3 on [0, 1]", cont, [](double x) { return x * x * x; }, 3.0));
  c.push_back(fn_entry("sin10", "sin(10 x)", cont, [](double x) { return std::sin(10.0 * x); }, 10.0));
  c.push_back(fn_entry("cos3", "cos(3 x)", cont, [](double x) { return std::cos(3.0 * x); }, 3.0));
  c.push_back(fn_entry("exp", "e^x on [0, 1]", cont, [](double x) { return std::exp(x); }, std::numbers::e));
  c.push_back(fn_entry("abs-half", "|x - 1/2|", cont, [](double x) { return std::abs(x - 0.5); }, 1.0));
  c.push_back(fn_entry("tent", "max(0, 1 - 4|x - 1/2|)", cont,
                       [](double x) { return std::max(0.0, 1.0 - 4.0 * std::abs(x - 0.5)); }, 4.0));
  c.push_back(fn_entry("sqrt", "sqrt(x) on [0, 1]", {"continuous, not Lipschitz at 0"},
                       [](double x) { return std::sqrt(std::max(x, 0.0)); }, std::nullopt));
  c.push_back(fn_entry("power-limit", "1 at x = 1, 0 elsewhere", {"pointwise limit of x^n", "discontinuous at 1"},
                       [](double x) { return x == 1.0 ? 1.0 : 0.0; }, std::nullopt));
  c.push_back(fn_entry("step", "0 for x < 1/2, 1 for x >= 1/2", {"unit jump at 1/2", "upper semicontinuous at 1/2, not lower"},
                       [](double x) { return x < 0.5 ? 0.0 : 1.0; }, std::nullopt));
  c.push_back(fn_entry("usc-step", "1 for x <= 1/2, 0 for x > 1/2", {"unit jump at 1/2", "upper semicontinuous at 1/2"},
                       [](double x) { return x <= 0.5 ? 1.0 : 0.0; }, std::nullopt));
  c.push_back(fn_entry("staircase", "floor(4 x) / 4 + x / 4", {"regulated: jumps at 1/4, 1/2, 3/4"},
                       [](double x) { return std::floor(4.0 * x) / 4.0 + x / 4.0; }, std::nullopt));
  c.push_back(fn_entry("indicator-small", "indicator of [0, 0.1)", {"jump at 0.1"},
                       [](double x) { return x < 0.1 ? 1.0 : 0.0; }, std::nullopt));
  return c;
}

}  // namespace detail

inline const std::vector<CorpusEntry>& corpus_families() {
  static const std::vector<CorpusEntry> families = detail::build_corpus();
  return families;
}

inline std::vector<std::string> corpus_names() {
  std::vector<std::string> out;
  for (const auto& e : corpus_families()) out.push_back(e.name);
  return out;
}

inline const CorpusEntry& corpus_lookup(std::string_view name) {
  for (const auto& e : corpus_families())
    if (e.name == name) return e;
  std::string list;
  for (const auto& n : corpus_names()) list += (list.empty() ? "" : ", ") + n;
  throw Error(Errc::unknown_corpus_name, "unknown corpus family '" + std::string(name) + "'; available: " + list);
}

/// Resolve a function reference: "name" for a single function, "name:n" for
/// the n-th member of a sequence.
inline FnObject corpus_function(std::string_view ref, const CorpusParams& params = {}) {
  const auto colon = ref.find(':');
  if (colon == std::string_view::npos) return corpus_lookup(ref).function(params);
  const auto& e = corpus_lookup(ref.substr(0, colon));
  const std::string idx(ref.substr(colon + 1));
  std::size_t pos = 0;
  std::size_t n = 0;
  try {
    n = std::stoul(idx, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != idx.size()) throw Error(Errc::invalid_argument, "bad member index in '" + std::string(ref) + "'");
  return e.member(n, params);
}

/// Named point sequences for the interchange check: "reciprocal" a_n = 1/n,
/// "one-minus-reciprocal" a_n = 1 - 1/n, "constant:c" a_n = c.
inline PointSequence point_sequence(std::string_view name, std::size_t last = 10000000) {
  if (last < 2) throw Error(Errc::invalid_argument, "point sequence needs at least two terms");
  PointSequence s;
  s.name = std::string(name);
  s.first = 1;
  s.last = last;
  if (name == "reciprocal") {
    s.at = [](std::size_t n) { return Point{1.0 / static_cast<double>(n)}; };
    s.limit = {0.0};
  } else if (name == "one-minus-reciprocal") {
    s.at = [](std::size_t n) { return Point{1.0 - 1.0 / static_cast<double>(n)}; };
    s.limit = {1.0};
  } else if (name.starts_with("constant:")) {
    double c = 0.0;
    try {
      c = std::stod(std::string(name.substr(9)));
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, "bad constant point sequence '" + std::string(name) + "'");
    }
    s.at = [c](std::size_t) { return Point{c}; };
    s.limit = {c};
  } else {
    throw Error(Errc::unknown_corpus_name, "unknown point sequence '" + std::string(name) +
                                               "'; available: reciprocal, one-minus-reciprocal, constant:<c>");
  }
  return s;
}

}  // namespace vconv
