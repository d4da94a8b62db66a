#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vconv {

enum class Errc {
  point_outside_domain,
  index_out_of_range,
  dimension_mismatch,
  invalid_argument,
  horizon_mismatch,
  unknown_corpus_name,
  malformed_config,
  evaluation_failure,
  io_failure,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::point_outside_domain: return "point-outside-domain";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::horizon_mismatch: return "horizon-mismatch";
    case Errc::unknown_corpus_name: return "unknown-corpus-name";
    case Errc::malformed_config: return "malformed-config";
    case Errc::evaluation_failure: return "evaluation-failure";
    case Errc::io_failure: return "io-failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised when an evaluator throws; carries the offending point.
class EvaluationError : public Error {
 public:
  EvaluationError(std::string function, std::vector<double> point, const std::string& cause)
      : Error(Errc::evaluation_failure, describe(function, point, cause)),
        function_(std::move(function)),
        point_(std::move(point)) {}

  const std::string& function() const noexcept { return function_; }
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  static std::string describe(const std::string& fn, const std::vector<double>& x,
                              const std::string& cause) {
    std::ostringstream os;
    os << "evaluating '" << fn << "' at (";
    for (std::size_t j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x[j];
    os << "): " << cause;
    return os.str();
  }

  std::string function_;
  std::vector<double> point_;
};

}  // namespace vconv
