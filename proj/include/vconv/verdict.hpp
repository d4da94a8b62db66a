#pragma once

namespace vconv {

/// Outcome of a horizon-bounded quantifier check. `holds` always means
/// "holds up to the configured horizons".
enum class Verdict { holds, fails, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// CLI exit-code contract: 0 holds, 1 fails, 2 inconclusive.
inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::holds: return 0;
    case Verdict::fails: return 1;
    case Verdict::inconclusive: return 2;
  }
  return 2;
}

}  // namespace vconv
