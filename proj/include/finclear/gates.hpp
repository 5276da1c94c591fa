#pragma once

#include <string>

#include "finclear/numeric.hpp"

namespace finclear {

enum class GateKind { Not, Or, Purify };

inline int gate_input_count(GateKind k) { return k == GateKind::Or ? 2 : 1; }
inline int gate_output_count(GateKind k) { return k == GateKind::Purify ? 2 : 1; }

inline std::string gate_name(GateKind k) {
  switch (k) {
    case GateKind::Not: return "NOT";
    case GateKind::Or: return "OR";
    case GateKind::Purify: return "PURIFY";
  }
  throw input_error("unknown gate kind");
}

inline GateKind gate_from_name(const std::string& s) {
  if (s == "NOT") return GateKind::Not;
  if (s == "OR") return GateKind::Or;
  if (s == "PURIFY") return GateKind::Purify;
  throw input_error("unknown gate '" + s + "'");
}

}  // namespace finclear
