#pragma once

// Pure-Circuit instances over the gate set {NOT, OR, PURIFY} with values
// {0, 1, bot}: text parsing, gate-satisfaction checking, and a brute-force
// solver for desk-scale instances.

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "finclear/gates.hpp"
#include "finclear/numeric.hpp"

namespace finclear {

enum class TruthValue { Zero, One, Bot };

inline std::string truth_name(TruthValue v) {
  switch (v) {
    case TruthValue::Zero: return "0";
    case TruthValue::One: return "1";
    case TruthValue::Bot: return "bot";
  }
  throw input_error("unknown truth value");
}

inline TruthValue truth_from_name(const std::string& s) {
  if (s == "0") return TruthValue::Zero;
  if (s == "1") return TruthValue::One;
  if (s == "bot" || s == "_" || s == "?") return TruthValue::Bot;
  throw input_error("unknown truth value '" + s + "' (expected 0, 1 or bot)");
}

struct Gate {
  GateKind kind;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

using Assignment = std::map<std::string, TruthValue>;

class PureCircuitInstance {
 public:
  void add_gate(GateKind kind, std::vector<std::string> inputs,
                std::vector<std::string> outputs) {
    if (static_cast<int>(inputs.size()) != gate_input_count(kind) ||
        static_cast<int>(outputs.size()) != gate_output_count(kind))
      throw input_error(gate_name(kind) + " gate has wrong arity");
    for (const std::string& v : inputs) check_identifier(v);
    for (const std::string& v : outputs) check_identifier(v);
    if (outputs.size() == 2 && outputs[0] == outputs[1])
      throw input_error("gate lists variable '" + outputs[0] +
                        "' as both of its outputs");
    for (const std::string& v : outputs)
      if (!output_vars_.insert(v).second)
        throw input_error("two gates share the output variable '" + v + "'");
    for (const std::string& v : inputs) variables_.insert(v);
    for (const std::string& v : outputs) variables_.insert(v);
    gates_.push_back(Gate{kind, std::move(inputs), std::move(outputs)});
  }

  // One gate per line: "NOT u w", "OR u v w", "PURIFY u v w" (PURIFY reads u
  // and writes v and w). '#' starts a comment.
  static PureCircuitInstance parse(const std::string& text) {
    PureCircuitInstance inst;
    std::istringstream lines(text);
    std::string line;
    long lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream words(line);
      std::vector<std::string> tok;
      for (std::string w; words >> w;) tok.push_back(w);
      if (tok.empty()) continue;
      try {
        const GateKind kind = gate_from_name(tok[0]);
        const int want = 1 + gate_input_count(kind) + gate_output_count(kind);
        if (static_cast<int>(tok.size()) != want)
          throw input_error(gate_name(kind) + " line needs " +
                            std::to_string(want - 1) + " variables");
        const int nin = gate_input_count(kind);
        inst.add_gate(kind,
                      std::vector<std::string>(tok.begin() + 1, tok.begin() + 1 + nin),
                      std::vector<std::string>(tok.begin() + 1 + nin, tok.end()));
      } catch (const input_error& e) {
        throw input_error("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    return inst;
  }

  const std::set<std::string>& variables() const { return variables_; }
  const std::vector<Gate>& gates() const { return gates_; }
  bool is_output_variable(const std::string& v) const {
    return output_vars_.count(v) > 0;
  }

 private:
  static void check_identifier(const std::string& v) {
    if (v.empty()) throw input_error("empty variable name");
    for (char c : v)
      if (c == ',' || std::isspace(static_cast<unsigned char>(c)))
        throw input_error("variable name '" + v + "' contains ',' or whitespace");
  }

  std::set<std::string> variables_;
  std::set<std::string> output_vars_;
  std::vector<Gate> gates_;
};

struct SatisfactionReport {
  bool ok = true;
  std::optional<std::size_t> violated_gate;  // index into gates()
  std::string detail;
};

namespace detail {

inline bool gate_satisfied(const Gate& g, const Assignment& x) {
  const auto val = [&x](const std::string& v) { return x.at(v); };
  switch (g.kind) {
    case GateKind::Not: {
      const TruthValue u = val(g.inputs[0]), w = val(g.outputs[0]);
      if (u == TruthValue::Zero) return w == TruthValue::One;
      if (u == TruthValue::One) return w == TruthValue::Zero;
      return true;
    }
    case GateKind::Or: {
      const TruthValue u = val(g.inputs[0]), v = val(g.inputs[1]);
      const TruthValue w = val(g.outputs[0]);
      if (u == TruthValue::One || v == TruthValue::One)
        return w == TruthValue::One;
      if (u == TruthValue::Zero && v == TruthValue::Zero)
        return w == TruthValue::Zero;
      return true;
    }
    case GateKind::Purify: {
      const TruthValue u = val(g.inputs[0]);
      const TruthValue v = val(g.outputs[0]), w = val(g.outputs[1]);
      if (u == TruthValue::Zero)
        return v == TruthValue::Zero && w == TruthValue::Zero;
      if (u == TruthValue::One)
        return v == TruthValue::One && w == TruthValue::One;
      return v != TruthValue::Bot || w != TruthValue::Bot;
    }
  }
  throw input_error("unknown gate kind");
}

}  // namespace detail

inline SatisfactionReport check_satisfies(const PureCircuitInstance& inst,
                                          const Assignment& x) {
  for (const std::string& v : inst.variables())
    if (!x.count(v))
      throw input_error("assignment is missing variable '" + v + "'");
  SatisfactionReport rep;
  for (std::size_t i = 0; i < inst.gates().size(); ++i) {
    const Gate& g = inst.gates()[i];
    if (!detail::gate_satisfied(g, x)) {
      rep.ok = false;
      rep.violated_gate = i;
      std::string vars;
      for (const std::string& v : g.inputs) vars += " " + v;
      for (const std::string& v : g.outputs) vars += " " + v;
      rep.detail = gate_name(g.kind) + vars;
      return rep;
    }
  }
  return rep;
}

// Exhaustive 3^|V| search in lexicographic order over the sorted variables
// with value order 0 < 1 < bot; returns the first satisfying assignment.
inline Assignment brute_force_solve(const PureCircuitInstance& inst) {
  constexpr std::size_t kMaxVars = 20;
  const std::vector<std::string> vars(inst.variables().begin(),
                                      inst.variables().end());
  if (vars.size() > kMaxVars)
    throw size_error("instance has " + std::to_string(vars.size()) +
                     " variables; exhaustive solve handles at most " +
                     std::to_string(kMaxVars));
  static constexpr TruthValue kOrder[3] = {TruthValue::Zero, TruthValue::One,
                                           TruthValue::Bot};
  std::vector<int> digit(vars.size(), 0);
  while (true) {
    Assignment x;
    for (std::size_t i = 0; i < vars.size(); ++i) x[vars[i]] = kOrder[digit[i]];
    if (check_satisfies(inst, x).ok) return x;
    std::size_t pos = vars.size();
    while (pos > 0 && digit[pos - 1] == 2) digit[--pos] = 0;
    if (pos == 0) break;
    ++digit[pos - 1];
  }
  throw property_error("no satisfying assignment exists");
}

}  // namespace finclear
