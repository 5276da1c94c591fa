#pragma once

// Compiles circuit gates into their gadget financial networks, stitches the
// per-gate copies into one network per instance, merges swap debtors into a
// single central debtor, and decodes recovery-rate vectors back to {0,1,bot}
// assignments through the band mapping.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "finclear/circuit.hpp"
#include "finclear/clearing.hpp"
#include "finclear/gadget_range.hpp"
#include "finclear/gates.hpp"
#include "finclear/network.hpp"
#include "finclear/numeric.hpp"

namespace finclear {

struct GadgetParams {
  Rational delta;
  Rational epsilon;
};

inline GadgetParams params_from_delta(const Rational& delta) {
  return GadgetParams{delta, epsilon_for_delta(delta)};
}

// Default parameters: the best rational pair in lowest terms near the real
// optimum delta = (sqrt(5)-1)/8, chosen so all notionals stay rational.
inline GadgetParams optimal_params() { return params_from_delta(Rational(2, 13)); }

namespace detail {

inline void require_params(const GadgetParams& p) {
  require_band_param(p.delta, "delta");
  require_band_param(p.epsilon, "epsilon");
}

inline std::string variable_bank_name(const std::string& var) { return "b_" + var; }

// A candidate outgoing debt of a variable bank: each gadget copy contributes
// one per variable role, and the merge rule keeps exactly one per variable.
struct VariableDebt {
  std::string sink;
  bool output_role;
};

inline void validate_gate(const Gate& g) {
  if (static_cast<int>(g.inputs.size()) != gate_input_count(g.kind) ||
      static_cast<int>(g.outputs.size()) != gate_output_count(g.kind))
    throw input_error(gate_name(g.kind) + " gate has wrong arity");
}

// Emits one gadget copy. Internal banks are named prefix + number; variable
// banks are created on demand with zero assets. Variable-bank debts are not
// added here; they are recorded in var_debts so the caller can apply the
// one-outgoing-arc rule across gadget copies.
inline void emit_gadget(FinancialNetwork& net, const Gate& gate,
                        const GadgetNotionals& n, const std::string& prefix,
                        std::map<std::string, std::vector<VariableDebt>>& var_debts) {
  validate_gate(gate);
  const auto internal = [&prefix](int k) { return prefix + std::to_string(k); };
  const auto variable = [&net](const std::string& var) {
    const std::string id = variable_bank_name(var);
    if (!net.has_bank(id)) net.add_bank(id, Rational(0));
    return id;
  };
  const auto reads = [&var_debts](const std::string& var, std::string sink) {
    var_debts[var].push_back(VariableDebt{std::move(sink), false});
  };
  const auto writes = [&var_debts](const std::string& var, std::string sink) {
    var_debts[var].push_back(VariableDebt{std::move(sink), true});
  };

  switch (gate.kind) {
    case GateKind::Not: {
      const std::string bu = variable(gate.inputs[0]);
      const std::string bw = variable(gate.outputs[0]);
      const Rational ext[] = {0, n.first_stage, 0, 0, n.inverter, 0, 0, 1, 0};
      for (int k = 1; k <= 9; ++k) net.add_bank(internal(k), ext[k - 1]);
      net.add_debt(internal(3), internal(4), 1);
      net.add_debt(internal(6), internal(7), 1);
      net.add_cds(internal(2), internal(3), bu, n.first_stage);
      net.add_cds(internal(5), internal(6), internal(3), n.inverter);
      net.add_cds(internal(8), bw, internal(6), 1);
      reads(gate.inputs[0], internal(1));
      writes(gate.outputs[0], internal(9));
      return;
    }
    case GateKind::Or: {
      const std::string bu = variable(gate.inputs[0]);
      const std::string bv = variable(gate.inputs[1]);
      const std::string bw = variable(gate.outputs[0]);
      const Rational ext[] = {0, n.first_stage, 0, 0, n.inverter, 0,
                              0, n.first_stage, 0, 0, n.inverter, 0, 0};
      for (int k = 1; k <= 13; ++k) net.add_bank(internal(k), ext[k - 1]);
      net.add_debt(internal(3), internal(4), 1);
      net.add_debt(internal(9), internal(10), 1);
      net.add_debt(internal(6), bw, 1);
      net.add_debt(internal(12), bw, 1);
      net.add_cds(internal(2), internal(3), bu, n.first_stage);
      net.add_cds(internal(5), internal(6), internal(3), n.inverter);
      net.add_cds(internal(8), internal(9), bv, n.first_stage);
      net.add_cds(internal(11), internal(12), internal(9), n.inverter);
      reads(gate.inputs[0], internal(1));
      reads(gate.inputs[1], internal(7));
      writes(gate.outputs[0], internal(13));
      return;
    }
    case GateKind::Purify: {
      const std::string bu = variable(gate.inputs[0]);
      const std::string bv = variable(gate.outputs[0]);
      const std::string bw = variable(gate.outputs[1]);
      const Rational ext[] = {0, n.first_stage, 0, 0, 2,
                              0, 0, n.splitter_low, n.splitter_high, 0};
      for (int k = 1; k <= 10; ++k) net.add_bank(internal(k), ext[k - 1]);
      net.add_debt(internal(3), internal(4), 1);
      net.add_debt(internal(6), internal(7), 1);
      net.add_cds(internal(2), internal(3), bu, n.first_stage);
      net.add_cds(internal(5), internal(6), bu, 2);
      net.add_cds(internal(8), bv, internal(3), n.splitter_low);
      net.add_cds(internal(9), bw, internal(6), n.splitter_high);
      reads(gate.inputs[0], internal(1));
      writes(gate.outputs[0], internal(10));
      writes(gate.outputs[1], internal(10));
      return;
    }
  }
  throw input_error("unknown gate kind");
}

}  // namespace detail

// One isolated gadget with every recorded variable debt in place.
inline FinancialNetwork compile_gate(const Gate& gate, const GadgetParams& params) {
  detail::require_params(params);
  FinancialNetwork net;
  const detail::GadgetNotionals n = detail::gadget_notionals(params.delta);
  std::map<std::string, std::vector<detail::VariableDebt>> var_debts;
  detail::emit_gadget(net, gate, n, "", var_debts);
  for (const auto& [var, entries] : var_debts)
    for (const detail::VariableDebt& d : entries)
      net.add_debt(detail::variable_bank_name(var), d.sink, 1);
  return net;
}

struct CompiledInstance {
  FinancialNetwork network;
  std::map<std::string, std::string> variable_bank;
};

// One gadget copy per gate (internals prefixed "g<index>."), one shared bank
// per variable. Each variable bank keeps a single outgoing debt of notional
// 1: the one from the gate writing the variable when there is such a gate,
// otherwise the first reading gate's. The sinks of the discarded debts end up
// with no contracts and are removed.
inline CompiledInstance compile_instance(const PureCircuitInstance& inst,
                                         const GadgetParams& params) {
  detail::require_params(params);
  CompiledInstance out;
  const detail::GadgetNotionals n = detail::gadget_notionals(params.delta);
  std::map<std::string, std::vector<detail::VariableDebt>> var_debts;
  for (std::size_t i = 0; i < inst.gates().size(); ++i)
    detail::emit_gadget(out.network, inst.gates()[i], n,
                        "g" + std::to_string(i) + ".", var_debts);
  for (const auto& [var, entries] : var_debts) {
    const detail::VariableDebt* keep = &entries.front();
    for (const detail::VariableDebt& d : entries)
      if (d.output_role) { keep = &d; break; }
    out.network.add_debt(detail::variable_bank_name(var), keep->sink, 1);
    for (const detail::VariableDebt& d : entries)
      if (&d != keep) out.network.remove_isolated_bank(d.sink);
  }
  for (const std::string& var : inst.variables())
    out.variable_bank[var] = detail::variable_bank_name(var);
  return out;
}

// Replaces all swap debtors by one pooled bank. Requires each debtor to do
// nothing but write swaps it can fully cover, so the pooled bank's rate is 1
// exactly when each original debtor's rate was.
inline FinancialNetwork merge_central_debtor(const FinancialNetwork& net) {
  std::set<std::string> debtors;
  for (const auto& [key, notional] : net.cdses()) debtors.insert(std::get<0>(key));
  if (debtors.empty()) return net;

  for (const std::string& d : debtors) {
    for (const auto& [key, notional] : net.debts())
      if (key.first == d || key.second == d)
        throw property_error("swap debtor '" + d + "' participates in a debt contract");
    for (const auto& [key, notional] : net.cdses()) {
      if (std::get<1>(key) == d)
        throw property_error("swap debtor '" + d + "' is also a swap creditor");
      if (std::get<2>(key) == d)
        throw property_error("swap debtor '" + d + "' is referenced by another swap");
    }
    if (net.assets_of(d) < net.cds_notional_total(d))
      throw property_error("swap debtor '" + d + "' cannot cover its notionals");
  }

  FinancialNetwork out;
  Rational pool = 0;
  for (const std::string& id : net.bank_ids()) {
    if (debtors.count(id))
      pool += net.assets_of(id);
    else
      out.add_bank(id, net.assets_of(id));
  }
  std::string ccd = "CCD";
  while (out.has_bank(ccd)) ccd += "_";
  out.add_bank(ccd, pool);
  for (const auto& [key, notional] : net.debts())
    out.add_debt(key.first, key.second, notional);
  for (const auto& [key, notional] : net.cdses())
    out.add_cds(ccd, std::get<1>(key), std::get<2>(key), notional);
  return out;
}

// Band decoding: rates at most 1/2-delta read as 0, at least 1/2+delta as 1,
// the open middle band as bot.
inline Assignment decode(const RateVector<Rational>& rates,
                         const std::map<std::string, std::string>& varmap,
                         const Rational& delta) {
  detail::require_band_param(delta, "delta");
  Assignment x;
  for (const auto& [var, bank] : varmap) {
    const auto it = rates.find(bank);
    if (it == rates.end())
      throw input_error("no rate for bank '" + bank + "' backing variable '" +
                        var + "'");
    const Rational& r = it->second;
    if (r < 0 || r > 1)
      throw input_error("rate for bank '" + bank + "' lies outside [0,1]");
    if (r <= Rational(1, 2) - delta)
      x[var] = TruthValue::Zero;
    else if (r >= Rational(1, 2) + delta)
      x[var] = TruthValue::One;
    else
      x[var] = TruthValue::Bot;
  }
  return x;
}

inline Assignment decode(const RateVector<Decimal>& rates,
                         const std::map<std::string, std::string>& varmap,
                         const Rational& delta) {
  RateVector<Rational> exact;
  for (const auto& [bank, r] : rates) exact[bank] = decimal_to_rational(r);
  return decode(exact, varmap, delta);
}

}  // namespace finclear
