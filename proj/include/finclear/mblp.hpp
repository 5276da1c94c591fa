#pragma once

// Mixed-binary reformulation of the clearing problem for networks whose
// swaps are all written by one fully-capitalized central debtor. Every bank
// with debt liabilities contributes a binary default indicator and four
// constraints; once the binaries are fixed, what remains is an ordinary
// linear program over the recovery rates.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "finclear/clearing.hpp"
#include "finclear/lp.hpp"
#include "finclear/network.hpp"
#include "finclear/properties.hpp"

namespace finclear {

// Balance-sheet ceiling for bank i: everything it could possibly receive
// divided by its debt liabilities, plus one. Banks without debt liabilities
// have no constraint row and therefore no ceiling.
inline Rational big_m(const FinancialNetwork& net, const std::string& bank) {
  if (!net.has_bank(bank)) throw input_error("unknown bank id '" + bank + "'");
  const Rational denom = net.debt_liability_total(bank);
  if (denom == 0)
    throw input_error("bank '" + bank +
                      "' has no debt liabilities and is excluded from the program");
  Rational numer = net.assets_of(bank);
  for (const auto& [key, notional] : net.debts())
    if (key.second == bank) numer += notional;
  for (const auto& [key, notional] : net.cdses())
    if (std::get<1>(key) == bank) numer += notional;
  return Rational(numer / denom + 1);
}

// Affine form  constant + sum coeff[b] * r_b  over constrained bank rates.
struct AffineExpression {
  Rational constant{0};
  std::map<std::string, Rational> coeff;

  Rational eval(const RateVector<Rational>& r) const {
    Rational total = constant;
    for (const auto& [bank, c] : coeff) total += c * r.at(bank);
    return total;
  }
};

struct MBLPModel {
  FinancialNetwork network;
  std::vector<std::string> banks;  // constrained banks, in id order
  std::map<std::string, AffineExpression> assets;
  std::map<std::string, Rational> liability;  // constant debt liability
  std::map<std::string, Rational> big_m_of;
  std::set<std::string> fixed;  // banks pinned to rate one
  std::optional<LinearObjective> objective;
};

// Default pattern: 0 picks the solvent branch (rate one), 1 the defaulting
// branch (rate = assets over liabilities). Must be total over model.banks.
using YConfiguration = std::map<std::string, int>;

inline MBLPModel build_mblp(const FinancialNetwork& net,
                            std::optional<LinearObjective> objective = {}) {
  const NondegeneracyResult nd = check_nondegenerate(net);
  if (!nd.ok) {
    std::string what = "network is degenerate:";
    for (const std::string& v : nd.violations) what += " " + v + ";";
    throw property_error(what);
  }
  const CentralDebtorResult central = check_central_cds_debtor(net);
  if (!central.ok)
    throw property_error("not a central-debtor network: " + central.reason);

  MBLPModel model;
  model.network = net;
  for (const std::string& id : net.bank_ids()) {
    if (net.debt_liability_total(id) > 0)
      model.banks.push_back(id);
    else
      model.fixed.insert(id);  // sinks and the central debtor stay at one
  }

  for (const std::string& id : model.banks) {
    model.liability[id] = net.debt_liability_total(id);
    model.big_m_of[id] = big_m(net, id);
    AffineExpression a;
    a.constant = net.assets_of(id);
    for (const auto& [key, notional] : net.debts()) {
      if (key.second != id) continue;
      if (model.fixed.count(key.first))
        a.constant += notional;
      else
        a.coeff[key.first] += notional;
    }
    for (const auto& [key, notional] : net.cdses()) {
      if (std::get<1>(key) != id) continue;
      // The writer pays notional * (1 - r_ref); its own rate is one. The
      // reference owes debt, so it is a constrained bank.
      a.constant += notional;
      a.coeff[std::get<2>(key)] -= notional;
    }
    model.assets[id] = std::move(a);
  }

  if (objective) {
    for (const auto& [bank, c] : objective->coeffs)
      if (!net.has_bank(bank))
        throw input_error("objective references unknown bank '" + bank + "'");
    model.objective = std::move(objective);
  }
  return model;
}

// Substitutes a default pattern into the model. The big-M rows that the
// substitution satisfies identically are dropped; what remains forces
// rate one where y = 0 and rate = assets/liabilities where y = 1.
inline LinearProgram lp_restrict(const MBLPModel& model,
                                 const YConfiguration& y) {
  for (const std::string& id : model.banks)
    if (!y.count(id))
      throw input_error("default pattern is missing bank '" + id + "'");
  if (y.size() != model.banks.size())
    throw input_error("default pattern names banks outside the program");
  for (const auto& [id, v] : y)
    if (v != 0 && v != 1)
      throw input_error("default pattern entries must be 0 or 1");

  LinearProgram lp;
  for (const std::string& id : model.banks)
    lp.add_variable(id, Rational(0), Rational(1));
  for (const std::string& id : model.banks) {
    const AffineExpression& a = model.assets.at(id);
    std::map<std::string, Rational> row;
    for (const auto& [bank, c] : a.coeff) row[bank] -= c;
    row[id] += model.liability.at(id);
    // liability * r - assets <= 0 always; the matching lower bound only
    // binds on the defaulting branch.
    lp.add_constraint(row, Relation::LessEq, a.constant);
    if (y.at(id) == 1)
      lp.add_constraint(row, Relation::GreaterEq, a.constant);
    else
      lp.add_constraint({{id, Rational(1)}}, Relation::GreaterEq, Rational(1));
  }
  if (model.objective) {
    std::map<std::string, Rational> coeffs;
    for (const auto& [bank, c] : model.objective->coeffs)
      if (!model.fixed.count(bank)) coeffs[bank] = c;
    lp.set_objective(std::move(coeffs), model.objective->sense);
  }
  return lp;
}

struct MblpSolution {
  ClearingReport<Rational> report;
  YConfiguration y;
  std::optional<Rational> objective_value;
  unsigned long branches = 0;  // restricted programs solved
};

// Walks default patterns as a binary counter (all-solvent first, last bank
// fastest). Without an objective the first feasible pattern wins; with one,
// every pattern is scored and earlier counters win ties. Every answer is
// re-verified as an exact clearing vector before it is returned.
inline MblpSolution solve_exhaustive(const FinancialNetwork& net,
                                     std::optional<LinearObjective> objective = {}) {
  const MBLPModel model = build_mblp(net, std::move(objective));
  const std::size_t k = model.banks.size();

  std::optional<MblpSolution> best;
  unsigned long branches = 0;
  for (unsigned long counter = 0; counter < (1ul << k); ++counter) {
    YConfiguration y;
    for (std::size_t b = 0; b < k; ++b)
      y[model.banks[b]] = static_cast<int>((counter >> (k - 1 - b)) & 1);
    const LpResult lr = lp_solve(lp_restrict(model, y));
    ++branches;
    if (lr.status != LpStatus::Feasible && lr.status != LpStatus::Optimal)
      continue;

    RateVector<Rational> rates = lr.point;
    for (const std::string& id : model.fixed) rates[id] = 1;
    ClearingReport<Rational> report = verify_crrv(net, rates, Rational(0));
    if (!report.pass)
      throw property_error("restricted program produced a non-clearing point");

    MblpSolution candidate;
    candidate.report = std::move(report);
    candidate.y = std::move(y);
    if (!model.objective) {
      candidate.branches = branches;
      return candidate;
    }
    Rational value = 0;
    for (const auto& [bank, c] : model.objective->coeffs)
      value += c * candidate.report.rates.at(bank);
    candidate.objective_value = value;
    const bool better =
        !best ||
        (model.objective->sense == Sense::Maximize ? value > *best->objective_value
                                                   : value < *best->objective_value);
    if (better) best = std::move(candidate);
  }
  if (!best)
    throw property_error("no default pattern admits a clearing vector");
  best->branches = branches;
  return *best;
}

namespace detail {

// Term key (var, complement) stands for  coeff * var * (1 - complement);
// either slot may be empty. Variable slots carry their rendered names
// ("r_A", "y_A"); complement slots carry the bank id.
using MbnlpPoly = std::map<std::pair<std::string, std::string>, Rational>;

inline void mbnlp_add(MbnlpPoly& poly, const std::string& var,
                      const std::string& complement, const Rational& c) {
  if (c == 0) return;
  const auto key = std::make_pair(var, complement);
  poly[key] += c;
  if (poly[key] == 0) poly.erase(key);
}

inline MbnlpPoly mbnlp_scale(const MbnlpPoly& poly, const Rational& f) {
  MbnlpPoly out;
  for (const auto& [key, c] : poly) mbnlp_add(out, key.first, key.second, Rational(c * f));
  return out;
}

// Multiplies a polynomial whose terms have an empty variable slot by a
// fresh variable (liability * rate, liability * indicator).
inline MbnlpPoly mbnlp_times_var(const MbnlpPoly& poly, const std::string& var) {
  MbnlpPoly out;
  for (const auto& [key, c] : poly) mbnlp_add(out, var, key.second, c);
  return out;
}

inline void mbnlp_accumulate(MbnlpPoly& into, const MbnlpPoly& poly,
                             const Rational& f) {
  for (const auto& [key, c] : poly)
    mbnlp_add(into, key.first, key.second, Rational(c * f));
}

struct MbnlpBank {
  MbnlpPoly assets;
  MbnlpPoly liabilities;
  bool constrained = false;
  Rational ceiling{0};  // big-M, constrained banks only
};

// Classifies every bank and expands its asset and liability polynomials,
// substituting rate one for banks pinned there.
inline std::map<std::string, MbnlpBank> mbnlp_banks(const FinancialNetwork& net) {
  const NondegeneracyResult nd = check_nondegenerate(net);
  if (!nd.ok) {
    std::string what = "network is degenerate:";
    for (const std::string& v : nd.violations) what += " " + v + ";";
    throw property_error(what);
  }

  std::map<std::string, MbnlpBank> table;
  for (const std::string& id : net.bank_ids()) {
    MbnlpBank info;
    const Rational debt = net.debt_liability_total(id);
    const Rational swaps = net.cds_notional_total(id);
    if (debt > 0) {
      info.constrained = true;
      info.ceiling = big_m(net, id);
    } else if (swaps > 0 && net.assets_of(id) < swaps) {
      throw property_error("bank '" + id +
                           "' writes swaps it cannot back and has no debt "
                           "liabilities; no ceiling exists for it");
    }
    table.emplace(id, std::move(info));
  }

  for (auto& [id, info] : table) {
    mbnlp_add(info.assets, "", "", net.assets_of(id));
    mbnlp_add(info.liabilities, "", "", net.debt_liability_total(id));
  }
  for (const auto& [key, notional] : net.debts()) {
    MbnlpBank& creditor = table.at(key.second);
    if (table.at(key.first).constrained)
      mbnlp_add(creditor.assets, "r_" + key.first, "", notional);
    else
      mbnlp_add(creditor.assets, "", "", notional);
  }
  for (const auto& [key, notional] : net.cdses()) {
    const auto& [debtor, creditor, reference] = key;
    MbnlpBank& paid = table.at(creditor);
    if (table.at(debtor).constrained)
      mbnlp_add(paid.assets, "r_" + debtor, reference, notional);
    else
      mbnlp_add(paid.assets, "", reference, notional);
    mbnlp_add(table.at(debtor).liabilities, "", reference, notional);
  }
  return table;
}

inline std::string mbnlp_render_term(const Rational& coeff,
                                     const std::string& var,
                                     const std::string& complement) {
  std::string text = format_rational(coeff);
  if (!var.empty()) text += " * " + var;
  if (!complement.empty()) text += " * (1 - r_" + complement + ")";
  return text;
}

// Renders a polynomial, optionally without its constant term (the caller
// moves the constant to the other side of a relation).
inline std::string mbnlp_render(const MbnlpPoly& poly, bool with_constant) {
  std::string text;
  for (const auto& [key, coeff] : poly) {
    if (!with_constant && key.first.empty() && key.second.empty()) continue;
    if (text.empty()) {
      text = mbnlp_render_term(coeff, key.first, key.second);
    } else if (coeff < 0) {
      text += " - " + mbnlp_render_term(Rational(-coeff), key.first, key.second);
    } else {
      text += " + " + mbnlp_render_term(coeff, key.first, key.second);
    }
  }
  return text.empty() ? "0" : text;
}

inline Rational mbnlp_constant(const MbnlpPoly& poly) {
  const auto it = poly.find({"", ""});
  return it == poly.end() ? Rational(0) : it->second;
}

}  // namespace detail

// Writes the clearing problem of an arbitrary non-degenerate network as a
// plain-text mixed-binary program. Divisions are multiplied through, so the
// constraints stay polynomial: swap payments contribute the bilinear terms.
// Nothing is solved here; the artifact is meant for external tooling.
inline std::string emit_mbnlp(const FinancialNetwork& net,
                              const std::string& path = "") {
  const auto table = detail::mbnlp_banks(net);
  std::size_t constrained = 0;
  for (const auto& [id, info] : table)
    if (info.constrained) ++constrained;

  std::ostringstream out;
  out << "# mixed-binary clearing program, " << table.size() << " banks, "
      << constrained << " constrained\n";
  out << "# one statement per line; '*' multiplies; rationals are p/q\n";
  out << "# factors are rates r_*, indicators y_*, or complements of rates\n";
  for (const auto& [id, info] : table) {
    out << "\n# bank " << id << "\n";
    out << "assets a_" << id << " = " << detail::mbnlp_render(info.assets, true)
        << "\n";
    out << "liab l_" << id << " = "
        << detail::mbnlp_render(info.liabilities, true) << "\n";
    if (!info.constrained) {
      out << "fix r_" << id << " = 1";
      if (net.cds_notional_total(id) > 0)
        out << "  # swap liabilities fully backed by external assets\n";
      else
        out << "  # no liabilities\n";
      continue;
    }
    out << "rate r_" << id << " in [0, 1]\n";
    out << "binary y_" << id << "\n";

    // l * r - a, the common core of the ceiling and floor rows.
    detail::MbnlpPoly core = detail::mbnlp_times_var(info.liabilities, "r_" + id);
    detail::mbnlp_accumulate(core, info.assets, Rational(-1));

    detail::MbnlpPoly floor = core;  // l*r - a + B*l - B*l*y >= 0
    detail::mbnlp_accumulate(floor, info.liabilities, info.ceiling);
    detail::mbnlp_accumulate(
        floor, detail::mbnlp_times_var(info.liabilities, "y_" + id),
        Rational(-info.ceiling));
    out << "c1[" << id << "]: " << detail::mbnlp_render(floor, false)
        << " >= " << format_rational(Rational(-detail::mbnlp_constant(floor)))
        << "\n";

    detail::MbnlpPoly lower;  // r + B*y >= 1
    detail::mbnlp_add(lower, "r_" + id, "", Rational(1));
    detail::mbnlp_add(lower, "y_" + id, "", info.ceiling);
    out << "c2[" << id << "]: " << detail::mbnlp_render(lower, false)
        << " >= 1\n";

    out << "c3[" << id << "]: " << detail::mbnlp_render(core, false)
        << " <= " << format_rational(Rational(-detail::mbnlp_constant(core)))
        << "\n";
  }

  const std::string text = out.str();
  if (!path.empty()) {
    std::ofstream file(path);
    if (!file) throw input_error("cannot open '" + path + "' for writing");
    file << text;
    if (!file.flush()) throw input_error("failed writing '" + path + "'");
  }
  return text;
}

}  // namespace finclear
