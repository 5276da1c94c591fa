#pragma once

// Exact solvers for two tractable network classes: pure debt networks via a
// fictitious-default sweep, and covered swaps from fully capitalized writers
// via a reduction to the debt-only case.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "finclear/clearing.hpp"
#include "finclear/network.hpp"
#include "finclear/properties.hpp"

namespace finclear {

namespace detail {

// Gauss-Jordan over rationals with column pivoting by magnitude. Columns
// that never find a pivot stay at one, the greatest-vector convention for
// redundant balance equations; an inconsistent system cannot arise from
// them, but the guard keeps failures loud.
inline std::vector<Rational> solve_balance_system(
    std::vector<std::vector<Rational>> m, std::vector<Rational> b) {
  const std::size_t n = b.size();
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pivot_row(n, none);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < n; ++col) {
    std::size_t best = none;
    for (std::size_t row = rank; row < n; ++row)
      if (m[row][col] != 0 &&
          (best == none || abs(m[row][col]) > abs(m[best][col])))
        best = row;
    if (best == none) continue;
    std::swap(m[rank], m[best]);
    std::swap(b[rank], b[best]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == rank || m[row][col] == 0) continue;
      const Rational f = m[row][col] / m[rank][col];
      for (std::size_t c = col; c < n; ++c) m[row][c] -= f * m[rank][c];
      b[row] -= f * b[rank];
    }
    pivot_row[col] = rank;
    ++rank;
  }
  for (std::size_t row = rank; row < n; ++row)
    if (b[row] != 0) throw property_error("inconsistent balance equations");

  std::vector<Rational> x(n, Rational(1));
  for (std::size_t col = 0; col < n; ++col) {
    if (pivot_row[col] == none) continue;
    const std::size_t row = pivot_row[col];
    Rational value = b[row];
    for (std::size_t c = 0; c < n; ++c)
      if (c != col && pivot_row[c] == none && m[row][c] != 0)
        value -= m[row][c] * x[c];
    x[col] = value / m[row][col];
  }
  return x;
}

}  // namespace detail

// Greatest clearing vector of a debt-only network, exactly. Starts from the
// all-solvent guess; each round solves the balance equations of the current
// defaulting set and then admits any fresh strict violators. The set only
// grows, so the loop runs at most once per bank. `rounds` (optional) counts
// how often it grew.
inline ClearingReport<Rational> solve_debt_only(const FinancialNetwork& net,
                                                std::size_t* rounds = nullptr) {
  if (!net.cdses().empty())
    throw input_error(
        "network has credit-default swaps; this solver handles debt only");

  const std::vector<std::string> ids = net.bank_ids();
  RateVector<Rational> r;
  for (const std::string& id : ids) r[id] = 1;

  std::set<std::string> defaulting;
  std::size_t grew = 0;
  while (true) {
    std::vector<std::string> fresh;
    for (const std::string& id : ids) {
      if (defaulting.count(id)) continue;
      const Rational l = net.debt_liability_total(id);
      if (l == 0) continue;
      if (assets(net, r, id) < l) fresh.push_back(id);
    }
    if (fresh.empty()) break;
    ++grew;
    defaulting.insert(fresh.begin(), fresh.end());

    const std::vector<std::string> order(defaulting.begin(), defaulting.end());
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;

    // l_i r_i - sum_{j defaulting} c_{j,i} r_j = e_i + sum_{j solvent} c_{j,i}
    std::vector<std::vector<Rational>> m(
        order.size(), std::vector<Rational>(order.size(), Rational(0)));
    std::vector<Rational> b(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      m[i][i] = net.debt_liability_total(order[i]);
      b[i] = net.assets_of(order[i]);
    }
    for (const auto& [key, notional] : net.debts()) {
      const auto to = pos.find(key.second);
      if (to == pos.end()) continue;
      const auto from = pos.find(key.first);
      if (from == pos.end())
        b[to->second] += notional;
      else
        m[to->second][from->second] -= notional;
    }

    const std::vector<Rational> x = detail::solve_balance_system(m, b);
    for (std::size_t i = 0; i < order.size(); ++i)
      r[order[i]] = std::min(Rational(1), std::max(Rational(0), x[i]));
  }

  if (rounds) *rounds = grew;
  return verify_crrv(net, r, Rational(0));
}

// Rewrites one covered swap as plain debt: the creditor receives the
// notional up front, the reference's matching debt shrinks by it, and a
// fresh dummy creditor absorbs the difference so the reference's total
// liability stays put. Sound only for fully capitalized pure swap writers,
// whose rate is one no matter what.
inline FinancialNetwork transform_step(const FinancialNetwork& net,
                                       const CdsKey& key) {
  const auto it = net.cdses().find(key);
  if (it == net.cdses().end())
    throw input_error("network has no swap (" + std::get<0>(key) + ", " +
                      std::get<1>(key) + ", " + std::get<2>(key) + ")");
  const auto& [debtor, creditor, reference] = key;
  const Rational x = it->second;

  if (net.is_debt_debtor(debtor))
    throw property_error("swap writer '" + debtor + "' owes debt of its own");
  if (net.assets_of(debtor) < net.cds_notional_total(debtor))
    throw property_error("swap writer '" + debtor +
                         "' cannot back the swaps it wrote");
  if (net.debt_notional(reference, creditor) < x)
    throw property_error("swap on '" + reference + "' toward '" + creditor +
                         "' is not covered by a matching debt");

  FinancialNetwork out = net;
  out.set_assets(creditor, Rational(out.assets_of(creditor) + x));
  out.set_debt(reference, creditor,
               Rational(out.debt_notional(reference, creditor) - x));
  std::string dummy = "dummy__" + reference + "__" + creditor;
  while (out.has_bank(dummy)) dummy += "_";
  out.add_bank(dummy, 0);
  out.add_debt(reference, dummy, x);
  out.remove_cds(key);
  return out;
}

struct CoveredSolution {
  ClearingReport<Rational> report;  // verified on the original network
  FinancialNetwork transformed;     // the debt-only image
  std::size_t dummy_count = 0;
};

// Clears a network whose swaps are covered and written by fully capitalized
// banks without debt of their own: transform every swap away, solve the
// debt-only image exactly, and project the rates back. The dummies and the
// writers all sit at rate one, so the projection verifies at zero slack on
// the original network.
inline CoveredSolution solve_covered_central(const FinancialNetwork& net) {
  for (const auto& [key, notional] : net.cdses()) {
    const std::string& debtor = std::get<0>(key);
    if (net.is_debt_debtor(debtor))
      throw property_error("swap writer '" + debtor + "' owes debt of its own");
    if (net.assets_of(debtor) < net.cds_notional_total(debtor))
      throw property_error("swap writer '" + debtor +
                           "' cannot back the swaps it wrote");
  }
  if (!check_covered(net))
    throw property_error("a swap exceeds the debt it is written on");

  FinancialNetwork work = net;
  std::size_t dummies = 0;
  while (!work.cdses().empty()) {
    work = transform_step(work, work.cdses().begin()->first);
    ++dummies;
  }

  const ClearingReport<Rational> inner = solve_debt_only(work);
  RateVector<Rational> projected;
  for (const std::string& id : net.bank_ids())
    projected[id] = inner.rates.at(id);

  CoveredSolution out;
  out.report = verify_crrv(net, projected, Rational(0));
  out.transformed = std::move(work);
  out.dummy_count = dummies;
  return out;
}

}  // namespace finclear
