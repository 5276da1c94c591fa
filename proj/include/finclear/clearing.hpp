#pragma once

// The proportional-payment clearing map and recovery-rate verification.
//
// Under a rate vector r, debtor i owes creditor j
//   l_ij(r) = c_ij + sum_k (1 - r_k) * c_ij^k
// and pays p_ij(r) = r_i * l_ij(r). Bank i's assets are its external assets
// plus incoming payments. A clearing vector is a fixed point of
//   f_i(r) = a_i(r) / max(a_i(r), l_i(r)),
// with r_i = 1 whenever l_i(r) = 0 (the sink rule).

#include <map>
#include <set>
#include <string>

#include "finclear/network.hpp"
#include "finclear/numeric.hpp"

namespace finclear {

template <class S>
using RateVector = std::map<std::string, S>;

template <class S>
struct ClearingReport {
  RateVector<S> rates;
  std::map<std::string, S> per_bank_residual;
  S max_residual{0};
  std::set<std::string> trivially_solvent;
  bool pass = false;
};

template <class S>
void validate_rates(const FinancialNetwork& net, const RateVector<S>& r) {
  if (r.size() != net.bank_count())
    throw input_error("rate vector does not cover every bank");
  for (const auto& [id, value] : r) {
    if (!net.has_bank(id)) throw input_error("rate for unknown bank '" + id + "'");
    if (value < 0 || value > 1)
      throw input_error("rate for bank '" + id + "' outside [0,1]");
  }
}

template <class S>
S liability(const FinancialNetwork& net, const RateVector<S>& r,
            const std::string& debtor, const std::string& creditor) {
  if (!net.has_bank(debtor)) throw input_error("unknown bank id '" + debtor + "'");
  if (!net.has_bank(creditor)) throw input_error("unknown bank id '" + creditor + "'");
  S total = scalar_traits<S>::from_rational(net.debt_notional(debtor, creditor));
  for (const auto& [key, notional] : net.cdses()) {
    if (std::get<0>(key) != debtor || std::get<1>(key) != creditor) continue;
    const auto it = r.find(std::get<2>(key));
    if (it == r.end())
      throw input_error("rate vector missing reference bank '" + std::get<2>(key) + "'");
    total += (S(1) - it->second) * scalar_traits<S>::from_rational(notional);
  }
  return total;
}

template <class S>
S total_liability(const FinancialNetwork& net, const RateVector<S>& r,
                  const std::string& debtor) {
  if (!net.has_bank(debtor)) throw input_error("unknown bank id '" + debtor + "'");
  S total = scalar_traits<S>::from_rational(net.debt_liability_total(debtor));
  for (const auto& [key, notional] : net.cdses()) {
    if (std::get<0>(key) != debtor) continue;
    total += (S(1) - r.at(std::get<2>(key))) * scalar_traits<S>::from_rational(notional);
  }
  return total;
}

namespace detail {

// One pass over the contracts: per-bank liability totals l_i(r) and asset
// totals a_i(r) under proportional payments.
template <class S>
void accumulate(const FinancialNetwork& net, const RateVector<S>& r,
                std::map<std::string, S>& liab, std::map<std::string, S>& asset) {
  for (const auto& [id, e] : net.external_assets()) {
    liab[id] = S(0);
    asset[id] = scalar_traits<S>::from_rational(e);
  }
  for (const auto& [key, notional] : net.debts()) {
    const S amount = scalar_traits<S>::from_rational(notional);
    liab[key.first] += amount;
    asset[key.second] += r.at(key.first) * amount;
  }
  for (const auto& [key, notional] : net.cdses()) {
    const S amount = (S(1) - r.at(std::get<2>(key))) *
                     scalar_traits<S>::from_rational(notional);
    liab[std::get<0>(key)] += amount;
    asset[std::get<1>(key)] += r.at(std::get<0>(key)) * amount;
  }
}

}  // namespace detail

template <class S>
S assets(const FinancialNetwork& net, const RateVector<S>& r, const std::string& bank) {
  if (!net.has_bank(bank)) throw input_error("unknown bank id '" + bank + "'");
  validate_rates(net, r);
  S total = scalar_traits<S>::from_rational(net.assets_of(bank));
  for (const auto& [key, notional] : net.debts())
    if (key.second == bank)
      total += r.at(key.first) * scalar_traits<S>::from_rational(notional);
  for (const auto& [key, notional] : net.cdses())
    if (std::get<1>(key) == bank)
      total += r.at(std::get<0>(key)) * (S(1) - r.at(std::get<2>(key))) *
               scalar_traits<S>::from_rational(notional);
  return total;
}

// The clearing map f. Throws on the genuinely undefined 0/0 case: a bank
// whose only liabilities are swaps, all deactivated at this r, with zero
// assets. Non-degenerate networks never reach it.
template <class S>
RateVector<S> apply_f(const FinancialNetwork& net, const RateVector<S>& r) {
  validate_rates(net, r);
  std::map<std::string, S> liab, asset;
  detail::accumulate(net, r, liab, asset);
  RateVector<S> out;
  for (const auto& [id, l] : liab) {
    const S& a = asset.at(id);
    if (l == 0) {
      if (a == 0 && net.is_cds_debtor(id))
        throw property_error("degenerate network: bank '" + id +
                             "' has zero assets and only deactivated swap liabilities");
      out[id] = S(1);
    } else {
      out[id] = a >= l ? S(1) : S(a / l);
    }
  }
  return out;
}

// Banks whose external assets strictly exceed their total worst-case
// notionals; their rate is 1 in any approximate clearing vector.
inline std::set<std::string> trivially_solvent_banks(const FinancialNetwork& net) {
  std::set<std::string> result;
  for (const auto& [id, e] : net.external_assets()) {
    const Rational worst = net.debt_liability_total(id) + net.cds_notional_total(id);
    if (e > worst) result.insert(id);
  }
  return result;
}

// Checks whether r is a weak eps-approximate clearing vector: trivially
// solvent banks must sit exactly at 1, every other bank within eps of its
// image under f. Always returns a report; the sink rule is applied pointwise
// so no input can fault the check.
template <class S>
ClearingReport<S> verify_crrv(const FinancialNetwork& net, const RateVector<S>& r,
                              const S& eps) {
  if (eps < 0) throw input_error("eps must be nonnegative");
  validate_rates(net, r);
  std::map<std::string, S> liab, asset;
  detail::accumulate(net, r, liab, asset);

  ClearingReport<S> report;
  report.rates = r;
  report.trivially_solvent = trivially_solvent_banks(net);
  report.pass = true;
  bool first = true;
  for (const auto& [id, l] : liab) {
    const S& a = asset.at(id);
    S f = (l == 0 || a >= l) ? S(1) : S(a / l);
    S residual = abs_value(S(r.at(id) - f));
    report.per_bank_residual[id] = residual;
    if (first || residual > report.max_residual) report.max_residual = residual;
    first = false;
    if (report.trivially_solvent.count(id)) {
      if (r.at(id) != 1) report.pass = false;
    } else if (residual > eps) {
      report.pass = false;
    }
  }
  return report;
}

}  // namespace finclear
