#pragma once

// Structural checks on financial networks: non-degeneracy, the dedicated and
// central-CDS-debtor properties, and swap coverage.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "finclear/network.hpp"

namespace finclear {

struct NondegeneracyResult {
  bool ok = true;
  std::vector<std::string> violations;
};

// A network is non-degenerate when every CDS reference bank is the debtor of
// at least one debt contract, and every CDS debtor has positive external
// assets or at least one debt contract of its own.
inline NondegeneracyResult check_nondegenerate(const FinancialNetwork& net) {
  NondegeneracyResult result;
  std::set<std::string> references, debtors;
  for (const auto& [key, notional] : net.cdses()) {
    debtors.insert(std::get<0>(key));
    references.insert(std::get<2>(key));
  }
  for (const auto& ref : references) {
    if (!net.is_debt_debtor(ref)) {
      result.ok = false;
      result.violations.push_back("reference bank '" + ref +
                                  "' is debtor of no debt contract");
    }
  }
  for (const auto& d : debtors) {
    if (net.assets_of(d) <= 0 && !net.is_debt_debtor(d)) {
      result.ok = false;
      result.violations.push_back("CDS debtor '" + d +
                                  "' has no external assets and no debt contract");
    }
  }
  return result;
}

struct CentralDebtorResult {
  bool ok = false;
  std::optional<std::string> ccd;  // absent when the network has no CDSes
  std::string reason;
};

// Central-CDS-debtor property: all CDSes share one debtor, that debtor has no
// debt contracts, and its external assets cover the sum of its CDS notionals.
// A CDS-free network satisfies the conditions vacuously (no CCD identified).
inline CentralDebtorResult check_central_cds_debtor(const FinancialNetwork& net) {
  CentralDebtorResult result;
  if (net.cdses().empty()) {
    result.ok = true;
    return result;
  }
  std::string debtor;
  for (const auto& [key, notional] : net.cdses()) {
    if (debtor.empty()) {
      debtor = std::get<0>(key);
    } else if (debtor != std::get<0>(key)) {
      result.reason = "CDS debtors differ: '" + debtor + "' and '" +
                      std::get<0>(key) + "'";
      return result;
    }
  }
  if (net.is_debt_debtor(debtor)) {
    result.reason = "CDS debtor '" + debtor + "' also owes debt contracts";
    return result;
  }
  if (net.assets_of(debtor) < net.cds_notional_total(debtor)) {
    result.reason = "CDS debtor '" + debtor +
                    "' cannot cover its total swap notionals";
    return result;
  }
  result.ok = true;
  result.ccd = debtor;
  return result;
}

// Every CDS (i, j, R) is covered when the reference bank R owes creditor j a
// debt of at least the CDS notional.
inline bool check_covered(const FinancialNetwork& net) {
  for (const auto& [key, notional] : net.cdses()) {
    const Rational backing =
        net.debt_notional(std::get<2>(key), std::get<1>(key));
    if (notional > backing) return false;
  }
  return true;
}

// Dedicated CDS debtors: each CDS debtor owes no debt contracts and all its
// CDSes name the same reference bank.
inline bool check_dedicated(const FinancialNetwork& net) {
  std::map<std::string, std::string> shared_reference;
  for (const auto& [key, notional] : net.cdses()) {
    const std::string& debtor = std::get<0>(key);
    const std::string& reference = std::get<2>(key);
    if (net.is_debt_debtor(debtor)) return false;
    auto [it, inserted] = shared_reference.emplace(debtor, reference);
    if (!inserted && it->second != reference) return false;
  }
  return true;
}

}  // namespace finclear
