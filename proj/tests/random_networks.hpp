#pragma once

// Seeded network generators shared by the solver test suites. All
// randomness flows through the caller's engine, so every run reproduces the
// same instances.

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "finclear/network.hpp"

namespace testgen {

// Uniform multiple of 1/4 in [lo/4, hi/4].
inline finclear::Rational quarters(std::mt19937_64& rng, long lo, long hi) {
  const unsigned long span = static_cast<unsigned long>(hi - lo + 1);
  return finclear::Rational(lo + static_cast<long>(rng() % span)) / 4;
}

// Uniform rate in {0, 1/16, ..., 1}.
inline finclear::Rational rate16(std::mt19937_64& rng) {
  return finclear::Rational(static_cast<long>(rng() % 17)) / 16;
}

inline std::string padded(const char* prefix, std::size_t i) {
  std::string id(prefix);
  if (i < 10) id += '0';
  return id + std::to_string(i);
}

// Debt-only network over n banks. Every bank but the last owes someone;
// acyclic mode only lets debts point toward higher indices.
inline finclear::FinancialNetwork random_debt_network(std::mt19937_64& rng,
                                                      std::size_t n,
                                                      bool allow_cycles) {
  finclear::FinancialNetwork net;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(padded("b", i));
    net.add_bank(ids.back(), quarters(rng, 0, 8));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t edges = 1 + rng() % 2;
    for (std::size_t k = 0; k < edges; ++k) {
      std::size_t target;
      if (allow_cycles) {
        target = rng() % n;
        if (target == i) target = (target + 1) % n;
      } else {
        target = i + 1 + rng() % (n - i - 1);
      }
      net.add_debt(ids[i], ids[target], quarters(rng, 1, 8));
    }
  }
  return net;
}

// Network with one central swap writer "CCD", k borrower banks that all owe
// debt, and two pure-creditor sinks. In covered mode every swap's notional
// fits inside an existing debt of its reference toward its creditor.
inline finclear::FinancialNetwork random_ccd_network(std::mt19937_64& rng,
                                                     std::size_t k,
                                                     bool covered) {
  finclear::FinancialNetwork net;
  std::vector<std::string> borrowers;
  for (std::size_t i = 0; i < k; ++i) {
    borrowers.push_back(padded("v", i));
    net.add_bank(borrowers.back(), quarters(rng, 0, 6));
  }
  net.add_bank("s0", 0);
  net.add_bank("s1", 0);
  net.add_bank("CCD", 0);

  const auto random_target = [&](std::size_t self) {
    while (true) {
      const std::size_t pick = rng() % (k + 2);
      if (pick == self) continue;
      return pick < k ? borrowers[pick] : (pick == k ? std::string("s0")
                                                     : std::string("s1"));
    }
  };
  for (std::size_t i = 0; i < k; ++i) {
    net.add_debt(borrowers[i], random_target(i), quarters(rng, 2, 8));
    if (rng() % 2)
      net.add_debt(borrowers[i], random_target(i), quarters(rng, 1, 6));
  }

  const std::size_t swaps = 1 + rng() % k;
  if (covered) {
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& [key, notional] : net.debts()) edges.push_back(key);
    std::set<std::pair<std::string, std::string>> used;
    for (std::size_t s = 0; s < swaps; ++s) {
      const auto& edge = edges[rng() % edges.size()];  // debtor -> creditor
      if (!used.insert(edge).second) continue;
      const finclear::Rational cap = net.debt_notional(edge.first, edge.second);
      const long share = 1 + static_cast<long>(rng() % 4);
      net.add_cds("CCD", edge.second, edge.first,
                  finclear::Rational(cap * share / 4));
    }
  } else {
    for (std::size_t s = 0; s < swaps; ++s) {
      const std::string ref = borrowers[rng() % k];
      std::string creditor = random_target(k + 2);  // never a borrower index match
      while (creditor == ref) creditor = random_target(k + 2);
      net.add_cds("CCD", creditor, ref, quarters(rng, 1, 8));
    }
  }
  if (net.cds_notional_total("CCD") == 0) {
    // covered mode can skip every duplicate edge; wire one swap by hand
    const auto& edge = net.debts().begin()->first;
    const finclear::Rational cap = net.debt_notional(edge.first, edge.second);
    net.add_cds("CCD", edge.second, edge.first, cap);
  }
  net.set_assets("CCD",
                 finclear::Rational(net.cds_notional_total("CCD") +
                                    quarters(rng, 0, 4)));
  return net;
}

// The two-sided standoff: banks 2 and 5 each owe one unit of debt and write
// one swap on each other; both hold 1 - c externally.
inline finclear::FinancialNetwork standoff_network(const finclear::Rational& c) {
  finclear::FinancialNetwork net;
  for (int i = 1; i <= 6; ++i)
    net.add_bank(std::to_string(i),
                 (i == 2 || i == 5) ? finclear::Rational(1 - c)
                                    : finclear::Rational(0));
  net.add_debt("2", "3", 1);
  net.add_debt("5", "4", 1);
  net.add_cds("2", "1", "5", 1);
  net.add_cds("5", "6", "2", 1);
  return net;
}

}  // namespace testgen
