#pragma once

// Damped fixed-point iteration on the clearing map. Reporting is honest:
// the returned rates are the best ones seen across the whole run,
// re-verified, not simply the last iterate.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "finclear/clearing.hpp"
#include "finclear/network.hpp"
#include "finclear/properties.hpp"

namespace finclear {

template <class S>
struct IterationReport {
  ClearingReport<S> clearing;
  std::size_t iterations = 0;
  bool converged = false;
};

// True when no recovery rate feeds back into itself. r_u enters f(r)_v
// through payments u -> v, and a swap's reference rate enters both the
// creditor's assets and the writer's liabilities. Kahn's algorithm on that
// influence graph.
inline bool dependency_cycle_free(const FinancialNetwork& net) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [key, notional] : net.debts())
    out[key.first].insert(key.second);
  for (const auto& [key, notional] : net.cdses()) {
    out[std::get<0>(key)].insert(std::get<1>(key));
    out[std::get<2>(key)].insert(std::get<1>(key));
    out[std::get<2>(key)].insert(std::get<0>(key));
  }

  std::map<std::string, std::size_t> indegree;
  for (const std::string& id : net.bank_ids()) indegree[id] = 0;
  for (const auto& [from, tos] : out)
    for (const std::string& to : tos) ++indegree[to];

  std::deque<std::string> ready;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.push_back(id);
  std::size_t settled = 0;
  while (!ready.empty()) {
    const std::string id = ready.front();
    ready.pop_front();
    ++settled;
    const auto it = out.find(id);
    if (it == out.end()) continue;
    for (const std::string& to : it->second)
      if (--indegree[to] == 0) ready.push_back(to);
  }
  return settled == net.bank_count();
}

// Full damping suits feed-forward networks; feedback needs averaging.
template <class S>
S default_damping(const FinancialNetwork& net) {
  return dependency_cycle_free(net) ? S(1) : S(S(1) / 2);
}

// Runs r <- (1-d) r + d f(r) from `start` (all ones when absent) until the
// residual drops to `target_eps` or `max_iter` steps elapse. Banks whose
// external assets already exceed their worst-case liabilities are held at
// one throughout.
template <class S>
IterationReport<S> iterate(const FinancialNetwork& net,
                           std::optional<RateVector<S>> start = std::nullopt,
                           const S& damping = S(S(1) / 2),
                           std::size_t max_iter = 1000,
                           const S& target_eps = S(0)) {
  const NondegeneracyResult shape = check_nondegenerate(net);
  if (!shape.ok)
    throw property_error("degenerate network: " + shape.violations.front());
  if (damping <= 0 || damping > 1)
    throw input_error("damping must lie in (0, 1]");
  if (target_eps < 0) throw input_error("eps must be nonnegative");

  RateVector<S> r;
  if (start) {
    validate_rates(net, *start);
    r = std::move(*start);
  } else {
    for (const std::string& id : net.bank_ids()) r[id] = S(1);
  }
  const std::set<std::string> pinned = trivially_solvent_banks(net);
  for (const std::string& id : pinned) r[id] = S(1);

  IterationReport<S> report;
  report.clearing = verify_crrv(net, r, target_eps);
  report.converged = !(report.clearing.max_residual > target_eps);

  while (!report.converged && report.iterations < max_iter) {
    const RateVector<S> image = apply_f(net, r);
    for (auto& [id, value] : r)
      value = (S(1) - damping) * value + damping * image.at(id);
    for (const std::string& id : pinned) r[id] = S(1);
    ++report.iterations;

    const ClearingReport<S> seen = verify_crrv(net, r, target_eps);
    if (seen.max_residual < report.clearing.max_residual)
      report.clearing = seen;
    report.converged = !(report.clearing.max_residual > target_eps);
  }
  return report;
}

template <class S>
struct MultiStartReport {
  IterationReport<S> best;
  std::size_t best_start = 0;
  std::size_t starts = 0;
};

// Repeats the iteration from seeded uniform starting points and keeps the
// run with the smallest residual; on a tie the earlier start wins. Draws are
// one per bank in id order, so a given seed always explores the same points.
template <class S>
MultiStartReport<S> multi_start(const FinancialNetwork& net, std::size_t starts,
                                std::uint64_t seed, const S& damping,
                                std::size_t max_iter, const S& target_eps) {
  if (starts == 0) throw input_error("need at least one starting point");
  std::mt19937_64 rng(seed);
  MultiStartReport<S> out;
  out.starts = starts;
  for (std::size_t s = 0; s < starts; ++s) {
    RateVector<S> r0;
    for (const std::string& id : net.bank_ids()) {
      const auto bits = static_cast<unsigned long long>(rng() >> 11);
      r0[id] = scalar_traits<S>::from_rational(
          Rational(Rational(bits) / Rational(9007199254740992ULL)));
    }
    IterationReport<S> run =
        iterate<S>(net, std::move(r0), damping, max_iter, target_eps);
    if (s == 0 || run.clearing.max_residual < out.best.clearing.max_residual) {
      out.best = std::move(run);
      out.best_start = s;
    }
  }
  return out;
}

}  // namespace finclear
