#pragma once

// Closed-form output ranges of the three gate gadgets, evaluated through the
// interval kernel. Each gadget is a short chain of ball constructions,
// reflections and scalings; the chain below reproduces the recovery-rate
// range of the gadget's output bank as a function of the input bank's rate.
//
// All chains have constant radius and a clamped-affine center in the input
// rate, so the image of an input interval is the hull of the two endpoint
// images; gate_output_range relies on that.

#include <algorithm>
#include <string>
#include <vector>

#include "finclear/gates.hpp"
#include "finclear/interval.hpp"
#include "finclear/numeric.hpp"

namespace finclear {

// Largest slack for which the band encoding works at a given threshold width:
// eps(delta) = delta(1-2delta)/(1+8delta).
inline Rational epsilon_for_delta(const Rational& delta) {
  if (delta <= 0 || delta >= Rational(1, 2))
    throw input_error("delta must lie strictly between 0 and 1/2");
  return delta * (1 - 2 * delta) / (1 + 8 * delta);
}

// Numeric-mode variant for irrational thresholds such as (sqrt(5)-1)/8.
inline Decimal epsilon_for_delta(const Decimal& delta) {
  if (delta <= 0 || 2 * delta >= 1)
    throw input_error("delta must lie strictly between 0 and 1/2");
  return delta * (1 - 2 * delta) / (1 + 8 * delta);
}

namespace detail {

struct GadgetNotionals {
  Rational first_stage;   // 2/(1+2delta), swap read off the input bank
  Rational inverter;      // (1+2delta)/(4delta), middle inverter stage
  Rational splitter_low;  // (1+2delta)/(2delta), left purify branch
  Rational splitter_high; // 1/(2delta), right purify branch
};

inline GadgetNotionals gadget_notionals(const Rational& delta) {
  GadgetNotionals n;
  n.first_stage = Rational(2) / (1 + 2 * delta);
  n.inverter = (1 + 2 * delta) / (4 * delta);
  n.splitter_low = (1 + 2 * delta) / (2 * delta);
  n.splitter_high = Rational(1) / (2 * delta);
  return n;
}

// Shared head of the NOT chain and of each OR leg: the swap on the input
// bank followed by the inverter stage.
inline UnitInterval inverter_stage(const Rational& u, const GadgetNotionals& n,
                                   const Rational& eps) {
  UnitInterval r3 = pm_number(n.first_stage * (1 - u), eps);
  return pm_interval(scale(n.inverter, one_minus(r3)), eps);
}

inline UnitInterval not_chain(const Rational& u, const GadgetNotionals& n,
                              const Rational& eps) {
  UnitInterval r6 = inverter_stage(u, n, eps);
  return pm_interval(scale(Rational(1), one_minus(r6)), eps);
}

inline UnitInterval purify_left_chain(const Rational& u,
                                      const GadgetNotionals& n,
                                      const Rational& eps) {
  UnitInterval r3 = pm_number(n.first_stage * (1 - u), eps);
  return pm_interval(scale(n.splitter_low, one_minus(r3)), eps);
}

inline UnitInterval purify_right_chain(const Rational& u,
                                       const GadgetNotionals& n,
                                       const Rational& eps) {
  UnitInterval r6 = pm_number(2 * (1 - u), eps);
  return pm_interval(scale(n.splitter_high, one_minus(r6)), eps);
}

// Range of min(1, p + q) where the two incoming payments range over the leg
// intervals independently. This is the OR gadget's collector bank, whose
// liability is 1.
inline UnitInterval payment_sum(const UnitInterval& x, const UnitInterval& y) {
  if (x.is_empty() || y.is_empty()) return UnitInterval::empty();
  const Rational lo = std::min(Rational(1), Rational(x.lo() + y.lo()));
  const Rational hi = std::min(Rational(1), Rational(x.hi() + y.hi()));
  return UnitInterval::make(lo, hi);
}

inline UnitInterval hull(const UnitInterval& a, const UnitInterval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return UnitInterval::make(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline void require_band_param(const Rational& v, const char* name) {
  if (v <= 0 || v >= Rational(1, 2))
    throw input_error(std::string(name) + " must lie strictly between 0 and 1/2");
}

}  // namespace detail

// Output-bank rate ranges of one gadget, one interval per output, as the
// input rates range over the given intervals.
inline std::vector<UnitInterval> gate_output_range(
    GateKind kind, const std::vector<UnitInterval>& inputs,
    const Rational& delta, const Rational& eps) {
  detail::require_band_param(delta, "delta");
  detail::require_band_param(eps, "eps");
  if (static_cast<int>(inputs.size()) != gate_input_count(kind))
    throw input_error(gate_name(kind) + " takes " +
                      std::to_string(gate_input_count(kind)) + " input range(s)");
  for (const UnitInterval& in : inputs)
    if (in.is_empty()) throw input_error("gate input range is empty");

  const detail::GadgetNotionals n = detail::gadget_notionals(delta);
  switch (kind) {
    case GateKind::Not: {
      const UnitInterval& u = inputs[0];
      return {detail::hull(detail::not_chain(u.lo(), n, eps),
                           detail::not_chain(u.hi(), n, eps))};
    }
    case GateKind::Or: {
      const UnitInterval legs_u[2] = {
          detail::inverter_stage(inputs[0].lo(), n, eps),
          detail::inverter_stage(inputs[0].hi(), n, eps)};
      const UnitInterval legs_v[2] = {
          detail::inverter_stage(inputs[1].lo(), n, eps),
          detail::inverter_stage(inputs[1].hi(), n, eps)};
      UnitInterval out = UnitInterval::empty();
      for (const UnitInterval& a : legs_u)
        for (const UnitInterval& b : legs_v)
          out = detail::hull(
              out, pm_interval(detail::payment_sum(a, b), eps));
      return {out};
    }
    case GateKind::Purify: {
      const UnitInterval& u = inputs[0];
      return {detail::hull(detail::purify_left_chain(u.lo(), n, eps),
                           detail::purify_left_chain(u.hi(), n, eps)),
              detail::hull(detail::purify_right_chain(u.lo(), n, eps),
                           detail::purify_right_chain(u.hi(), n, eps))};
    }
  }
  throw input_error("unknown gate kind");
}

// One row of the gate-behavior verification table: a guarantee about where a
// gadget's outputs land when its inputs are confined to a decode band.
struct ClaimRow {
  std::string gate;
  int statement = 0;
  std::string description;
  bool holds = false;             // containment in the stated output band
  bool simulation_holds = false;  // containment in the decode-width band
  long points = 0;                // grid points checked
};

namespace detail {

inline std::vector<Rational> closed_grid(const Rational& a, const Rational& b,
                                         long g) {
  std::vector<Rational> pts;
  pts.reserve(static_cast<size_t>(g));
  for (long k = 0; k < g; ++k)
    pts.push_back(a + (b - a) * Rational(k, g - 1));
  return pts;
}

inline std::vector<Rational> open_grid(const Rational& a, const Rational& b,
                                       long g) {
  std::vector<Rational> pts;
  pts.reserve(static_cast<size_t>(g));
  for (long k = 1; k <= g; ++k)
    pts.push_back(a + (b - a) * Rational(k, g + 1));
  return pts;
}

}  // namespace detail

// Checks every gate guarantee on a grid of input rates per decode band plus
// one whole-band interval evaluation, all in exact rational arithmetic.
// `holds` uses each statement's own output constant; `simulation_holds` uses
// the uniform width (1+8delta)/(2delta)*eps, which equals the decode-band
// width 1/2-delta exactly when eps = epsilon_for_delta(delta).
inline std::vector<ClaimRow> check_gate_claims(const Rational& delta,
                                               const Rational& eps,
                                               long grid_points) {
  detail::require_band_param(delta, "delta");
  detail::require_band_param(eps, "eps");
  if (grid_points < 2) throw input_error("need at least 2 grid points");

  const Rational low_hi = Rational(1, 2) - delta;
  const Rational high_lo = Rational(1, 2) + delta;
  const UnitInterval low = UnitInterval::make(Rational(0), low_hi);
  const UnitInterval high = UnitInterval::make(high_lo, Rational(1));
  const UnitInterval full = UnitInterval::make(Rational(0), Rational(1));

  const Rational not_width = (1 + 10 * delta) / (4 * delta) * eps;
  const Rational or_low_width = (1 + 8 * delta) / (2 * delta) * eps;
  const Rational left_width = (1 + 4 * delta) / (2 * delta) * eps;
  const Rational right_width = (1 + 2 * delta) / (2 * delta) * eps;
  const Rational sim_width = (1 + 8 * delta) / (2 * delta) * eps;

  const auto band_low = [](const Rational& w) {
    return UnitInterval::make(Rational(0), std::min(Rational(1), w));
  };
  const auto band_high = [](const Rational& w) {
    return UnitInterval::make(std::max(Rational(0), Rational(1 - w)), Rational(1));
  };

  std::vector<ClaimRow> rows;

  const auto out_of = [&](GateKind k, const std::vector<UnitInterval>& in) {
    return gate_output_range(k, in, delta, eps);
  };

  {  // NOT, statement 1: low input, high output.
    ClaimRow row{"NOT", 1, "inputs in the low band produce outputs in the high band"};
    row.holds = row.simulation_holds = true;
    for (const Rational& u : detail::closed_grid(Rational(0), low_hi, grid_points)) {
      const UnitInterval out = out_of(GateKind::Not, {UnitInterval::point(u)})[0];
      row.holds &= band_high(not_width).contains(out);
      row.simulation_holds &= band_high(sim_width).contains(out);
      ++row.points;
    }
    const UnitInterval whole = out_of(GateKind::Not, {low})[0];
    row.holds &= band_high(not_width).contains(whole);
    row.simulation_holds &= band_high(sim_width).contains(whole);
    rows.push_back(row);
  }
  {  // NOT, statement 2: high input, low output.
    ClaimRow row{"NOT", 2, "inputs in the high band produce outputs in the low band"};
    row.holds = row.simulation_holds = true;
    for (const Rational& u : detail::closed_grid(high_lo, Rational(1), grid_points)) {
      const UnitInterval out = out_of(GateKind::Not, {UnitInterval::point(u)})[0];
      row.holds &= band_low(not_width).contains(out);
      row.simulation_holds &= band_low(sim_width).contains(out);
      ++row.points;
    }
    const UnitInterval whole = out_of(GateKind::Not, {high})[0];
    row.holds &= band_low(not_width).contains(whole);
    row.simulation_holds &= band_low(sim_width).contains(whole);
    rows.push_back(row);
  }
  {  // OR, statement 1: either input high forces the output high; the other
     // input is left completely unconstrained.
    ClaimRow row{"OR", 1, "either input in the high band forces the output high"};
    row.holds = row.simulation_holds = true;
    for (const Rational& u : detail::closed_grid(high_lo, Rational(1), grid_points)) {
      for (const auto& in : {std::vector<UnitInterval>{UnitInterval::point(u), full},
                             std::vector<UnitInterval>{full, UnitInterval::point(u)}}) {
        const UnitInterval out = out_of(GateKind::Or, in)[0];
        row.holds &= band_high(not_width).contains(out);
        row.simulation_holds &= band_high(sim_width).contains(out);
      }
      ++row.points;
    }
    const UnitInterval whole = out_of(GateKind::Or, {high, full})[0];
    row.holds &= band_high(not_width).contains(whole);
    row.simulation_holds &= band_high(sim_width).contains(whole);
    rows.push_back(row);
  }
  {  // OR, statement 2: both inputs low forces the output low.
    ClaimRow row{"OR", 2, "both inputs in the low band force the output low"};
    row.holds = row.simulation_holds = true;
    for (const Rational& u : detail::closed_grid(Rational(0), low_hi, grid_points)) {
      const UnitInterval out = out_of(GateKind::Or, {UnitInterval::point(u), low})[0];
      row.holds &= band_low(or_low_width).contains(out);
      row.simulation_holds &= band_low(sim_width).contains(out);
      ++row.points;
    }
    const UnitInterval whole = out_of(GateKind::Or, {low, low})[0];
    row.holds &= band_low(or_low_width).contains(whole);
    row.simulation_holds &= band_low(sim_width).contains(whole);
    rows.push_back(row);
  }
  {  // PURIFY, statement 1: low input forces both outputs low.
    ClaimRow row{"PURIFY", 1, "a low input forces both outputs low"};
    row.holds = row.simulation_holds = true;
    for (const Rational& u : detail::closed_grid(Rational(0), low_hi, grid_points)) {
      const auto outs = out_of(GateKind::Purify, {UnitInterval::point(u)});
      row.holds &= band_low(left_width).contains(outs[0]) &&
                   band_low(right_width).contains(outs[1]);
      row.simulation_holds &= band_low(sim_width).contains(outs[0]) &&
                              band_low(sim_width).contains(outs[1]);
      ++row.points;
    }
    const auto whole = out_of(GateKind::Purify, {low});
    row.holds &= band_low(left_width).contains(whole[0]) &&
                 band_low(right_width).contains(whole[1]);
    row.simulation_holds &= band_low(sim_width).contains(whole[0]) &&
                            band_low(sim_width).contains(whole[1]);
    rows.push_back(row);
  }
  {  // PURIFY, statement 2: high input forces both outputs high.
    ClaimRow row{"PURIFY", 2, "a high input forces both outputs high"};
    row.holds = row.simulation_holds = true;
    for (const Rational& u : detail::closed_grid(high_lo, Rational(1), grid_points)) {
      const auto outs = out_of(GateKind::Purify, {UnitInterval::point(u)});
      row.holds &= band_high(left_width).contains(outs[0]) &&
                   band_high(right_width).contains(outs[1]);
      row.simulation_holds &= band_high(sim_width).contains(outs[0]) &&
                              band_high(sim_width).contains(outs[1]);
      ++row.points;
    }
    const auto whole = out_of(GateKind::Purify, {high});
    row.holds &= band_high(left_width).contains(whole[0]) &&
                 band_high(right_width).contains(whole[1]);
    row.simulation_holds &= band_high(sim_width).contains(whole[0]) &&
                            band_high(sim_width).contains(whole[1]);
    rows.push_back(row);
  }
  {  // PURIFY, statement 3: a mid-band input still yields at least one pure
     // output (left high or right low), pointwise across the open band.
    ClaimRow row{"PURIFY", 3, "a mid-band input forces a pure output on one side"};
    row.holds = row.simulation_holds = true;
    for (const Rational& u : detail::open_grid(low_hi, high_lo, grid_points)) {
      const auto outs = out_of(GateKind::Purify, {UnitInterval::point(u)});
      row.holds &= band_high(left_width).contains(outs[0]) ||
                   band_low(right_width).contains(outs[1]);
      row.simulation_holds &= band_high(sim_width).contains(outs[0]) ||
                              band_low(sim_width).contains(outs[1]);
      ++row.points;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace finclear
