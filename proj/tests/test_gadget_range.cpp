#include <catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "finclear/gadget_range.hpp"

using namespace finclear;

namespace {

const Rational kDelta(2, 13);
const Rational kEps(18, 377);

Rational q(long num, long den) { return Rational(num, den); }

UnitInterval out1(GateKind kind, const UnitInterval& in) {
  return gate_output_range(kind, {in}, kDelta, kEps)[0];
}

}  // namespace

TEST_CASE("slack bound from the threshold width") {
  CHECK(epsilon_for_delta(q(2, 13)) == q(18, 377));
  CHECK(epsilon_for_delta(q(1, 10)) == q(2, 45));
  CHECK(epsilon_for_delta(q(1, 5)) == q(3, 65));
  CHECK_THROWS_AS(epsilon_for_delta(Rational(0)), input_error);
  CHECK_THROWS_AS(epsilon_for_delta(q(1, 2)), input_error);
  CHECK_THROWS_AS(epsilon_for_delta(q(-1, 4)), input_error);

  // The numeric overload handles the irrational maximizer (sqrt(5)-1)/8.
  ensure_decimal_precision();
  const Decimal best_delta = (sqrt(Decimal(5)) - 1) / 8;
  const Decimal best_eps = (3 - sqrt(Decimal(5))) / 16;
  CHECK(abs(epsilon_for_delta(best_delta) - best_eps) < Decimal("1e-40"));
  // Nearby rational thresholds give strictly less slack.
  CHECK(to_decimal(epsilon_for_delta(q(2, 13))) > epsilon_for_delta(best_delta) - Decimal("1e-4"));
  CHECK(epsilon_for_delta(q(1, 10)) < q(18, 377));
  CHECK(epsilon_for_delta(q(1, 5)) < q(18, 377));
}

TEST_CASE("band width matches the decode threshold exactly") {
  // (1+8delta)/(2delta) * eps == 1/2 - delta at the canonical slack.
  const Rational sim = (1 + 8 * kDelta) / (2 * kDelta) * kEps;
  CHECK(sim == q(1, 2) - kDelta);
  CHECK(sim == q(9, 26));
  // A larger slack overshoots the decode band.
  const Rational wider = (1 + 8 * kDelta) / (2 * kDelta) * (kEps * 2);
  CHECK(wider > q(1, 2) - kDelta);
}

TEST_CASE("inverting gadget output bands") {
  // Worst case over the low band is attained at input 0, where the chain
  // evaluates to exactly [1 - (33/8)eps, 1].
  CHECK(out1(GateKind::Not, UnitInterval::point(0)) ==
        UnitInterval::make(q(1211, 1508), 1));
  CHECK(out1(GateKind::Not, UnitInterval::point(1)) ==
        UnitInterval::make(0, q(297, 1508)));
  const UnitInterval low_band = UnitInterval::make(0, q(9, 26));
  const UnitInterval high_band = UnitInterval::make(q(17, 26), 1);
  CHECK(UnitInterval::make(q(1211, 1508), 1).contains(out1(GateKind::Not, low_band)));
  CHECK(UnitInterval::make(0, q(297, 1508)).contains(out1(GateKind::Not, high_band)));
  // Band edges map strictly past the opposite decode threshold.
  CHECK(out1(GateKind::Not, UnitInterval::point(q(9, 26))).lo() > q(17, 26));
  CHECK(out1(GateKind::Not, UnitInterval::point(q(17, 26))).hi() < q(9, 26));
}

TEST_CASE("disjunction gadget output bands") {
  const UnitInterval zero = UnitInterval::point(0);
  const UnitInterval one = UnitInterval::point(1);
  const UnitInterval full = UnitInterval::make(0, 1);
  // Both inputs hard 0: output is exactly [0, (29/4)eps] = [0, 9/26].
  CHECK(gate_output_range(GateKind::Or, {zero, zero}, kDelta, kEps)[0] ==
        UnitInterval::make(0, q(9, 26)));
  // One input hard 1 forces the output high regardless of the other input.
  const UnitInterval forced = gate_output_range(GateKind::Or, {one, full}, kDelta, kEps)[0];
  CHECK(UnitInterval::make(q(1211, 1508), 1).contains(forced));
  const UnitInterval forced_sym = gate_output_range(GateKind::Or, {full, one}, kDelta, kEps)[0];
  CHECK(forced == forced_sym);
}

TEST_CASE("duplication gadget output bands") {
  // At the exact midpoint both guarantees hold at once: the left output pins
  // to the top band and the right output pins to the bottom band.
  const auto outs = gate_output_range(GateKind::Purify, {UnitInterval::point(q(1, 2))},
                                      kDelta, kEps);
  REQUIRE(outs.size() == 2);
  CHECK(outs[0] == UnitInterval::make(q(565, 754), 1));
  CHECK(outs[1] == UnitInterval::make(0, q(153, 754)));
  // Hard inputs drive both outputs to the matching side.
  const auto at_zero = gate_output_range(GateKind::Purify, {UnitInterval::point(0)},
                                         kDelta, kEps);
  CHECK(at_zero[0].hi() < q(9, 26));
  CHECK(at_zero[1].hi() < q(9, 26));
  const auto at_one = gate_output_range(GateKind::Purify, {UnitInterval::point(1)},
                                        kDelta, kEps);
  CHECK(at_one[0].lo() > q(17, 26));
  CHECK(at_one[1].lo() > q(17, 26));
}

TEST_CASE("full verification table at the canonical parameters") {
  const auto rows = check_gate_claims(kDelta, kEps, 25);
  REQUIRE(rows.size() == 7);
  for (const ClaimRow& row : rows) {
    INFO(row.gate << " statement " << row.statement << ": " << row.description);
    CHECK(row.holds);
    CHECK(row.simulation_holds);
    CHECK(row.points == 25);
  }
}

TEST_CASE("verification table across threshold widths") {
  for (const Rational& delta :
       {q(1, 10), q(2, 13), q(1, 5), q(3, 10), q(5, 12)}) {
    const Rational eps = epsilon_for_delta(delta);
    for (const Rational& e : {eps, Rational(eps / 2)}) {
      const auto rows = check_gate_claims(delta, e, 9);
      for (const ClaimRow& row : rows) {
        INFO("delta=" << format_rational(delta) << " eps=" << format_rational(e)
                      << " " << row.gate << " statement " << row.statement);
        CHECK(row.holds);
        CHECK(row.simulation_holds);
      }
    }
  }
}

TEST_CASE("capped payment sums are contained in ball addition") {
  std::mt19937_64 rng(77);
  const long den = 360;
  for (int i = 0; i < 5000; ++i) {
    const Rational c1(static_cast<long>(rng() % (den + 1)), den);
    const Rational c2(static_cast<long>(rng() % (den + 1)), den);
    const Rational r1(1 + static_cast<long>(rng() % den), 2 * den);
    const Rational r2(1 + static_cast<long>(rng() % den), 2 * den);
    const UnitInterval x = pm_number(c1, r1);
    const UnitInterval y = pm_number(c2, r2);
    CHECK(add(x, y).contains(detail::payment_sum(x, y)));
  }
}

TEST_CASE("range evaluation rejects bad inputs") {
  const UnitInterval full = UnitInterval::make(0, 1);
  CHECK_THROWS_AS(gate_output_range(GateKind::Not, {full, full}, kDelta, kEps),
                  input_error);
  CHECK_THROWS_AS(gate_output_range(GateKind::Or, {full}, kDelta, kEps),
                  input_error);
  CHECK_THROWS_AS(gate_output_range(GateKind::Not, {UnitInterval::empty()}, kDelta, kEps),
                  input_error);
  CHECK_THROWS_AS(gate_output_range(GateKind::Not, {full}, q(1, 2), kEps),
                  input_error);
  CHECK_THROWS_AS(gate_output_range(GateKind::Not, {full}, kDelta, 0),
                  input_error);
  CHECK_THROWS_AS(check_gate_claims(kDelta, kEps, 1), input_error);
}
