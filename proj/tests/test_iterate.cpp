#include <cstddef>
#include <optional>
#include <random>
#include <string>

#include "catch_amalgamated.hpp"
#include "finclear/debt_clearing.hpp"
#include "finclear/iterate.hpp"
#include "finclear/network.hpp"
#include "finclear/numeric.hpp"
#include "random_networks.hpp"

using namespace finclear;

namespace {

Rational q(long num, long den) { return Rational(num) / den; }

Decimal dec(const Rational& r) { return to_decimal(r); }

}  // namespace

TEST_CASE("the standoff pair meets in the middle") {
  ensure_decimal_precision();
  const FinancialNetwork net = testgen::standoff_network(q(1, 4));
  const Decimal tol = dec(q(1, 1000000000));

  // A residual of eps only pins the rate to about 1.5 eps here, so aim a few
  // orders below the tolerance the assertions use.
  const auto run = iterate<Decimal>(net, std::nullopt, Decimal(1) / 2, 500,
                                    dec(q(1, 1000000000000LL)));
  REQUIRE(run.converged);
  REQUIRE(run.clearing.pass);
  REQUIRE(abs_value(Decimal(run.clearing.rates.at("2") - dec(q(1, 2)))) <= tol);
  REQUIRE(abs_value(Decimal(run.clearing.rates.at("5") - dec(q(1, 2)))) <= tol);
  for (const std::string whole : {"1", "3", "4", "6"})
    REQUIRE(abs_value(Decimal(run.clearing.rates.at(whole) - 1)) <= tol);
}

TEST_CASE("other standoff levels land on one minus the root") {
  ensure_decimal_precision();
  const Decimal tol = dec(q(1, 1000000));
  struct Case {
    Rational c;
    Rational rate;
  };
  for (const Case& k : {Case{q(1, 9), q(2, 3)}, Case{q(1, 16), q(3, 4)}}) {
    const FinancialNetwork net = testgen::standoff_network(k.c);
    const auto run = iterate<Decimal>(net, std::nullopt, Decimal(1) / 2, 2000,
                                      dec(q(1, 1000000000)));
    REQUIRE(run.converged);
    REQUIRE(abs_value(Decimal(run.clearing.rates.at("2") - dec(k.rate))) <= tol);
    REQUIRE(abs_value(Decimal(run.clearing.rates.at("5") - dec(k.rate))) <= tol);
  }
}

TEST_CASE("iteration from above tracks the exact greatest vector") {
  ensure_decimal_precision();
  std::mt19937_64 rng(606ull);
  const Decimal eps = dec(q(1, 10000000000LL));
  const Decimal tol = dec(q(1, 10000000));
  for (int trial = 0; trial < 8; ++trial) {
    const long n = 3 + static_cast<long>(rng() % 4);
    const FinancialNetwork net =
        testgen::random_debt_network(rng, n, /*allow_cycles=*/true);

    const auto exact = solve_debt_only(net);
    const auto run = iterate<Decimal>(net, std::nullopt, Decimal(1), 20000, eps);
    REQUIRE(run.converged);
    for (const auto& [id, rate] : exact.rates)
      REQUIRE(abs_value(Decimal(run.clearing.rates.at(id) - dec(rate))) <= tol);
  }
}

TEST_CASE("feed-forward networks settle exactly within their depth") {
  std::mt19937_64 rng(51413ull);
  for (int trial = 0; trial < 10; ++trial) {
    const long n = 3 + static_cast<long>(rng() % 8);
    const FinancialNetwork net =
        testgen::random_debt_network(rng, n, /*allow_cycles=*/false);
    REQUIRE(dependency_cycle_free(net));
    REQUIRE(default_damping<Rational>(net) == 1);

    const auto run = iterate<Rational>(net, std::nullopt, Rational(1),
                                       static_cast<std::size_t>(n), Rational(0));
    REQUIRE(run.converged);
    REQUIRE(run.clearing.max_residual == 0);
    REQUIRE(run.iterations <= static_cast<std::size_t>(n));
  }
}

TEST_CASE("the influence graph knows a loop when it sees one") {
  FinancialNetwork chain;
  chain.add_bank("A", 1);
  chain.add_bank("B", 0);
  chain.add_debt("A", "B", 1);
  REQUIRE(dependency_cycle_free(chain));

  FinancialNetwork cycle = chain;
  cycle.add_debt("B", "A", 1);
  REQUIRE_FALSE(dependency_cycle_free(cycle));
  REQUIRE(default_damping<Rational>(cycle) == q(1, 2));

  REQUIRE_FALSE(dependency_cycle_free(testgen::standoff_network(q(1, 4))));

  // A swap couples its reference to the writer; alone that is feed-forward,
  // but one debt back to the reference closes the loop.
  FinancialNetwork swap;
  swap.add_bank("A", 1);
  swap.add_bank("B", 0);
  swap.add_bank("C", 0);
  swap.add_debt("A", "B", 1);
  swap.add_cds("B", "C", "A", 1);
  REQUIRE(dependency_cycle_free(swap));
  swap.add_debt("C", "A", 1);
  REQUIRE_FALSE(dependency_cycle_free(swap));
}

TEST_CASE("iteration arguments are vetted") {
  FinancialNetwork net;
  net.add_bank("A", q(1, 2));
  net.add_bank("B", 0);
  net.add_debt("A", "B", 1);

  REQUIRE_THROWS_AS(
      iterate<Rational>(net, std::nullopt, Rational(0), 10, Rational(0)),
      input_error);
  REQUIRE_THROWS_AS(
      iterate<Rational>(net, std::nullopt, q(3, 2), 10, Rational(0)),
      input_error);
  REQUIRE_THROWS_AS(
      iterate<Rational>(net, std::nullopt, Rational(1), 10, Rational(-1)),
      input_error);

  RateVector<Rational> short_start{{"A", Rational(1)}};
  REQUIRE_THROWS_AS(iterate<Rational>(net, short_start, Rational(1), 10,
                                      Rational(0)),
                    input_error);
  RateVector<Rational> wild{{"A", Rational(2)}, {"B", Rational(1)}};
  REQUIRE_THROWS_AS(iterate<Rational>(net, wild, Rational(1), 10, Rational(0)),
                    input_error);
}

TEST_CASE("degenerate swap books are refused up front") {
  FinancialNetwork net;
  net.add_bank("A", 1);
  net.add_bank("B", 0);
  net.add_bank("W", 1);
  net.add_cds("W", "B", "A", 1);  // reference A owes nobody
  REQUIRE_THROWS_AS(
      iterate<Rational>(net, std::nullopt, Rational(1), 10, Rational(0)),
      property_error);
}

TEST_CASE("comfortably solvent banks are held at one") {
  FinancialNetwork net;
  net.add_bank("A", 5);
  net.add_bank("B", 0);
  net.add_debt("A", "B", 1);

  RateVector<Rational> start{{"A", Rational(0)}, {"B", Rational(1)}};
  const auto run = iterate<Rational>(net, start, Rational(1), 0, Rational(0));
  REQUIRE(run.converged);
  REQUIRE(run.iterations == 0);
  REQUIRE(run.clearing.rates.at("A") == 1);
  REQUIRE(run.clearing.trivially_solvent.count("A") == 1);
}

TEST_CASE("a zero-step run reports its start honestly") {
  FinancialNetwork net;
  net.add_bank("A", q(1, 2));
  net.add_bank("B", 0);
  net.add_debt("A", "B", 1);

  const auto run =
      iterate<Rational>(net, std::nullopt, Rational(1), 0, Rational(0));
  REQUIRE_FALSE(run.converged);
  REQUIRE(run.iterations == 0);
  REQUIRE(run.clearing.rates.at("A") == 1);
  REQUIRE(run.clearing.max_residual == q(1, 2));
}

TEST_CASE("the reported residual is reproducible from the reported rates") {
  ensure_decimal_precision();
  const FinancialNetwork net = testgen::standoff_network(q(1, 4));
  const auto run =
      iterate<Decimal>(net, std::nullopt, Decimal(1) / 2, 37, Decimal(0));
  REQUIRE_FALSE(run.converged);
  REQUIRE(run.iterations == 37);

  const auto again = verify_crrv<Decimal>(net, run.clearing.rates, Decimal(0));
  REQUIRE(again.max_residual == run.clearing.max_residual);
}

TEST_CASE("seeded restarts are reproducible and tie toward the first") {
  ensure_decimal_precision();
  const FinancialNetwork net = testgen::standoff_network(q(1, 4));
  const Decimal tol = dec(q(1, 1000000000));
  const Decimal eps = dec(q(1, 1000000000000LL));

  const auto a = multi_start<Decimal>(net, 4, 7, Decimal(1) / 2, 400, eps);
  const auto b = multi_start<Decimal>(net, 4, 7, Decimal(1) / 2, 400, eps);
  REQUIRE(a.best.converged);
  REQUIRE(a.best.clearing.rates == b.best.clearing.rates);
  REQUIRE(a.best_start == b.best_start);
  REQUIRE(a.best_start < 4);
  REQUIRE(a.starts == 4);
  REQUIRE(abs_value(Decimal(a.best.clearing.rates.at("2") - dec(q(1, 2)))) <=
          tol);

  REQUIRE_THROWS_AS(multi_start<Decimal>(net, 0, 7, Decimal(1), 10, Decimal(0)),
                    input_error);

  // On a feed-forward network every start lands on residual zero, so the
  // tie-break keeps the very first run.
  std::mt19937_64 rng(99ull);
  const FinancialNetwork dag =
      testgen::random_debt_network(rng, 6, /*allow_cycles=*/false);
  const auto flat = multi_start<Rational>(dag, 5, 123, Rational(1), 50,
                                          Rational(0));
  REQUIRE(flat.best.clearing.max_residual == 0);
  REQUIRE(flat.best_start == 0);
}
