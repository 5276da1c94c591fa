// finclear: command-line front end for the clearing library. Networks come
// in as JSON (stdin by default so subcommands compose in pipes), rates as
// bank,rate CSV. Exit codes: 0 success, 1 verification failure, 2 bad input.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "finclear/circuit.hpp"
#include "finclear/clearing.hpp"
#include "finclear/compile.hpp"
#include "finclear/debt_clearing.hpp"
#include "finclear/gadget_range.hpp"
#include "finclear/iterate.hpp"
#include "finclear/mblp.hpp"
#include "finclear/network.hpp"
#include "finclear/numeric.hpp"
#include "finclear/properties.hpp"

namespace {

using namespace finclear;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kVerifyFail = 1;
constexpr int kBadInput = 2;

std::string slurp(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_text(const std::string& path) {
  if (path.empty()) return slurp(std::cin);
  std::ifstream file(path);
  if (!file) throw input_error("cannot open '" + path + "'");
  return slurp(file);
}

FinancialNetwork read_network(const std::string& path) {
  return FinancialNetwork::from_json_text(read_text(path));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw input_error("cannot open '" + path + "' for writing");
  file << text;
  file.flush();
  if (!file) throw input_error("failed while writing '" + path + "'");
}

std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Two-column CSV with a header line; the value is everything after the
// first comma, so a third column would be rejected by the number parser
// rather than silently folded into the key.
std::map<std::string, std::string> read_csv_pairs(const std::string& path,
                                                  const std::string& what) {
  std::istringstream in(read_text(path));
  std::map<std::string, std::string> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string bare = trimmed(line);
    if (bare.empty() || bare[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw input_error("malformed " + what + " line '" + line + "'");
    const std::string key = line.substr(0, comma);
    if (first) {
      first = false;
      if (key == "bank" || key == "variable") continue;
    }
    if (!rows.emplace(key, line.substr(comma + 1)).second)
      throw input_error("duplicate " + what + " entry for '" + key + "'");
  }
  return rows;
}

RateVector<Rational> read_rates_csv(const std::string& path) {
  RateVector<Rational> rates;
  for (const auto& [bank, value] : read_csv_pairs(path, "rates"))
    rates[bank] = parse_rational(value);
  return rates;
}

std::string rates_csv(const RateVector<Rational>& rates) {
  std::ostringstream out;
  out << "bank,rate\n";
  for (const auto& [id, v] : rates) out << id << ',' << format_rational(v) << '\n';
  return out.str();
}

std::string rates_csv(const RateVector<Decimal>& rates) {
  std::ostringstream out;
  out << "bank,rate\n";
  for (const auto& [id, v] : rates) out << id << ',' << format_decimal(v) << '\n';
  return out.str();
}

json report_json(const ClearingReport<Rational>& rep) {
  json rates = json::object(), residuals = json::object();
  for (const auto& [id, v] : rep.rates) rates[id] = format_rational(v);
  for (const auto& [id, v] : rep.per_bank_residual)
    residuals[id] = format_rational(v);
  return json{{"rates", rates},
              {"per_bank_residual", residuals},
              {"max_residual", format_rational(rep.max_residual)},
              {"trivially_solvent",
               std::vector<std::string>(rep.trivially_solvent.begin(),
                                        rep.trivially_solvent.end())},
              {"pass", rep.pass}};
}

json report_json(const ClearingReport<Decimal>& rep) {
  json rates = json::object(), residuals = json::object();
  for (const auto& [id, v] : rep.rates) rates[id] = format_decimal(v);
  for (const auto& [id, v] : rep.per_bank_residual)
    residuals[id] = format_decimal(v);
  return json{{"rates", rates},
              {"per_bank_residual", residuals},
              {"max_residual", format_decimal(rep.max_residual)},
              {"trivially_solvent",
               std::vector<std::string>(rep.trivially_solvent.begin(),
                                        rep.trivially_solvent.end())},
              {"pass", rep.pass}};
}

void print_json(const json& doc) { std::cout << doc.dump(2) << '\n'; }

// "3/2*A + B - 1/4*C": '+'/'-' separate terms, an optional rational
// coefficient multiplies a bank id.
LinearObjective parse_objective(const std::string& text, Sense sense) {
  LinearObjective obj;
  obj.sense = sense;
  std::vector<std::pair<bool, std::string>> terms;  // (negated, body)
  std::string current;
  bool negated = false;
  bool expect_term = true;
  for (char c : text) {
    if ((c == '+' || c == '-') && !expect_term) {
      terms.emplace_back(negated, current);
      current.clear();
      negated = (c == '-');
      expect_term = true;
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) expect_term = false;
    current.push_back(c);
  }
  terms.emplace_back(negated, current);

  for (const auto& [neg, body] : terms) {
    const std::string term = trimmed(body);
    if (term.empty()) throw input_error("empty term in objective");
    const auto star = term.find('*');
    Rational coeff(1);
    std::string bank = term;
    if (star != std::string::npos) {
      coeff = parse_rational(term.substr(0, star));
      bank = trimmed(term.substr(star + 1));
    }
    if (bank.empty()) throw input_error("objective term without a bank id");
    if (neg) coeff = -coeff;
    obj.coeffs[bank] += coeff;
  }
  return obj;
}

int run_check(const std::string& net_path, bool as_json) {
  const FinancialNetwork net = read_network(net_path);
  const NondegeneracyResult nd = check_nondegenerate(net);
  const bool covered = check_covered(net);
  const bool dedicated = check_dedicated(net);
  const CentralDebtorResult central = check_central_cds_debtor(net);

  if (as_json) {
    print_json(json{{"banks", net.bank_count()},
                    {"debts", net.debts().size()},
                    {"swaps", net.cdses().size()},
                    {"nondegenerate", nd.ok},
                    {"violations", nd.violations},
                    {"covered", covered},
                    {"dedicated_writers", dedicated},
                    {"central_writer",
                     json{{"ok", central.ok},
                          {"bank", central.ccd ? json(*central.ccd) : json()},
                          {"reason", central.reason}}}});
  } else {
    std::cout << "banks: " << net.bank_count() << '\n'
              << "debts: " << net.debts().size() << '\n'
              << "swaps: " << net.cdses().size() << '\n'
              << "nondegenerate: " << (nd.ok ? "yes" : "no") << '\n';
    for (const std::string& v : nd.violations) std::cout << "  - " << v << '\n';
    std::cout << "covered: " << (covered ? "yes" : "no") << '\n'
              << "dedicated writers: " << (dedicated ? "yes" : "no") << '\n'
              << "central writer: " << (central.ok ? "yes" : "no");
    if (central.ccd) std::cout << " (" << *central.ccd << ")";
    if (!central.ok && !central.reason.empty())
      std::cout << " (" << central.reason << ")";
    std::cout << '\n';
  }
  return nd.ok ? kOk : kVerifyFail;
}

int run_solve_iterate(const std::string& net_path, const std::string& eps_str,
                      const std::string& damping_str, unsigned long max_iter,
                      unsigned long starts, unsigned long seed, bool as_json) {
  const FinancialNetwork net = read_network(net_path);
  const Rational eps_q = parse_rational(eps_str);
  if (eps_q < 0) throw input_error("eps must be nonnegative");
  const Decimal eps = to_decimal(eps_q);
  const Decimal damping = damping_str.empty()
                              ? default_damping<Decimal>(net)
                              : to_decimal(parse_rational(damping_str));

  IterationReport<Decimal> run;
  std::optional<std::size_t> best_start;
  if (starts == 0) {
    run = iterate<Decimal>(net, std::nullopt, damping, max_iter, eps);
  } else {
    auto ms = multi_start<Decimal>(net, starts, seed, damping, max_iter, eps);
    run = std::move(ms.best);
    best_start = ms.best_start;
  }

  const ClearingReport<Decimal> verified =
      verify_crrv<Decimal>(net, run.clearing.rates, eps);

  if (as_json) {
    json doc = report_json(verified);
    doc["iterations"] = run.iterations;
    doc["converged"] = run.converged;
    doc["damping"] = format_decimal(damping);
    if (best_start) doc["best_start"] = *best_start;
    print_json(doc);
  } else {
    std::cout << rates_csv(verified.rates);
    std::cout << "# max-residual = " << format_decimal(verified.max_residual)
              << '\n'
              << "# iterations = " << run.iterations << '\n';
  }
  if (!verified.pass) {
    std::cerr << "verification failed: max residual "
              << format_decimal(verified.max_residual) << " exceeds eps "
              << eps_str << '\n';
    return kVerifyFail;
  }
  return kOk;
}

int run_solve_covered(const std::string& net_path, bool as_json) {
  const FinancialNetwork net = read_network(net_path);
  const CoveredSolution sol = solve_covered_central(net);

  if (as_json) {
    json doc = report_json(sol.report);
    json decimals = json::object();
    for (const auto& [id, v] : sol.report.rates)
      decimals[id] = format_decimal(to_decimal(v));
    doc["rates_decimal"] = decimals;
    doc["dummy_banks"] = sol.dummy_count;
    print_json(doc);
  } else {
    std::cout << "bank,rate-rational,rate-decimal\n";
    for (const auto& [id, v] : sol.report.rates)
      std::cout << id << ',' << format_rational(v) << ','
                << format_decimal(to_decimal(v)) << '\n';
  }
  if (!sol.report.pass) {
    std::cerr << "verification failed: residual "
              << format_rational(sol.report.max_residual) << " is not zero\n";
    return kVerifyFail;
  }
  return kOk;
}

int run_solve_mblp(const std::string& net_path, const std::string& objective,
                   const std::string& sense, bool as_json) {
  const FinancialNetwork net = read_network(net_path);
  std::optional<LinearObjective> obj;
  if (!objective.empty()) {
    if (sense != "max" && sense != "min")
      throw input_error("--sense must be max or min");
    obj = parse_objective(objective,
                          sense == "min" ? Sense::Minimize : Sense::Maximize);
  }
  const MblpSolution sol = solve_exhaustive(net, obj);
  const ClearingReport<Rational> verified =
      verify_crrv<Rational>(net, sol.report.rates, Rational(0));

  if (as_json) {
    json doc = report_json(verified);
    json y = json::object();
    for (const auto& [id, bit] : sol.y) y[id] = bit;
    doc["y"] = y;
    doc["branches"] = sol.branches;
    if (sol.objective_value)
      doc["objective_value"] = format_rational(*sol.objective_value);
    print_json(doc);
  } else {
    std::cout << rates_csv(verified.rates);
    if (sol.objective_value)
      std::cout << "# objective = " << format_rational(*sol.objective_value)
                << '\n';
    std::cout << "# branches = " << sol.branches << '\n';
  }
  if (!verified.pass) {
    std::cerr << "verification failed: residual "
              << format_rational(verified.max_residual) << " is not zero\n";
    return kVerifyFail;
  }
  return kOk;
}

int run_emit_mbnlp(const std::string& net_path, const std::string& out_path) {
  const FinancialNetwork net = read_network(net_path);
  const std::string text = emit_mbnlp(net, out_path);
  if (out_path.empty()) std::cout << text;
  return kOk;
}

int run_transform_covered(const std::string& net_path,
                          const std::string& out_path) {
  FinancialNetwork work = read_network(net_path);
  while (!work.cdses().empty())
    work = transform_step(work, work.cdses().begin()->first);
  write_text(out_path, work.to_json_text());
  return kOk;
}

int run_compile_circuit(const std::string& circuit_path,
                        const std::string& delta_str, bool merge,
                        const std::string& varmap_out, bool as_json) {
  const GadgetParams params = params_from_delta(parse_rational(delta_str));
  const PureCircuitInstance inst =
      PureCircuitInstance::parse(read_text(circuit_path));
  const CompiledInstance compiled = compile_instance(inst, params);
  const FinancialNetwork net =
      merge ? merge_central_debtor(compiled.network) : compiled.network;

  std::ostringstream varmap;
  varmap << "variable,bank\n";
  for (const auto& [var, bank] : compiled.variable_bank)
    varmap << var << ',' << bank << '\n';
  if (!varmap_out.empty()) write_text(varmap_out, varmap.str());

  if (as_json) {
    json vm = json::object();
    for (const auto& [var, bank] : compiled.variable_bank) vm[var] = bank;
    print_json(json{{"network", json::parse(net.to_json_text())},
                    {"varmap", vm},
                    {"delta", format_rational(params.delta)},
                    {"epsilon", format_rational(params.epsilon)}});
  } else {
    std::cout << net.to_json_text();
  }
  return kOk;
}

int run_decode(const std::string& rates_path, const std::string& varmap_path,
               const std::string& delta_str, bool as_json) {
  const RateVector<Rational> rates = read_rates_csv(rates_path);
  std::map<std::string, std::string> varmap;
  for (const auto& [var, bank] : read_csv_pairs(varmap_path, "varmap"))
    varmap[var] = trimmed(bank);
  const Assignment x = decode(rates, varmap, parse_rational(delta_str));

  if (as_json) {
    json doc = json::object();
    for (const auto& [var, value] : x) doc[var] = truth_name(value);
    print_json(doc);
  } else {
    std::cout << "variable,value\n";
    for (const auto& [var, value] : x)
      std::cout << var << ',' << truth_name(value) << '\n';
  }
  return kOk;
}

int run_verify(const std::string& net_path, const std::string& rates_path,
               const std::string& eps_str, bool as_json) {
  const FinancialNetwork net = read_network(net_path);
  const RateVector<Rational> rates = read_rates_csv(rates_path);
  const Rational eps = parse_rational(eps_str);
  const ClearingReport<Rational> rep = verify_crrv<Rational>(net, rates, eps);

  if (as_json) {
    print_json(report_json(rep));
  } else {
    std::cout << "max residual: " << format_rational(rep.max_residual) << '\n'
              << "pass: " << (rep.pass ? "yes" : "no") << '\n';
    if (!rep.pass)
      for (const auto& [id, v] : rep.per_bank_residual)
        if (v > eps || (rep.trivially_solvent.count(id) && rep.rates.at(id) != 1))
          std::cout << "  off: " << id << " residual "
                    << format_rational(v) << '\n';
  }
  return rep.pass ? kOk : kVerifyFail;
}

int run_check_claims(const std::string& delta_str, const std::string& eps_str,
                     long grid, bool as_json) {
  const Rational delta = parse_rational(delta_str);
  const Rational eps =
      eps_str.empty() ? epsilon_for_delta(delta) : parse_rational(eps_str);
  const std::vector<ClaimRow> rows = check_gate_claims(delta, eps, grid);

  bool all_ok = true;
  for (const ClaimRow& row : rows) all_ok &= row.holds && row.simulation_holds;

  if (as_json) {
    json list = json::array();
    for (const ClaimRow& row : rows)
      list.push_back(json{{"gate", row.gate},
                          {"statement", row.statement},
                          {"description", row.description},
                          {"holds", row.holds},
                          {"simulation_holds", row.simulation_holds},
                          {"points", row.points}});
    print_json(json{{"delta", format_rational(delta)},
                    {"epsilon", format_rational(eps)},
                    {"rows", list},
                    {"pass", all_ok}});
  } else {
    for (const ClaimRow& row : rows)
      std::cout << row.gate << " #" << row.statement << ": " << row.description
                << ": " << (row.holds ? "holds" : "FAILS") << ", simulation "
                << (row.simulation_holds ? "holds" : "FAILS") << " ("
                << row.points << " points)\n";
    std::cout << (all_ok ? "all claims hold" : "SOME CLAIMS FAIL") << '\n';
  }
  return all_ok ? kOk : kVerifyFail;
}

int run_example(const std::string& c_str) {
  const Rational c = parse_rational(c_str);
  if (c <= 0 || c >= 1) throw input_error("c must lie strictly between 0 and 1");
  // Two symmetric writers, each holding a swap on the other's reference
  // debt; the mutual standoff settles both rates at 1 - sqrt(c).
  FinancialNetwork net;
  for (int i = 1; i <= 6; ++i) net.add_bank(std::to_string(i), 0);
  net.set_assets("2", Rational(1 - c));
  net.set_assets("5", Rational(1 - c));
  net.add_debt("2", "3", 1);
  net.add_debt("5", "4", 1);
  net.add_cds("2", "1", "5", 1);
  net.add_cds("5", "6", "2", 1);
  std::cout << net.to_json_text();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    ensure_decimal_precision();

    CLI::App app{"exact and numeric clearing tools for financial networks "
                 "with credit default swaps",
                 "finclear"};
    app.require_subcommand(1);
    int code = kOk;

    std::string chk_net;
    bool chk_json = false;
    auto* chk = app.add_subcommand(
        "check", "parse a network and report its structural properties");
    chk->add_option("--network", chk_net, "network JSON file (default: stdin)");
    chk->add_flag("--json", chk_json, "emit the report as JSON");
    chk->callback([&] { code = run_check(chk_net, chk_json); });

    std::string it_net, it_eps = "1e-9", it_damping;
    unsigned long it_max = 10000, it_starts = 0, it_seed = 0;
    bool it_json = false;
    auto* it = app.add_subcommand(
        "solve-iterate", "damped fixed-point iteration in decimal arithmetic");
    it->add_option("--network", it_net, "network JSON file (default: stdin)");
    it->add_option("--eps", it_eps, "target residual (default 1e-9)");
    it->add_option("--damping", it_damping,
                   "step blend in (0,1] (default: 1 when feed-forward, else 1/2)");
    it->add_option("--max-iter", it_max, "iteration cap (default 10000)");
    it->add_option("--starts", it_starts,
                   "random starting points; 0 starts once from all ones");
    it->add_option("--seed", it_seed, "seed for the random starts");
    it->add_flag("--json", it_json, "emit the report as JSON");
    it->callback([&] {
      code = run_solve_iterate(it_net, it_eps, it_damping, it_max, it_starts,
                               it_seed, it_json);
    });

    std::string cov_net;
    bool cov_json = false;
    auto* cov = app.add_subcommand(
        "solve-covered",
        "exact clearing for covered swaps from fully capitalized writers");
    cov->add_option("--network", cov_net, "network JSON file (default: stdin)");
    cov->add_flag("--json", cov_json, "emit the report as JSON");
    cov->callback([&] { code = run_solve_covered(cov_net, cov_json); });

    std::string mb_net, mb_obj, mb_sense = "max";
    bool mb_json = false;
    auto* mb = app.add_subcommand(
        "solve-mblp", "exact clearing via the mixed-binary program sweep");
    mb->add_option("--network", mb_net, "network JSON file (default: stdin)");
    auto* mb_obj_opt = mb->add_option(
        "--objective", mb_obj, "rational combination like '1/2*A + B - C'");
    mb->add_option("--sense", mb_sense, "max or min (default max)")
        ->needs(mb_obj_opt);
    mb->add_flag("--json", mb_json, "emit the report as JSON");
    mb->callback([&] { code = run_solve_mblp(mb_net, mb_obj, mb_sense, mb_json); });

    std::string em_net, em_out;
    auto* em = app.add_subcommand(
        "emit-mbnlp", "write the mixed-binary program in text form");
    em->add_option("--network", em_net, "network JSON file (default: stdin)");
    em->add_option("--out", em_out, "output path (default: stdout)");
    em->callback([&] { code = run_emit_mbnlp(em_net, em_out); });

    std::string tr_net, tr_out;
    auto* tr = app.add_subcommand(
        "transform-covered", "rewrite all covered swaps as plain debt");
    tr->add_option("--network", tr_net, "network JSON file (default: stdin)");
    tr->add_option("--out", tr_out, "output path (default: stdout)");
    tr->callback([&] { code = run_transform_covered(tr_net, tr_out); });

    std::string cc_circuit, cc_delta = "2/13", cc_varmap;
    bool cc_merge = false, cc_json = false;
    auto* cc = app.add_subcommand(
        "compile-circuit", "compile a gate list into a financial network");
    cc->add_option("--circuit", cc_circuit, "circuit file (default: stdin)");
    cc->add_option("--delta", cc_delta, "decode band parameter (default 2/13)");
    cc->add_option("--varmap-out", cc_varmap, "write variable,bank CSV here");
    cc->add_flag("--merge-ccd", cc_merge, "pool all swap writers into one bank");
    cc->add_flag("--json", cc_json, "emit network and varmap as one JSON object");
    cc->callback([&] {
      code = run_compile_circuit(cc_circuit, cc_delta, cc_merge, cc_varmap,
                                 cc_json);
    });

    std::string de_rates, de_varmap, de_delta = "2/13";
    bool de_json = false;
    auto* de = app.add_subcommand(
        "decode", "map recovery rates back to circuit values");
    de->add_option("--rates", de_rates, "bank,rate CSV")->required();
    de->add_option("--varmap", de_varmap, "variable,bank CSV")->required();
    de->add_option("--delta", de_delta, "decode band parameter (default 2/13)");
    de->add_flag("--json", de_json, "emit the assignment as JSON");
    de->callback([&] { code = run_decode(de_rates, de_varmap, de_delta, de_json); });

    std::string ve_net, ve_rates, ve_eps = "0";
    bool ve_json = false;
    auto* ve = app.add_subcommand(
        "verify", "check a rate vector against a network at a residual bound");
    ve->add_option("--network", ve_net, "network JSON file (default: stdin)");
    ve->add_option("--rates", ve_rates, "bank,rate CSV")->required();
    ve->add_option("--eps", ve_eps, "residual bound (default 0, exact)");
    ve->add_flag("--json", ve_json, "emit the report as JSON");
    ve->callback([&] { code = run_verify(ve_net, ve_rates, ve_eps, ve_json); });

    std::string cl_delta = "2/13", cl_eps;
    long cl_grid = 128;
    bool cl_json = false;
    auto* cl = app.add_subcommand(
        "check-claims", "verify the gate output bands on a rational grid");
    cl->add_option("--delta", cl_delta, "band parameter (default 2/13)");
    cl->add_option("--epsilon", cl_eps,
                   "residual parameter (default: the encoding value for delta)");
    cl->add_option("--grid", cl_grid, "grid points per band (default 128)");
    cl->add_flag("--json", cl_json, "emit the table as JSON");
    cl->callback([&] { code = run_check_claims(cl_delta, cl_eps, cl_grid, cl_json); });

    std::string ex_c = "1/4";
    auto* ex = app.add_subcommand(
        "example", "emit the six-bank standoff example network");
    ex->add_option("--c", ex_c, "shortfall parameter in (0,1) (default 1/4)");
    ex->callback([&] { code = run_example(ex_c); });

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int parse_code = app.exit(e);
      return parse_code == 0 ? kOk : kBadInput;
    }
    return code;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const property_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
}
