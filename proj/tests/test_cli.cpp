// Drives the installed binary through pipes and checks exit codes, output
// formats, and the JSON mode. The binary's path arrives in FINCLEAR_CLI.

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "catch_amalgamated.hpp"
#include "finclear/numeric.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string quoted(const std::string& s) {
  std::string q = "'";
  for (char c : s)
    if (c == '\'')
      q += "'\\''";
    else
      q += c;
  return q + "'";
}

std::string temp_path(const std::string& tag) {
  static int counter = 0;
  return "/tmp/finclear_cli_test_" + std::to_string(getpid()) + "_" + tag +
         "_" + std::to_string(counter++);
}

std::string slurp_file(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

const std::string& cli_path() {
  static const std::string path = [] {
    const char* env = std::getenv("FINCLEAR_CLI");
    if (!env || !*env)
      FAIL("FINCLEAR_CLI must point at the binary under test");
    return std::string(env ? env : "");
  }();
  return path;
}

RunResult run_cli(const std::vector<std::string>& args,
                  const std::string& stdin_text = "",
                  const std::string& env_prefix = "") {
  const std::string in = temp_path("in"), out = temp_path("out"),
                    err = temp_path("err");
  {
    std::ofstream f(in);
    f << stdin_text;
  }
  std::string cmd = env_prefix + quoted(cli_path());
  for (const std::string& a : args) cmd += " " + quoted(a);
  cmd += " < " + in + " > " + out + " 2> " + err;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp_file(out);
  r.err = slurp_file(err);
  std::remove(in.c_str());
  std::remove(out.c_str());
  std::remove(err.c_str());
  return r;
}

// Pulls one bank's rate out of "bank,rate" CSV (comment lines ignored).
std::string csv_rate(const std::string& text, const std::string& bank) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(bank + ",", 0) == 0) return line.substr(bank.size() + 1);
  }
  FAIL("no rate for bank '" + bank + "' in:\n" + text);
  return "";
}

const std::string kToyCircuit = "NOT u v\nOR v w y\nPURIFY v u w\n";

const std::string kCoveredToy = R"({
  "banks": [
    {"id": "A", "external_assets": "1/2"},
    {"id": "S", "external_assets": 0},
    {"id": "CCD", "external_assets": 2}
  ],
  "debt": [{"debtor": "A", "creditor": "S", "notional": 1}],
  "cds": [{"debtor": "CCD", "creditor": "S", "reference": "A", "notional": 1}]
})";

}  // namespace

TEST_CASE("example piped into the iterative solver lands on one half") {
  const RunResult ex = run_cli({"example", "--c", "1/4"});
  REQUIRE(ex.exit_code == 0);
  REQUIRE(ex.out.find("\"external_assets\": \"3/4\"") != std::string::npos);

  const RunResult solved = run_cli({"solve-iterate", "--eps", "1e-9"}, ex.out);
  REQUIRE(solved.exit_code == 0);
  REQUIRE(solved.out.rfind("bank,rate\n", 0) == 0);

  using finclear::Rational;
  const Rational half(1, 2);
  const Rational tol(1, 100000000);
  for (const std::string bank : {"2", "5"}) {
    const Rational r = finclear::parse_rational(csv_rate(solved.out, bank));
    REQUIRE(abs(Rational(r - half)) <= tol);
  }
  for (const std::string bank : {"1", "3", "4", "6"})
    REQUIRE(abs(Rational(finclear::parse_rational(csv_rate(solved.out, bank)) -
                         1)) <= tol);
}

TEST_CASE("compiled circuits pass the property check in both forms") {
  const RunResult plain = run_cli({"compile-circuit", "--delta", "2/13"},
                                  kToyCircuit);
  REQUIRE(plain.exit_code == 0);
  const RunResult checked = run_cli({"check"}, plain.out);
  REQUIRE(checked.exit_code == 0);
  REQUIRE(checked.out.find("nondegenerate: yes") != std::string::npos);
  REQUIRE(checked.out.find("dedicated writers: yes") != std::string::npos);

  const RunResult merged =
      run_cli({"compile-circuit", "--delta", "2/13", "--merge-ccd"},
              kToyCircuit);
  REQUIRE(merged.exit_code == 0);
  const RunResult mchecked = run_cli({"check"}, merged.out);
  REQUIRE(mchecked.exit_code == 0);
  REQUIRE(mchecked.out.find("central writer: yes") != std::string::npos);
}

TEST_CASE("solver output survives its own verification at zero slack") {
  const RunResult solved = run_cli({"solve-mblp"}, kCoveredToy);
  REQUIRE(solved.exit_code == 0);
  REQUIRE(csv_rate(solved.out, "A") == "1/2");

  std::string rates = "bank,rate\n";
  std::istringstream in(solved.out);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') rates += line + "\n";

  const std::string rates_file = temp_path("rates");
  {
    std::ofstream f(rates_file);
    f << rates;
  }
  const RunResult ok = run_cli(
      {"verify", "--rates", rates_file, "--eps", "0"}, kCoveredToy);
  REQUIRE(ok.exit_code == 0);
  REQUIRE(ok.out.find("pass: yes") != std::string::npos);

  // Nudging one rate off the fixed point must flip the exit code to 1.
  const std::string bad_file = temp_path("bad_rates");
  {
    std::ofstream f(bad_file);
    f << "bank,rate\nA,2/5\nCCD,1\nS,1\n";
  }
  const RunResult bad = run_cli(
      {"verify", "--rates", bad_file, "--eps", "0"}, kCoveredToy);
  REQUIRE(bad.exit_code == 1);
  REQUIRE(bad.out.find("pass: no") != std::string::npos);
  std::remove(rates_file.c_str());
  std::remove(bad_file.c_str());
}

TEST_CASE("covered solver emits both rational and decimal columns") {
  const RunResult r = run_cli({"solve-covered"}, kCoveredToy);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.rfind("bank,rate-rational,rate-decimal\n", 0) == 0);
  REQUIRE(r.out.find("A,1/2,0.5") != std::string::npos);
}

TEST_CASE("bad invocations exit with code 2") {
  REQUIRE(run_cli({"frobnicate"}).exit_code == 2);
  REQUIRE(run_cli({}).exit_code == 2);
  REQUIRE(run_cli({"solve-iterate", "--bogus"}, kCoveredToy).exit_code == 2);
  REQUIRE(run_cli({"example", "--c", "7/4"}).exit_code == 2);
  REQUIRE(run_cli({"solve-mblp"}, "this is not json").exit_code == 2);
  REQUIRE(run_cli({"solve-iterate", "--eps", "-1"}, kCoveredToy).exit_code == 2);
  // Preconditions count as input errors: two writers, no central one.
  const RunResult ex = run_cli({"example"});
  REQUIRE(run_cli({"solve-mblp"}, ex.out).exit_code == 2);

  const RunResult help = run_cli({"--help"});
  REQUIRE(help.exit_code == 0);
  REQUIRE(help.out.find("solve-iterate") != std::string::npos);
}

TEST_CASE("json reports parse back and repeat verbatim") {
  const RunResult a = run_cli({"solve-iterate", "--eps", "1e-9", "--json"},
                              run_cli({"example", "--c", "1/4"}).out);
  REQUIRE(a.exit_code == 0);
  const json doc = json::parse(a.out);
  REQUIRE(doc.at("pass").get<bool>());
  REQUIRE(doc.at("rates").size() == 6);
  REQUIRE(doc.contains("max_residual"));
  REQUIRE(doc.contains("iterations"));

  const RunResult b = run_cli({"solve-iterate", "--eps", "1e-9", "--json"},
                              run_cli({"example", "--c", "1/4"}).out);
  REQUIRE(a.out == b.out);

  const RunResult claims = run_cli({"check-claims", "--grid", "8", "--json"});
  REQUIRE(claims.exit_code == 0);
  const json table = json::parse(claims.out);
  REQUIRE(table.at("pass").get<bool>());
  REQUIRE(table.at("rows").size() == 7);
}

TEST_CASE("compile decode round trip recovers the planted values") {
  const std::string vm = temp_path("vm");
  const RunResult compiled =
      run_cli({"compile-circuit", "--varmap-out", vm}, kToyCircuit);
  REQUIRE(compiled.exit_code == 0);
  REQUIRE(slurp_file(vm).rfind("variable,bank\n", 0) == 0);

  const std::string rates = temp_path("vrates");
  {
    std::ofstream f(rates);
    f << "bank,rate\nb_u,9/26\nb_v,17/26\nb_w,1/2\nb_y,1\n";
  }
  const RunResult decoded = run_cli({"decode", "--rates", rates, "--varmap", vm});
  REQUIRE(decoded.exit_code == 0);
  REQUIRE(decoded.out == "variable,value\nu,0\nv,1\nw,bot\ny,1\n");
  std::remove(vm.c_str());
  std::remove(rates.c_str());
}

TEST_CASE("transforming away covered swaps leaves a swap-free network") {
  const RunResult t = run_cli({"transform-covered"}, kCoveredToy);
  REQUIRE(t.exit_code == 0);
  const RunResult checked = run_cli({"check"}, t.out);
  REQUIRE(checked.exit_code == 0);
  REQUIRE(checked.out.find("swaps: 0") != std::string::npos);
  REQUIRE(checked.out.find("banks: 4") != std::string::npos);
}

TEST_CASE("the precision override reaches the decimal printer") {
  const RunResult ex = run_cli({"example", "--c", "1/2"});
  const RunResult solved = run_cli({"solve-iterate", "--eps", "1e-6"}, ex.out,
                                   "FINCLEAR_PRECISION=8 ");
  REQUIRE(solved.exit_code == 0);
  REQUIRE(solved.out.find("2,0.292894") != std::string::npos);

  const RunResult broken = run_cli({"example"}, "", "FINCLEAR_PRECISION=zero ");
  REQUIRE(broken.exit_code == 2);
}

TEST_CASE("program text can be written to a file instead of stdout") {
  const std::string out = temp_path("mbnlp");
  const RunResult r = run_cli({"emit-mbnlp", "--out", out}, kCoveredToy);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.empty());
  const std::string text = slurp_file(out);
  REQUIRE(text.find("binary y_A") != std::string::npos);
  REQUIRE(text.find("fix r_CCD = 1") != std::string::npos);
  std::remove(out.c_str());
}
