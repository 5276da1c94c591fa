#pragma once

// Financial network model: banks with external assets, debt contracts, and
// credit default swaps. A debt contract (i, j) obliges debtor i to pay
// creditor j its notional. A CDS (i, j, R) obliges i to pay j the notional
// scaled by (1 - r_R), where r_R is the recovery rate of reference bank R.
//
// Networks are plain values. Solvers and checks treat them as read-only;
// the transformation routines copy first.

#include <cctype>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "finclear/numeric.hpp"

namespace finclear {

using DebtKey = std::pair<std::string, std::string>;            // debtor, creditor
using CdsKey = std::tuple<std::string, std::string, std::string>;  // debtor, creditor, reference

class FinancialNetwork {
 public:
  void add_bank(const std::string& id, const Rational& assets) {
    validate_id(id);
    if (assets < 0)
      throw input_error("bank '" + id + "' has negative external assets");
    if (!assets_.emplace(id, assets).second)
      throw input_error("duplicate bank id '" + id + "'");
  }

  // Duplicate (debtor, creditor) pairs aggregate by summing notionals.
  void add_debt(const std::string& debtor, const std::string& creditor,
                const Rational& notional) {
    require_bank(debtor);
    require_bank(creditor);
    if (debtor == creditor)
      throw input_error("debt contract with debtor = creditor ('" + debtor + "')");
    if (notional <= 0)
      throw input_error("debt notional must be positive (" + debtor + " -> " +
                        creditor + ")");
    debt_[{debtor, creditor}] += notional;
  }

  void add_cds(const std::string& debtor, const std::string& creditor,
               const std::string& reference, const Rational& notional) {
    require_bank(debtor);
    require_bank(creditor);
    require_bank(reference);
    if (debtor == creditor || debtor == reference || creditor == reference)
      throw input_error("CDS banks must be pairwise distinct (" + debtor + ", " +
                        creditor + ", " + reference + ")");
    if (notional <= 0)
      throw input_error("CDS notional must be positive (" + debtor + " -> " +
                        creditor + " on " + reference + ")");
    cds_[{debtor, creditor, reference}] += notional;
  }

  bool has_bank(const std::string& id) const { return assets_.count(id) != 0; }

  std::size_t bank_count() const { return assets_.size(); }

  const Rational& assets_of(const std::string& id) const {
    auto it = assets_.find(id);
    if (it == assets_.end()) throw input_error("unknown bank id '" + id + "'");
    return it->second;
  }

  // Lexicographic by construction (std::map key order).
  std::vector<std::string> bank_ids() const {
    std::vector<std::string> ids;
    ids.reserve(assets_.size());
    for (const auto& [id, a] : assets_) ids.push_back(id);
    return ids;
  }

  const std::map<std::string, Rational>& external_assets() const { return assets_; }
  const std::map<DebtKey, Rational>& debts() const { return debt_; }
  const std::map<CdsKey, Rational>& cdses() const { return cds_; }

  Rational debt_notional(const std::string& debtor, const std::string& creditor) const {
    auto it = debt_.find({debtor, creditor});
    return it == debt_.end() ? Rational(0) : it->second;
  }

  bool is_debt_debtor(const std::string& id) const {
    auto it = debt_.lower_bound({id, ""});
    return it != debt_.end() && it->first.first == id;
  }

  bool is_cds_debtor(const std::string& id) const {
    auto it = cds_.lower_bound({id, "", ""});
    return it != cds_.end() && std::get<0>(it->first) == id;
  }

  // Sum of debt notionals owed by the bank.
  Rational debt_liability_total(const std::string& id) const {
    Rational sum(0);
    for (auto it = debt_.lower_bound({id, ""});
         it != debt_.end() && it->first.first == id; ++it)
      sum += it->second;
    return sum;
  }

  // Sum of CDS notionals owed by the bank (its worst-case swap liability).
  Rational cds_notional_total(const std::string& id) const {
    Rational sum(0);
    for (auto it = cds_.lower_bound({id, "", ""});
         it != cds_.end() && std::get<0>(it->first) == id; ++it)
      sum += it->second;
    return sum;
  }

  // Mutators used by the network transformations. They keep the same
  // invariants as the adders.
  void set_assets(const std::string& id, const Rational& assets) {
    if (assets < 0)
      throw input_error("bank '" + id + "' has negative external assets");
    auto it = assets_.find(id);
    if (it == assets_.end()) throw input_error("unknown bank id '" + id + "'");
    it->second = assets;
  }

  void remove_debt(const std::string& debtor, const std::string& creditor) {
    debt_.erase({debtor, creditor});
  }

  void set_debt(const std::string& debtor, const std::string& creditor,
                const Rational& notional) {
    if (notional == 0) {
      remove_debt(debtor, creditor);
      return;
    }
    require_bank(debtor);
    require_bank(creditor);
    if (notional < 0) throw input_error("negative debt notional");
    debt_[{debtor, creditor}] = notional;
  }

  void remove_cds(const CdsKey& key) { cds_.erase(key); }

  // Removes a bank that participates in no contracts.
  void remove_isolated_bank(const std::string& id) {
    for (const auto& [k, v] : debt_)
      if (k.first == id || k.second == id)
        throw input_error("bank '" + id + "' still has debt contracts");
    for (const auto& [k, v] : cds_)
      if (std::get<0>(k) == id || std::get<1>(k) == id || std::get<2>(k) == id)
        throw input_error("bank '" + id + "' still has CDS contracts");
    assets_.erase(id);
  }

  // ---- JSON serialization ------------------------------------------------
  //
  // { "banks": [{"id": ..., "external_assets": ...}],
  //   "debt":  [{"debtor": ..., "creditor": ..., "notional": ...}],
  //   "cds":   [{"debtor": ..., "creditor": ..., "reference": ..., "notional": ...}] }
  //
  // Numbers are "p/q" strings, or plain JSON integers when integral. Arrays
  // are sorted, so serialization is canonical and round-trips bit-exactly.

  static FinancialNetwork from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw input_error(std::string("network JSON parse failure: ") + e.what());
    }
    return from_json(doc);
  }

  static FinancialNetwork from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("banks"))
      throw input_error("network JSON must be an object with a 'banks' array");
    FinancialNetwork net;
    for (const auto& b : doc.at("banks")) {
      if (!b.contains("id") || !b.contains("external_assets"))
        throw input_error("bank entries need 'id' and 'external_assets'");
      net.add_bank(b.at("id").get<std::string>(),
                   rational_from_json(b.at("external_assets")));
    }
    if (doc.contains("debt"))
      for (const auto& d : doc.at("debt"))
        net.add_debt(d.at("debtor").get<std::string>(),
                     d.at("creditor").get<std::string>(),
                     rational_from_json(d.at("notional")));
    if (doc.contains("cds"))
      for (const auto& c : doc.at("cds"))
        net.add_cds(c.at("debtor").get<std::string>(),
                    c.at("creditor").get<std::string>(),
                    c.at("reference").get<std::string>(),
                    rational_from_json(c.at("notional")));
    return net;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["banks"] = nlohmann::ordered_json::array();
    for (const auto& [id, a] : assets_) {
      nlohmann::ordered_json b;
      b["id"] = id;
      b["external_assets"] = rational_to_json(a);
      doc["banks"].push_back(std::move(b));
    }
    doc["debt"] = nlohmann::ordered_json::array();
    for (const auto& [k, v] : debt_) {
      nlohmann::ordered_json d;
      d["debtor"] = k.first;
      d["creditor"] = k.second;
      d["notional"] = rational_to_json(v);
      doc["debt"].push_back(std::move(d));
    }
    doc["cds"] = nlohmann::ordered_json::array();
    for (const auto& [k, v] : cds_) {
      nlohmann::ordered_json c;
      c["debtor"] = std::get<0>(k);
      c["creditor"] = std::get<1>(k);
      c["reference"] = std::get<2>(k);
      c["notional"] = rational_to_json(v);
      doc["cds"].push_back(std::move(c));
    }
    return doc;
  }

  std::string to_json_text() const { return to_json().dump(2) + "\n"; }

 private:
  static void validate_id(const std::string& id) {
    if (id.empty()) throw input_error("empty bank id");
    for (char c : id)
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',')
        throw input_error("bank id '" + id + "' contains whitespace or a comma");
  }

  void require_bank(const std::string& id) const {
    if (!has_bank(id)) throw input_error("unknown bank id '" + id + "'");
  }

  static Rational rational_from_json(const nlohmann::json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_unsigned()) return Rational(v.get<unsigned long long>());
    throw input_error("numbers must be rational strings or integer literals, got " +
                      v.dump());
  }

  static nlohmann::ordered_json rational_to_json(const Rational& r) {
    if (denominator(r) == 1 && numerator(r) >= std::numeric_limits<long long>::min() &&
        numerator(r) <= std::numeric_limits<long long>::max())
      return static_cast<long long>(numerator(r));
    return format_rational(r);
  }

  std::map<std::string, Rational> assets_;
  std::map<DebtKey, Rational> debt_;
  std::map<CdsKey, Rational> cds_;
};

}  // namespace finclear
