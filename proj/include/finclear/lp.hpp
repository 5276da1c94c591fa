#pragma once

// Exact linear programming over rationals: a dense two-phase simplex with
// Bland's anti-cycling rule. Built for the small programs the clearing
// solvers generate, where exactness and guaranteed termination matter far
// more than speed.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "finclear/numeric.hpp"

namespace finclear {

enum class Relation { LessEq, GreaterEq, Equal };
enum class Sense { Maximize, Minimize };

struct LinearConstraint {
  std::map<std::string, Rational> coeffs;
  Relation relation = Relation::LessEq;
  Rational rhs;
};

struct LinearObjective {
  std::map<std::string, Rational> coeffs;
  Sense sense = Sense::Maximize;
};

// Variables are declared up front with optional bounds; constraints and the
// objective may only reference declared variables.
class LinearProgram {
 public:
  void add_variable(const std::string& name, std::optional<Rational> lo,
                    std::optional<Rational> hi) {
    if (name.empty()) throw input_error("empty variable name");
    if (index_.count(name))
      throw input_error("variable '" + name + "' declared twice");
    if (lo && hi && *lo > *hi)
      throw input_error("variable '" + name + "' has lo > hi");
    index_[name] = names_.size();
    names_.push_back(name);
    lo_.push_back(std::move(lo));
    hi_.push_back(std::move(hi));
  }

  void add_constraint(std::map<std::string, Rational> coeffs, Relation relation,
                      Rational rhs) {
    for (const auto& [v, c] : coeffs) require_declared(v);
    constraints_.push_back(
        LinearConstraint{std::move(coeffs), relation, std::move(rhs)});
  }

  void set_objective(std::map<std::string, Rational> coeffs, Sense sense) {
    for (const auto& [v, c] : coeffs) require_declared(v);
    objective_ = LinearObjective{std::move(coeffs), sense};
  }

  const std::vector<std::string>& variables() const { return names_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::optional<LinearObjective>& objective() const { return objective_; }
  std::optional<Rational> lower_bound(const std::string& v) const {
    return lo_[at(v)];
  }
  std::optional<Rational> upper_bound(const std::string& v) const {
    return hi_[at(v)];
  }

 private:
  void require_declared(const std::string& v) const {
    if (!index_.count(v))
      throw input_error("coefficient references undeclared variable '" + v + "'");
  }
  std::size_t at(const std::string& v) const {
    require_declared(v);
    return index_.at(v);
  }

  std::vector<std::string> names_;
  std::vector<std::optional<Rational>> lo_, hi_;
  std::map<std::string, std::size_t> index_;
  std::vector<LinearConstraint> constraints_;
  std::optional<LinearObjective> objective_;
};

enum class LpStatus { Optimal, Feasible, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::map<std::string, Rational> point;  // filled for Feasible and Optimal
  std::optional<Rational> value;          // filled for Optimal
};

namespace detail {

// Dense simplex state: `rows` holds the constraint matrix with the rhs in the
// final column, `reduced` the current objective expressed over nonbasic
// columns (value in the final slot), `basis` the basic column of each row.
struct SimplexTableau {
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> reduced;
  std::vector<std::size_t> basis;
  std::size_t cols = 0;  // excludes the rhs column
};

inline void dump_tableau(const SimplexTableau& t, std::ostream& out,
                         const char* label) {
  out << "tableau (" << label << "), objective "
      << format_rational(t.reduced[t.cols]) << "\n";
  for (std::size_t j = 0; j < t.cols; ++j)
    out << "  z" << j << ": " << format_rational(t.reduced[j]);
  out << "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out << "  b" << t.basis[i] << " |";
    for (const Rational& v : t.rows[i]) out << " " << format_rational(v);
    out << "\n";
  }
}

inline void pivot(SimplexTableau& t, std::size_t row, std::size_t col) {
  std::vector<Rational>& pr = t.rows[row];
  const Rational p = pr[col];
  for (Rational& v : pr) v /= p;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (i == row || t.rows[i][col] == 0) continue;
    const Rational f = t.rows[i][col];
    for (std::size_t j = 0; j <= t.cols; ++j) t.rows[i][j] -= f * pr[j];
  }
  if (t.reduced[col] != 0) {
    const Rational f = t.reduced[col];
    for (std::size_t j = 0; j <= t.cols; ++j) t.reduced[j] -= f * pr[j];
  }
  t.basis[row] = col;
}

// Maximizes the reduced objective with Bland's rule: entering column is the
// lowest-index improving one, leaving row breaks ratio ties toward the
// lowest-index basic column. Returns false on an unbounded ray.
inline bool run_simplex(SimplexTableau& t, const std::vector<bool>& banned,
                        std::ostream* dump, const char* label) {
  while (true) {
    std::size_t enter = t.cols;
    for (std::size_t j = 0; j < t.cols; ++j)
      if (!banned[j] && t.reduced[j] > 0) {
        enter = j;
        break;
      }
    if (enter == t.cols) return true;
    std::size_t leave = t.rows.size();
    Rational best_ratio;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.rows[i][enter] <= 0) continue;
      const Rational ratio = t.rows[i][t.cols] / t.rows[i][enter];
      if (leave == t.rows.size() || ratio < best_ratio ||
          (ratio == best_ratio && t.basis[i] < t.basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == t.rows.size()) return false;
    pivot(t, leave, enter);
    if (dump) dump_tableau(t, *dump, label);
  }
}

}  // namespace detail

// Two-phase simplex. Bounded variables are shifted to nonnegative ones;
// variables without a lower bound are split into positive and negative
// parts. Equalities become paired inequalities. Without an objective the
// solve stops after phase one with a Feasible witness.
inline LpResult lp_solve(const LinearProgram& lp,
                         std::ostream* tableau_dump = nullptr) {
  const std::size_t nvar = lp.variables().size();

  // Column layout per variable: either one shifted column (lower bound
  // present) or a positive/negative pair.
  std::vector<std::size_t> col_of(nvar);
  std::vector<bool> split(nvar, false);
  std::vector<Rational> shift(nvar, Rational(0));
  std::size_t ncols = 0;
  for (std::size_t v = 0; v < nvar; ++v) {
    const auto lo = lp.lower_bound(lp.variables()[v]);
    col_of[v] = ncols;
    if (lo) {
      shift[v] = *lo;
      ncols += 1;
    } else {
      split[v] = true;
      ncols += 2;
    }
  }

  // Normalized rows  sum coeff*z <= rhs  over the z columns.
  std::vector<std::pair<std::vector<Rational>, Rational>> rows;
  const auto add_row = [&](const std::map<std::string, Rational>& coeffs,
                           const Rational& rhs, bool negate) {
    std::vector<Rational> row(ncols, Rational(0));
    Rational b = negate ? Rational(-rhs) : rhs;
    for (const auto& [name, c] : coeffs) {
      std::size_t v = 0;
      while (lp.variables()[v] != name) ++v;
      const Rational cc = negate ? Rational(-c) : c;
      row[col_of[v]] += cc;
      if (split[v])
        row[col_of[v] + 1] -= cc;
      else
        b -= cc * shift[v];
    }
    rows.emplace_back(std::move(row), std::move(b));
  };
  for (const LinearConstraint& c : lp.constraints()) {
    if (c.relation != Relation::GreaterEq) add_row(c.coeffs, c.rhs, false);
    if (c.relation != Relation::LessEq) add_row(c.coeffs, c.rhs, true);
  }
  for (std::size_t v = 0; v < nvar; ++v) {
    const auto hi = lp.upper_bound(lp.variables()[v]);
    if (!hi) continue;
    add_row({{lp.variables()[v], Rational(1)}}, *hi, false);
  }

  const std::size_t m = rows.size();
  detail::SimplexTableau t;
  t.cols = ncols + m;  // artificials appended below as needed
  std::size_t nart = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (rows[i].second < 0) ++nart;
  t.cols += nart;
  t.basis.resize(m);
  t.rows.assign(m, std::vector<Rational>(t.cols + 1, Rational(0)));
  t.reduced.assign(t.cols + 1, Rational(0));
  std::vector<bool> banned(t.cols, false);

  // Phase one: rows with negative rhs are negated and given an artificial
  // basic column; the objective maximizes minus their sum.
  std::size_t art = ncols + m;
  for (std::size_t i = 0; i < m; ++i) {
    const bool neg = rows[i].second < 0;
    for (std::size_t j = 0; j < ncols; ++j)
      t.rows[i][j] = neg ? Rational(-rows[i].first[j]) : rows[i].first[j];
    t.rows[i][ncols + i] = neg ? Rational(-1) : Rational(1);  // slack
    t.rows[i][t.cols] = neg ? Rational(-rows[i].second) : rows[i].second;
    if (neg) {
      t.rows[i][art] = 1;
      t.basis[i] = art++;
      // Objective "maximize minus the artificial sum": coefficient slots pick
      // up the row, the final slot keeps minus the objective (= plus the rhs).
      for (std::size_t j = 0; j <= t.cols; ++j)
        if (j != t.basis[i]) t.reduced[j] += t.rows[i][j];
    } else {
      t.basis[i] = ncols + i;
    }
  }

  LpResult result;
  if (nart > 0) {
    if (!detail::run_simplex(t, banned, tableau_dump, "phase 1"))
      throw property_error("phase-one objective unbounded");  // cannot happen
    if (t.reduced[t.cols] != 0) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Any artificial still basic sits at level zero. Pivot it out on some
    // real column (rhs zero keeps this safe) or drop the row as redundant;
    // otherwise later pivots could lift the artificial off zero again.
    for (std::size_t i = 0; i < t.rows.size();) {
      if (t.basis[i] < ncols + m) {
        ++i;
        continue;
      }
      std::size_t c = ncols + m;
      for (std::size_t j = 0; j < ncols + m; ++j)
        if (t.rows[i][j] != 0) {
          c = j;
          break;
        }
      if (c < ncols + m) {
        detail::pivot(t, i, c);
        ++i;
      } else {
        t.rows.erase(t.rows.begin() + i);
        t.basis.erase(t.basis.begin() + i);
      }
    }
  }
  for (std::size_t j = ncols + m; j < t.cols; ++j) banned[j] = true;

  // Read a point off the tableau, undoing shifts and splits.
  const auto extract_point = [&] {
    std::vector<Rational> z(t.cols, Rational(0));
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      z[t.basis[i]] = t.rows[i][t.cols];
    std::map<std::string, Rational> point;
    for (std::size_t v = 0; v < nvar; ++v) {
      Rational x = z[col_of[v]] + shift[v];
      if (split[v]) x -= z[col_of[v] + 1] + shift[v];
      point[lp.variables()[v]] = x;
    }
    return point;
  };

  if (!lp.objective()) {
    result.status = LpStatus::Feasible;
    result.point = extract_point();
    return result;
  }

  // Phase two: price the real objective over the current basis.
  const bool minimize = lp.objective()->sense == Sense::Minimize;
  std::vector<Rational> cost(t.cols, Rational(0));
  Rational constant = 0;
  for (const auto& [name, c] : lp.objective()->coeffs) {
    std::size_t v = 0;
    while (lp.variables()[v] != name) ++v;
    const Rational cc = minimize ? Rational(-c) : c;
    cost[col_of[v]] += cc;
    if (split[v])
      cost[col_of[v] + 1] -= cc;
    else
      constant += cc * shift[v];
  }
  t.reduced.assign(t.cols + 1, Rational(0));
  for (std::size_t j = 0; j < t.cols; ++j) t.reduced[j] = cost[j];
  t.reduced[t.cols] = -constant;  // slot holds minus the objective value
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const Rational cb = cost[t.basis[i]];
    if (cb == 0) continue;
    for (std::size_t j = 0; j <= t.cols; ++j)
      t.reduced[j] -= cb * t.rows[i][j];
  }

  if (!detail::run_simplex(t, banned, tableau_dump, "phase 2")) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  result.status = LpStatus::Optimal;
  result.point = extract_point();
  Rational value = -t.reduced[t.cols];
  result.value = minimize ? Rational(-value) : value;
  return result;
}

}  // namespace finclear
