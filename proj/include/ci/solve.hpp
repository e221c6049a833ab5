#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ci {

// One linear equation over the reduced bracket unknowns; coefficients in
// an exact field F (Scalar, or RatFn when a regulator is in play).
template <class F>
struct Equation {
  std::vector<std::pair<int, F>> coeffs;
  F rhs;
  std::string origin;
};

template <class F>
struct SolveOutcome {
  std::vector<std::optional<F>> values;  // nullopt: not fixed by the system
  std::vector<int> indeterminate;
  int rank = 0;
  bool consistent = true;
  std::string conflict;  // origin of the first offending equation
};

// Exact Gaussian elimination with sparse rows.  Underdetermined systems
// report indeterminate unknowns instead of guessing zeros; inconsistency
// is flagged with the equation that failed.
template <class F>
SolveOutcome<F> solve_linear_exact(int n_unknowns, const std::vector<Equation<F>>& eqs) {
  using Row = std::map<int, F>;
  std::map<int, std::pair<Row, F>> pivots;  // lead column -> (unit row, rhs)

  SolveOutcome<F> out;
  out.values.resize(n_unknowns);

  for (const auto& eq : eqs) {
    Row row;
    for (const auto& [c, v] : eq.coeffs) {
      if (v.is_zero()) continue;
      auto it = row.find(c);
      if (it == row.end()) row[c] = v;
      else {
        it->second = it->second + v;
        if (it->second.is_zero()) row.erase(it);
      }
    }
    F rhs = eq.rhs;

    while (!row.empty()) {
      auto lead = row.begin();
      auto p = pivots.find(lead->first);
      if (p == pivots.end()) break;
      F f = lead->second;
      for (const auto& [c, v] : p->second.first) {
        F nv = (row.count(c) ? row[c] : F{}) - f * v;
        if (nv.is_zero()) row.erase(c);
        else row[c] = nv;
      }
      rhs = rhs - f * p->second.second;
    }

    if (row.empty()) {
      if (!rhs.is_zero() && out.consistent) {
        out.consistent = false;
        out.conflict = eq.origin;
      }
      continue;
    }

    int col = row.begin()->first;
    F lead = row.begin()->second;
    for (auto& [c, v] : row) v = v / lead;
    rhs = rhs / lead;
    pivots[col] = {std::move(row), std::move(rhs)};
  }

  out.rank = static_cast<int>(pivots.size());

  std::vector<char> indet(n_unknowns, 0);
  for (int c = 0; c < n_unknowns; ++c)
    if (!pivots.count(c)) indet[c] = 1;

  // pivot rows only reference columns to the right of their lead, so a
  // single descending pass resolves all chains
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    int col = it->first;
    F val = it->second.second;
    bool depends_free = false;
    for (const auto& [c, v] : it->second.first) {
      if (c == col) continue;
      if (indet[c]) {
        depends_free = true;
        break;
      }
      val = val - v * (*out.values[c]);
    }
    if (depends_free) indet[col] = 1;
    else out.values[col] = std::move(val);
  }

  for (int c = 0; c < n_unknowns; ++c)
    if (indet[c]) {
      out.values[c] = std::nullopt;
      out.indeterminate.push_back(c);
    }
  return out;
}

}  // namespace ci
