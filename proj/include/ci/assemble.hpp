#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ci/decompose.hpp"
#include "ci/model.hpp"
#include "ci/polynomial.hpp"
#include "ci/solve.hpp"

// Shared row assembly for the identification system.  Each solution entry
// f~ contributes, per (time-basis function x constant-monomial), one
// linear equation
//
//     coeff_in(df~/dt)  =  sum_u  B_u * coeff_in(E_u)
//
// where for the reduced unknown u = (k,l):
//
//     E_u = (d_R f~/dC_k)(d_L H/dC_l) + sigma_u (d_R f~/dC_l)(d_L H/dC_k)
//
// and sigma_u relates B_lk to B_kl under graded antisymmetry.  The
// coefficient field F is Scalar for plain runs; on the regulator path the
// designated coupling is stripped from the monomial keys and lifted into
// rational-function coefficients instead.

namespace ci {
namespace detail {

inline std::string field_str(const Scalar& s) { return s.str(); }
inline std::string field_str(const RatFn& r) { return r.str("~"); }

inline int antisymmetry_sign(Parity pk, Parity pl) {
  // B_lk = sign * B_kl
  return (pk == Parity::Odd && pl == Parity::Odd) ? 1 : -1;
}

inline std::vector<std::pair<int, int>> reduced_unknowns(const ModelSpec& m) {
  const auto& C = m.solution.constants;
  const SymbolTable& tab = m.tab();
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < static_cast<int>(C.size()); ++k)
    for (int l = k; l < static_cast<int>(C.size()); ++l) {
      if (tab.parity(C[k]) != tab.parity(C[l])) continue;  // parity selection
      if (k == l && tab.parity(C[k]) == Parity::Even) continue;
      out.emplace_back(k, l);
    }
  return out;
}

// Splits mono into (key string without coupling, coupling power, scalar).
template <class F, class Lift>
void accumulate(std::map<std::string, std::pair<F, std::map<int, F>>>& rows,
                const std::string& basis_key, const Monomial& mono, SymbolId strip,
                Lift&& lift, int column /* -1 = rhs */, const SymbolTable& tab) {
  Monomial key = mono;
  key.coeff = Scalar(1);
  int strip_pow = 0;
  for (std::size_t k = 0; k < key.syms.size(); ++k) {
    if (key.syms[k].first == strip) {
      strip_pow = key.syms[k].second;
      key.syms.erase(key.syms.begin() + k);
      break;
    }
  }
  if (strip != kNoSymbol && key.exparg && contains(*key.exparg, strip))
    throw UnsupportedBasisError("regulator inside an exponential argument");
  std::string row_key = basis_key + " ~ " + to_string(key, tab);
  F value = lift(mono.coeff, strip_pow);
  auto& row = rows[row_key];
  if (column < 0) row.first = row.first + value;
  else {
    auto it = row.second.find(column);
    if (it == row.second.end()) row.second[column] = value;
    else it->second = it->second + value;
  }
}

template <class F, class Lift>
std::vector<Equation<F>> assemble_equations(const ModelSpec& m, const Expr& H,
                                            const std::vector<std::pair<int, int>>& unknowns,
                                            SymbolId strip, Lift&& lift) {
  const SymbolTable& tab = m.tab();
  const auto& C = m.solution.constants;
  SymbolId t = m.time();

  std::vector<Expr> dH(C.size());
  for (std::size_t l = 0; l < C.size(); ++l) dH[l] = differentiate(H, C[l], tab);

  std::vector<Equation<F>> eqs;
  std::set<std::string> seen;

  for (const auto& [entry_sym, f] : m.solution.entries) {
    std::vector<Expr> dF(C.size());
    for (std::size_t k = 0; k < C.size(); ++k) dF[k] = differentiate_right(f, C[k], tab);

    std::map<std::string, std::pair<F, std::map<int, F>>> rows;

    Expr lhs = differentiate(f, t, tab);
    for (const auto& [basis, coeff] : time_basis_decompose(lhs, t, tab)) {
      std::string bk = basis_name(basis, t, tab);
      for (const Monomial& mono : coeff.terms())
        accumulate(rows, bk, mono, strip, lift, -1, tab);
    }

    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      auto [k, l] = unknowns[u];
      Expr col = mul(dF[k], dH[l], tab);
      if (k != l) {
        int sigma = antisymmetry_sign(tab.parity(C[k]), tab.parity(C[l]));
        col = add(col, scale(Scalar(sigma), mul(dF[l], dH[k], tab)), tab);
      }
      if (col.is_zero()) continue;
      for (const auto& [basis, coeff] : time_basis_decompose(col, t, tab)) {
        std::string bk = basis_name(basis, t, tab);
        for (const Monomial& mono : coeff.terms())
          accumulate(rows, bk, mono, strip, lift, static_cast<int>(u), tab);
      }
    }

    for (auto& [key, row] : rows) {
      Equation<F> eq;
      eq.rhs = row.first;
      for (auto& [u, v] : row.second)
        if (!v.is_zero()) eq.coeffs.emplace_back(u, v);
      if (eq.coeffs.empty() && eq.rhs.is_zero()) continue;
      eq.origin = tab.name(entry_sym) + " @ " + key;

      std::string sig;
      for (const auto& [u, v] : eq.coeffs) sig += std::to_string(u) + ":" + field_str(v) + ";";
      sig += "=" + field_str(eq.rhs);
      if (seen.insert(sig).second) eqs.push_back(std::move(eq));
    }
  }
  return eqs;
}

}  // namespace detail
}  // namespace ci
