#include "ci/decompose.hpp"

#include <algorithm>

namespace ci {

namespace {

// Splits an exp argument into freq*t + rest (both time-free), rejecting
// anything beyond linear time dependence.
void split_exp_arg(const Expr& arg, SymbolId t, const SymbolTable& tab,
                   Expr& freq, Expr& rest) {
  std::vector<Monomial> f, r;
  for (const Monomial& m : arg.terms()) {
    if (m.exparg && contains(*m.exparg, t))
      throw UnsupportedBasisError("time inside a nested exponential argument");
    int tpow = 0;
    Monomial stripped = m;
    for (std::size_t k = 0; k < stripped.syms.size(); ++k) {
      if (stripped.syms[k].first == t) {
        tpow = stripped.syms[k].second;
        stripped.syms.erase(stripped.syms.begin() + k);
        break;
      }
    }
    if (tpow == 0) r.push_back(std::move(stripped));
    else if (tpow == 1) f.push_back(std::move(stripped));
    else
      throw UnsupportedBasisError("time dependence beyond linear inside exp()");
  }
  freq = Expr::from_terms(std::move(f), tab);
  rest = Expr::from_terms(std::move(r), tab);
}

}  // namespace

Decomposition time_basis_decompose(const Expr& e, SymbolId t, const SymbolTable& tab) {
  // key-sorted accumulation
  std::vector<std::pair<BasisFunction, std::vector<Monomial>>> groups;

  auto group_for = [&](int tpow, const Expr& freq) -> std::vector<Monomial>& {
    for (auto& [b, coeffs] : groups)
      if (b.tpow == tpow && equal(b.freq, freq, tab)) return coeffs;
    groups.push_back({BasisFunction{tpow, freq}, {}});
    return groups.back().second;
  };

  for (const Monomial& m : e.terms()) {
    int tpow = 0;
    Monomial coeff = m;
    for (std::size_t k = 0; k < coeff.syms.size(); ++k) {
      if (coeff.syms[k].first == t) {
        tpow = coeff.syms[k].second;
        if (tpow < 0) throw UnsupportedBasisError("negative power of time");
        coeff.syms.erase(coeff.syms.begin() + k);
        break;
      }
    }
    Expr freq, rest;
    if (coeff.exparg) {
      split_exp_arg(*coeff.exparg, t, tab, freq, rest);
      if (rest.is_zero()) coeff.exparg = nullptr;
      else coeff.exparg = std::make_shared<const Expr>(std::move(rest));
    }
    group_for(tpow, freq).push_back(std::move(coeff));
  }

  Decomposition out;
  for (auto& [b, coeffs] : groups) {
    Expr c = Expr::from_terms(std::move(coeffs), tab);
    if (!c.is_zero()) out.push_back({b, std::move(c)});
  }
  std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    if (x.first.tpow != y.first.tpow) return x.first.tpow < y.first.tpow;
    return compare(x.first.freq, y.first.freq, tab) < 0;
  });
  return out;
}

Expr reconstruct(const Decomposition& d, SymbolId t, const SymbolTable& tab) {
  Expr total;
  for (const auto& [b, coeff] : d) {
    Expr term = coeff;
    if (b.tpow != 0) term = mul(term, pow(Expr::atom(t), b.tpow, tab), tab);
    if (!b.freq.is_zero())
      term = mul(term, exp_of(mul(b.freq, Expr::atom(t), tab), tab), tab);
    total = add(total, term, tab);
  }
  return total;
}

std::vector<TrigTerm> trig_form(const Decomposition& d, const SymbolTable& tab) {
  std::vector<TrigTerm> out;
  std::vector<bool> used(d.size(), false);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (used[i]) continue;
    const auto& [b, c] = d[i];
    if (b.freq.is_zero()) {
      out.push_back({TrigTerm::Kind::Poly, b.tpow, Expr::zero(), c});
      continue;
    }
    // look for the conjugate frequency at the same power of t
    std::size_t partner = d.size();
    Expr nfreq = neg(b.freq);
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      if (used[j]) continue;
      if (d[j].first.tpow == b.tpow && equal(d[j].first.freq, nfreq, tab)) {
        partner = j;
        break;
      }
    }
    if (partner == d.size()) {
      out.push_back({TrigTerm::Kind::Exp, b.tpow, b.freq, c});
      continue;
    }
    used[partner] = true;
    // pick the member whose b = -i*freq prints without a leading minus
    Expr beta_i = scale(-Scalar::i(), b.freq);
    bool i_is_plus = true;
    if (!beta_i.is_zero()) {
      const Scalar& lead = beta_i.terms()[0].coeff;
      if (lead.re() < 0 || (lead.re() == 0 && lead.im() < 0)) i_is_plus = false;
    }
    const Expr& cplus = i_is_plus ? c : d[partner].second;
    const Expr& cminus = i_is_plus ? d[partner].second : c;
    Expr beta = i_is_plus ? beta_i : scale(-Scalar::i(), nfreq);
    Expr cos_c = add(cplus, cminus, tab);
    Expr sin_c = scale(Scalar::i(), sub(cplus, cminus, tab));
    if (!sin_c.is_zero()) out.push_back({TrigTerm::Kind::Sin, b.tpow, beta, sin_c});
    if (!cos_c.is_zero()) out.push_back({TrigTerm::Kind::Cos, b.tpow, beta, cos_c});
  }
  return out;
}

std::string basis_name(const BasisFunction& b, SymbolId t, const SymbolTable& tab) {
  std::string s;
  if (b.tpow != 0) {
    s = tab.name(t);
    if (b.tpow != 1) s += "^" + std::to_string(b.tpow);
  }
  if (!b.freq.is_zero()) {
    if (!s.empty()) s += "*";
    std::string f = to_string(b.freq, tab);
    s += "exp((" + f + ")*" + tab.name(t) + ")";
  }
  return s.empty() ? "1" : s;
}

}  // namespace ci
