#include "ci/cyclotomic.hpp"

#include <map>
#include <numeric>

namespace ci {

Poly cyclotomic_polynomial(int n) {
  if (n < 1) throw NumericError("cyclotomic order must be positive");
  // x^n - 1 divided by the product of all proper-divisor cyclotomics
  std::vector<Scalar> c(n + 1, Scalar(0));
  c[0] = Scalar(-1);
  c[n] = Scalar(1);
  Poly num = Poly::from_coeffs(std::move(c));
  for (int d = 1; d < n; ++d)
    if (n % d == 0) num = num / cyclotomic_polynomial(d);
  return num;
}

namespace {

// Splits a monomial's exp argument into (rational turn phase q, remainder);
// returns false when a turn factor appears in an unreducible position.
bool extract_phase(const Monomial& m, SymbolId turn, const SymbolTable& tab,
                   Rational& q, Monomial& rest) {
  rest = m;
  q = 0;
  if (!m.exparg) return true;
  std::vector<Monomial> keep;
  for (const Monomial& am : m.exparg->terms()) {
    if (am.syms.size() == 1 && am.syms[0].first == turn && am.syms[0].second == 1 &&
        !am.exparg && am.coeff.is_imaginary()) {
      q += am.coeff.im();
    } else if (contains(Expr::from_terms({am}, tab), turn)) {
      return false;
    } else {
      keep.push_back(am);
    }
  }
  Expr remainder = Expr::from_terms(std::move(keep), tab);
  rest.exparg = remainder.is_zero() ? nullptr
                                    : std::make_shared<const Expr>(std::move(remainder));
  return true;
}

}  // namespace

bool phase_equal(const Expr& a, const Expr& b, SymbolId turn, const SymbolTable& tab) {
  Expr d = sub(a, b, tab);
  if (d.is_zero()) return true;

  // gather phases and the common denominator (the root order)
  struct Part {
    Rational q;
    Monomial rest;
  };
  std::vector<Part> parts;
  long order = 1;
  for (const Monomial& m : d.terms()) {
    Part p;
    if (!extract_phase(m, turn, tab, p.q, p.rest))
      throw NumericError("turn symbol in unreducible position for phase comparison");
    long den = p.q.get_den().get_si();
    order = std::lcm(order, den);
    parts.push_back(std::move(p));
  }

  // accumulate, per phase-free key, a polynomial in the primitive root
  std::map<std::string, Poly> residues;
  for (const auto& p : parts) {
    Monomial key = p.rest;
    Scalar coeff = key.coeff;
    key.coeff = Scalar(1);
    Rational e = p.q * order;
    if (e.get_den() != 1) throw NumericError("internal: phase order mismatch");
    long r = ((e.get_num().get_si() % order) + order) % order;
    std::vector<Scalar> mono(r + 1, Scalar(0));
    mono[r] = coeff;
    std::string ks = to_string(key, tab);
    auto it = residues.find(ks);
    if (it == residues.end()) residues[ks] = Poly::from_coeffs(std::move(mono));
    else it->second = it->second + Poly::from_coeffs(std::move(mono));
  }

  Poly phi = cyclotomic_polynomial(static_cast<int>(order));
  for (const auto& [key, poly] : residues) {
    (void)key;
    if (!(poly % phi).is_zero()) return false;
  }
  return true;
}

}  // namespace ci
