#include "ci/expr.hpp"

#include <algorithm>
#include <cmath>

namespace ci {

namespace {

int sym_cmp(SymbolId a, SymbolId b, const SymbolTable& tab) {
  if (a == b) return 0;
  return tab.before(a, b) ? -1 : 1;
}

bool is_invertible_factor(SymbolId s, const SymbolTable& tab) {
  return tab.role(s) == Role::Parameter && tab.parity(s) == Parity::Even;
}

Rational floor_rational(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return Rational(f);
}

// Reduce full-turn phases: a term i*q*turn inside an exp argument is
// periodic in q with period 1.
Expr reduce_turns(const Expr& a, const SymbolTable& tab);

Expr canonical_exp_arg(const Expr& a, const SymbolTable& tab) {
  for (const Monomial& m : a.terms()) {
    if (parity_of_monomial(m, tab) == Parity::Odd)
      throw ModelError("exp of an odd expression is not defined");
  }
  return reduce_turns(a, tab);
}

Expr reduce_turns(const Expr& a, const SymbolTable& tab) {
  bool any = false;
  for (const Monomial& m : a.terms()) {
    if (m.syms.size() == 1 && m.syms[0].second == 1 &&
        tab.info(m.syms[0].first).is_turn && !m.exparg &&
        m.coeff.is_imaginary())
      any = true;
  }
  if (!any) return a;
  std::vector<Monomial> out;
  for (const Monomial& m : a.terms()) {
    if (m.syms.size() == 1 && m.syms[0].second == 1 &&
        tab.info(m.syms[0].first).is_turn && !m.exparg &&
        m.coeff.is_imaginary()) {
      Rational q = m.coeff.im();
      Rational r = q - floor_rational(q);
      if (r == 0) continue;
      Monomial n = m;
      n.coeff = Scalar(Rational(0), r);
      out.push_back(std::move(n));
    } else {
      out.push_back(m);
    }
  }
  return Expr::from_terms(std::move(out), tab);
}

// m^q for integer q (negative requires an invertible monomial).
Monomial monomial_pow(const Monomial& m, long q, const SymbolTable& tab) {
  Monomial r;
  if (q < 0) {
    if (m.coeff.is_zero()) throw NumericError("inverse of zero monomial");
    for (const auto& [s, e] : m.syms) {
      (void)e;
      if (!is_invertible_factor(s, tab))
        throw ModelError("negative power of non-parameter symbol '" + tab.name(s) + "'");
    }
  }
  r.coeff = m.coeff.pow(q);
  for (const auto& [s, e] : m.syms) {
    long ne = static_cast<long>(e) * q;
    if (ne != 0) r.syms.emplace_back(s, static_cast<int>(ne));
  }
  if (m.exparg) {
    Expr scaled = scale(Scalar(q), *m.exparg);
    Expr red = reduce_turns(scaled, tab);
    if (!red.is_zero()) r.exparg = std::make_shared<const Expr>(std::move(red));
  }
  return r;
}

// Graded product of canonical monomials.  Returns nullopt when the
// product vanishes (an odd square).  Sign rule: only transpositions of
// two odd factors flip the sign.
std::optional<Monomial> mul_mono(const Monomial& a, const Monomial& b,
                                 const SymbolTable& tab) {
  Monomial r;
  int sign = 1;
  int odd_rem = 0;
  for (const auto& [s, e] : a.syms)
    if (tab.is_odd(s)) ++odd_rem;

  std::size_t i = 0, j = 0;
  while (i < a.syms.size() || j < b.syms.size()) {
    if (j == b.syms.size() ||
        (i < a.syms.size() && sym_cmp(a.syms[i].first, b.syms[j].first, tab) < 0)) {
      if (tab.is_odd(a.syms[i].first)) --odd_rem;
      r.syms.push_back(a.syms[i]);
      ++i;
    } else if (i == a.syms.size() ||
               sym_cmp(a.syms[i].first, b.syms[j].first, tab) > 0) {
      if (tab.is_odd(b.syms[j].first) && (odd_rem & 1)) sign = -sign;
      r.syms.push_back(b.syms[j]);
      ++j;
    } else {
      SymbolId s = a.syms[i].first;
      if (tab.is_odd(s)) return std::nullopt;  // odd^2 = 0
      int e = a.syms[i].second + b.syms[j].second;
      if (e != 0) r.syms.emplace_back(s, e);
      ++i;
      ++j;
    }
  }

  r.coeff = a.coeff * b.coeff;
  if (sign < 0) r.coeff = -r.coeff;
  if (r.coeff.is_zero()) return Monomial{Scalar(0), {}, nullptr};

  if (a.exparg || b.exparg) {
    Expr arg;
    if (a.exparg && b.exparg) arg = add(*a.exparg, *b.exparg, tab);
    else arg = a.exparg ? *a.exparg : *b.exparg;
    arg = reduce_turns(arg, tab);
    if (!arg.is_zero()) r.exparg = std::make_shared<const Expr>(std::move(arg));
  }

  // Declared squares (nu^2 = ...) expand until no squared factor remains.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < r.syms.size(); ++k) {
      auto [s, e] = r.syms[k];
      const auto& sq = tab.info(s).square;
      if (!sq || (e > -2 && e < 2)) continue;
      if (sq->terms().size() != 1)
        throw ModelError("declared square of '" + tab.name(s) + "' must be a single monomial");
      long rem = e % 2;
      long q = (e - rem) / 2;
      Monomial rest = r;
      if (rem == 0) rest.syms.erase(rest.syms.begin() + k);
      else rest.syms[k].second = static_cast<int>(rem);
      auto prod = mul_mono(rest, monomial_pow(sq->terms()[0], q, tab), tab);
      if (!prod) return std::nullopt;
      r = std::move(*prod);
      changed = true;
      break;
    }
  }
  return r;
}

}  // namespace

Expr Expr::scalar(const Scalar& c) {
  Expr e;
  if (!c.is_zero()) e.terms_.push_back(Monomial{c, {}, nullptr});
  return e;
}

Expr Expr::atom(SymbolId s) {
  Expr e;
  e.terms_.push_back(Monomial{Scalar(1), {{s, 1}}, nullptr});
  return e;
}

Scalar Expr::as_scalar() const {
  if (terms_.empty()) return Scalar(0);
  if (terms_.size() == 1 && terms_[0].is_scalar()) return terms_[0].coeff;
  throw NumericError("expression is not a scalar");
}

Expr Expr::from_terms(std::vector<Monomial> terms, const SymbolTable& tab) {
  std::sort(terms.begin(), terms.end(), [&](const Monomial& a, const Monomial& b) {
    return compare_key(a, b, tab) < 0;
  });
  Expr e;
  for (auto& m : terms) {
    if (m.coeff.is_zero()) continue;
    if (!e.terms_.empty() && compare_key(e.terms_.back(), m, tab) == 0) {
      e.terms_.back().coeff += m.coeff;
      if (e.terms_.back().coeff.is_zero()) e.terms_.pop_back();
    } else {
      e.terms_.push_back(std::move(m));
    }
  }
  return e;
}

int compare_key(const Monomial& a, const Monomial& b, const SymbolTable& tab) {
  std::size_t n = std::min(a.syms.size(), b.syms.size());
  for (std::size_t k = 0; k < n; ++k) {
    int c = sym_cmp(a.syms[k].first, b.syms[k].first, tab);
    if (c != 0) return c;
    if (a.syms[k].second != b.syms[k].second)
      return a.syms[k].second < b.syms[k].second ? -1 : 1;
  }
  if (a.syms.size() != b.syms.size()) return a.syms.size() < b.syms.size() ? -1 : 1;
  if (!a.exparg && !b.exparg) return 0;
  if (!a.exparg) return -1;
  if (!b.exparg) return 1;
  return compare(*a.exparg, *b.exparg, tab);
}

int compare(const Expr& a, const Expr& b, const SymbolTable& tab) {
  std::size_t n = std::min(a.terms().size(), b.terms().size());
  for (std::size_t k = 0; k < n; ++k) {
    int c = compare_key(a.terms()[k], b.terms()[k], tab);
    if (c != 0) return c;
    c = a.terms()[k].coeff.compare(b.terms()[k].coeff);
    if (c != 0) return c;
  }
  if (a.terms().size() != b.terms().size())
    return a.terms().size() < b.terms().size() ? -1 : 1;
  return 0;
}

Expr add(const Expr& a, const Expr& b, const SymbolTable& tab) {
  std::vector<Monomial> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return Expr::from_terms(std::move(terms), tab);
}

Expr neg(const Expr& a) { return scale(Scalar(-1), a); }

Expr sub(const Expr& a, const Expr& b, const SymbolTable& tab) {
  return add(a, neg(b), tab);
}

Expr scale(const Scalar& c, const Expr& a) {
  if (c.is_zero()) return Expr::zero();
  std::vector<Monomial> terms = a.terms();
  for (auto& m : terms) m.coeff *= c;
  // scaling keeps keys and order intact
  return Expr(std::move(terms));
}

Expr mul(const Expr& a, const Expr& b, const SymbolTable& tab) {
  std::vector<Monomial> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const Monomial& ma : a.terms())
    for (const Monomial& mb : b.terms()) {
      auto m = mul_mono(ma, mb, tab);
      if (m && !m->coeff.is_zero()) terms.push_back(std::move(*m));
    }
  return Expr::from_terms(std::move(terms), tab);
}

Expr pow(const Expr& a, long n, const SymbolTable& tab) {
  if (n == 0) return Expr::one();
  if (n < 0) {
    if (a.is_zero()) throw ParseError("division by an expression that is identically zero");
    if (a.terms().size() != 1)
      throw ParseError("division only by scalars or invertible monomials");
    return Expr::from_terms({monomial_pow(a.terms()[0], n, tab)}, tab);
  }
  Expr r = Expr::one(), base = a;
  while (n > 0) {
    if (n & 1) r = mul(r, base, tab);
    if ((n >>= 1) != 0) base = mul(base, base, tab);
  }
  return r;
}

Expr exp_of(const Expr& arg, const SymbolTable& tab) {
  Expr a = canonical_exp_arg(arg, tab);
  if (a.is_zero()) return Expr::one();
  Monomial m;
  m.coeff = Scalar(1);
  m.exparg = std::make_shared<const Expr>(std::move(a));
  return Expr::from_terms({std::move(m)}, tab);
}

Expr sin_of(const Expr& arg, const SymbolTable& tab) {
  Expr ia = scale(Scalar::i(), arg);
  Expr plus = exp_of(ia, tab), minus = exp_of(neg(ia), tab);
  // (e^{ix} - e^{-ix}) / 2i
  return scale(Scalar(Rational(0), Rational(-1, 2)), sub(plus, minus, tab));
}

Expr cos_of(const Expr& arg, const SymbolTable& tab) {
  Expr ia = scale(Scalar::i(), arg);
  Expr plus = exp_of(ia, tab), minus = exp_of(neg(ia), tab);
  return scale(Scalar(1, 2), add(plus, minus, tab));
}

bool contains(const Expr& e, SymbolId s) {
  for (const Monomial& m : e.terms()) {
    for (const auto& [t, ex] : m.syms) {
      (void)ex;
      if (t == s) return true;
    }
    if (m.exparg && contains(*m.exparg, s)) return true;
  }
  return false;
}

Parity parity_of_monomial(const Monomial& m, const SymbolTable& tab) {
  int odd = 0;
  for (const auto& [s, e] : m.syms) {
    (void)e;
    if (tab.is_odd(s)) ++odd;
  }
  return (odd & 1) ? Parity::Odd : Parity::Even;
}

std::optional<Parity> parity_of(const Expr& e, const SymbolTable& tab) {
  if (e.is_zero()) return Parity::Even;
  Parity p = parity_of_monomial(e.terms()[0], tab);
  for (const Monomial& m : e.terms())
    if (parity_of_monomial(m, tab) != p) return std::nullopt;
  return p;
}

namespace {

Expr differentiate_impl(const Expr& e, SymbolId s, const SymbolTable& tab, bool left) {
  Role r = tab.role(s);
  if (r == Role::Parameter || r == Role::ModeIndex)
    throw ModelError("cannot differentiate with respect to " + role_name(r) +
                     " symbol '" + tab.name(s) + "'");
  std::vector<Monomial> out;
  for (const Monomial& m : e.terms()) {
    for (std::size_t k = 0; k < m.syms.size(); ++k) {
      if (m.syms[k].first != s) continue;
      Monomial d = m;
      if (tab.is_odd(s)) {
        int odd_passed = 0;
        for (std::size_t j = 0; j < m.syms.size(); ++j) {
          if (left && j >= k) break;
          if (!left && j <= k) continue;
          if (tab.is_odd(m.syms[j].first)) ++odd_passed;
        }
        if (odd_passed & 1) d.coeff = -d.coeff;
        d.syms.erase(d.syms.begin() + k);
      } else {
        int n = m.syms[k].second;
        d.coeff *= Scalar(n);
        if (n == 1) d.syms.erase(d.syms.begin() + k);
        else d.syms[k].second = n - 1;
      }
      out.push_back(std::move(d));
      break;
    }
    if (m.exparg && contains(*m.exparg, s)) {
      if (tab.is_odd(s)) throw ModelError("odd symbol inside exp argument");
      Expr darg = differentiate_impl(*m.exparg, s, tab, left);
      Expr term = mul(Expr::from_terms({m}, tab), darg, tab);
      for (const Monomial& t : term.terms()) out.push_back(t);
    }
  }
  return Expr::from_terms(std::move(out), tab);
}

}  // namespace

Expr differentiate(const Expr& e, SymbolId s, const SymbolTable& tab) {
  return differentiate_impl(e, s, tab, /*left=*/true);
}

Expr differentiate_right(const Expr& e, SymbolId s, const SymbolTable& tab) {
  return differentiate_impl(e, s, tab, /*left=*/false);
}

Expr substitute(const Expr& e, const std::map<SymbolId, Expr>& bindings,
                const SymbolTable& tab) {
  for (const auto& [s, v] : bindings) {
    auto p = parity_of(v, tab);
    if (!p) throw ModelError("substitution value for '" + tab.name(s) + "' has mixed parity");
    if (!v.is_zero() && *p != tab.parity(s))
      throw ModelError("parity mismatch binding '" + tab.name(s) + "'");
  }
  Expr result;
  for (const Monomial& m : e.terms()) {
    Expr acc = Expr::scalar(m.coeff);
    for (const auto& [s, ex] : m.syms) {
      auto it = bindings.find(s);
      Expr factor = (it != bindings.end()) ? it->second : Expr::atom(s);
      acc = mul(acc, pow(factor, ex, tab), tab);
      if (acc.is_zero()) break;
    }
    if (m.exparg && !acc.is_zero()) {
      Expr arg = substitute(*m.exparg, bindings, tab);
      acc = mul(acc, exp_of(arg, tab), tab);
    }
    result = add(result, acc, tab);
  }
  return result;
}

Expr conj_expr(const Expr& e, const SymbolTable& tab) {
  Expr result;
  for (const Monomial& m : e.terms()) {
    int odd = 0;
    for (const auto& [s, ex] : m.syms) {
      (void)ex;
      if (tab.is_odd(s)) ++odd;
    }
    if (odd > 1)
      throw ModelError("conjugation of higher Grassmann monomials is not defined here");
    Expr acc = Expr::scalar(m.coeff.conj());
    for (const auto& [s, ex] : m.syms) {
      SymbolId c = tab.info(s).conjugate;
      acc = mul(acc, pow(Expr::atom(c == kNoSymbol ? s : c), ex, tab), tab);
    }
    if (m.exparg) acc = mul(acc, exp_of(conj_expr(*m.exparg, tab), tab), tab);
    result = add(result, acc, tab);
  }
  return result;
}

std::complex<double> evaluate(const Expr& e,
                              const std::map<SymbolId, std::complex<double>>& bindings,
                              const SymbolTable& tab) {
  std::complex<double> total = 0.0;
  for (const Monomial& m : e.terms()) {
    std::complex<double> v = m.coeff.to_complex();
    for (const auto& [s, ex] : m.syms) {
      if (tab.is_odd(s))
        throw NumericError("numeric evaluation of odd symbol '" + tab.name(s) + "'");
      std::complex<double> x;
      auto it = bindings.find(s);
      if (it != bindings.end()) x = it->second;
      else if (tab.info(s).value) x = *tab.info(s).value;
      else throw NumericError("unbound symbol '" + tab.name(s) + "'");
      v *= std::pow(x, ex);
    }
    if (m.exparg) v *= std::exp(evaluate(*m.exparg, bindings, tab));
    total += v;
  }
  return total;
}

namespace {

std::string factor_string(const Monomial& m, const SymbolTable& tab) {
  std::string s;
  for (const auto& [sym, e] : m.syms) {
    if (!s.empty()) s += "*";
    s += tab.name(sym);
    if (e != 1) s += "^" + std::to_string(e);
  }
  if (m.exparg) {
    if (!s.empty()) s += "*";
    s += "exp(" + to_string(*m.exparg, tab) + ")";
  }
  return s;
}

// leading sign convention: negative real part, or zero real and negative
// imaginary part
bool lead_negative(const Scalar& c) {
  if (c.re() < 0) return true;
  return c.re() == 0 && c.im() < 0;
}

}  // namespace

std::string to_string(const Monomial& m, const SymbolTable& tab) {
  std::string f = factor_string(m, tab);
  if (f.empty()) return m.coeff.str();
  if (m.coeff.is_one()) return f;
  if ((-m.coeff).is_one()) return "-" + f;
  return m.coeff.str() + "*" + f;
}

std::string to_string(const Expr& e, const SymbolTable& tab) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Monomial& m : e.terms()) {
    Monomial p = m;
    bool negate = lead_negative(m.coeff);
    if (negate) p.coeff = -p.coeff;
    std::string term = to_string(p, tab);
    if (first) {
      out = (negate ? "-" : "") + term;
      first = false;
    } else {
      out += (negate ? " - " : " + ") + term;
    }
  }
  return out;
}

}  // namespace ci
