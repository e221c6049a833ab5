#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ci/scalar.hpp"
#include "ci/symbol.hpp"

namespace ci {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// One canonical term: coeff * prod(sym^exp) * exp(arg).
//
// Invariants:
//   - syms sorted by the table's canonical symbol order, exponents != 0;
//   - odd symbols carry exponent exactly 1 (odd^2 vanishes earlier);
//   - negative exponents only on even parameters;
//   - at most one exponential factor; its argument is a canonical,
//     nonzero, everywhere-even Expr.
struct Monomial {
  Scalar coeff;
  std::vector<std::pair<SymbolId, int>> syms;
  ExprPtr exparg;

  bool is_scalar() const { return syms.empty() && !exparg; }
};

class Expr {
 public:
  Expr() = default;

  static Expr zero() { return Expr(); }
  static Expr one() { return scalar(Scalar(1)); }
  static Expr scalar(const Scalar& c);
  static Expr atom(SymbolId s);

  // Terms are already canonical monomials; sorts, merges and drops zeros.
  static Expr from_terms(std::vector<Monomial> terms, const SymbolTable& tab);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_scalar() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].is_scalar());
  }
  Scalar as_scalar() const;  // throws unless is_scalar()

 private:
  explicit Expr(std::vector<Monomial> terms) : terms_(std::move(terms)) {}
  friend Expr scale(const Scalar& c, const Expr& a);
  friend Expr pow(const Expr& a, long n, const SymbolTable& tab);

  std::vector<Monomial> terms_;
};

// ---- canonical order / equality -------------------------------------------

int compare(const Expr& a, const Expr& b, const SymbolTable& tab);
int compare_key(const Monomial& a, const Monomial& b, const SymbolTable& tab);
inline bool equal(const Expr& a, const Expr& b, const SymbolTable& tab) {
  return compare(a, b, tab) == 0;
}

// ---- arithmetic ------------------------------------------------------------

Expr add(const Expr& a, const Expr& b, const SymbolTable& tab);
Expr sub(const Expr& a, const Expr& b, const SymbolTable& tab);
Expr neg(const Expr& a);
Expr scale(const Scalar& c, const Expr& a);
Expr mul(const Expr& a, const Expr& b, const SymbolTable& tab);
// e^n; n < 0 requires a single invertible monomial.
Expr pow(const Expr& a, long n, const SymbolTable& tab);

// exp/sin/cos of an even expression; sin and cos are rewritten into the
// exponential basis so trig identities reduce to monomial cancellation.
Expr exp_of(const Expr& arg, const SymbolTable& tab);
Expr sin_of(const Expr& arg, const SymbolTable& tab);
Expr cos_of(const Expr& arg, const SymbolTable& tab);

// ---- structure -------------------------------------------------------------

bool contains(const Expr& e, SymbolId s);
// Even/Odd when every term agrees (zero counts as even), nullopt when mixed.
std::optional<Parity> parity_of(const Expr& e, const SymbolTable& tab);
Parity parity_of_monomial(const Monomial& m, const SymbolTable& tab);

// ---- calculus --------------------------------------------------------------

// Left derivative: an odd symbol is commuted to the front (collecting
// signs) and removed.  This is the engine's default convention.
Expr differentiate(const Expr& e, SymbolId s, const SymbolTable& tab);
// Right derivative: the mirror convention, used for the first slot of the
// bracket so graded antisymmetry holds.
Expr differentiate_right(const Expr& e, SymbolId s, const SymbolTable& tab);

Expr substitute(const Expr& e, const std::map<SymbolId, Expr>& bindings,
                const SymbolTable& tab);

// Conjugation; defined for expressions at most linear in odd symbols.
Expr conj_expr(const Expr& e, const SymbolTable& tab);

std::complex<double> evaluate(const Expr& e,
                              const std::map<SymbolId, std::complex<double>>& bindings,
                              const SymbolTable& tab);

// ---- printing --------------------------------------------------------------

// Canonical, stable, re-parseable form.
std::string to_string(const Expr& e, const SymbolTable& tab);
std::string to_string(const Monomial& m, const SymbolTable& tab);

}  // namespace ci
