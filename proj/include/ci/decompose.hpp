#pragma once

#include <vector>

#include "ci/expr.hpp"

namespace ci {

// One element of the time-function basis: t^tpow * exp(freq * t), where
// freq is a time-free expression (e.g. -i*omega, i*2/3*kappa, or zero).
// Distinct (tpow, freq) keys are treated as linearly independent; keys
// compare exactly, so independence is decidable.
struct BasisFunction {
  int tpow = 0;
  Expr freq;
};

using Decomposition = std::vector<std::pair<BasisFunction, Expr>>;

// Splits e into basis functions with time-free coefficient expressions.
// sin/cos never appear here: canonical forms hold exponentials only, so a
// single pass over monomials suffices.  Time dependence outside
// polynomial-times-exponential (t^2 inside an exp argument, t inside a
// frequency) raises UnsupportedBasisError.
Decomposition time_basis_decompose(const Expr& e, SymbolId t, const SymbolTable& tab);

// Exact inverse of time_basis_decompose.
Expr reconstruct(const Decomposition& d, SymbolId t, const SymbolTable& tab);

// Display regrouping: conjugate exponential pairs exp(+i b t)/exp(-i b t)
// recombine into cos/sin with frequency b.  Used by reports and docs; the
// engine itself works in the exponential basis.
struct TrigTerm {
  enum class Kind { Poly, Exp, Sin, Cos };
  Kind kind = Kind::Poly;
  int tpow = 0;
  Expr freq;   // b for sin/cos, the exp frequency for Kind::Exp
  Expr coeff;
};

std::vector<TrigTerm> trig_form(const Decomposition& d, const SymbolTable& tab);

std::string basis_name(const BasisFunction& b, SymbolId t, const SymbolTable& tab);

}  // namespace ci
