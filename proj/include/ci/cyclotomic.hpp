#pragma once

#include "ci/expr.hpp"
#include "ci/polynomial.hpp"

namespace ci {

// n-th cyclotomic polynomial over the exact scalars.
Poly cyclotomic_polynomial(int n);

// Exact equality of expressions whose exponential factors are pure phases
// q * turn (plus anything phase-free).  Phases are mapped onto powers of a
// primitive root of unity of the least common order and reduced modulo the
// cyclotomic polynomial, so root-of-unity sums (lattice deltas) compare
// exactly instead of formally.
bool phase_equal(const Expr& a, const Expr& b, SymbolId turn, const SymbolTable& tab);

// Convenience: the reduced difference is zero.
inline bool phase_zero(const Expr& a, SymbolId turn, const SymbolTable& tab) {
  return phase_equal(a, Expr::zero(), turn, tab);
}

}  // namespace ci
