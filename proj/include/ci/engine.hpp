#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ci/decompose.hpp"
#include "ci/eigen_support.hpp"
#include "ci/model.hpp"
#include "ci/polynomial.hpp"
#include "ci/solve.hpp"

namespace ci {

// M x M table of {C_k, C_l} with graded antisymmetry and parity selection
// baked in.  Entries not fixed by the identification are tracked in
// `indeterminate` and never silently read as zero.
struct BracketTable {
  std::vector<SymbolId> constants;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;
  std::vector<std::pair<int, int>> indeterminate;  // canonical k<=l pairs
  int rank = 0;
  bool residual_zero = false;

  int index_of(SymbolId c) const {
    for (std::size_t k = 0; k < constants.size(); ++k)
      if (constants[k] == c) return static_cast<int>(k);
    return -1;
  }
  bool is_indeterminate(int k, int l) const {
    if (k > l) std::swap(k, l);
    for (auto& [a, b] : indeterminate)
      if (a == k && b == l) return true;
    return false;
  }
};

struct IdentificationSystem {
  std::vector<SymbolId> constants;
  std::vector<Parity> parities;               // parallel to constants
  std::vector<std::pair<int, int>> unknowns;  // reduced independent entries, k<=l
  std::vector<Equation<Scalar>> equations;
  std::vector<std::string> notes;
};

// H~(C) = sum_i (dq~_i/dt) p~_i - L(q~, dq~/dt) on the general solution;
// throws when time dependence survives (the solution does not solve the
// dynamics).
Expr legendre_hamiltonian(const ModelSpec& m);

// Returns the model's Hamiltonian in constants: the stated one when
// present (cross-checked against the Legendre form if a Lagrangian is
// also available), otherwise the Legendre form.
Expr hamiltonian_in_constants(const ModelSpec& m);

IdentificationSystem build_identification_system(const ModelSpec& m, const Expr& H);

BracketTable solve_bracket_table(const IdentificationSystem& sys);

// Eq.-style bracket of two phase-space functions through the table:
// {f,g} = sum_kl B_kl (d_R f / dC_k)(d_L g / dC_l).
struct Propagated {
  Expr value;
  bool exact = true;  // false when an indeterminate entry was touched
};
Propagated propagate_bracket(const Expr& f, const Expr& g, const BracketTable& table,
                             const ModelSpec& m);

struct PropagatedPair {
  Expr raw;
  std::optional<Expr> inverse_substituted;  // when constants survive and the
                                            // model supplies an inversion
  bool exact = true;
};
PropagatedPair propagate_with_inversion(const Expr& f, const Expr& g,
                                        const BracketTable& table, const ModelSpec& m);

// Regulator path: the model carries a source term (coupling eta); the
// linear solve runs over rational functions of eta and the table is the
// exact eta -> 0 limit.
struct EtaDerivation {
  BracketTable table;
  std::vector<std::string> entry_functions;  // "{Ck,Cl} = <rational fn>" strings
  std::vector<std::pair<int, int>> unknowns;
};
EtaDerivation eta_regularized_derivation(const ModelSpec& m);

// Post-solve audit: graded antisymmetry and Leibniz of the propagated
// bracket on sampled expressions, the (trivial, but asserted) Jacobi
// identity for constant tables, Hamilton self-consistency {f~,H~} = df~/dt
// and the exact residual of the identification equations.
struct ConsistencyReport {
  bool eq1_residual_zero = false;
  bool hamilton_selfconsistent = false;
  bool jacobi_zero = false;
  bool leibniz_zero = false;
  bool antisymmetry_zero = false;
  std::vector<std::string> failures;
  bool all() const {
    return eq1_residual_zero && hamilton_selfconsistent && jacobi_zero &&
           leibniz_zero && antisymmetry_zero;
  }
};
ConsistencyReport jacobi_and_leibniz_check(const ModelSpec& m, const BracketTable& table,
                                           const Expr& H, unsigned seed = 7,
                                           int samples = 24);

// Convenience bundle used by the CLI and tests.
struct Derivation {
  Expr hamiltonian;
  IdentificationSystem system;
  BracketTable table;
  std::vector<std::string> eta_entry_functions;  // set on the regulator path
};
Derivation derive(const ModelSpec& m);

}  // namespace ci
