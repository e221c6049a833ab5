#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ci/expr.hpp"
#include "ci/scalar.hpp"

namespace ci {

struct ModeSet;  // field-model metadata, see modes.hpp

// The general solution of the equations of motion: every dynamical
// variable and momentum as an expression in (time, constants, parameters).
struct GeneralSolution {
  std::vector<SymbolId> constants;  // ordered; parity read from the table
  std::vector<std::pair<SymbolId, Expr>> entries;  // variables first, then momenta
};

// Expected bracket shipped with a model, checked by `run`/`verify-all`.
// When `propagated` is set, a and b name solution entries and the value is
// checked through bracket propagation; otherwise they name constants and
// the value is checked against the solved table.  Values are stored in the
// model's reporting convention (commutator_form multiplies brackets by i).
struct GoldenBracket {
  std::string a, b;
  Scalar expected;
  bool propagated = false;
  std::string note;
};

struct SourceTerm {
  SymbolId coupling = kNoSymbol;            // the regulator, an even parameter
  std::vector<SymbolId> variables;          // L gains coupling * q for these
};

struct ModelSpec {
  std::string name;
  std::shared_ptr<SymbolTable> symbols;
  std::optional<Expr> lagrangian;
  std::optional<Expr> hamiltonian;          // time-free, in constants
  GeneralSolution solution;
  std::string gauge_note;
  std::optional<SourceTerm> source_term;
  std::map<SymbolId, Expr> inverse;         // constant -> expr in (vars, momenta, time)
  std::map<SymbolId, SymbolId> velocity_of; // variable -> velocity symbol
  std::vector<GoldenBracket> golden;
  bool commutator_form = false;             // golden/report values are i * bracket
  std::shared_ptr<const ModeSet> modes;
  std::vector<std::string> warnings;

  const SymbolTable& tab() const { return *symbols; }
  SymbolId time() const { return symbols->time_symbol(); }

  const Expr* entry(SymbolId s) const {
    for (const auto& [sym, e] : solution.entries)
      if (sym == s) return &e;
    return nullptr;
  }
  const Expr* entry(const std::string& name) const {
    auto s = symbols->find(name);
    return s ? entry(*s) : nullptr;
  }

  // time derivatives of the variable solutions, keyed by velocity symbol
  std::map<SymbolId, Expr> velocity_bindings() const;
  // variables+momenta solution bindings (for substituting into L)
  std::map<SymbolId, Expr> solution_bindings() const;

  bool is_even_sector() const;
};

// Model file front end (format in docs/model-format.md).
ModelSpec load_model(const std::string& source);
ModelSpec load_model_file(const std::string& path);
std::string save_model(const ModelSpec& m);

// Structural checks shared by the loader and the builders: entry coverage,
// constant usage, parity agreement, momentum consistency against a
// Lagrangian, and the numeric independence (Jacobian rank) probe.
void validate_model(ModelSpec& m);

}  // namespace ci
