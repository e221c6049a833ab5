#include "ci/engine.hpp"

#include <random>

#include "ci/assemble.hpp"

namespace ci {

Expr legendre_hamiltonian(const ModelSpec& m) {
  if (!m.lagrangian)
    throw DerivationError("legendre", "model '" + m.name + "' has no Lagrangian");
  const SymbolTable& tab = m.tab();
  SymbolId t = m.time();

  std::map<SymbolId, Expr> bind = m.solution_bindings();
  for (const auto& [vel, e] : m.velocity_bindings()) bind[vel] = e;

  Expr H;
  for (SymbolId p : tab.all_of(Role::Momentum)) {
    SymbolId q = tab.info(p).base;
    if (q == kNoSymbol)
      throw DerivationError("legendre", "momentum '" + tab.name(p) + "' without base variable");
    Expr qdot = differentiate(*m.entry(q), t, tab);
    H = add(H, mul(qdot, *m.entry(p), tab), tab);  // velocity times momentum, in this order
  }
  H = sub(H, substitute(*m.lagrangian, bind, tab), tab);

  if (contains(H, t))
    throw DerivationError("legendre",
                          "Hamiltonian is not time-free; the stated solution does not solve "
                          "the dynamics: H = " + to_string(H, tab));
  return H;
}

Expr hamiltonian_in_constants(const ModelSpec& m) {
  if (m.hamiltonian) {
    if (m.lagrangian) {
      Expr viaL = legendre_hamiltonian(m);
      if (!equal(viaL, *m.hamiltonian, m.tab()))
        throw DerivationError("legendre",
                              "stated Hamiltonian differs from the Legendre form: stated " +
                                  to_string(*m.hamiltonian, m.tab()) + ", computed " +
                                  to_string(viaL, m.tab()));
    }
    return *m.hamiltonian;
  }
  return legendre_hamiltonian(m);
}

IdentificationSystem build_identification_system(const ModelSpec& m, const Expr& H) {
  IdentificationSystem sys;
  sys.constants = m.solution.constants;
  for (SymbolId c : sys.constants) sys.parities.push_back(m.tab().parity(c));
  sys.unknowns = detail::reduced_unknowns(m);
  auto lift = [](const Scalar& c, int strip_pow) -> Scalar {
    (void)strip_pow;  // no regulator on this path
    return c;
  };
  sys.equations =
      detail::assemble_equations<Scalar>(m, H, sys.unknowns, kNoSymbol, lift);
  if (sys.equations.empty() && !sys.unknowns.empty())
    sys.notes.push_back(
        "identification system is empty: the Hamiltonian constrains nothing; "
        "a source-term regulator (eta) is the usual remedy");
  return sys;
}

namespace {

BracketTable table_from_outcome(const std::vector<SymbolId>& constants,
                                const std::vector<Parity>& parities,
                                const std::vector<std::pair<int, int>>& unknowns,
                                const std::vector<std::optional<Scalar>>& values,
                                int rank) {
  BracketTable t;
  t.constants = constants;
  int M = static_cast<int>(constants.size());
  t.values.setZero(M, M);
  t.rank = rank;
  for (std::size_t u = 0; u < unknowns.size(); ++u) {
    auto [k, l] = unknowns[u];
    if (!values[u]) {
      t.indeterminate.emplace_back(k, l);
      continue;
    }
    t.values(k, l) = *values[u];
    if (k != l) {
      int sigma = detail::antisymmetry_sign(parities[k], parities[l]);
      t.values(l, k) = Scalar(sigma) * (*values[u]);
    }
  }
  return t;
}

}  // namespace

BracketTable solve_bracket_table(const IdentificationSystem& sys) {
  auto outcome = solve_linear_exact<Scalar>(static_cast<int>(sys.unknowns.size()),
                                            sys.equations);
  if (!outcome.consistent)
    throw DerivationError("identification",
                          "inconsistent identification system (wrong general solution, or a "
                          "source term is needed); first conflict at " + outcome.conflict);
  BracketTable t = table_from_outcome(sys.constants, sys.parities, sys.unknowns,
                                      outcome.values, outcome.rank);
  // exact residual: every equation must hold when the solved values are
  // substituted back
  t.residual_zero = true;
  for (const auto& eq : sys.equations) {
    Scalar acc(0);
    bool skip = false;
    for (const auto& [u, v] : eq.coeffs) {
      if (!outcome.values[u]) {
        skip = true;
        break;
      }
      acc += v * (*outcome.values[u]);
    }
    if (skip) continue;
    if (acc != eq.rhs) {
      t.residual_zero = false;
      break;
    }
  }
  return t;
}

Propagated propagate_bracket(const Expr& f, const Expr& g, const BracketTable& table,
                             const ModelSpec& m) {
  const SymbolTable& tab = m.tab();
  const auto& C = table.constants;
  Propagated out;
  for (int k = 0; k < static_cast<int>(C.size()); ++k) {
    Expr dfk = differentiate_right(f, C[k], tab);
    if (dfk.is_zero()) continue;
    for (int l = 0; l < static_cast<int>(C.size()); ++l) {
      Expr dgl = differentiate(g, C[l], tab);
      if (dgl.is_zero()) continue;
      if (table.is_indeterminate(k, l)) {
        out.exact = false;
        continue;
      }
      const Scalar& B = table.values(k, l);
      if (B.is_zero()) continue;
      out.value = add(out.value, scale(B, mul(dfk, dgl, tab)), tab);
    }
  }
  return out;
}

PropagatedPair propagate_with_inversion(const Expr& f, const Expr& g,
                                        const BracketTable& table, const ModelSpec& m) {
  Propagated p = propagate_bracket(f, g, table, m);
  PropagatedPair out;
  out.raw = p.value;
  out.exact = p.exact;
  bool has_constants = false;
  for (SymbolId c : m.solution.constants)
    if (contains(out.raw, c)) {
      has_constants = true;
      break;
    }
  if (has_constants && !m.inverse.empty()) {
    std::map<SymbolId, Expr> bind;
    for (const auto& [c, e] : m.inverse) bind[c] = e;
    out.inverse_substituted = substitute(out.raw, bind, m.tab());
  }
  return out;
}

EtaDerivation eta_regularized_derivation(const ModelSpec& m) {
  if (!m.source_term)
    throw RegularizationError("model '" + m.name + "' has no source term");
  const SymbolTable& tab = m.tab();
  SymbolId eta = m.source_term->coupling;
  if (tab.role(eta) != Role::Parameter || tab.parity(eta) != Parity::Even)
    throw RegularizationError("source coupling must be an even parameter");

  Expr H = hamiltonian_in_constants(m);
  auto unknowns = detail::reduced_unknowns(m);
  auto lift = [](const Scalar& c, int strip_pow) -> RatFn {
    if (strip_pow >= 0) return RatFn(Poly(c) * Poly::x(strip_pow), Poly(Scalar(1)));
    return RatFn(Poly(c), Poly::x(-strip_pow));
  };
  auto eqs = detail::assemble_equations<RatFn>(m, H, unknowns, eta, lift);
  auto outcome = solve_linear_exact<RatFn>(static_cast<int>(unknowns.size()), eqs);
  if (!outcome.consistent)
    throw RegularizationError("inconsistent regulated identification system at " +
                              outcome.conflict);

  EtaDerivation out;
  out.unknowns = unknowns;
  std::vector<std::optional<Scalar>> limits(unknowns.size());
  for (std::size_t u = 0; u < unknowns.size(); ++u) {
    auto [k, l] = unknowns[u];
    std::string label = "{" + tab.name(m.solution.constants[k]) + "," +
                        tab.name(m.solution.constants[l]) + "}";
    if (!outcome.values[u]) {
      out.entry_functions.push_back(label + " indeterminate");
      continue;
    }
    std::string fn = outcome.values[u]->str(tab.name(eta));
    auto lim = outcome.values[u]->limit_at_zero();
    if (!lim)
      throw RegularizationError("table entry " + label + " = " + fn +
                                " diverges in the limit " + tab.name(eta) + " -> 0");
    limits[u] = *lim;
    out.entry_functions.push_back(label + " = " + fn + "  ->  " + lim->str());
  }
  std::vector<Parity> parities;
  for (SymbolId c : m.solution.constants) parities.push_back(tab.parity(c));
  out.table = table_from_outcome(m.solution.constants, parities, unknowns, limits,
                                 outcome.rank);
  out.table.residual_zero = true;  // verified below against the regulated rows
  for (const auto& eq : eqs) {
    RatFn acc;
    bool skip = false;
    for (const auto& [u, v] : eq.coeffs) {
      if (!outcome.values[u]) {
        skip = true;
        break;
      }
      acc = acc + v * (*outcome.values[u]);
    }
    if (!skip && !(acc - eq.rhs).is_zero()) out.table.residual_zero = false;
  }
  return out;
}

namespace {

Expr random_homogeneous(const ModelSpec& m, Parity parity, std::mt19937_64& rng) {
  const SymbolTable& tab = m.tab();
  std::vector<SymbolId> odd, even;
  for (SymbolId c : m.solution.constants)
    (tab.is_odd(c) ? odd : even).push_back(c);
  if (parity == Parity::Odd && odd.empty()) return Expr::zero();

  std::uniform_int_distribution<int> nterms(1, 3), pick_small(1, 4), sign(0, 1);
  Expr out;
  for (int n = nterms(rng); n > 0; --n) {
    Scalar c(pick_small(rng), pick_small(rng));
    if (sign(rng)) c = -c;
    if (sign(rng)) c = c * Scalar::i();
    Expr term = Expr::scalar(c);
    if (parity == Parity::Odd) {
      std::uniform_int_distribution<std::size_t> po(0, odd.size() - 1);
      term = mul(term, Expr::atom(odd[po(rng)]), m.tab());
    } else if (!odd.empty() && sign(rng)) {
      std::uniform_int_distribution<std::size_t> po(0, odd.size() - 1);
      std::size_t i = po(rng), j = po(rng);
      if (i != j)
        term = mul(term, mul(Expr::atom(odd[i]), Expr::atom(odd[j]), tab), tab);
    }
    if (!even.empty()) {
      std::uniform_int_distribution<std::size_t> pe(0, even.size() - 1);
      std::uniform_int_distribution<int> ex(0, 2);
      int e = ex(rng);
      if (e > 0) term = mul(term, pow(Expr::atom(even[pe(rng)]), e, tab), tab);
    }
    out = add(out, term, tab);
  }
  return out;
}

int parity_sign(Parity a, Parity b) {
  return (a == Parity::Odd && b == Parity::Odd) ? -1 : 1;
}

}  // namespace

ConsistencyReport jacobi_and_leibniz_check(const ModelSpec& m, const BracketTable& table,
                                           const Expr& H, unsigned seed, int samples) {
  const SymbolTable& tab = m.tab();
  SymbolId t = m.time();
  ConsistencyReport rep;
  std::mt19937_64 rng(seed);

  // Hamilton self-consistency (and with it the identification residual in
  // propagated form): {f~, H~} = df~/dt exactly for every entry.
  rep.hamilton_selfconsistent = true;
  for (const auto& [sym, f] : m.solution.entries) {
    Propagated p = propagate_bracket(f, H, table, m);
    if (!p.exact || !equal(p.value, differentiate(f, t, tab), tab)) {
      rep.hamilton_selfconsistent = false;
      rep.failures.push_back("Hamilton self-consistency fails for " + tab.name(sym));
    }
  }
  rep.eq1_residual_zero = table.residual_zero;
  if (!table.residual_zero) rep.failures.push_back("identification residual not exactly zero");

  // Jacobi over constants: entries are scalars, so each nested bracket is
  // a bracket with a scalar and must vanish identically.
  rep.jacobi_zero = true;
  const auto& C = table.constants;
  std::uniform_int_distribution<std::size_t> pc(0, C.empty() ? 0 : C.size() - 1);
  int jacobi_trials = std::min<int>(static_cast<int>(C.size() * C.size() * C.size()), 64);
  for (int n = 0; n < jacobi_trials; ++n) {
    Expr a = Expr::atom(C[pc(rng)]), b = Expr::atom(C[pc(rng)]), c = Expr::atom(C[pc(rng)]);
    Expr inner = propagate_bracket(b, c, table, m).value;
    Expr outer = propagate_bracket(a, inner, table, m).value;
    if (!outer.is_zero()) {
      rep.jacobi_zero = false;
      rep.failures.push_back("Jacobi residual nonzero on constants");
      break;
    }
  }

  // graded antisymmetry and Leibniz on sampled homogeneous expressions
  rep.antisymmetry_zero = true;
  rep.leibniz_zero = true;
  std::uniform_int_distribution<int> par(0, 1);
  bool has_odd = !m.is_even_sector();
  for (int n = 0; n < samples; ++n) {
    Parity pf = (has_odd && par(rng)) ? Parity::Odd : Parity::Even;
    Parity pg = (has_odd && par(rng)) ? Parity::Odd : Parity::Even;
    Parity ph = (has_odd && par(rng)) ? Parity::Odd : Parity::Even;
    Expr f = random_homogeneous(m, pf, rng);
    Expr g = random_homogeneous(m, pg, rng);
    Expr h = random_homogeneous(m, ph, rng);

    Expr fg = propagate_bracket(f, g, table, m).value;
    Expr gf = propagate_bracket(g, f, table, m).value;
    // {f,g} = -(-1)^{ef eg} {g,f}
    Expr anti = add(fg, scale(Scalar(parity_sign(pf, pg)), gf), tab);
    if (!anti.is_zero()) {
      rep.antisymmetry_zero = false;
      rep.failures.push_back("graded antisymmetry fails on sample " + std::to_string(n));
    }

    // {f, g h} = {f,g} h + (-1)^{ef eg} g {f,h}
    Expr lhs = propagate_bracket(f, mul(g, h, tab), table, m).value;
    Expr gfh = mul(g, propagate_bracket(f, h, table, m).value, tab);
    Expr rhs = add(mul(fg, h, tab), scale(Scalar(parity_sign(pf, pg)), gfh), tab);
    if (!equal(lhs, rhs, tab)) {
      rep.leibniz_zero = false;
      rep.failures.push_back("Leibniz fails on sample " + std::to_string(n));
    }
  }
  return rep;
}

Derivation derive(const ModelSpec& m) {
  Derivation d;
  d.hamiltonian = hamiltonian_in_constants(m);
  if (m.source_term) {
    EtaDerivation eta = eta_regularized_derivation(m);
    d.table = std::move(eta.table);
    d.eta_entry_functions = std::move(eta.entry_functions);
    d.system.constants = m.solution.constants;
    d.system.unknowns = std::move(eta.unknowns);
    d.system.notes.push_back("regulated derivation: exact limit at vanishing coupling");
    return d;
  }
  d.system = build_identification_system(m, d.hamiltonian);
  d.table = solve_bracket_table(d.system);
  return d;
}

}  // namespace ci
