#include "ci/model.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "ci/parse.hpp"

namespace ci {

std::map<SymbolId, Expr> ModelSpec::velocity_bindings() const {
  std::map<SymbolId, Expr> out;
  SymbolId t = time();
  for (const auto& [var, vel] : velocity_of) {
    const Expr* e = entry(var);
    if (e) out[vel] = differentiate(*e, t, tab());
  }
  return out;
}

std::map<SymbolId, Expr> ModelSpec::solution_bindings() const {
  std::map<SymbolId, Expr> out;
  for (const auto& [sym, e] : solution.entries) out[sym] = e;
  return out;
}

bool ModelSpec::is_even_sector() const {
  for (SymbolId s = 0; s < static_cast<SymbolId>(symbols->size()); ++s)
    if (symbols->is_odd(s)) return false;
  return true;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool section_header(const std::string& line, const std::string& name, std::string* rest) {
  if (line.compare(0, name.size(), name) != 0) return false;
  std::string tail = line.substr(name.size());
  if (!tail.empty() && tail[0] != ':' && !std::isspace(static_cast<unsigned char>(tail[0])))
    return false;
  std::size_t colon = tail.find(':');
  if (colon == std::string::npos) return false;
  *rest = trim(tail.substr(colon + 1));
  return true;
}

struct PendingSymbol {
  std::string name, conj, square_text;
  Role role = Role::Parameter;
  Parity parity = Parity::Even;
  std::string base;
  bool turn = false;
  std::optional<double> value;
};

PendingSymbol parse_symbol_line(const std::string& line) {
  std::size_t colon = line.find(':');
  if (colon == std::string::npos) throw ParseError("symbol line needs ':': " + line);
  PendingSymbol p;
  p.name = trim(line.substr(0, colon));
  std::string rest = trim(line.substr(colon + 1));

  // "square = <expr>" consumes the remainder of the line
  std::size_t sq = rest.find("square");
  if (sq != std::string::npos) {
    std::size_t eq = rest.find('=', sq);
    if (eq == std::string::npos) throw ParseError("square needs '=': " + line);
    p.square_text = trim(rest.substr(eq + 1));
    rest = trim(rest.substr(0, sq));
  }

  auto toks = split_ws(rest);
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const std::string& t = toks[k];
    if (t == "time") p.role = Role::Time;
    else if (t == "parameter") p.role = Role::Parameter;
    else if (t == "constant") p.role = Role::Constant;
    else if (t == "variable") p.role = Role::Variable;
    else if (t == "mode-index") p.role = Role::ModeIndex;
    else if (t == "momentum" || t == "velocity") {
      p.role = (t == "momentum") ? Role::Momentum : Role::Velocity;
      if (k + 2 < toks.size() && toks[k + 1] == "of") {
        p.base = toks[k + 2];
        k += 2;
      } else if (t == "velocity") {
        throw ParseError("velocity symbol needs 'of <variable>': " + line);
      }
    } else if (t == "even") p.parity = Parity::Even;
    else if (t == "odd") p.parity = Parity::Odd;
    else if (t == "turn") p.turn = true;
    else if (t == "conj") {
      if (k + 1 >= toks.size()) throw ParseError("conj needs a name: " + line);
      p.conj = toks[++k];
    } else if (t == "value") {
      if (k + 2 >= toks.size() || toks[k + 1] != "=")
        throw ParseError("value needs '= <float>': " + line);
      p.value = std::stod(toks[k + 2]);
      k += 2;
    } else {
      throw ParseError("unknown symbol attribute '" + t + "' in: " + line);
    }
  }
  if (p.name.empty()) throw ParseError("symbol line without a name");
  return p;
}

}  // namespace

ModelSpec load_model(const std::string& source) {
  std::istringstream in(source);
  std::string line;

  ModelSpec m;
  m.symbols = std::make_shared<SymbolTable>();

  std::vector<PendingSymbol> pending;
  std::vector<std::pair<std::string, std::string>> solution_lines, inverse_lines;
  std::vector<std::string> golden_lines;
  std::string lagrangian_text, hamiltonian_text, source_text;

  enum class Section { None, Symbols, Solution, Inverse, Golden } section = Section::None;

  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::string rest;
    if (line.rfind("model", 0) == 0 && line.size() > 5 &&
        std::isspace(static_cast<unsigned char>(line[5]))) {
      m.name = trim(line.substr(5));
      section = Section::None;
    } else if (line == "symbols:") {
      section = Section::Symbols;
    } else if (line == "solution:") {
      section = Section::Solution;
    } else if (line == "inverse:") {
      section = Section::Inverse;
    } else if (line == "golden:") {
      section = Section::Golden;
    } else if (line == "commutators") {
      m.commutator_form = true;
      section = Section::None;
    } else if (section_header(line, "lagrangian", &rest)) {
      lagrangian_text = rest;
      section = Section::None;
    } else if (section_header(line, "hamiltonian", &rest)) {
      hamiltonian_text = rest;
      section = Section::None;
    } else if (section_header(line, "gauge", &rest)) {
      m.gauge_note = rest;
      section = Section::None;
    } else if (section_header(line, "source", &rest)) {
      source_text = rest;
      section = Section::None;
    } else {
      switch (section) {
        case Section::Symbols:
          pending.push_back(parse_symbol_line(line));
          break;
        case Section::Solution:
        case Section::Inverse: {
          std::size_t eq = line.find('=');
          if (eq == std::string::npos) throw ParseError("expected '=' in: " + line);
          auto& dst = (section == Section::Solution) ? solution_lines : inverse_lines;
          dst.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
          break;
        }
        case Section::Golden:
          golden_lines.push_back(line);
          break;
        case Section::None:
          throw ParseError("line outside any section: " + line);
      }
    }
  }
  if (m.name.empty()) throw ParseError("model file without a 'model <name>' line");

  SymbolTable& tab = *m.symbols;
  for (const auto& p : pending) {
    SymbolInfo info;
    info.name = p.name;
    info.role = p.role;
    info.parity = p.parity;
    info.is_turn = p.turn;
    if (p.value) info.value = std::complex<double>(*p.value, 0.0);
    tab.declare(std::move(info));
  }
  // second pass: cross references and square expressions
  for (const auto& p : pending) {
    SymbolId s = tab.require(p.name);
    if (!p.conj.empty()) tab.link_conjugates(s, tab.require(p.conj));
    if (!p.base.empty()) tab.set_base(s, tab.require(p.base));
    if (!p.square_text.empty()) {
      Expr sq = parse(p.square_text, tab);
      if (!p.value) {
        // derive the numeric attachment from the square when possible
        try {
          std::complex<double> v = evaluate(sq, {}, tab);
          tab.set_value(s, std::sqrt(v));
        } catch (const Error&) {
        }
      }
      tab.set_square(s, std::make_shared<const Expr>(std::move(sq)));
    }
  }

  m.solution.constants = tab.all_of(Role::Constant);

  if (!lagrangian_text.empty()) m.lagrangian = parse(lagrangian_text, tab);
  if (!hamiltonian_text.empty()) m.hamiltonian = parse(hamiltonian_text, tab);

  for (const auto& [lhs, rhs] : solution_lines) {
    SymbolId s = tab.require(lhs);
    m.solution.entries.emplace_back(s, parse(rhs, tab));
  }
  // variables first, then momenta, each in declaration order
  std::stable_sort(m.solution.entries.begin(), m.solution.entries.end(),
                   [&](const auto& a, const auto& b) {
                     bool ma = tab.role(a.first) == Role::Momentum;
                     bool mb = tab.role(b.first) == Role::Momentum;
                     if (ma != mb) return mb;
                     return a.first < b.first;
                   });

  for (const auto& [lhs, rhs] : inverse_lines) {
    SymbolId s = tab.require(lhs);
    if (tab.role(s) != Role::Constant)
      throw ModelError("inverse entry for non-constant '" + lhs + "'");
    m.inverse[s] = parse(rhs, tab);
  }

  if (!source_text.empty()) {
    auto on = source_text.find(" on ");
    if (on == std::string::npos) throw ParseError("source needs '<coupling> on <vars>'");
    SourceTerm st;
    st.coupling = tab.require(trim(source_text.substr(0, on)));
    std::string vars = source_text.substr(on + 4);
    std::istringstream vs(vars);
    std::string v;
    while (std::getline(vs, v, ',')) st.variables.push_back(tab.require(trim(v)));
    m.source_term = st;
  }

  for (const auto& g : golden_lines) {
    if (g.empty() || g[0] != '{') throw ParseError("golden line must start with '{': " + g);
    std::size_t comma = g.find(','), close = g.find('}');
    if (comma == std::string::npos || close == std::string::npos || comma > close)
      throw ParseError("malformed golden line: " + g);
    GoldenBracket gb;
    gb.a = trim(g.substr(1, comma - 1));
    gb.b = trim(g.substr(comma + 1, close - comma - 1));
    std::size_t eq = g.find('=', close);
    if (eq == std::string::npos) throw ParseError("golden line needs '=': " + g);
    std::string value = trim(g.substr(eq + 1));
    std::size_t note = value.find("note");
    if (note != std::string::npos) {
      std::string n = trim(value.substr(note + 4));
      if (n.size() >= 2 && n.front() == '"' && n.back() == '"') n = n.substr(1, n.size() - 2);
      gb.note = n;
      value = trim(value.substr(0, note));
    }
    gb.expected = parse(value, tab).as_scalar();
    SymbolId sa = tab.require(gb.a), sb = tab.require(gb.b);
    gb.propagated =
        tab.role(sa) != Role::Constant || tab.role(sb) != Role::Constant;
    m.golden.push_back(std::move(gb));
  }

  // build variable -> velocity links
  for (SymbolId s : tab.all_of(Role::Velocity)) {
    SymbolId base = tab.info(s).base;
    if (base == kNoSymbol) throw ModelError("velocity '" + tab.name(s) + "' without base");
    m.velocity_of[base] = s;
  }

  validate_model(m);
  return m;
}

ModelSpec load_model_file(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ModelError("cannot open model file: " + path);
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  std::fclose(f);
  return load_model(text);
}

std::string save_model(const ModelSpec& m) {
  const SymbolTable& tab = m.tab();
  std::ostringstream out;
  out << "model " << m.name << "\n\nsymbols:\n";
  for (SymbolId s = 0; s < static_cast<SymbolId>(tab.size()); ++s) {
    const SymbolInfo& info = tab.info(s);
    out << "  " << info.name << " : " << role_name(info.role);
    if (info.base != kNoSymbol) out << " of " << tab.name(info.base);
    if (info.parity == Parity::Odd) out << " odd";
    if (info.is_turn) out << " turn";
    if (info.conjugate != kNoSymbol) out << " conj " << tab.name(info.conjugate);
    if (info.value) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", info.value->real());
      out << " value = " << buf;
    }
    if (info.square) out << " square = " << to_string(*info.square, tab);
    out << "\n";
  }
  if (m.lagrangian) out << "\nlagrangian: " << to_string(*m.lagrangian, tab) << "\n";
  if (m.hamiltonian) out << "\nhamiltonian: " << to_string(*m.hamiltonian, tab) << "\n";
  out << "\nsolution:\n";
  for (const auto& [s, e] : m.solution.entries)
    out << "  " << tab.name(s) << " = " << to_string(e, tab) << "\n";
  if (!m.inverse.empty()) {
    out << "\ninverse:\n";
    for (const auto& [s, e] : m.inverse)
      out << "  " << tab.name(s) << " = " << to_string(e, tab) << "\n";
  }
  if (!m.gauge_note.empty()) out << "\ngauge: " << m.gauge_note << "\n";
  if (m.source_term) {
    out << "\nsource: " << tab.name(m.source_term->coupling) << " on ";
    for (std::size_t k = 0; k < m.source_term->variables.size(); ++k)
      out << (k ? ", " : "") << tab.name(m.source_term->variables[k]);
    out << "\n";
  }
  if (m.commutator_form) out << "\ncommutators\n";
  if (!m.golden.empty()) {
    out << "\ngolden:\n";
    for (const auto& g : m.golden) {
      out << "  {" << g.a << ", " << g.b << "} = " << g.expected.str();
      if (!g.note.empty()) out << " note \"" << g.note << "\"";
      out << "\n";
    }
  }
  return out.str();
}

namespace {

void check_entry_symbols(const ModelSpec& m, const Expr& e, const char* where) {
  const SymbolTable& tab = m.tab();
  for (SymbolId s = 0; s < static_cast<SymbolId>(tab.size()); ++s) {
    Role r = tab.role(s);
    if (r == Role::Variable || r == Role::Momentum || r == Role::Velocity) {
      if (contains(e, s))
        throw ModelError(std::string(where) +
                         " must be closed form in time/constants/parameters, found '" +
                         tab.name(s) + "'");
    }
  }
}

void independence_probe(ModelSpec& m) {
  const SymbolTable& tab = m.tab();
  if (!m.is_even_sector()) return;
  for (SymbolId s = 0; s < static_cast<SymbolId>(tab.size()); ++s)
    if (tab.role(s) == Role::Parameter && !tab.info(s).value) return;

  const auto& C = m.solution.constants;
  if (C.empty() || m.solution.entries.empty()) return;

  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int samples = 4;
  Eigen::MatrixXcd J(m.solution.entries.size() * samples, C.size());
  std::map<SymbolId, std::complex<double>> bind;
  for (SymbolId c : C) bind[c] = {u(rng), u(rng)};
  SymbolId t = m.time();
  try {
    for (int s = 0; s < samples; ++s) {
      bind[t] = {0.3 + 0.7 * s, 0.0};
      for (std::size_t e = 0; e < m.solution.entries.size(); ++e) {
        for (std::size_t k = 0; k < C.size(); ++k) {
          Expr d = differentiate(m.solution.entries[e].second, C[k], tab);
          J(static_cast<long>(s * m.solution.entries.size() + e), static_cast<long>(k)) =
              evaluate(d, bind, tab);
        }
      }
    }
  } catch (const Error&) {
    return;  // unbound parameter or similar; the probe is best-effort
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J);
  double tol = 1e-9 * svd.singularValues()(0);
  long rank = 0;
  for (long k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > tol) ++rank;
  if (rank < static_cast<long>(C.size()))
    m.warnings.push_back(
        "integration constants look dependent: numeric Jacobian rank " +
        std::to_string(rank) + " < " + std::to_string(C.size()));
}

}  // namespace

void validate_model(ModelSpec& m) {
  const SymbolTable& tab = m.tab();
  if (!tab.has_time()) throw ModelError("model '" + m.name + "' has no time symbol");
  if (!m.lagrangian && !m.hamiltonian)
    throw ModelError("model '" + m.name + "' needs a lagrangian or a hamiltonian");

  // entry coverage and parity
  for (SymbolId s : tab.all_of(Role::Variable))
    if (!m.entry(s)) throw ModelError("missing solution entry for variable '" + tab.name(s) + "'");
  for (SymbolId s : tab.all_of(Role::Momentum))
    if (!m.entry(s)) throw ModelError("missing solution entry for momentum '" + tab.name(s) + "'");
  for (const auto& [s, e] : m.solution.entries) {
    Role r = tab.role(s);
    if (r != Role::Variable && r != Role::Momentum)
      throw ModelError("solution entry for non-variable '" + tab.name(s) + "'");
    check_entry_symbols(m, e, "solution entry");
    auto p = parity_of(e, tab);
    if (!p) throw ModelError("solution entry for '" + tab.name(s) + "' has mixed parity");
    if (!e.is_zero() && *p != tab.parity(s))
      throw ModelError("parity mismatch in solution entry for '" + tab.name(s) + "'");
  }

  // a declared constant that never appears signals a dropped degree of
  // freedom (e.g. an unfixed gauge function that was silently discarded)
  for (SymbolId c : m.solution.constants) {
    bool seen = false;
    for (const auto& [s, e] : m.solution.entries) {
      (void)s;
      if (contains(e, c)) {
        seen = true;
        break;
      }
    }
    if (!seen)
      throw ModelError("integration constant '" + tab.name(c) +
                       "' never appears in the solution (unfixed gauge or dropped "
                       "degree of freedom?)");
  }

  std::size_t nvars = tab.all_of(Role::Variable).size();
  if (m.solution.constants.size() > 2 * nvars)
    throw ModelError("more integration constants than phase-space dimensions");

  if (m.hamiltonian) {
    if (contains(*m.hamiltonian, m.time()))
      throw ModelError("stated hamiltonian depends on time");
    check_entry_symbols(m, *m.hamiltonian, "hamiltonian");
  }

  // momentum consistency p = dL/dqdot, checked on the solution
  if (m.lagrangian) {
    auto vel = m.velocity_bindings();
    std::map<SymbolId, Expr> bind = m.solution_bindings();
    for (const auto& [v, e] : vel) bind[v] = e;
    for (SymbolId p : tab.all_of(Role::Momentum)) {
      SymbolId q = tab.info(p).base;
      if (q == kNoSymbol)
        throw ModelError("momentum '" + tab.name(p) + "' without 'of <variable>'");
      auto it = m.velocity_of.find(q);
      if (it == m.velocity_of.end())
        throw ModelError("variable '" + tab.name(q) +
                         "' has a momentum but no velocity symbol for the Lagrangian check");
      Expr dLdv = differentiate(*m.lagrangian, it->second, tab);
      Expr lhs = substitute(dLdv, bind, tab);
      if (!equal(lhs, *m.entry(p), tab))
        throw ModelError("momentum inconsistency for '" + tab.name(p) +
                         "': dL/d(" + tab.name(it->second) + ") = " + to_string(lhs, tab) +
                         " but the solution states " + to_string(*m.entry(p), tab));
    }
  }

  for (const auto& [c, e] : m.inverse)
    for (SymbolId cc : m.solution.constants)
      if (contains(e, cc))
        throw ModelError("inverse entry for '" + tab.name(c) +
                         "' still references constant '" + tab.name(cc) + "'");

  independence_probe(m);
}

}  // namespace ci
