#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ci/error.hpp"

namespace ci {

class Expr;

enum class Parity : std::uint8_t { Even, Odd };

inline Parity operator+(Parity a, Parity b) {
  return (a == b) ? Parity::Even : Parity::Odd;
}

enum class Role : std::uint8_t {
  Time,
  Parameter,
  Constant,   // integration constant
  Variable,   // dynamical variable
  Velocity,   // q-dot symbol appearing in a Lagrangian
  Momentum,
  ModeIndex,
};

std::string role_name(Role r);

using SymbolId = std::int32_t;
constexpr SymbolId kNoSymbol = -1;

struct SymbolInfo {
  std::string name;
  Role role = Role::Parameter;
  Parity parity = Parity::Even;
  SymbolId conjugate = kNoSymbol;  // symmetric pairing a <-> a*
  SymbolId base = kNoSymbol;       // velocity/momentum -> its variable
  bool is_turn = false;            // full-turn phase: exp(i*q*this) reduced mod q=1
  std::shared_ptr<const Expr> square;  // optional rewrite for this^2 (e.g. nu^2 = 1/(2*omega))
  std::optional<std::complex<double>> value;  // numeric attachment for oracles
};

// Per-model symbol registry.  Ids are dense indices; canonical factor
// order is role rank then name, independent of declaration order.
class SymbolTable {
 public:
  SymbolId declare(SymbolInfo info) {
    if (by_name_.count(info.name))
      throw ModelError("symbol '" + info.name + "' declared twice");
    if (info.role == Role::Time) {
      if (time_ != kNoSymbol) throw ModelError("more than one time symbol");
      if (info.parity != Parity::Even) throw ModelError("time symbol must be even");
      time_ = static_cast<SymbolId>(infos_.size());
    }
    SymbolId id = static_cast<SymbolId>(infos_.size());
    by_name_[info.name] = id;
    infos_.push_back(std::move(info));
    return id;
  }

  SymbolId declare(const std::string& name, Role role, Parity parity = Parity::Even) {
    SymbolInfo s;
    s.name = name;
    s.role = role;
    s.parity = parity;
    return declare(std::move(s));
  }

  void link_conjugates(SymbolId a, SymbolId b) {
    infos_.at(a).conjugate = b;
    infos_.at(b).conjugate = a;
  }

  void set_value(SymbolId s, std::complex<double> v) { infos_.at(s).value = v; }
  void set_square(SymbolId s, std::shared_ptr<const Expr> sq) {
    infos_.at(s).square = std::move(sq);
  }
  void set_base(SymbolId s, SymbolId base) { infos_.at(s).base = base; }
  void set_turn(SymbolId s) { infos_.at(s).is_turn = true; }

  const SymbolInfo& info(SymbolId s) const { return infos_.at(s); }
  const std::string& name(SymbolId s) const { return infos_.at(s).name; }
  Parity parity(SymbolId s) const { return infos_.at(s).parity; }
  Role role(SymbolId s) const { return infos_.at(s).role; }
  bool is_odd(SymbolId s) const { return parity(s) == Parity::Odd; }

  std::optional<SymbolId> find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  SymbolId require(const std::string& name) const {
    auto s = find(name);
    if (!s) throw ParseError("undeclared identifier '" + name + "'");
    return *s;
  }

  SymbolId time_symbol() const {
    if (time_ == kNoSymbol) throw ModelError("no time symbol declared");
    return time_;
  }
  bool has_time() const { return time_ != kNoSymbol; }

  std::size_t size() const { return infos_.size(); }

  std::vector<SymbolId> all_of(Role r) const {
    std::vector<SymbolId> out;
    for (SymbolId s = 0; s < static_cast<SymbolId>(infos_.size()); ++s)
      if (infos_[s].role == r) out.push_back(s);
    return out;
  }

  // parameters < integration constants < variables < momenta,
  // lexicographic within a role; time sorts first so t^n leads a monomial.
  int order_rank(SymbolId s) const {
    switch (role(s)) {
      case Role::Time: return 0;
      case Role::Parameter: return 1;
      case Role::ModeIndex: return 1;
      case Role::Constant: return 2;
      case Role::Variable: return 3;
      case Role::Velocity: return 3;
      case Role::Momentum: return 4;
    }
    return 5;
  }

  // Canonical total order on symbols.
  bool before(SymbolId a, SymbolId b) const {
    int ra = order_rank(a), rb = order_rank(b);
    if (ra != rb) return ra < rb;
    if (infos_[a].name != infos_[b].name) return infos_[a].name < infos_[b].name;
    return a < b;
  }

 private:
  std::vector<SymbolInfo> infos_;
  std::map<std::string, SymbolId> by_name_;
  SymbolId time_ = kNoSymbol;
};

inline std::string role_name_impl(Role r) {
  switch (r) {
    case Role::Time: return "time";
    case Role::Parameter: return "parameter";
    case Role::Constant: return "constant";
    case Role::Variable: return "variable";
    case Role::Velocity: return "velocity";
    case Role::Momentum: return "momentum";
    case Role::ModeIndex: return "mode-index";
  }
  return "?";
}

inline std::string role_name(Role r) { return role_name_impl(r); }

}  // namespace ci
