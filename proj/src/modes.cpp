#include "ci/modes.hpp"

#include <cmath>
#include <random>

#include "ci/cyclotomic.hpp"

namespace ci {

namespace {

Scalar frac(long num, long den) { return Scalar(num, den); }
Scalar imag_frac(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return Scalar(Rational(0), q);
}

std::string mode_suffix(int n) {
  return (n < 0 ? "m" : "") + std::to_string(std::abs(n));
}

struct FieldScaffold {
  ModelSpec m;
  SymbolTable* tab = nullptr;
  SymbolId t = kNoSymbol, tau = kNoSymbol;

  void start(const std::string& name, const std::string& time_name) {
    m.name = name;
    m.symbols = std::make_shared<SymbolTable>();
    tab = m.symbols.get();
    t = tab->declare(time_name, Role::Time);
    tau = tab->declare("tau", Role::Parameter);
    tab->set_turn(tau);
    tab->set_value(tau, 2.0 * M_PI);
  }

  // exp(i*phase*tau + i*tfac*base*t)
  Expr wave(const Scalar& phase_times_i, const Scalar& tfac_times_i, SymbolId base) const {
    Expr arg = scale(phase_times_i, Expr::atom(tau));
    arg = add(arg, scale(tfac_times_i, mul(Expr::atom(base), Expr::atom(t), *tab)), *tab);
    return exp_of(arg, *tab);
  }
};

void attach_ladder_golden(ModelSpec& m, const std::vector<std::pair<SymbolId, SymbolId>>& pairs,
                          const Scalar& value) {
  const SymbolTable& tab = m.tab();
  for (const auto& [a, b] : pairs)
    m.golden.push_back({tab.name(a), tab.name(b), value, false, ""});
}

}  // namespace

SpinorPair SpinorPair::make(const Eigen::Vector3d& k, double m) {
  if (m <= 0) throw ModelError("spinor construction needs m > 0");
  SpinorPair sp;
  sp.k = k;
  sp.m = m;
  sp.k0 = std::sqrt(k.squaredNorm() + m * m);
  using c = std::complex<double>;
  Eigen::Matrix2cd sigma_k;
  sigma_k << c(k.z(), 0), c(k.x(), -k.y()), c(k.x(), k.y()), c(-k.z(), 0);
  Eigen::Matrix2cd proj =
      Eigen::Matrix2cd::Identity() - sigma_k / (sp.k0 + m);
  double pref = std::sqrt((sp.k0 + m) / (2.0 * m)) / std::sqrt(2.0);
  Eigen::Matrix2cd isigma2;
  isigma2 << c(0, 0), c(1, 0), c(-1, 0), c(0, 0);
  for (int s = 0; s < 2; ++s) {
    Eigen::Vector2cd chi = Eigen::Vector2cd::Zero();
    chi(s) = 1.0;
    sp.w1[s] = pref * (proj * chi);
    sp.w2[s] = pref * (proj * (isigma2 * chi));
  }
  return sp;
}

double SpinorPair::orthonormality_residual() const {
  double worst = 0;
  const Eigen::Vector2cd* w[2] = {w1, w2};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::complex<double> g = 0;
      for (int s = 0; s < 2; ++s) g += w[i][s].dot(w[j][s]);
      std::complex<double> want = (i == j) ? std::complex<double>(k0 / m, 0) : 0.0;
      worst = std::max(worst, std::abs(g - want));
    }
  return worst;
}

ModelSpec truncate_sigma(int N, double L) {
  if (N < 1 || L <= 0) throw ModelError("sigma truncation needs N >= 1 and L > 0");
  FieldScaffold f;
  f.start("sigma-o2", "t");
  SymbolTable& tab = *f.tab;

  SymbolId kappa = tab.declare("kappa", Role::Parameter);
  tab.set_value(kappa, 2.0 * M_PI / L);
  SymbolId Lbox = tab.declare("Lbox", Role::Parameter);
  tab.set_value(Lbox, L);

  SymbolId nu0 = tab.declare("nu0", Role::Parameter);
  tab.set_square(nu0, std::make_shared<const Expr>(pow(Expr::atom(Lbox), -1, tab)));
  tab.set_value(nu0, 1.0 / std::sqrt(L));
  std::vector<SymbolId> nu(N + 1, kNoSymbol);
  for (int n = 1; n <= N; ++n) {
    nu[n] = tab.declare("nu" + std::to_string(n), Role::Parameter);
    Expr sq = scale(frac(1, 2 * n),
                    mul(pow(Expr::atom(kappa), -1, tab), pow(Expr::atom(Lbox), -1, tab), tab));
    tab.set_square(nu[n], std::make_shared<const Expr>(std::move(sq)));
    double k0 = 2.0 * M_PI * n / L;
    tab.set_value(nu[n], 1.0 / std::sqrt(2.0 * k0 * L));
  }

  SymbolId q0 = tab.declare("q0", Role::Constant);
  SymbolId p0 = tab.declare("p0", Role::Constant);
  std::vector<int> indices;
  std::map<int, SymbolId> a, as;
  for (int n = 1; n <= N; ++n)
    for (int sgn : {+1, -1}) {
      int mode = sgn * n;
      indices.push_back(mode);
      std::string suffix = mode_suffix(mode);
      a[mode] = tab.declare("a" + suffix, Role::Constant);
      as[mode] = tab.declare("a" + suffix + "s", Role::Constant);
      tab.link_conjugates(a[mode], as[mode]);
    }

  int S = 2 * N + 1;
  std::vector<SymbolId> theta(S), pi(S);
  for (int j = 0; j < S; ++j) theta[j] = tab.declare("th" + std::to_string(j), Role::Variable);
  for (int j = 0; j < S; ++j) {
    pi[j] = tab.declare("pi" + std::to_string(j), Role::Momentum);
    tab.set_base(pi[j], theta[j]);
  }

  ModelSpec& m = f.m;
  m.solution.constants = tab.all_of(Role::Constant);

  for (int j = 0; j < S; ++j) {
    Expr zero_mode = mul(Expr::atom(nu0),
                         add(Expr::atom(q0), mul(Expr::atom(p0), Expr::atom(f.t), tab), tab), tab);
    Expr e = zero_mode;
    for (int mode : indices) {
      int n = std::abs(mode);
      Expr wave = f.wave(imag_frac(static_cast<long>(mode) * j, S), Scalar(-n) * Scalar::i(), kappa);
      Expr term = mul(Expr::atom(nu[n]), mul(Expr::atom(a[mode]), wave, tab), tab);
      e = add(e, term, tab);
      e = add(e, conj_expr(term, tab), tab);
    }
    m.solution.entries.emplace_back(theta[j], std::move(e));
  }
  // momentum density: pi_j = d theta_j / dt
  std::vector<std::pair<SymbolId, Expr>> momenta;
  for (int j = 0; j < S; ++j)
    momenta.emplace_back(pi[j], differentiate(m.solution.entries[j].second, f.t, tab));
  for (auto& e : momenta) m.solution.entries.push_back(std::move(e));

  Expr H = scale(frac(1, 2), mul(Expr::atom(p0), Expr::atom(p0), tab));
  for (int mode : indices) {
    int n = std::abs(mode);
    Expr term = scale(Scalar(n), mul(Expr::atom(kappa),
                                     mul(Expr::atom(as[mode]), Expr::atom(a[mode]), tab), tab));
    H = add(H, term, tab);
  }
  m.hamiltonian = std::move(H);

  m.gauge_note =
      "mode constants rescaled a(k) -> a_n * sqrt(dk) so the ladder table is a clean "
      "Kronecker delta; zero mode kept as the canonical pair (q0, p0); momenta are the "
      "densities thetadot(x_j)";

  m.golden.push_back({"q0", "p0", Scalar(1), false, ""});
  std::vector<std::pair<SymbolId, SymbolId>> pairs;
  for (int mode : indices) pairs.emplace_back(a[mode], as[mode]);
  attach_ladder_golden(m, pairs, -Scalar::i());

  auto ms = std::make_shared<ModeSet>();
  ms->kind = ModeSet::Kind::Sigma;
  ms->truncation = N;
  ms->length = L;
  ms->indices = indices;
  ms->sites = S;
  ms->zero_mode_pair = true;
  m.modes = ms;

  validate_model(m);
  return m;
}

ModelSpec build_majorana(int N, double L, double mass) {
  if (N < 1 || L <= 0 || mass <= 0)
    throw ModelError("majorana truncation needs N >= 1, L > 0, m > 0");
  FieldScaffold f;
  f.start("majorana", "t");
  SymbolTable& tab = *f.tab;

  std::vector<int> indices;
  for (int n = 1; static_cast<int>(indices.size()) < N; ++n) {
    indices.push_back(n);
    if (static_cast<int>(indices.size()) < N) indices.push_back(-n);
  }
  int maxabs = 0;
  for (int n : indices) maxabs = std::max(maxabs, std::abs(n));
  int S = 2 * maxabs + 1;

  std::map<int, SymbolId> omega, nu;
  for (int n : indices) {
    int mag = std::abs(n);
    if (omega.count(mag)) continue;
    double k = 2.0 * M_PI * mag / L;
    double k0 = std::sqrt(k * k + mass * mass);
    omega[mag] = tab.declare("om" + std::to_string(mag), Role::Parameter);
    tab.set_value(omega[mag], k0);
    nu[mag] = tab.declare("nu" + std::to_string(mag), Role::Parameter);
    tab.set_value(nu[mag], std::sqrt(mass / (L * k0)));
  }

  // spinor components as parameter symbols carrying the numeric values
  std::map<int, SpinorPair> spinors;
  std::map<int, std::array<std::array<SymbolId, 2>, 2>> w1sym, w2sym;  // [s][alpha]
  for (int n : indices) {
    SpinorPair sp = SpinorPair::make1d(2.0 * M_PI * n / L, mass);
    spinors[n] = sp;
    for (int s = 0; s < 2; ++s)
      for (int alpha = 0; alpha < 2; ++alpha) {
        w1sym[n][s][alpha] = kNoSymbol;
        w2sym[n][s][alpha] = kNoSymbol;
        std::string base = mode_suffix(n) + "s" + std::to_string(s + 1) + "c" +
                           std::to_string(alpha + 1);
        if (std::abs(sp.w1[s](alpha)) > 1e-14) {
          w1sym[n][s][alpha] = tab.declare("wa" + base, Role::Parameter);
          tab.set_value(w1sym[n][s][alpha], sp.w1[s](alpha));
        }
        if (std::abs(sp.w2[s](alpha)) > 1e-14) {
          w2sym[n][s][alpha] = tab.declare("wb" + base, Role::Parameter);
          tab.set_value(w2sym[n][s][alpha], sp.w2[s](alpha));
        }
      }
  }

  std::map<std::pair<int, int>, SymbolId> aa, ad;  // keyed by (s, n)
  for (int n : indices)
    for (int s = 1; s <= 2; ++s) {
      std::string suffix = std::to_string(s) + "_" + mode_suffix(n);
      aa[{s, n}] = tab.declare("a" + suffix, Role::Constant, Parity::Odd);
      ad[{s, n}] = tab.declare("a" + suffix + "d", Role::Constant, Parity::Odd);
      tab.link_conjugates(aa[{s, n}], ad[{s, n}]);
    }

  std::vector<std::array<SymbolId, 2>> eta(S), etad(S);
  for (int j = 0; j < S; ++j)
    for (int alpha = 0; alpha < 2; ++alpha) {
      eta[j][alpha] = tab.declare("eta" + std::to_string(alpha + 1) + "_" + std::to_string(j),
                                  Role::Variable, Parity::Odd);
      etad[j][alpha] =
          tab.declare("eta" + std::to_string(alpha + 1) + "d_" + std::to_string(j),
                      Role::Variable, Parity::Odd);
      tab.link_conjugates(eta[j][alpha], etad[j][alpha]);
    }

  ModelSpec& m = f.m;
  m.symbols = f.m.symbols;
  m.solution.constants = tab.all_of(Role::Constant);

  for (int j = 0; j < S; ++j)
    for (int alpha = 0; alpha < 2; ++alpha) {
      Expr e;
      for (int n : indices) {
        int mag = std::abs(n);
        Expr wave = f.wave(imag_frac(static_cast<long>(n) * j, S), -Scalar::i(), omega[mag]);
        for (int s = 1; s <= 2; ++s) {
          SymbolId w1 = w1sym[n][s - 1][alpha];
          if (w1 != kNoSymbol) {
            Expr term = mul(Expr::atom(nu[mag]),
                            mul(Expr::atom(w1), mul(Expr::atom(aa[{s, n}]), wave, tab), tab), tab);
            e = add(e, term, tab);
          }
          SymbolId w2 = w2sym[n][s - 1][alpha];
          if (w2 != kNoSymbol) {
            Expr term = mul(Expr::atom(nu[mag]),
                            mul(Expr::atom(w2),
                                mul(Expr::atom(ad[{s, n}]), conj_expr(wave, tab), tab), tab),
                            tab);
            e = add(e, term, tab);
          }
        }
      }
      m.solution.entries.emplace_back(eta[j][alpha], e);
      m.solution.entries.emplace_back(etad[j][alpha], conj_expr(e, tab));
    }

  Expr H;
  for (int n : indices)
    for (int s = 1; s <= 2; ++s) {
      Expr term = mul(Expr::atom(omega[std::abs(n)]),
                      mul(Expr::atom(ad[{s, n}]), Expr::atom(aa[{s, n}]), tab), tab);
      H = add(H, term, tab);
    }
  m.hamiltonian = std::move(H);
  m.commutator_form = true;  // golden values are anticommutators i*{.,.}
  m.gauge_note =
      "occupation numbers (a+ a - a a+)/2 reduce to a+ a for anticommuting mode constants; "
      "spinor components attached as parameter values";

  std::vector<std::pair<SymbolId, SymbolId>> pairs;
  for (int n : indices)
    for (int s = 1; s <= 2; ++s) pairs.emplace_back(aa[{s, n}], ad[{s, n}]);
  attach_ladder_golden(m, pairs, Scalar(1));

  auto ms = std::make_shared<ModeSet>();
  ms->kind = ModeSet::Kind::Majorana;
  ms->truncation = N;
  ms->length = L;
  ms->mass = mass;
  ms->indices = indices;
  ms->sites = S;
  m.modes = ms;

  validate_model(m);
  return m;
}

ModelSpec build_lightcone_scalar(int N, double L, double mass) {
  if (N < 1 || L <= 0 || mass <= 0)
    throw ModelError("light-cone truncation needs N >= 1, L > 0, m > 0");
  FieldScaffold f;
  f.start("lightcone-scalar", "xp");
  SymbolTable& tab = *f.tab;

  SymbolId kappa = tab.declare("kappa", Role::Parameter);
  tab.set_value(kappa, 2.0 * M_PI / L);
  // beta = m^2 L / (4 pi); the mode frequency k-/2 equals beta/n
  SymbolId beta = tab.declare("beta", Role::Parameter);
  tab.set_value(beta, mass * mass * L / (4.0 * M_PI));

  std::vector<int> indices;
  std::vector<SymbolId> nu(N + 1, kNoSymbol), a(N + 1, kNoSymbol), adag(N + 1, kNoSymbol);
  for (int n = 1; n <= N; ++n) {
    indices.push_back(n);
    double kplus = 2.0 * M_PI * n / L;
    nu[n] = tab.declare("nu" + std::to_string(n), Role::Parameter);
    tab.set_value(nu[n], 1.0 / std::sqrt(2.0 * L * kplus));
    a[n] = tab.declare("a" + std::to_string(n), Role::Constant);
    adag[n] = tab.declare("a" + std::to_string(n) + "d", Role::Constant);
    tab.link_conjugates(a[n], adag[n]);
  }

  int S = 3;
  std::vector<SymbolId> phi(S), pi(S);
  for (int j = 0; j < S; ++j) phi[j] = tab.declare("phi" + std::to_string(j), Role::Variable);
  for (int j = 0; j < S; ++j) {
    pi[j] = tab.declare("pim" + std::to_string(j), Role::Momentum);
    tab.set_base(pi[j], phi[j]);
  }

  ModelSpec& m = f.m;
  m.solution.constants = tab.all_of(Role::Constant);

  // phi(x+, x_j) = sum_n nu_n (a_n e^{-i(beta/n)x+ - i pi n j/S} + conj)
  // pi = d_- phi picks up -+ i k+/2 per mode
  for (bool momentum : {false, true}) {
    for (int j = 0; j < S; ++j) {
      Expr e;
      for (int n : indices) {
        Expr wave = f.wave(imag_frac(-static_cast<long>(n) * j, 2 * S),
                           imag_frac(-1, n), beta);
        Expr term = mul(Expr::atom(nu[n]), mul(Expr::atom(a[n]), wave, tab), tab);
        if (momentum)
          term = mul(term, scale(imag_frac(-static_cast<long>(n), 2) * Scalar(1), Expr::atom(kappa)), tab);
        e = add(e, term, tab);
        e = add(e, conj_expr(term, tab), tab);
      }
      m.solution.entries.emplace_back(momentum ? pi[j] : phi[j], std::move(e));
    }
  }

  Expr H;
  for (int n : indices) {
    Expr term = scale(frac(1, n), mul(Expr::atom(beta),
                                      mul(Expr::atom(adag[n]), Expr::atom(a[n]), tab), tab));
    H = add(H, term, tab);
  }
  m.hamiltonian = std::move(H);
  m.commutator_form = true;
  m.gauge_note =
      "light-cone time x+; modes restricted to k+ > 0 so a and a-dagger are independent; "
      "momenta are d_-phi densities";

  std::vector<std::pair<SymbolId, SymbolId>> pairs;
  for (int n : indices) pairs.emplace_back(a[n], adag[n]);
  attach_ladder_golden(m, pairs, Scalar(1));

  auto ms = std::make_shared<ModeSet>();
  ms->kind = ModeSet::Kind::LightCone;
  ms->truncation = N;
  ms->length = L;
  ms->mass = mass;
  ms->indices = indices;
  ms->positive_only = true;
  ms->sites = S;
  m.modes = ms;

  validate_model(m);
  return m;
}

ModelSpec build_chiral_boson(int N, double L) {
  if (N < 1 || L <= 0) throw ModelError("chiral-boson truncation needs N >= 1 and L > 0");
  FieldScaffold f;
  f.start("chiral-boson", "t");
  SymbolTable& tab = *f.tab;

  SymbolId kappa = tab.declare("kappa", Role::Parameter);
  tab.set_value(kappa, 2.0 * M_PI / L);

  std::vector<int> indices;
  std::vector<SymbolId> nu(N + 1, kNoSymbol), a(N + 1, kNoSymbol), adag(N + 1, kNoSymbol);
  for (int n = 1; n <= N; ++n) {
    indices.push_back(n);
    double k = 2.0 * M_PI * n / L;
    nu[n] = tab.declare("nu" + std::to_string(n), Role::Parameter);
    tab.set_value(nu[n], 1.0 / std::sqrt(L * k));
    a[n] = tab.declare("a" + std::to_string(n), Role::Constant);
    adag[n] = tab.declare("a" + std::to_string(n) + "d", Role::Constant);
    tab.link_conjugates(a[n], adag[n]);
  }

  int S = 3;
  std::vector<SymbolId> phi(S), pi(S);
  for (int j = 0; j < S; ++j) phi[j] = tab.declare("phi" + std::to_string(j), Role::Variable);
  for (int j = 0; j < S; ++j) {
    pi[j] = tab.declare("pim" + std::to_string(j), Role::Momentum);
    tab.set_base(pi[j], phi[j]);
  }

  ModelSpec& m = f.m;
  m.solution.constants = tab.all_of(Role::Constant);

  // phi = sum_n nu_n (a_n e^{-i n kappa (t + x_j)} + conj); the first-order
  // Lagrangian pairs phi with pi = (d_x phi)/2
  for (bool momentum : {false, true}) {
    for (int j = 0; j < S; ++j) {
      Expr e;
      for (int n : indices) {
        Expr wave = f.wave(imag_frac(-static_cast<long>(n) * j, S), Scalar(-n) * Scalar::i(), kappa);
        Expr term = mul(Expr::atom(nu[n]), mul(Expr::atom(a[n]), wave, tab), tab);
        if (momentum)
          term = mul(term, scale(Scalar(-n) * Scalar::i() * frac(1, 2), Expr::atom(kappa)), tab);
        e = add(e, term, tab);
        e = add(e, conj_expr(term, tab), tab);
      }
      m.solution.entries.emplace_back(momentum ? pi[j] : phi[j], std::move(e));
    }
  }

  Expr H;
  for (int n : indices) {
    Expr term = scale(Scalar(n), mul(Expr::atom(kappa),
                                     mul(Expr::atom(adag[n]), Expr::atom(a[n]), tab), tab));
    H = add(H, term, tab);
  }
  m.hamiltonian = std::move(H);
  m.commutator_form = true;
  m.gauge_note = "first-order chiral dynamics; momenta are (d_x phi)/2 densities";

  std::vector<std::pair<SymbolId, SymbolId>> pairs;
  for (int n : indices) pairs.emplace_back(a[n], adag[n]);
  attach_ladder_golden(m, pairs, Scalar(1));

  auto ms = std::make_shared<ModeSet>();
  ms->kind = ModeSet::Kind::ChiralBoson;
  ms->truncation = N;
  ms->length = L;
  ms->indices = indices;
  ms->positive_only = true;
  ms->sites = S;
  m.modes = ms;

  validate_model(m);
  return m;
}

LatticeDeltaCheck check_sigma_lattice_delta(const ModelSpec& m, const BracketTable& table) {
  LatticeDeltaCheck out;
  if (!m.modes || m.modes->kind != ModeSet::Kind::Sigma) {
    out.failure = "not a sigma model";
    return out;
  }
  const SymbolTable& tab = m.tab();
  SymbolId tau = *tab.find("tau");
  SymbolId Lbox = *tab.find("Lbox");
  int S = m.modes->sites;

  Expr delta_weight = scale(Scalar(S), pow(Expr::atom(Lbox), -1, tab));

  for (int i = 0; i < S; ++i) {
    const Expr& th_i = m.solution.entries[i].second;
    for (int j = 0; j < S; ++j) {
      const Expr& th_j = m.solution.entries[j].second;
      const Expr& pi_j = m.solution.entries[S + j].second;

      Expr tt = propagate_bracket(th_i, th_j, table, m).value;
      if (!tt.is_zero()) {
        out.failure = "{theta,theta} not exactly zero at (" + std::to_string(i) + "," +
                      std::to_string(j) + ")";
        return out;
      }
      Expr td = propagate_bracket(th_i, pi_j, table, m).value;
      Expr want = (i == j) ? delta_weight : Expr::zero();
      if (!phase_equal(td, want, tau, tab)) {
        out.failure = "{theta,thetadot} != lattice delta at (" + std::to_string(i) + "," +
                      std::to_string(j) + ")";
        return out;
      }
      const Expr& pi_i = m.solution.entries[S + i].second;
      Expr dd = propagate_bracket(pi_i, pi_j, table, m).value;
      if (!dd.is_zero()) {
        out.failure = "{thetadot,thetadot} not exactly zero";
        return out;
      }
      out.pairs_checked += 3;
    }
  }
  out.pass = true;
  return out;
}

SigmaFieldCheck sigma_field_brackets(const ModelSpec& m, const BracketTable& table,
                                     int nconfigs, double tol, unsigned seed) {
  if (!m.modes || m.modes->kind != ModeSet::Kind::Sigma)
    throw ModelError("sigma_field_brackets needs a sigma model");
  const SymbolTable& tab = m.tab();
  int S = m.modes->sites;
  double dxinv = S / m.modes->length;

  // numeric theta-sector brackets from the derived table
  Eigen::MatrixXcd Ttt(S, S), Ttd(S, S), Tdt(S, S), Tdd(S, S);
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j) {
      const Expr& th_i = m.solution.entries[i].second;
      const Expr& th_j = m.solution.entries[j].second;
      const Expr& pi_i = m.solution.entries[S + i].second;
      const Expr& pi_j = m.solution.entries[S + j].second;
      Ttt(i, j) = evaluate(propagate_bracket(th_i, th_j, table, m).value, {}, tab);
      Ttd(i, j) = evaluate(propagate_bracket(th_i, pi_j, table, m).value, {}, tab);
      Tdt(i, j) = evaluate(propagate_bracket(pi_i, th_j, table, m).value, {}, tab);
      Tdd(i, j) = evaluate(propagate_bracket(pi_i, pi_j, table, m).value, {}, tab);
    }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI), vel(-1.0, 1.0);

  SigmaFieldCheck out;
  out.configurations = nconfigs;
  out.tolerance = tol;

  for (int cfg = 0; cfg < nconfigs; ++cfg) {
    std::vector<double> th(S), thd(S);
    for (int j = 0; j < S; ++j) {
      th[j] = ang(rng);
      thd[j] = vel(rng);
    }
    // phi_1 = cos theta, phi_2 = sin theta, Pi_a = phi_a-dot
    auto phi = [&](int comp, int j) { return comp == 0 ? std::cos(th[j]) : std::sin(th[j]); };
    auto dphi = [&](int comp, int j) { return comp == 0 ? -std::sin(th[j]) : std::cos(th[j]); };
    auto Pi = [&](int comp, int j) { return dphi(comp, j) * thd[j]; };
    // dPi/dtheta and dPi/dthetadot
    auto dPi_dth = [&](int comp, int j) {
      return (comp == 0 ? -std::cos(th[j]) : -std::sin(th[j])) * thd[j];
    };
    auto dPi_dthd = [&](int comp, int j) { return dphi(comp, j); };

    for (int aidx = 0; aidx < 2; ++aidx)
      for (int bidx = 0; bidx < 2; ++bidx)
        for (int i = 0; i < S; ++i)
          for (int j = 0; j < S; ++j) {
            double delta = (i == j) ? dxinv : 0.0;
            std::complex<double> pp =
                dphi(aidx, i) * dphi(bidx, j) * Ttt(i, j);  // {phi_a, phi_b}
            out.max_deviation = std::max(out.max_deviation, std::abs(pp));

            std::complex<double> ppi =
                dphi(aidx, i) * (dPi_dth(bidx, j) * Ttt(i, j) + dPi_dthd(bidx, j) * Ttd(i, j));
            double phic2 = phi(0, i) * phi(0, i) + phi(1, i) * phi(1, i);
            double want_ppi =
                ((aidx == bidx ? 1.0 : 0.0) - phi(aidx, i) * phi(bidx, i) / phic2) * delta;
            out.max_deviation = std::max(out.max_deviation, std::abs(ppi - want_ppi));

            std::complex<double> pipi =
                dPi_dth(aidx, i) * dPi_dth(bidx, j) * Ttt(i, j) +
                dPi_dth(aidx, i) * dPi_dthd(bidx, j) * Ttd(i, j) +
                dPi_dthd(aidx, i) * dPi_dth(bidx, j) * Tdt(i, j) +
                dPi_dthd(aidx, i) * dPi_dthd(bidx, j) * Tdd(i, j);
            double want_pipi =
                -(phi(aidx, i) * Pi(bidx, i) - phi(bidx, i) * Pi(aidx, i)) / phic2 * delta;
            out.max_deviation = std::max(out.max_deviation, std::abs(pipi - want_pipi));
          }
  }
  out.pass = out.max_deviation < tol;
  return out;
}

}  // namespace ci
