#pragma once

#include <Eigen/Dense>

#include "ci/engine.hpp"
#include "ci/model.hpp"

namespace ci {

// Finite mode truncation of a (1+1)d field: momenta k_n = 2*pi*n/L for the
// integers in `indices`.  Zero modes are excluded wherever a normalization
// 1/sqrt(k0) or 1/k+ would be singular; the sigma model keeps the zero
// mode as a canonical (q0, p0) pair instead, which is what makes the
// lattice delta come out exact.
struct ModeSet {
  enum class Kind { Sigma, Majorana, LightCone, ChiralBoson };
  Kind kind;
  int truncation = 0;  // the N handed to the builder
  double length = 0;   // box length L
  double mass = 0;
  std::vector<int> indices;
  bool positive_only = false;
  int sites = 0;
  bool zero_mode_pair = false;

  double momentum(int n) const { return 2.0 * M_PI * n / length; }
};

// Majorana mode spinors for a momentum along the 3-axis (the 1d
// reduction); the general 3-momentum form is kept for the grid checks.
struct SpinorPair {
  Eigen::Vector3d k;
  double m = 0, k0 = 0;
  Eigen::Vector2cd w1[2], w2[2];

  static SpinorPair make(const Eigen::Vector3d& k, double m);
  static SpinorPair make1d(double kz, double m) {
    return make(Eigen::Vector3d(0, 0, kz), m);
  }

  // max deviation of G_ij = sum_s w_s^(i)+ w_s^(j) from (k0/m) * delta_ij
  double orthonormality_residual() const;
};

ModelSpec truncate_sigma(int N, double L);
ModelSpec build_majorana(int N, double L, double m);
ModelSpec build_lightcone_scalar(int N, double L, double m);
ModelSpec build_chiral_boson(int N, double L);

// Exact lattice-delta verification for the sigma model:
// {theta(x_i), thetadot(x_j)} = delta_ij / dx and {theta,theta} =
// {thetadot,thetadot} = 0, with root-of-unity sums reduced in the
// cyclotomic field so the comparison is exact.
struct LatticeDeltaCheck {
  bool pass = false;
  int pairs_checked = 0;
  std::string failure;
};
LatticeDeltaCheck check_sigma_lattice_delta(const ModelSpec& m, const BracketTable& table);

// Numeric verification of the nonlinear field brackets of the sigma model
// through phi = cos theta, psi = sin theta at sampled configurations.
struct SigmaFieldCheck {
  int configurations = 0;
  double max_deviation = 0;
  double tolerance = 0;
  bool pass = false;
};
SigmaFieldCheck sigma_field_brackets(const ModelSpec& m, const BracketTable& table,
                                     int nconfigs, double tol, unsigned seed = 11);

}  // namespace ci
