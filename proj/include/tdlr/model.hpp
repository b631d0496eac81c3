#pragma once

#include <Eigen/Dense>

#include "tdlr/errors.hpp"

namespace tdlr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Uniform grid on [-L, L] with Dirichlet boundaries (ghost points outside
/// the box carry zeros). Quadrature weight is the uniform spacing h.
struct GridSpec {
  int n = 0;
  double L = 0.0;
  double h = 0.0;
  Vec x;

  static GridSpec uniform(int n, double L);
};

/// Softened 1/|x| interaction and external well, regular on the whole grid.
struct SoftCoulombParams {
  double a = 1.0;      // interaction softening, w(x) = 1/sqrt(x^2 + a^2)
  double Z = 1.0;      // external charge
  double a_ext = 1.0;  // external softening, V_ext = -Z/sqrt(x^2 + a_ext^2)

  void validate() const;
};

/// Polynomial exchange-correlation energy density
///   e(rho) = c2 rho^2 + c3 rho^3 + c4 rho^4,
/// which is smooth with e(0) = e'(0) = 0 by construction.
struct XcPolynomial {
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;

  double e(double rho) const { return rho * rho * (c2 + rho * (c3 + rho * c4)); }
  double v(double rho) const { return rho * (2 * c2 + rho * (3 * c3 + rho * 4 * c4)); }
  double vp(double rho) const { return 2 * c2 + rho * (6 * c3 + rho * 12 * c4); }
};

struct ModelSystem {
  GridSpec grid;
  SoftCoulombParams sc;
  XcPolynomial xc;
  int N = 1;  // number of occupied orbitals

  void validate() const;
};

/// -1/2 d^2/dx^2 as the three-point stencil with Dirichlet truncation.
Mat kinetic_matrix(const GridSpec& grid);

/// V_ext(x_i) = -Z / sqrt(x_i^2 + a_ext^2).
Vec external_potential(const ModelSystem& model);

/// Kernel matrix W_ij = 1/sqrt((x_i - x_j)^2 + a^2).
Mat interaction_kernel(const ModelSystem& model);

/// V_H(x_i) = sum_j W_ij rho_j h. Rejects densities with negative entries.
Vec hartree_potential(const ModelSystem& model, const Vec& rho);

struct XcEval {
  Vec e;   // energy density e_xc(rho)
  Vec v;   // potential e_xc'(rho)
  Vec vp;  // kernel e_xc''(rho)
};

XcEval xc_derivatives(const XcPolynomial& xc, const Vec& rho);

/// H[rho] = kinetic + diag(V_ext + V_H + v_xc).
Mat hamiltonian(const ModelSystem& model, const Vec& rho);

/// Derivative of the mean-field potential with respect to the density,
/// as a matrix on density arrays: h W + diag(v_xc'(rho0)).
Mat hxc_kernel(const ModelSystem& model, const Vec& rho0);

}  // namespace tdlr
