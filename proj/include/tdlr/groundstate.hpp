#pragma once

#include <optional>
#include <vector>

#include "tdlr/model.hpp"

namespace tdlr {

struct ScfOptions {
  double tol = 1e-9;      // max-norm of the eigenresidual H psi - lambda psi
  int max_iter = 5000;
  double mixing = 0.3;    // linear density mixing
  std::optional<std::vector<int>> occupation;  // eigenindices, default lowest N
  unsigned seed = 0;      // reserved for randomized restarts
};

/// Converged self-consistent state. Orbitals are real and h-orthonormal,
/// eigs/eigvecs hold the full spectrum of the converged Hamiltonian.
struct GroundState {
  Mat orbitals;           // n x N
  Vec lambda;             // occupied eigenvalues, ascending
  Vec rho0;
  double energy = 0.0;
  double gamma = std::numeric_limits<double>::quiet_NaN();  // set by coercivity_constant
  Mat H0;
  Vec eigs;               // all n eigenvalues of H0
  Mat eigvecs;            // n x n, h-orthonormal columns
  std::vector<int> occupied;  // indices into eigs
  bool aufbau = true;
  double h = 0.0;         // quadrature weight

  int n() const { return static_cast<int>(orbitals.rows()); }
  int N() const { return static_cast<int>(orbitals.cols()); }
  void require_minimum() const;  // throws NotAMinimumError unless gamma > 0
};

/// Weighted inner products over the grid.
inline double dot_w(double h, const Vec& u, const Vec& v) { return h * u.dot(v); }
inline Complex dot_w(double h, const CMat& u, const CMat& v) {
  return h * (u.conjugate().cwiseProduct(v)).sum();
}
inline double redot_w(double h, const CMat& u, const CMat& v) {
  return std::real(dot_w(h, u, v));
}
inline double norm_w(double h, const CMat& u) { return std::sqrt(h) * u.norm(); }

/// Four-term total energy; rejects orbitals that are not h-orthonormal.
double energy(const ModelSystem& model, const Mat& psi);

/// Damped SCF minimization with eigenvalue canonicalization.
GroundState minimize(const ModelSystem& model, const ScfOptions& opts = {});

/// Density of a (possibly complex) orbital set.
Vec density_of(const CMat& psi);

/// log-log slope of | E(psi0 + eps U) - quadratic model | over eps_list.
double energy_expansion_residual(const ModelSystem& model, const GroundState& gs,
                                 const CMat& u, const std::vector<double>& eps_list);

/// Rotation-invariant distance 2N - 2 tr Sigma between orthonormal frames,
/// Sigma the singular values of the weighted overlap.
double subspace_distance(double h, const Mat& psi, const Mat& phi);

/// Smallest eigenvalue of the symmetric form of the constrained Hessian on
/// the unoccupied subspace. Stores the value in gs.gamma and returns it.
double coercivity_constant(const ModelSystem& model, GroundState& gs);

}  // namespace tdlr
