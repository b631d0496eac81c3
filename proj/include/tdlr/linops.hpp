#pragma once

#include <vector>

#include "tdlr/groundstate.hpp"

namespace tdlr {

// Orbital variations are complex n x N matrices. They live in the space of
// N-tuples of grid functions viewed as a vector space over the reals; the
// operators below are real-linear maps U -> A U + B conj(U).

/// Doubled vector (X, Y). Physical elements (embedded real-structure
/// variations) satisfy Y = conj(X).
struct CasidaVector {
  CMat X;
  CMat Y;

  bool is_physical(double tol = 1e-10) const {
    return (Y - X.conjugate()).cwiseAbs().maxCoeff() <= tol;
  }
};

/// Real/imaginary stacked form (U_r; U_j); both blocks may themselves be
/// complex for elements of the complexified space.
struct ReimVector {
  CMat re;
  CMat im;
};

CasidaVector to_casida(const CMat& u);
CMat from_casida(const CasidaVector& v, bool physical = true, double tol = 1e-10);
ReimVector to_reim(const CMat& u);
CMat from_reim(const ReimVector& v);

/// Dense real-linear operator U -> A U + B conj(U) on flattened variations
/// (column-major stacking of the n x N matrix).
struct RealLinearOp {
  CMat A;
  CMat B;
  int n = 0;
  int N = 0;

  CMat apply(const CMat& u) const;
  CasidaVector apply(const CasidaVector& v) const;

  /// Doubled matrix [[A, B], [conj B, conj A]] acting on (X; Y).
  CMat casida_matrix() const;
  /// Doubled matrix acting on (U_r; U_j).
  CMat reim_matrix() const;
  /// True iff the operator is symmetric for Re<.|.>, i.e. the doubled
  /// matrix is Hermitian.
  bool is_symmetric(double tol = 1e-12) const;
};

/// Density variation S0(U) = sum_j conj(psi_j) u_j + psi_j conj(u_j).
Vec s0_apply(const GroundState& gs, const CMat& u);

/// Complex-linear extension of S0 to doubled vectors.
CVec s0_apply_doubled(const GroundState& gs, const CasidaVector& v);

/// Adjoint of S0 for the weighted inner products: v -> v .* psi columns.
CMat s0_adjoint(const GroundState& gs, const Vec& v);

/// Coupling operator (K0 U)_i = (f_hxc S0(U)) psi_i, optionally scaled.
CMat k0_apply(const ModelSystem& model, const GroundState& gs, const CMat& u,
              double delta = 1.0);

/// Orthogonal split into growth (psi0 * Hermitian), gauge (psi0 *
/// skew-Hermitian) and unoccupied-space components.
struct VariationSplit {
  CMat growth;
  CMat gauge;
  CMat perp;
};

VariationSplit split_variation(const GroundState& gs, const CMat& u);

/// All named operators assembled as dense real-linear blocks. delta scales
/// the coupling K0 (delta = 0 reproduces the non-interacting theory).
struct AssembledOps {
  RealLinearOp omega;   // H0 - lambda_i per sector
  RealLinearOp k0;
  RealLinearOp p0;      // occupied projector
  RealLinearOp j;       // multiplication by the orbital imaginary unit
  RealLinearOp mdyn;    // omega + k0
  RealLinearOp m;       // (1-P0) mdyn (1-P0)
};

AssembledOps assemble(const ModelSystem& model, const GroundState& gs,
                      double delta = 1.0);

// ---------------------------------------------------------------------------
// Reduced machinery on the unoccupied subspace. All heavy computations
// (propagation, resolvents, spectra) run in the eigenbasis of H0 restricted
// to the virtual orbitals, where the doubled operators are small and real.
// ---------------------------------------------------------------------------

struct ReducedSpace {
  int n = 0, N = 0, nv = 0, m = 0;  // m = N * nv
  double h = 0.0;
  double delta = 1.0;               // coupling scale baked into `coupling`
  std::vector<int> virt;            // eigenindices of the virtual orbitals
  Vec lambda;                       // occupied eigenvalues
  Vec virt_eigs;                    // virtual eigenvalues, ascending
  Mat phiv;                         // n x nv virtual eigenvectors
  Vec gaps;                         // m; gaps[i*nv+a] = mu_a - lambda_i
  Mat overlaps;                     // n x m; column (i,a) is psi_i .* phi_a
  Mat coupling;                     // m x m; delta * h * overlaps^T f_hxc overlaps

  int index(int i, int a) const { return i * nv + a; }

  /// Sector-wise coefficients of a variation with no occupied component.
  CVec coeffs(const CMat& u_perp) const;
  CMat from_coeffs(const CVec& c) const;

  /// Doubled coefficients (x; y) of the embedding U -> (U, conj U)/sqrt(2).
  CVec doubled_coeffs(const CMat& u_perp) const;
  CMat from_doubled(const CVec& xy, double tol = 1e-9) const;

  /// [[D + K, K], [K, D + K]] acting on (x; y).
  Mat doubled_matrix() const;

  /// Quadratic form Re<U|Mdyn U> in coefficients of the real/imaginary
  /// representation: diag(D) + 2K on the real block, diag(D) on the other.
  Mat reim_block_interacting() const { return Mat(gaps.asDiagonal()) + 2.0 * coupling; }
};

ReducedSpace build_reduced(const ModelSystem& model, const GroundState& gs,
                           double delta = 1.0);

double coercivity_constant_reduced(const ReducedSpace& red);

/// Unitary-sandwich propagator e^{-t J M} on the unoccupied subspace,
/// realized as M^{-1/2} exp(-t M^{1/2} J M^{1/2}) M^{1/2}.
struct PerpPropagator {
  double gamma = 0.0;
  Mat msqrt, minvsqrt;   // 2m x 2m symmetric
  Mat w;                 // eigenvectors of the skew generator / i
  Vec freqs;             // generator eigenvalues (real)

  CVec apply(double t, const CVec& xy) const;
  /// Coefficients in the rotating frame: z = W^T M^{1/2} (x; y).
  CVec to_frame(const CVec& xy) const;
  CVec from_frame(const CVec& z) const;
};

PerpPropagator make_propagator(const ReducedSpace& red);

/// Solve (M + i z J)(x; y) = rhs on the doubled reduced space via the
/// low-rank structure of the coupling (one m x m factorization per z).
/// skip >= 0 removes that coordinate of the x-block (restricted inverse).
CVec resolvent_solve(const ReducedSpace& red, Complex z, const CVec& rhs,
                     int skip = -1);

/// Same shifted solve with a block of right-hand sides (columns), sharing
/// one factorization.
CMat resolvent_solve_multi(const ReducedSpace& red, Complex z, const CMat& rhs,
                           int skip = -1);

}  // namespace tdlr
