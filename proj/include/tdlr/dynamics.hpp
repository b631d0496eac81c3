#pragma once

#include <functional>
#include <vector>

#include "tdlr/linops.hpp"

namespace tdlr {

/// Causal time-dependent perturbation eps * f(t) * V_P.
struct Drive {
  std::function<double(double)> f;  // consulted only for t >= 0
  Vec v_p;                          // multiplicative potential on the grid
  double eps = 0.0;

  double eval(double t) const { return t < 0.0 ? 0.0 : f(t); }

  static Drive gaussian(Vec v_p, double eps, double t0, double sigma);
  static Drive step(Vec v_p, double eps);
  static Drive sinusoid(Vec v_p, double eps, double w0);
};

/// Sampled evolution. For the nonlinear flow, `states` holds the rescaled
/// deviation U(t) from psi(t) = e^{-i lambda t}(psi0 + eps U(t)) and
/// `densities` the full density rho(t). For the linearized flow, `states`
/// holds the first-order variation and `densities` its density response.
struct Trajectory {
  std::vector<double> times;
  std::vector<CMat> states;
  std::vector<Vec> densities;
};

/// Crank-Nicolson propagation of the full mean-field system with one
/// midpoint density predictor per step; samples every `store_stride` steps.
/// delta scales the density dependence of the mean field around rho0
/// (delta = 0 freezes the potential, matching a decoupled linearization).
Trajectory propagate_nonlinear(const ModelSystem& model, const GroundState& gs,
                               const Drive& drive, double T, double dt,
                               int store_stride = 1, double delta = 1.0);

/// e^{-tJM} U0 on the unoccupied subspace via the symmetric square-root
/// sandwich; U0 must have no occupied component.
CMat linearized_propagator_apply(const GroundState& gs, const ModelSystem& model,
                                 double t, const CMat& u0, double delta = 1.0);

/// Same, reusing a prebuilt reduced space and propagator.
CMat linearized_propagator_apply(const ReducedSpace& red, const PerpPropagator& prop,
                                 double t, const CMat& u0);

/// First-order variation U1(t) driven by f(t) V_P psi0: the unoccupied
/// channel by an exact-phase (Filon) quadrature of the Duhamel integral in
/// the propagator eigenframe, the gauge channel entrywise in the occupied
/// block; the growth channel vanishes identically for a real multiplicative
/// perturbation. `substep` is the internal quadrature step.
Trajectory propagate_linearized(const GroundState& gs, const ModelSystem& model,
                                const Drive& drive, double T, double dt_out,
                                double delta = 1.0, double substep = 5e-3);

/// Max over sampled times of || U(t) - V(t) || where V solves the
/// integral-equation form i dV/dt = Mdyn V + f V_P psi0 + R(U(t), eps, t)
/// with the remainder R evaluated along the given trajectory.
double duhamel_residual(const Trajectory& traj, const GroundState& gs,
                        const ModelSystem& model, const Drive& drive);

}  // namespace tdlr
