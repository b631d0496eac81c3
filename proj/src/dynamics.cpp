#include "tdlr/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace tdlr {

namespace {

const Complex kI(0.0, 1.0);

// Weights of the exact-phase linear-interpolation rule:
//   int_0^1 e^{i th tau} (1 - tau) dtau  and  int_0^1 e^{i th tau} tau dtau.
void filon_weights(double th, Complex& phi1, Complex& phi2) {
  if (std::abs(th) < 1e-4) {
    const double t2 = th * th;
    phi2 = Complex(0.5 - t2 / 8.0, th / 3.0 - t2 * th / 30.0);
    const Complex e1(1.0 - t2 / 6.0, th / 2.0 - t2 * th / 24.0);
    phi1 = e1 - phi2;
  } else {
    const Complex a = kI * th;
    const Complex ea = std::exp(a);
    phi2 = (ea * (a - 1.0) + 1.0) / (a * a);
    phi1 = (ea - 1.0) / a - phi2;
  }
}

Vec hxc_potential(const ModelSystem& model, const Vec& rho) {
  return hartree_potential(model, rho) + xc_derivatives(model.xc, rho).v;
}

double state_norm(double h, const CMat& u) { return std::sqrt(h) * u.norm(); }

}  // namespace

Drive Drive::gaussian(Vec v_p, double eps, double t0, double sigma) {
  if (sigma <= 0) throw ConfigError("gaussian drive needs sigma > 0");
  return {[t0, sigma](double t) {
            const double s = (t - t0) / sigma;
            return std::exp(-0.5 * s * s);
          },
          std::move(v_p), eps};
}

Drive Drive::step(Vec v_p, double eps) {
  return {[](double) { return 1.0; }, std::move(v_p), eps};
}

Drive Drive::sinusoid(Vec v_p, double eps, double w0) {
  return {[w0](double t) { return std::sin(w0 * t); }, std::move(v_p), eps};
}

Trajectory propagate_nonlinear(const ModelSystem& model, const GroundState& gs,
                               const Drive& drive, double T, double dt,
                               int store_stride, double delta) {
  if (dt <= 0 || T < 0) throw ConfigError("propagate_nonlinear: need dt > 0, T >= 0");
  if (store_stride < 1) throw ConfigError("propagate_nonlinear: store_stride >= 1");
  const int n = gs.n();
  const int N = gs.N();
  const Mat kin = kinetic_matrix(model.grid);
  const Vec vext = external_potential(model);
  const Vec vhxc0 = hxc_potential(model, gs.rho0);
  auto mean_field = [&](const Vec& rho) {
    Mat hmat = kin;
    hmat.diagonal() += vext + vhxc0 + delta * (hxc_potential(model, rho) - vhxc0);
    return hmat;
  };

  CMat psi = gs.orbitals.cast<Complex>();
  Vec rho = gs.rho0;
  Vec norms = Vec::Ones(N);

  const int nsteps = static_cast<int>(std::llround(T / dt));
  Trajectory traj;
  traj.times.reserve(nsteps / store_stride + 1);

  auto record = [&](double t) {
    traj.times.push_back(t);
    CMat u(n, N);
    const double div = drive.eps > 0 ? drive.eps : 1.0;
    for (int i = 0; i < N; ++i)
      u.col(i) =
          (std::exp(kI * gs.lambda[i] * t) * psi.col(i) - gs.orbitals.col(i).cast<Complex>()) /
          div;
    traj.states.push_back(std::move(u));
    traj.densities.push_back(rho);
  };
  record(0.0);

  auto cn_step = [&](const Mat& hmat, const CMat& in) {
    const Complex a = kI * (0.5 * dt);
    CMat lhs = a * hmat.cast<Complex>();
    lhs.diagonal().array() += 1.0;
    const CMat rhs = in - a * (hmat * in.real()).cast<Complex>() -
                     a * kI * (hmat * in.imag()).cast<Complex>();
    return CMat(lhs.partialPivLu().solve(rhs));
  };

  for (int step = 0; step < nsteps; ++step) {
    const double t = step * dt;
    const double fm = drive.eps * drive.eval(t + 0.5 * dt);

    Mat hmat = mean_field(rho);
    hmat.diagonal() += fm * drive.v_p;
    const CMat pred = cn_step(hmat, psi);

    const Vec rho_mid = 0.5 * (rho + density_of(pred));
    hmat = mean_field(rho_mid);
    hmat.diagonal() += fm * drive.v_p;
    psi = cn_step(hmat, psi);

    if (!psi.allFinite()) throw NonfiniteStateError("orbital blow-up during propagation");
    for (int i = 0; i < N; ++i) {
      const double nn = state_norm(gs.h, psi.col(i));
      if (std::abs(nn - norms[i]) > 1e-6)
        throw StepTooLargeError("orbital norm drift exceeds 1e-6 per step; reduce dt");
      norms[i] = nn;
    }
    rho = density_of(psi);
    if ((step + 1) % store_stride == 0) record((step + 1) * dt);
  }
  return traj;
}

CMat linearized_propagator_apply(const ReducedSpace& red, const PerpPropagator& prop,
                                 double t, const CMat& u0) {
  return red.from_doubled(prop.apply(t, red.doubled_coeffs(u0)), 1e-8);
}

CMat linearized_propagator_apply(const GroundState& gs, const ModelSystem& model,
                                 double t, const CMat& u0, double delta) {
  const VariationSplit split = split_variation(gs, u0);
  const double occ = std::max(state_norm(gs.h, split.growth), state_norm(gs.h, split.gauge));
  if (occ > 1e-10 * std::max(1.0, state_norm(gs.h, u0)))
    throw NotPerpError("initial variation has occupied components");
  const ReducedSpace red = build_reduced(model, gs, delta);
  return linearized_propagator_apply(red, make_propagator(red), t, u0);
}

Trajectory propagate_linearized(const GroundState& gs, const ModelSystem& model,
                                const Drive& drive, double T, double dt_out,
                                double delta, double substep) {
  if (dt_out <= 0 || T < 0 || substep <= 0)
    throw ConfigError("propagate_linearized: need positive steps and T >= 0");
  gs.require_minimum();
  const int n = gs.n();
  const int N = gs.N();
  const Mat& psi0 = gs.orbitals;

  const ReducedSpace red = build_reduced(model, gs, delta);
  const PerpPropagator prop = make_propagator(red);
  const int m2 = 2 * red.m;

  // Forcing W = V_P psi0 split into its occupied gram and the remainder.
  const Mat w_full = drive.v_p.asDiagonal() * psi0;
  const Mat gram = gs.h * (psi0.transpose() * w_full);  // real symmetric
  const Mat w_perp = w_full - psi0 * gram;

  // Unoccupied channel in the propagator frame: per mode k,
  //   z_k(t) = -int_0^t e^{-i w_k (t-s)} f(s) ds * b_k,  b = frame(J W_perp).
  CVec xy_w = red.doubled_coeffs(w_perp.cast<Complex>());
  xy_w.head(red.m) *= kI;
  xy_w.tail(red.m) *= -kI;
  const CVec b = prop.to_frame(xy_w);

  const int nsub = std::max(1, static_cast<int>(std::ceil(dt_out / substep)));
  const double dtf = dt_out / nsub;

  CVec ph(m2), c1(m2), c2(m2);
  for (int k = 0; k < m2; ++k) {
    Complex phi1, phi2;
    filon_weights(prop.freqs[k] * dtf, phi1, phi2);
    ph[k] = std::exp(-kI * prop.freqs[k] * dtf);
    c1[k] = b[k] * dtf * ph[k] * phi1;
    c2[k] = b[k] * dtf * ph[k] * phi2;
  }

  // Gauge channel: occupied-block coefficients Q(t) obey
  //   dQ/dt = -i Lam .* Q - i (f(t) gram + G_v(t)),   Lam_kl = lam_k - lam_l,
  // where G_v is the occupied gram of the coupling applied to U_perp. In the
  // frame, G_v(z) is linear: precompute the (k,l) rows against Re(z).
  Mat lam_diff(N, N);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) lam_diff(k, l) = gs.lambda[k] - gs.lambda[l];
  CMat ph_q(N, N), w1_q(N, N), w2_q(N, N);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      Complex phi1, phi2;
      filon_weights(lam_diff(k, l) * dtf, phi1, phi2);
      ph_q(k, l) = std::exp(-kI * lam_diff(k, l) * dtf);
      w1_q(k, l) = dtf * ph_q(k, l) * phi1;
      w2_q(k, l) = dtf * ph_q(k, l) * phi2;
    }

  // density(z) = sqrt(2) G (x + y) with (x; y) = minvsqrt W z, all real maps.
  const Mat dmap = std::sqrt(2.0) * red.overlaps *
                   (prop.minvsqrt.topRows(red.m) + prop.minvsqrt.bottomRows(red.m)) *
                   prop.w;
  const Mat fhxc = delta * hxc_kernel(model, gs.rho0);
  Mat gv_rows(N * N, m2);  // row (k,l): h (psi_k .* psi_l)^T fhxc dmap
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l)
      gv_rows.row(k * N + l) =
          gs.h * (psi0.col(k).cwiseProduct(psi0.col(l)).transpose() * fhxc) * dmap;

  auto gauge_source = [&](double f, const Vec& zre) {
    const Vec gv_flat = gv_rows * zre;
    CMat sig(N, N);
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l) sig(k, l) = -kI * (f * gram(k, l) + gv_flat(k * N + l));
    return sig;
  };

  CVec z = CVec::Zero(m2);
  CMat q = CMat::Zero(N, N);
  double f_prev = drive.eval(0.0);
  CMat sig_prev = gauge_source(f_prev, z.real());

  const int nout = static_cast<int>(std::llround(T / dt_out));
  Trajectory traj;
  auto record = [&](double t) {
    traj.times.push_back(t);
    const CMat u_perp = red.from_doubled(prop.from_frame(z), 1e-6);
    const CMat u = u_perp + psi0.cast<Complex>() * q;
    traj.densities.push_back(s0_apply(gs, u_perp));
    traj.states.push_back(u);
  };
  record(0.0);

  for (int out = 0; out < nout; ++out) {
    for (int sub = 0; sub < nsub; ++sub) {
      const double t1 = out * dt_out + (sub + 1) * dtf;
      const double f_next = drive.eval(t1);
      z = ph.cwiseProduct(z) - f_prev * c1 - f_next * c2;
      const CMat sig_next = gauge_source(f_next, z.real());
      q = ph_q.cwiseProduct(q) + sig_prev.cwiseProduct(w1_q) + sig_next.cwiseProduct(w2_q);
      f_prev = f_next;
      sig_prev = sig_next;
    }
    record((out + 1) * dt_out);
  }
  return traj;
}

double duhamel_residual(const Trajectory& traj, const GroundState& gs,
                        const ModelSystem& model, const Drive& drive) {
  if (traj.times.size() < 2) return 0.0;
  const int n = gs.n();
  const int N = gs.N();
  const Mat kin = kinetic_matrix(model.grid);
  const Vec vext = external_potential(model);
  const Mat h0 = gs.H0;
  const Vec v0 = hartree_potential(model, gs.rho0) + xc_derivatives(model.xc, gs.rho0).v;
  const Mat w0psi = drive.v_p.asDiagonal() * gs.orbitals;
  const double eps = drive.eps;

  // Linear interpolation of the sampled trajectory.
  auto u_at = [&](double t) -> CMat {
    const auto& ts = traj.times;
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    size_t k = std::min<size_t>(std::max<long>(1, it - ts.begin()), ts.size() - 1);
    const double a = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
    return (1.0 - a) * traj.states[k - 1] + a * traj.states[k];
  };

  // Remainder along the trajectory (zero at eps = 0).
  auto remainder = [&](const CMat& u, double t) -> CMat {
    if (eps == 0.0) return CMat::Zero(n, N);
    const CMat full = gs.orbitals.cast<Complex>() + eps * u;
    const Vec rho = density_of(full);
    const Vec dv = hartree_potential(model, rho) + xc_derivatives(model.xc, rho).v - v0;
    CMat r = (drive.eps * drive.eval(t)) * (drive.v_p.cast<Complex>().asDiagonal() * u);
    r += (1.0 / eps) * (dv.asDiagonal() * gs.orbitals).cast<Complex>();
    r -= k0_apply(model, gs, u);
    r += dv.cast<Complex>().asDiagonal() * u;
    return r;
  };

  // i dV/dt = Mdyn V + f(t) V_P psi0 + R(U(t), eps, t),  V(0) = 0.
  auto rhs = [&](const CMat& v, double t) -> CMat {
    CMat mv = h0 * v.real() + kI * (h0 * v.imag()).cast<Complex>();
    for (int i = 0; i < N; ++i) mv.col(i) -= gs.lambda[i] * v.col(i);
    mv += k0_apply(model, gs, v);
    // at eps = 0 the stored states are the raw (unrescaled) deviation, so
    // the unit-strength forcing is absent
    if (eps != 0.0) mv += drive.eval(t) * w0psi.cast<Complex>();
    mv += remainder(u_at(t), t);
    return -kI * mv;
  };

  const double vscale = vext.cwiseAbs().maxCoeff() + v0.cwiseAbs().maxCoeff();
  const double dt_stab = 2.0 / (2.0 / (gs.h * gs.h) + vscale + 1.0);

  CMat v = CMat::Zero(n, N);
  double worst = 0.0;
  for (size_t k = 1; k < traj.times.size(); ++k) {
    const double span = traj.times[k] - traj.times[k - 1];
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / dt_stab)));
    const double dt = span / nsub;
    for (int s = 0; s < nsub; ++s) {
      const double t = traj.times[k - 1] + s * dt;
      const CMat k1 = rhs(v, t);
      const CMat k2 = rhs(v + 0.5 * dt * k1, t + 0.5 * dt);
      const CMat k3 = rhs(v + 0.5 * dt * k2, t + 0.5 * dt);
      const CMat k4 = rhs(v + dt * k3, t + dt);
      v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    worst = std::max(worst, std::sqrt(gs.h) * (traj.states[k] - v).norm());
  }
  return worst;
}

}  // namespace tdlr
