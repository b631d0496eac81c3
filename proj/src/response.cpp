#include "tdlr/response.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace tdlr {

namespace {

const Complex kI(0.0, 1.0);

CVec real_times_complex(const Mat& a, const CVec& v) {
  return (a * v.real()).cast<Complex>() + kI * (a * v.imag()).cast<Complex>();
}

/// Doubled coefficients of the impulse J (1 - P0) V_P psi0.
CVec impulse_coeffs(const GroundState& gs, const ReducedSpace& red, const Vec& v_p) {
  const Mat w_full = v_p.asDiagonal() * gs.orbitals;
  CVec xy = red.doubled_coeffs(w_full.cast<Complex>());
  xy.head(red.m) *= kI;
  xy.tail(red.m) *= -kI;
  return xy;
}

/// Doubled right-hand-side coefficients of (1 - P0) V_P psi0 (no J).
CVec forcing_coeffs(const GroundState& gs, const ReducedSpace& red, const Vec& v_p) {
  const Mat w_full = v_p.asDiagonal() * gs.orbitals;
  return red.doubled_coeffs(w_full.cast<Complex>());
}

}  // namespace

FrequencyGrid FrequencyGrid::linspace(double w_min, double w_max, int n_w, double eta) {
  if (n_w < 2 || w_max <= w_min) throw ConfigError("frequency grid needs n >= 2, w_max > w_min");
  FrequencyGrid g;
  g.omega = Vec::LinSpaced(n_w, w_min, w_max);
  g.eta = eta;
  g.validate();
  return g;
}

void FrequencyGrid::validate() const {
  if (eta <= 0) throw ConfigError("broadening eta must be positive");
  for (int i = 1; i < omega.size(); ++i)
    if (omega[i] <= omega[i - 1]) throw ConfigError("frequency grid must be increasing");
}

std::vector<Vec> chi_time_series(const GroundState& gs, const ModelSystem& model,
                                 const Vec& v_p, const std::vector<double>& times,
                                 double delta) {
  gs.require_minimum();
  const ReducedSpace red = build_reduced(model, gs, delta);
  const PerpPropagator prop = make_propagator(red);
  const CVec xy0 = impulse_coeffs(gs, red, v_p);

  std::vector<Vec> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 0) {
      out.push_back(Vec::Zero(gs.n()));
      continue;
    }
    const CMat u = red.from_doubled(prop.apply(t, xy0), 1e-8);
    out.push_back(-s0_apply(gs, u));
  }
  return out;
}

Vec chi_time(const GroundState& gs, const ModelSystem& model, const Vec& v_p,
             double t, double delta) {
  return chi_time_series(gs, model, v_p, {t}, delta).front();
}

SpectrumResult chi_freq(const GroundState& gs, const ModelSystem& model,
                        const Vec& v_p, const Vec& w, const FrequencyGrid& freq,
                        double delta, int threads) {
  gs.require_minimum();
  freq.validate();
  const ReducedSpace red = build_reduced(model, gs, delta);
  const CVec rhs = forcing_coeffs(gs, red, v_p);

  const int nw = static_cast<int>(freq.omega.size());
  SpectrumResult res;
  res.omega = freq.omega;
  res.values.resize(nw);
  res.eta = freq.eta;
  res.delta = delta;

  if (threads <= 0)
    threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8));
  threads = std::min(threads, nw);

  auto worker = [&](int tid) {
    for (int i = tid; i < nw; i += threads) {
      const Complex z(freq.omega[i], freq.eta);
      const CVec sol = resolvent_solve(red, z, rhs);
      const CVec drho = -std::sqrt(2.0) *
                        real_times_complex(red.overlaps, CVec(sol.head(red.m) + sol.tail(red.m)));
      res.values[i] = red.h * (w.cast<Complex>().dot(drho));
    }
  };
  std::vector<std::thread> pool;
  for (int tdx = 1; tdx < threads; ++tdx) pool.emplace_back(worker, tdx);
  worker(0);
  for (auto& th : pool) th.join();
  return res;
}

CMat chi_matrix(const GroundState& gs, const ReducedSpace& red, Complex z) {
  const double s = red.h / std::sqrt(2.0);
  CMat rhs(2 * red.m, gs.n());
  rhs.topRows(red.m) = (s * red.overlaps.transpose()).cast<Complex>();
  rhs.bottomRows(red.m) = rhs.topRows(red.m);
  const CMat sol = resolvent_solve_multi(red, z, rhs);
  return -std::sqrt(2.0) *
         (red.overlaps.cast<Complex>() * (sol.topRows(red.m) + sol.bottomRows(red.m)));
}

double dyson_residual(const GroundState& gs, const ModelSystem& model,
                      const FrequencyGrid& freq, double delta) {
  gs.require_minimum();
  freq.validate();
  const ReducedSpace red = build_reduced(model, gs, delta);
  const ReducedSpace red0 = build_reduced(model, gs, 0.0);
  const Mat fhxc = delta * hxc_kernel(model, gs.rho0);

  double worst = 0.0;
  for (int i = 0; i < freq.omega.size(); ++i) {
    const Complex z(freq.omega[i], freq.eta);
    const CMat chi = chi_matrix(gs, red, z);
    const CMat chi0 = chi_matrix(gs, red0, z);
    const double resid =
        (chi - chi0 - chi0 * fhxc.cast<Complex>() * chi).cwiseAbs().maxCoeff();
    worst = std::max(worst, resid / std::max(1e-300, chi.cwiseAbs().maxCoeff()));
  }
  return worst;
}

SpectrumResult kick_spectrum(const GroundState& gs, const ModelSystem& model,
                             const Vec& v_p, double T, double dt,
                             const FrequencyGrid& freq, double delta, double eps) {
  gs.require_minimum();
  freq.validate();
  const double wmax = std::max(std::abs(freq.omega[0]),
                               std::abs(freq.omega[freq.omega.size() - 1]));
  const double sigma = 0.2 / std::max(wmax, 1e-3);
  const double t0 = 6.0 * sigma;
  const Drive drive = Drive::gaussian(v_p, eps, t0, sigma);

  const Trajectory traj = propagate_nonlinear(model, gs, drive, T, dt, 1, delta);

  // signal a(t) = <V_P, rho(t) - rho0> / eps, damped transform deconvolved
  // by the pulse f_hat(omega) = sigma sqrt(2 pi) e^{i omega t0 - (sigma omega)^2/2}.
  const size_t nt = traj.times.size();
  Vec signal(nt);
  for (size_t k = 0; k < nt; ++k)
    signal[k] = gs.h * v_p.dot(traj.densities[k] - gs.rho0) / eps;

  SpectrumResult res;
  res.omega = freq.omega;
  res.values.resize(freq.omega.size());
  res.eta = freq.eta;
  res.delta = delta;
  for (int i = 0; i < freq.omega.size(); ++i) {
    const double w = freq.omega[i];
    Complex acc = 0.0;
    for (size_t k = 1; k < nt; ++k) {
      const double step = traj.times[k] - traj.times[k - 1];
      const auto node = [&](size_t j) {
        return signal[j] * std::exp(kI * w * traj.times[j] - freq.eta * traj.times[j]);
      };
      acc += 0.5 * step * (node(k - 1) + node(k));
    }
    const Complex fhat = sigma * std::sqrt(2.0 * M_PI) *
                         std::exp(kI * w * t0 - 0.5 * sigma * sigma * w * w - freq.eta * t0);
    res.values[i] = acc / fhat;
  }
  return res;
}

}  // namespace tdlr
