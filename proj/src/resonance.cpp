#include "tdlr/resonance.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

namespace tdlr {

namespace {

double gauss_kernel(double x, double s) {
  return std::exp(-0.5 * (x / s) * (x / s)) / (s * std::sqrt(2.0 * M_PI));
}

int virtual_position(const ReducedSpace& red, int a0) {
  const auto it = std::find(red.virt.begin(), red.virt.end(), a0);
  if (it == red.virt.end())
    throw ChannelInvalidError("target level is occupied or out of range");
  return static_cast<int>(it - red.virt.begin());
}

/// Column of the coupling matrix hitting the transition coordinate,
/// doubled and restricted off that coordinate's upper block.
CVec coupling_rhs(const ReducedSpace& red, int u) {
  const Vec kcol = red.coupling.col(u);
  CVec rhs(2 * red.m);
  rhs.head(red.m) = kcol.cast<Complex>();
  rhs.tail(red.m) = kcol.cast<Complex>();
  rhs[u] = 0.0;
  return rhs;
}

Complex schur_value(const ReducedSpace& red, int u, Complex z) {
  const CVec rhs = coupling_rhs(red, u);
  const CVec sol = resolvent_solve(red, z, rhs, u);
  const Complex corr = (rhs.transpose() * sol)(0);
  return red.gaps[u] + red.coupling(u, u) - z - corr;
}

}  // namespace

double level_spacing_near(const GroundState& gs, double energy) {
  const Vec& e = gs.eigs;
  int k = 0;
  for (int i = 1; i < e.size(); ++i)
    if (std::abs(e[i] - energy) < std::abs(e[k] - energy)) k = i;
  std::vector<double> gaps;
  for (int i = std::max(1, k - 3); i <= std::min<int>(e.size() - 1, k + 3); ++i)
    gaps.push_back(e[i] - e[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

TransitionChannel TransitionChannel::make(const GroundState& gs, int i0, int a0,
                                          double gap_tol, double margin_levels) {
  if (i0 < 0 || i0 >= gs.N()) throw ChannelInvalidError("occupied index out of range");
  if (a0 < 0 || a0 >= gs.n()) throw ChannelInvalidError("target eigenindex out of range");
  for (int k : gs.occupied)
    if (k == a0) throw ChannelInvalidError("target level must be unoccupied");

  TransitionChannel ch;
  ch.i0 = i0;
  ch.a0 = a0;
  ch.e0 = gs.eigs[a0] - gs.lambda[i0];

  const double threshold = -gs.lambda[gs.N() - 1];
  if (ch.e0 <= threshold)
    throw ChannelInvalidError("excitation energy is below the ionization threshold");

  for (int i = 0; i < gs.N(); ++i) {
    const double channel_energy = ch.e0 + gs.lambda[i];
    const double spacing = level_spacing_near(gs, std::max(channel_energy, 0.0));
    if (std::abs(channel_energy) < margin_levels * spacing)
      throw ChannelInvalidError("excitation sits too close to a channel threshold");
  }

  auto simple = [&](double value) {
    int hits = 0;
    for (int k = 0; k < gs.eigs.size(); ++k)
      if (std::abs(gs.eigs[k] - value) < gap_tol) ++hits;
    return hits == 1;
  };
  if (!simple(gs.lambda[i0]) || !simple(gs.eigs[a0]))
    throw ChannelInvalidError("channel levels must be simple (non-degenerate)");
  return ch;
}

CasidaVector transition_vector(const GroundState& gs, const TransitionChannel& ch) {
  CasidaVector v;
  v.X = CMat::Zero(gs.n(), gs.N());
  v.Y = CMat::Zero(gs.n(), gs.N());
  v.X.col(ch.i0) = gs.eigvecs.col(ch.a0).cast<Complex>();
  return v;
}

Complex schur_complement(const GroundState& gs, const ModelSystem& model, Complex z,
                         double delta, const TransitionChannel& ch) {
  if (z.imag() <= 0) throw ConfigError("schur_complement: need Im(z) > 0");
  const ReducedSpace red = build_reduced(model, gs, delta);
  const int u = red.index(ch.i0, virtual_position(red, ch.a0));
  return schur_value(red, u, z);
}

double SpectralMeasure::density(double energy) const {
  double acc = 0.0;
  for (int k = 0; k < energies.size(); ++k)
    acc += weights[k] * gauss_kernel(energy - energies[k], s);
  return acc;
}

ResonanceEstimate pole_estimate(const GroundState& gs, const ModelSystem& model,
                                const TransitionChannel& ch, double delta,
                                const Vec& eta_seq) {
  if (eta_seq.size() < 2) throw ConfigError("pole_estimate: need at least 2 eta values");
  for (int i = 0; i < eta_seq.size(); ++i)
    if (eta_seq[i] <= 0 || (i > 0 && eta_seq[i] >= eta_seq[i - 1]))
      throw ConfigError("pole_estimate: eta_seq must be positive and decreasing");

  const ReducedSpace red = build_reduced(model, gs, delta);
  const int u = red.index(ch.i0, virtual_position(red, ch.a0));

  const int ne = static_cast<int>(eta_seq.size());
  CVec vals(ne);
  CVec last_sol;
  for (int i = 0; i < ne; ++i) {
    const Complex z(ch.e0, eta_seq[i]);
    const CVec rhs = coupling_rhs(red, u);
    const CVec sol = resolvent_solve(red, z, rhs, u);
    vals[i] = ch.e0 + red.coupling(u, u) - (rhs.transpose() * sol)(0);
    if (i == ne - 1) last_sol = sol;
  }

  // Least-squares polynomial in eta; the constant term is the boundary value.
  const int deg = std::min<int>(2, ne - 1);
  CMat vand(ne, deg + 1);
  for (int i = 0; i < ne; ++i)
    for (int p = 0; p <= deg; ++p) vand(i, p) = std::pow(eta_seq[i], p);
  const CVec coef = vand.colPivHouseholderQr().solve(vals);
  const Complex v0 = coef[0];
  const double fit_rms = std::sqrt((vand * coef - vals).squaredNorm() / ne);
  const double gamma = -v0.imag();
  if (fit_rms > 0.25 * std::max(std::abs(gamma), 1e-14))
    throw NoConvergenceError(
        "eta extrapolation did not settle; the box is likely too small for this "
        "width (increase L or the eta floor)");

  ResonanceEstimate est;
  est.delta = delta;
  est.etas = eta_seq;
  est.eta_values = vals;
  est.shift = v0.real() - ch.e0;
  est.gamma = std::max(0.0, gamma);
  est.z_pole = Complex(v0.real(), -est.gamma);

  // Per-occupied-sector decomposition of the dissipative part at the
  // smallest eta (upper doubled block carries the near-resonant terms).
  est.channels = Vec::Zero(gs.N());
  const CVec rhs = coupling_rhs(red, u);
  for (int i = 0; i < gs.N(); ++i) {
    Complex acc = 0.0;
    for (int a = 0; a < red.nv; ++a) {
      const int j = red.index(i, a);
      acc += rhs[j] * last_sol[j] + rhs[red.m + j] * last_sol[red.m + j];
    }
    est.channels[i] = acc.imag();
  }
  return est;
}

GoldenRuleResult golden_rule_width(const GroundState& gs, const ModelSystem& model,
                                   const TransitionChannel& ch, double delta,
                                   double s) {
  if (s <= 0) throw ConfigError("golden_rule_width: need smoothing s > 0");
  const ReducedSpace red = build_reduced(model, gs, delta);
  const int u = red.index(ch.i0, virtual_position(red, ch.a0));
  const Vec kcol = red.coupling.col(u);

  GoldenRuleResult out;
  out.s = s;
  out.channels = Vec::Zero(gs.N());
  for (int i = 0; i < gs.N(); ++i) {
    const double energy = ch.e0 + gs.lambda[i];
    if (energy <= 0) continue;
    out.open_channels.push_back(i);
    int under_kernel = 0;
    double acc = 0.0;
    for (int a = 0; a < red.nv; ++a) {
      const int j = red.index(i, a);
      if (j == u) continue;
      const double dist = energy - red.virt_eigs[a];
      if (std::abs(dist) < 2.0 * s) ++under_kernel;
      acc += gauss_kernel(dist, s) * kcol[j] * kcol[j];
    }
    if (under_kernel < 5)
      throw SmoothingTooNarrowError(
          "fewer than 5 box states under the smoothing kernel; increase L or s");
    out.channels[i] = M_PI * acc;
  }
  out.gamma = out.channels.sum();
  return out;
}

double residue_check(const GroundState& gs, const TransitionChannel& ch) {
  CMat u = CMat::Zero(gs.n(), gs.N());
  u.col(ch.i0) = gs.eigvecs.col(ch.a0).cast<Complex>();
  const Vec footprint = s0_apply(gs, u);
  return std::sqrt(gs.h) * footprint.norm();
}

LorentzFit fit_lorentzian(const Vec& omega, const Vec& y) {
  if (omega.size() != y.size() || omega.size() < 5)
    throw ShapeError("fit_lorentzian: need matching arrays with >= 5 points");
  const int n = static_cast<int>(omega.size());

  LorentzFit fit;
  int imax = 0;
  y.maxCoeff(&imax);
  fit.center = omega[imax];
  fit.offset = y.minCoeff();
  const double half_level = fit.offset + 0.5 * (y[imax] - fit.offset);
  double left = omega[0], right = omega[n - 1];
  for (int i = imax; i >= 0; --i)
    if (y[i] < half_level) { left = omega[i]; break; }
  for (int i = imax; i < n; ++i)
    if (y[i] < half_level) { right = omega[i]; break; }
  fit.halfwidth = std::max(0.5 * (right - left), omega[1] - omega[0]);
  fit.amp = (y[imax] - fit.offset) * fit.halfwidth * fit.halfwidth;

  Vec p(4);
  p << fit.center, fit.halfwidth, fit.amp, fit.offset;
  for (int iter = 0; iter < 100; ++iter) {
    Mat jac(n, 4);
    Vec r(n);
    for (int i = 0; i < n; ++i) {
      const double d = omega[i] - p[0];
      const double q = d * d + p[1] * p[1];
      r[i] = p[3] + p[2] / q - y[i];
      jac(i, 0) = p[2] * 2.0 * d / (q * q);
      jac(i, 1) = -p[2] * 2.0 * p[1] / (q * q);
      jac(i, 2) = 1.0 / q;
      jac(i, 3) = 1.0;
    }
    const Vec step = jac.colPivHouseholderQr().solve(-r);
    p += step;
    p[1] = std::max(std::abs(p[1]), 1e-12);
    if (step.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + p.cwiseAbs().maxCoeff())) break;
  }

  fit.center = p[0];
  fit.halfwidth = p[1];
  fit.amp = p[2];
  fit.offset = p[3];
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = omega[i] - p[0];
    const double model_y = p[3] + p[2] / (d * d + p[1] * p[1]);
    ss += (model_y - y[i]) * (model_y - y[i]);
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

}  // namespace tdlr
