#include "tdlr/model.hpp"

#include <cmath>

namespace tdlr {

GridSpec GridSpec::uniform(int n, double L) {
  if (n < 16) throw ConfigError("GridSpec: need n >= 16, got n = " + std::to_string(n));
  if (L <= 0) throw ConfigError("GridSpec: need L > 0");
  GridSpec g;
  g.n = n;
  g.L = L;
  g.h = 2.0 * L / (n - 1);
  g.x = Vec::LinSpaced(n, -L, L);
  return g;
}

void SoftCoulombParams::validate() const {
  if (a <= 0) throw ConfigError("SoftCoulombParams: need a > 0");
  if (a_ext <= 0) throw ConfigError("SoftCoulombParams: need a_ext > 0");
  if (Z < 0) throw ConfigError("SoftCoulombParams: need Z >= 0");
}

void ModelSystem::validate() const {
  sc.validate();
  if (N < 1) throw ConfigError("ModelSystem: need N >= 1");
  if (N >= grid.n) throw ConfigError("ModelSystem: need N < n");
}

Mat kinetic_matrix(const GridSpec& grid) {
  const int n = grid.n;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  Mat t = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    t(i, i) = inv_h2;
    if (i + 1 < n) {
      t(i, i + 1) = -0.5 * inv_h2;
      t(i + 1, i) = -0.5 * inv_h2;
    }
  }
  return t;
}

Vec external_potential(const ModelSystem& model) {
  const auto& x = model.grid.x;
  const double a2 = model.sc.a_ext * model.sc.a_ext;
  return (-model.sc.Z) * (x.array().square() + a2).rsqrt().matrix();
}

Mat interaction_kernel(const ModelSystem& model) {
  const int n = model.grid.n;
  const auto& x = model.grid.x;
  const double a2 = model.sc.a * model.sc.a;
  Mat w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double d = x[i] - x[j];
      w(i, j) = w(j, i) = 1.0 / std::sqrt(d * d + a2);
    }
  return w;
}

namespace {
void check_density(const Vec& rho) {
  if ((rho.array() < 0).any()) throw InvalidDensityError("density has negative entries");
}
}  // namespace

Vec hartree_potential(const ModelSystem& model, const Vec& rho) {
  check_density(rho);
  return model.grid.h * (interaction_kernel(model) * rho);
}

XcEval xc_derivatives(const XcPolynomial& xc, const Vec& rho) {
  check_density(rho);
  XcEval out;
  out.e = rho.unaryExpr([&](double r) { return xc.e(r); });
  out.v = rho.unaryExpr([&](double r) { return xc.v(r); });
  out.vp = rho.unaryExpr([&](double r) { return xc.vp(r); });
  return out;
}

Mat hamiltonian(const ModelSystem& model, const Vec& rho) {
  Mat h = kinetic_matrix(model.grid);
  Vec pot = external_potential(model) + hartree_potential(model, rho) +
            xc_derivatives(model.xc, rho).v;
  h.diagonal() += pot;
  return h;
}

Mat hxc_kernel(const ModelSystem& model, const Vec& rho0) {
  Mat f = model.grid.h * interaction_kernel(model);
  f.diagonal() += xc_derivatives(model.xc, rho0).vp;
  return f;
}

}  // namespace tdlr
