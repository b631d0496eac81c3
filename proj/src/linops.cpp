#include "tdlr/linops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

namespace tdlr {

namespace {

const Complex kI(0.0, 1.0);

CVec flatten(const CMat& u) {
  return Eigen::Map<const CVec>(u.data(), u.size());
}

CMat unflatten(const CVec& v, int n, int N) {
  return Eigen::Map<const CMat>(v.data(), n, N);
}

CVec real_times_complex(const Mat& a, const CVec& v) {
  return (a * v.real()).cast<Complex>() + kI * (a * v.imag()).cast<Complex>();
}

}  // namespace

CasidaVector to_casida(const CMat& u) {
  const double s = 1.0 / std::sqrt(2.0);
  return {s * u, s * u.conjugate()};
}

CMat from_casida(const CasidaVector& v, bool physical, double tol) {
  if (physical && !v.is_physical(tol))
    throw ShapeError("doubled vector violates the physical constraint Y = conj(X)");
  return (v.X + v.Y.conjugate()) / std::sqrt(2.0);
}

ReimVector to_reim(const CMat& u) {
  return {0.5 * (u + u.conjugate()), Complex(0, -0.5) * (u - u.conjugate())};
}

CMat from_reim(const ReimVector& v) { return v.re + kI * v.im; }

CMat RealLinearOp::apply(const CMat& u) const {
  const CVec v = flatten(u);
  return unflatten(A * v + B * v.conjugate(), n, N);
}

CasidaVector RealLinearOp::apply(const CasidaVector& v) const {
  const CVec x = flatten(v.X), y = flatten(v.Y);
  return {unflatten(A * x + B * y, n, N),
          unflatten(B.conjugate() * x + A.conjugate() * y, n, N)};
}

CMat RealLinearOp::casida_matrix() const {
  const auto d = A.rows();
  CMat c(2 * d, 2 * d);
  c.topLeftCorner(d, d) = A;
  c.topRightCorner(d, d) = B;
  c.bottomLeftCorner(d, d) = B.conjugate();
  c.bottomRightCorner(d, d) = A.conjugate();
  return c;
}

CMat RealLinearOp::reim_matrix() const {
  const auto d = A.rows();
  const CMat ar = A.real().cast<Complex>(), ai = A.imag().cast<Complex>();
  const CMat br = B.real().cast<Complex>(), bi = B.imag().cast<Complex>();
  CMat c(2 * d, 2 * d);
  c.topLeftCorner(d, d) = ar + br;
  c.topRightCorner(d, d) = -ai + bi;
  c.bottomLeftCorner(d, d) = ai + bi;
  c.bottomRightCorner(d, d) = ar - br;
  return c;
}

bool RealLinearOp::is_symmetric(double tol) const {
  return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol &&
         (B - B.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Vec s0_apply(const GroundState& gs, const CMat& u) {
  if (u.rows() != gs.n() || u.cols() != gs.N())
    throw ShapeError("s0_apply: variation shape mismatch");
  const CMat psi = gs.orbitals.cast<Complex>();
  const CVec s = (psi.conjugate().cwiseProduct(u) + psi.cwiseProduct(u.conjugate()))
                     .rowwise()
                     .sum();
  return s.real();
}

CVec s0_apply_doubled(const GroundState& gs, const CasidaVector& v) {
  const CMat psi = gs.orbitals.cast<Complex>();
  return std::sqrt(2.0) * (psi.cwiseProduct(v.X + v.Y)).rowwise().sum();
}

CMat s0_adjoint(const GroundState& gs, const Vec& v) {
  return (gs.orbitals.array().colwise() * v.array()).matrix().cast<Complex>();
}

CMat k0_apply(const ModelSystem& model, const GroundState& gs, const CMat& u,
              double delta) {
  const Vec s = s0_apply(gs, u);
  const Vec pot = delta * (hxc_kernel(model, gs.rho0) * s);
  return (gs.orbitals.array().colwise() * pot.array()).matrix().cast<Complex>();
}

VariationSplit split_variation(const GroundState& gs, const CMat& u) {
  if (u.rows() != gs.n() || u.cols() != gs.N())
    throw ShapeError("split_variation: variation shape mismatch");
  const CMat psi = gs.orbitals.cast<Complex>();
  const CMat gram = gs.h * (psi.adjoint() * u);
  const CMat herm = 0.5 * (gram + gram.adjoint());
  const CMat skew = 0.5 * (gram - gram.adjoint());
  VariationSplit out;
  out.growth = psi * herm;
  out.gauge = psi * skew;
  out.perp = u - psi * gram;
  return out;
}

AssembledOps assemble(const ModelSystem& model, const GroundState& gs,
                      double delta) {
  gs.require_minimum();
  const int n = gs.n();
  const int N = gs.N();
  const int d = n * N;

  AssembledOps ops;
  auto zero_op = [&] {
    RealLinearOp op;
    op.A = CMat::Zero(d, d);
    op.B = CMat::Zero(d, d);
    op.n = n;
    op.N = N;
    return op;
  };

  ops.omega = zero_op();
  for (int i = 0; i < N; ++i)
    ops.omega.A.block(i * n, i * n, n, n) =
        (gs.H0 - gs.lambda[i] * Mat::Identity(n, n)).cast<Complex>();

  ops.k0 = zero_op();
  const Mat fhxc = delta * hxc_kernel(model, gs.rho0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      ops.k0.A.block(i * n, j * n, n, n) =
          (gs.orbitals.col(i).asDiagonal() * fhxc * gs.orbitals.col(j).asDiagonal())
              .cast<Complex>();
  ops.k0.B = ops.k0.A;

  ops.p0 = zero_op();
  const Mat proj = gs.h * (gs.orbitals * gs.orbitals.transpose());
  for (int i = 0; i < N; ++i)
    ops.p0.A.block(i * n, i * n, n, n) = proj.cast<Complex>();

  ops.j = zero_op();
  ops.j.A = kI * CMat::Identity(d, d);

  ops.mdyn = zero_op();
  ops.mdyn.A = ops.omega.A + ops.k0.A;
  ops.mdyn.B = ops.k0.B;

  ops.m = zero_op();
  const CMat q = CMat::Identity(d, d) - ops.p0.A;
  ops.m.A = q * ops.mdyn.A * q;
  ops.m.B = q * ops.mdyn.B * q;  // projectors are real

  return ops;
}

// ---------------------------------------------------------------------------

ReducedSpace build_reduced(const ModelSystem& model, const GroundState& gs,
                           double delta) {
  ReducedSpace red;
  red.n = gs.n();
  red.N = gs.N();
  red.h = gs.h;
  red.delta = delta;
  red.lambda = gs.lambda;

  std::vector<bool> occ(red.n, false);
  for (int k : gs.occupied) occ[k] = true;
  for (int k = 0; k < red.n; ++k)
    if (!occ[k]) red.virt.push_back(k);
  red.nv = static_cast<int>(red.virt.size());
  red.m = red.N * red.nv;

  red.phiv.resize(red.n, red.nv);
  red.virt_eigs.resize(red.nv);
  for (int a = 0; a < red.nv; ++a) {
    red.phiv.col(a) = gs.eigvecs.col(red.virt[a]);
    red.virt_eigs[a] = gs.eigs[red.virt[a]];
  }

  red.gaps.resize(red.m);
  red.overlaps.resize(red.n, red.m);
  for (int i = 0; i < red.N; ++i)
    for (int a = 0; a < red.nv; ++a) {
      red.gaps[red.index(i, a)] = red.virt_eigs[a] - gs.lambda[i];
      red.overlaps.col(red.index(i, a)) =
          gs.orbitals.col(i).cwiseProduct(red.phiv.col(a));
    }

  const Mat fhxc = hxc_kernel(model, gs.rho0);
  red.coupling = delta * red.h * (red.overlaps.transpose() * fhxc * red.overlaps);
  red.coupling = 0.5 * (red.coupling + red.coupling.transpose()).eval();
  return red;
}

CVec ReducedSpace::coeffs(const CMat& u_perp) const {
  CVec c(m);
  for (int i = 0; i < N; ++i)
    c.segment(i * nv, nv) = h * real_times_complex(phiv.transpose(), u_perp.col(i));
  return c;
}

CMat ReducedSpace::from_coeffs(const CVec& c) const {
  CMat u(n, N);
  for (int i = 0; i < N; ++i)
    u.col(i) = real_times_complex(phiv, c.segment(i * nv, nv));
  return u;
}

CVec ReducedSpace::doubled_coeffs(const CMat& u_perp) const {
  const CVec c = coeffs(u_perp) / std::sqrt(2.0);
  CVec xy(2 * m);
  xy.head(m) = c;
  xy.tail(m) = c.conjugate();
  return xy;
}

CMat ReducedSpace::from_doubled(const CVec& xy, double tol) const {
  const double dev = (xy.tail(m) - xy.head(m).conjugate()).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw ShapeError("doubled coefficients violate the physical constraint");
  return from_coeffs(std::sqrt(2.0) * xy.head(m));
}

Mat ReducedSpace::doubled_matrix() const {
  Mat md(2 * m, 2 * m);
  const Mat diag_plus_k = Mat(gaps.asDiagonal()) + coupling;
  md.topLeftCorner(m, m) = diag_plus_k;
  md.topRightCorner(m, m) = coupling;
  md.bottomLeftCorner(m, m) = coupling;
  md.bottomRightCorner(m, m) = diag_plus_k;
  return md;
}

double coercivity_constant_reduced(const ReducedSpace& red) {
  Eigen::SelfAdjointEigenSolver<Mat> es(red.reim_block_interacting(),
                                        Eigen::EigenvaluesOnly);
  return std::min(es.eigenvalues().minCoeff(), red.gaps.minCoeff());
}

double coercivity_constant(const ModelSystem& model, GroundState& gs) {
  const ReducedSpace red = build_reduced(model, gs);
  const double gamma = coercivity_constant_reduced(red);
  gs.gamma = gamma;
  if (gamma <= -1e-10)
    throw NotAMinimumError("coercivity constant is negative: " + std::to_string(gamma));
  return gamma;
}

PerpPropagator make_propagator(const ReducedSpace& red) {
  PerpPropagator prop;
  const int m2 = 2 * red.m;
  Eigen::SelfAdjointEigenSolver<Mat> es(red.doubled_matrix());
  prop.gamma = es.eigenvalues().minCoeff();
  if (prop.gamma <= 0)
    throw NotAMinimumError("doubled Hessian not positive definite; gamma = " +
                           std::to_string(prop.gamma));
  const Vec sq = es.eigenvalues().cwiseSqrt();
  prop.msqrt = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
  prop.minvsqrt =
      es.eigenvectors() * sq.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();

  // M^{1/2} J M^{1/2} = i * C with C real symmetric; diagonalize C once.
  Mat signer(m2, m2);
  signer.setZero();
  signer.topLeftCorner(red.m, red.m) = Mat::Identity(red.m, red.m);
  signer.bottomRightCorner(red.m, red.m) = -Mat::Identity(red.m, red.m);
  const Mat c = prop.msqrt * signer * prop.msqrt;
  Eigen::SelfAdjointEigenSolver<Mat> esc(0.5 * (c + c.transpose()));
  prop.w = esc.eigenvectors();
  prop.freqs = esc.eigenvalues();
  return prop;
}

CVec PerpPropagator::to_frame(const CVec& xy) const {
  return real_times_complex(w.transpose(), real_times_complex(msqrt, xy));
}

CVec PerpPropagator::from_frame(const CVec& z) const {
  return real_times_complex(minvsqrt, real_times_complex(w, z));
}

CVec PerpPropagator::apply(double t, const CVec& xy) const {
  CVec z = to_frame(xy);
  z.array() *= (-kI * t * freqs.array().cast<Complex>()).exp();
  return from_frame(z);
}

CMat resolvent_solve_multi(const ReducedSpace& red, Complex z, const CMat& rhs,
                           int skip) {
  const int m = red.m;
  const CVec ax = (red.gaps.cast<Complex>().array() - z).matrix();
  const CVec ay = (red.gaps.cast<Complex>().array() + z).matrix();
  if (ax.cwiseAbs().minCoeff() < 1e-12 || ay.cwiseAbs().minCoeff() < 1e-12)
    throw SingularSystemError("shift z collides with a bare excitation energy");

  CMat u0x = ax.cwiseInverse().asDiagonal() * rhs.topRows(m);
  CMat u0y = ay.cwiseInverse().asDiagonal() * rhs.bottomRows(m);
  if (skip >= 0) u0x.row(skip).setZero();

  CVec q = ax.cwiseInverse() + ay.cwiseInverse();
  if (skip >= 0) q[skip] -= 1.0 / ax[skip];

  // (A + S K S^T)^{-1} b with S = [I; I]: one m x m factorization per z.
  const CMat kc = red.coupling.cast<Complex>();
  const CMat lhs = CMat::Identity(m, m) + kc * q.asDiagonal();
  const CMat corr = lhs.partialPivLu().solve(kc * (u0x + u0y));

  CMat out(2 * m, rhs.cols());
  out.topRows(m) = u0x - ax.cwiseInverse().asDiagonal() * corr;
  out.bottomRows(m) = u0y - ay.cwiseInverse().asDiagonal() * corr;
  if (skip >= 0) out.row(skip).setZero();
  return out;
}

CVec resolvent_solve(const ReducedSpace& red, Complex z, const CVec& rhs, int skip) {
  return resolvent_solve_multi(red, z, rhs, skip);
}

}  // namespace tdlr
