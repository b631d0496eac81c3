#include "tdlr/groundstate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace tdlr {

void GroundState::require_minimum() const {
  if (!(gamma > 0))
    throw NotAMinimumError("ground state has gamma = " + std::to_string(gamma) +
                           "; not certified as a non-degenerate minimum");
}

Vec density_of(const CMat& psi) { return psi.cwiseAbs2().rowwise().sum(); }

namespace {

void check_orthonormal(double h, const Mat& psi, double tol) {
  const Mat gram = h * (psi.transpose() * psi);
  const double err = (gram - Mat::Identity(psi.cols(), psi.cols())).cwiseAbs().maxCoeff();
  if (err > tol)
    throw ShapeError("orbitals not orthonormal under quadrature (deviation " +
                     std::to_string(err) + ")");
}

double energy_of_density_terms(const ModelSystem& model, const Vec& rho) {
  const double h = model.grid.h;
  const double hartree = 0.5 * h * h * rho.dot(interaction_kernel(model) * rho);
  const double ext = h * external_potential(model).dot(rho);
  const double xc = h * xc_derivatives(model.xc, rho).e.sum();
  return ext + hartree + xc;
}

}  // namespace

double energy(const ModelSystem& model, const Mat& psi) {
  check_orthonormal(model.grid.h, psi, 1e-8);
  const double h = model.grid.h;
  const Vec rho = psi.cwiseAbs2().rowwise().sum();
  const double kin = h * (psi.transpose() * (kinetic_matrix(model.grid) * psi)).trace();
  return kin + energy_of_density_terms(model, rho);
}

GroundState minimize(const ModelSystem& model, const ScfOptions& opts) {
  model.validate();
  if (opts.tol <= 0) throw ConfigError("ScfOptions: need tol > 0");
  const int n = model.grid.n;
  const int N = model.N;
  const double h = model.grid.h;

  std::vector<int> occ(N);
  if (opts.occupation) {
    occ = *opts.occupation;
    if (static_cast<int>(occ.size()) != N)
      throw ConfigError("occupation override must list exactly N eigenindices");
    for (int k : occ)
      if (k < 0 || k >= n) throw ConfigError("occupation index out of range");
  } else {
    std::iota(occ.begin(), occ.end(), 0);
  }

  Vec rho = Vec::Zero(n);
  Mat psi;
  Vec lam;
  Eigen::SelfAdjointEigenSolver<Mat> es;

  double resid = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    es.compute(hamiltonian(model, rho));
    psi.resize(n, N);
    lam.resize(N);
    for (int k = 0; k < N; ++k) {
      psi.col(k) = es.eigenvectors().col(occ[k]) / std::sqrt(h);
      lam[k] = es.eigenvalues()[occ[k]];
    }
    const Vec rho_out = psi.cwiseAbs2().rowwise().sum();
    resid = (hamiltonian(model, rho_out) * psi - psi * lam.asDiagonal())
                .cwiseAbs()
                .maxCoeff();
    if (resid <= opts.tol) {
      rho = rho_out;
      converged = true;
      break;
    }
    rho += opts.mixing * (rho_out - rho);
  }
  if (!converged)
    throw MaxIterationsError("SCF did not reach tol " + std::to_string(opts.tol) +
                             " in " + std::to_string(opts.max_iter) +
                             " iterations (residual " + std::to_string(resid) + ")");

  GroundState gs;
  gs.h = h;
  gs.H0 = hamiltonian(model, rho);
  es.compute(gs.H0);
  gs.eigs = es.eigenvalues();
  gs.eigvecs = es.eigenvectors() / std::sqrt(h);

  // Canonical orbitals: diagonalize the occupied block of the Lagrange matrix.
  Mat lagrange = h * (psi.transpose() * (gs.H0 * psi));
  lagrange = 0.5 * (lagrange + lagrange.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> canon(lagrange);
  gs.orbitals = psi * canon.eigenvectors();
  gs.lambda = canon.eigenvalues();
  gs.rho0 = gs.orbitals.cwiseAbs2().rowwise().sum();
  gs.energy = energy(model, gs.orbitals);
  gs.occupied = occ;

  std::vector<int> lowest(N);
  std::iota(lowest.begin(), lowest.end(), 0);
  gs.aufbau = std::is_permutation(occ.begin(), occ.end(), lowest.begin());

  if ((gs.lambda.array() >= 0).any())
    throw PositiveOccupiedEigenvalueError(
        "occupied eigenvalue >= 0; system not admissible");
  return gs;
}

double energy_expansion_residual(const ModelSystem& model, const GroundState& gs,
                                 const CMat& u, const std::vector<double>& eps_list) {
  const double h = model.grid.h;
  const Mat& psi0 = gs.orbitals;
  const Mat t = kinetic_matrix(model.grid);
  const Mat fhxc = hxc_kernel(model, gs.rho0);

  auto raw_energy = [&](const CMat& psi) {
    const Vec rho = density_of(psi);
    const double kin = h * (psi.adjoint() * (t * psi.eval())).trace().real();
    return kin + energy_of_density_terms(model, rho);
  };
  const double e0 = raw_energy(psi0.cast<Complex>());
  const double lin = 2.0 * redot_w(h, (gs.H0 * psi0).cast<Complex>(), u);
  const double quad_h = redot_w(h, u, (gs.H0 * u.eval()).eval());
  const Vec s = 2.0 * (psi0.array() * u.real().array()).rowwise().sum();
  const double quad_k = 0.5 * h * s.dot(fhxc * s);

  std::vector<double> lx, ly;
  for (double eps : eps_list) {
    const double e = raw_energy(psi0.cast<Complex>() + eps * u);
    const double model_e = e0 + eps * lin + eps * eps * (quad_h + quad_k);
    const double r = std::abs(e - model_e);
    if (r < 1e-14 * std::max(1.0, std::abs(e0))) continue;  // roundoff floor
    lx.push_back(std::log(eps));
    ly.push_back(std::log(r));
  }
  if (lx.size() < 2) return 4.0;  // residual below roundoff everywhere
  const auto npts = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / npts;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / npts;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx;
}

double subspace_distance(double h, const Mat& psi, const Mat& phi) {
  const Mat overlap = h * (phi.transpose() * psi);
  const double tr = overlap.jacobiSvd().singularValues().sum();
  return std::max(0.0, 2.0 * psi.cols() - 2.0 * tr);
}

}  // namespace tdlr
