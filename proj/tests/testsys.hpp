#pragma once

// Shared systems for the test suites. Each converged ground state is solved
// once per process and cached.

#include <random>

#include "tdlr/groundstate.hpp"

namespace testsys {

using namespace tdlr;

// Two bound electrons in a deep soft well; the workhorse system.
inline ModelSystem default_system(int n = 240, double L = 24.0) {
    ModelSystem ms;
    ms.grid = GridSpec::uniform(n, L);
    ms.sc = {2.0, 2.0, 0.5};
    ms.xc = {0.3, 0.0, 0.0};
    ms.N = 2;
    return ms;
}

// Effectively non-interacting: the soft-Coulomb kernel is flattened to
// ~1e-12 by a huge softening length and the xc term is removed.
inline ModelSystem bare_system(int n = 160, double L = 20.0, int N = 2) {
    ModelSystem ms;
    ms.grid = GridSpec::uniform(n, L);
    ms.sc = {1e12, 2.0, 0.5};
    ms.xc = {0.0, 0.0, 0.0};
    ms.N = N;
    return ms;
}

inline const GroundState& default_gs() {
    static GroundState gs = [] {
        ModelSystem ms = default_system();
        GroundState g = minimize(ms);
        coercivity_constant(ms, g);
        return g;
    }();
    return gs;
}

inline const GroundState& bare_gs() {
    static GroundState gs = [] {
        ModelSystem ms = bare_system();
        GroundState g = minimize(ms);
        coercivity_constant(ms, g);
        return g;
    }();
    return gs;
}

inline CMat random_variation(const GroundState& gs, std::mt19937& rng) {
    std::normal_distribution<double> d;
    CMat u(gs.n(), gs.N());
    for (int j = 0; j < gs.N(); ++j)
        for (int i = 0; i < gs.n(); ++i) u(i, j) = Complex(d(rng), d(rng));
    return u;
}

inline Mat random_real_matrix(int rows, int cols, std::mt19937& rng) {
    std::normal_distribution<double> d;
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = d(rng);
    return m;
}

// Random orthogonal via QR with positive diagonal.
inline Mat random_orthogonal(int k, std::mt19937& rng) {
    Mat a = random_real_matrix(k, k, rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j)
        if (r(j, j) < 0) q.col(j) *= -1;
    return q;
}

}  // namespace testsys
