#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tdlr/model.hpp"

using namespace tdlr;

TEST_CASE("kinetic stencil: h=1 matrix is the textbook three-point form") {
    GridSpec g = GridSpec::uniform(17, 8.0);  // h = 1 exactly
    Mat k = kinetic_matrix(g);
    Mat want = Mat::Zero(17, 17);
    for (int i = 0; i < 17; ++i) {
        want(i, i) = 1.0;
        if (i > 0) want(i, i - 1) = -0.5;
        if (i + 1 < 17) want(i, i + 1) = -0.5;
    }
    CHECK((k - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kinetic stencil: exact symmetry") {
    Mat k = kinetic_matrix(GridSpec::uniform(57, 13.0));
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kinetic + harmonic well reproduces the oscillator ground energy") {
    // Oracle: the continuum ground energy of -1/2 d2/dx2 + x^2/2 is 1/2.
    GridSpec g = GridSpec::uniform(400, 20.0);
    Mat h = kinetic_matrix(g);
    for (int i = 0; i < g.n; ++i) h(i, i) += 0.5 * g.x[i] * g.x[i];
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    CHECK(std::abs(es.eigenvalues()[0] - 0.5) < 5e-4);
}

TEST_CASE("hartree potential basics") {
    ModelSystem ms;
    ms.grid = GridSpec::uniform(101, 10.0);
    ms.sc = {1.0, 1.0, 1.0};

    SUBCASE("zero density gives zero potential") {
        CHECK(hartree_potential(ms, Vec::Zero(101)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("point mass at the origin reproduces the bare kernel") {
        Vec rho = Vec::Zero(101);
        rho[50] = 1.0 / ms.grid.h;  // unit total charge at x = 0
        Vec v = hartree_potential(ms, rho);
        for (int i = 0; i < 101; ++i) {
            double x = ms.grid.x[i];
            CHECK(v[i] == doctest::Approx(1.0 / std::sqrt(x * x + 1.0)).epsilon(1e-14));
        }
    }
    SUBCASE("symmetric density gives symmetric potential") {
        Vec rho(101);
        for (int i = 0; i < 101; ++i) rho[i] = std::exp(-ms.grid.x[i] * ms.grid.x[i]);
        Vec v = hartree_potential(ms, rho);
        for (int i = 0; i < 101; ++i) CHECK(std::abs(v[i] - v[100 - i]) < 1e-13);
    }
    SUBCASE("linearity") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Vec r1(101), r2(101);
        for (int i = 0; i < 101; ++i) { r1[i] = u(rng); r2[i] = u(rng); }
        Vec lhs = hartree_potential(ms, Vec(0.7 * r1 + 1.3 * r2));
        Vec rhs = 0.7 * hartree_potential(ms, r1) + 1.3 * hartree_potential(ms, r2);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() / lhs.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("negative density rejected") {
        Vec rho = Vec::Zero(101);
        rho[3] = -1e-6;
        CHECK_THROWS_AS(hartree_potential(ms, rho), InvalidDensityError);
    }
}

TEST_CASE("xc derivatives") {
    XcPolynomial xc{-0.25, 0.0, 0.0};

    SUBCASE("values at rho = 0") {
        Vec zero = Vec::Zero(4);
        XcEval e = xc_derivatives(xc, zero);
        CHECK(e.e.cwiseAbs().maxCoeff() == 0.0);
        CHECK(e.v.cwiseAbs().maxCoeff() == 0.0);
        CHECK((e.vp.array() - 2 * xc.c2).abs().maxCoeff() == 0.0);
    }
    SUBCASE("direct evaluation at rho = 1") {
        Vec one = Vec::Ones(1);
        XcEval e = xc_derivatives(xc, one);
        CHECK(e.e[0] == doctest::Approx(-0.25));
        CHECK(e.v[0] == doctest::Approx(-0.5));
        CHECK(e.vp[0] == doctest::Approx(-0.5));
    }
    SUBCASE("central difference oracle for v = e'") {
        XcPolynomial full{0.3, -0.1, 0.02};
        Vec rho = Vec::LinSpaced(5, 0.1, 1.5);
        double worst_ratio = 0.0;
        double prev = -1.0;
        for (double s : {1e-2, 5e-3, 2.5e-3}) {
            XcEval up = xc_derivatives(full, Vec(rho.array() + s));
            XcEval dn = xc_derivatives(full, Vec(rho.array() - s));
            XcEval mid = xc_derivatives(full, rho);
            double err = ((up.e - dn.e) / (2 * s) - mid.v).cwiseAbs().maxCoeff();
            if (prev > 0) worst_ratio = std::max(worst_ratio, err / prev);
            prev = err;
        }
        CHECK(worst_ratio < 0.3);  // error shrinks ~4x per halving of s
    }
}

TEST_CASE("hamiltonian assembly") {
    ModelSystem ms;
    ms.grid = GridSpec::uniform(120, 15.0);
    ms.sc = {1.0, 0.0, 1.0};  // Z = 0
    ms.xc = {0.0, 0.0, 0.0};

    SUBCASE("no charge, no density: pure kinetic") {
        Mat h = hamiltonian(ms, Vec::Zero(120));
        CHECK((h - kinetic_matrix(ms.grid)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("symmetric for random admissible density") {
        ms.sc.Z = 1.5;
        ms.xc = {0.2, -0.05, 0.0};
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(0.0, 0.5);
        Vec rho(120);
        for (int i = 0; i < 120; ++i) rho[i] = u(rng);
        Mat h = hamiltonian(ms, rho);
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("soft well binds at least one state") {
        ModelSystem well;
        well.grid = GridSpec::uniform(400, 20.0);
        well.sc = {1.0, 1.0, 1.0};
        Eigen::SelfAdjointEigenSolver<Mat> es(hamiltonian(well, Vec::Zero(400)));
        CHECK(es.eigenvalues()[0] < 0.0);
    }
}
