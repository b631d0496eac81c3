// End-to-end acceptance checks. Each numbered criterion prints one PASS/FAIL
// line; the exit status is the number of failures.

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "testsys.hpp"
#include "tdlr/resonance.hpp"

using namespace tdlr;
using namespace testsys;

namespace {

int n_fail = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  (%s)\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++n_fail;
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    const auto n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

// Asymmetric probe: couples to transitions of both parities.
Vec generic_probe(const ModelSystem& ms) {
    return (ms.grid.x.array() + 0.4) * (-ms.grid.x.array().square() / 60.0).exp();
}

// Random real variation with no occupied component, unit weighted norm.
Mat random_perp(const GroundState& gs, std::mt19937& rng) {
    std::normal_distribution<double> d;
    Mat u(gs.n(), gs.N());
    for (int j = 0; j < gs.N(); ++j)
        for (int i = 0; i < gs.n(); ++i) u(i, j) = d(rng);
    u -= gs.orbitals * (gs.h * (gs.orbitals.transpose() * u));
    u /= std::sqrt(gs.h) * u.norm();
    return u;
}

// Weakly bound pair over a long box; hosts an embedded 0 -> 3 line.
ModelSystem res_system() {
    ModelSystem ms;
    ms.grid = GridSpec::uniform(400, 160.0);
    ms.sc = {0.8, 5.0, 1.9};
    ms.xc = {1.0, 0.0, 0.0};
    ms.N = 2;
    return ms;
}

const GroundState& res_gs() {
    static GroundState gs = [] {
        ModelSystem ms = res_system();
        ScfOptions opts;
        opts.mixing = 0.1;
        GroundState g = minimize(ms, opts);
        coercivity_constant(ms, g);
        return g;
    }();
    return gs;
}

// ---------------------------------------------------------------------------

void criterion_1() {
    const GroundState& gs = default_gs();
    ModelSystem ms = default_system();
    Vec vp = generic_probe(ms);

    double eta = 1.5e-3;
    FrequencyGrid fg = FrequencyGrid::linspace(0.3, 0.8, 501, eta);
    double dw = fg.omega[1] - fg.omega[0];
    SpectrumResult sr = chi_freq(gs, ms, vp, vp, fg, 0.0);
    Vec y = -sr.values.imag();
    double ymax = y.maxCoeff();

    // bare transitions in the band, with footprint residue and probe coupling
    struct Line {
        double w, residue, coupling;
    };
    std::vector<Line> lines;
    for (int i = 0; i < gs.N(); ++i)
        for (int a = 0; a < gs.n(); ++a) {
            bool occ = false;
            for (int k : gs.occupied) occ |= (k == a);
            if (occ) continue;
            double w = gs.eigs[a] - gs.lambda[i];
            if (w < fg.omega[0] + 10 * dw || w > fg.omega[fg.omega.size() - 1] - 10 * dw)
                continue;
            TransitionChannel ch;
            ch.i0 = i;
            ch.a0 = a;
            ch.e0 = w;
            Vec foot = 2.0 * gs.orbitals.col(i).cwiseProduct(gs.eigvecs.col(a));
            lines.push_back({w, residue_check(gs, ch), gs.h * foot.dot(vp)});
        }

    // detected peaks: interior local maxima above a relative floor
    std::vector<double> peaks;
    for (int k = 1; k + 1 < y.size(); ++k)
        if (y[k] > y[k - 1] && y[k] > y[k + 1] && y[k] > 1e-3 * ymax)
            peaks.push_back(fg.omega[k]);

    bool pass = !peaks.empty();
    std::string why;
    // every detected peak sits on a bright bare line
    for (double p : peaks) {
        bool hit = false;
        for (const Line& l : lines)
            if (l.residue > 1e-6 && std::abs(l.w - p) <= dw) hit = true;
        if (!hit) {
            pass = false;
            why = fmt("stray peak at %.5f", p);
        }
    }
    // every strongly probe-coupled bright line produces a peak
    double cmax = 0;
    for (const Line& l : lines) cmax = std::max(cmax, std::abs(l.coupling));
    for (const Line& l : lines) {
        if (l.residue <= 1e-6 || std::abs(l.coupling) < 0.05 * cmax) continue;
        bool hit = false;
        for (double p : peaks) hit |= std::abs(l.w - p) <= dw;
        if (!hit) {
            pass = false;
            why = fmt("missing peak at %.5f", l.w);
        }
    }
    if (pass) why = fmt("%zu peaks matched to bare lines within %.1e", peaks.size(), dw);
    report(1, pass, why);
}

void criterion_2() {
    const GroundState& gs = default_gs();
    ModelSystem ms = default_system();
    AssembledOps ops = assemble(ms, gs);

    int violations = 0;
    std::mt19937 rng(2026);
    double worst = 1e300;
    for (int trial = 0; trial < 100; ++trial) {
        CMat u = random_variation(gs, rng);
        CMat pu = gs.orbitals.cast<Complex>() *
                  (gs.h * (gs.orbitals.cast<Complex>().adjoint() * u));
        u -= pu;
        double quad = redot_w(gs.h, u, ops.mdyn.apply(u));
        double nrm2 = redot_w(gs.h, u, u);
        worst = std::min(worst, quad / nrm2);
        if (quad < gs.gamma * nrm2 * (1.0 - 1e-10)) ++violations;
    }
    bool pass = gs.gamma > 0 && violations == 0;
    report(2, pass,
           fmt("gamma = %.4e, min Rayleigh = %.4e, violations = %d", gs.gamma, worst,
               violations));
}

void criterion_3() {
    const GroundState& gs = default_gs();
    ModelSystem ms = default_system();
    AssembledOps ops = assemble(ms, gs);
    std::mt19937 rng(7);

    // (a) cubic decay of the quadratic-model residual
    std::vector<double> eps_list = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    double slope_min = 1e300;
    for (int trial = 0; trial < 5; ++trial) {
        CMat u = random_variation(gs, rng);
        u /= norm_w(gs.h, u);
        slope_min = std::min(slope_min, energy_expansion_residual(ms, gs, u, eps_list));
    }

    // (b) quadratic form against the second difference of the energy along
    // the orthonormalizing (polar) retraction; the retraction carries a
    // factor 2 relative to the weighted form
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Mat u = random_perp(gs, rng);
        Mat s = gs.h * (u.transpose() * u);
        // polar retraction: (psi + e u)(I + e^2 S)^{-1/2} stays orthonormal
        auto f = [&](double e) {
            Eigen::SelfAdjointEigenSolver<Mat> es(Mat::Identity(gs.N(), gs.N()) +
                                                  e * e * s);
            Mat invsqrt = es.eigenvectors() *
                          es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                          es.eigenvectors().transpose();
            return energy(ms, (gs.orbitals + e * u) * invsqrt);
        };
        double f0 = gs.energy;
        double e1 = 2e-3;
        auto second = [&](double e) { return (f(e) + f(-e) - 2 * f0) / (e * e); };
        double fd = (4.0 * second(e1 / 2) - second(e1)) / 3.0;
        double quad = 2.0 * redot_w(gs.h, u.cast<Complex>(),
                                    ops.mdyn.apply(u.cast<Complex>()));
        worst = std::max(worst, std::abs(fd - quad) / std::abs(quad));
    }
    bool pass = slope_min >= 2.9 && worst <= 1e-5;
    report(3, pass, fmt("residual slope >= %.3f, max FD mismatch = %.2e", slope_min, worst));
}

void criterion_4() {
    const GroundState& gs = default_gs();
    ModelSystem ms = default_system();
    ReducedSpace red = build_reduced(ms, gs);
    PerpPropagator prop = make_propagator(red);
    std::mt19937 rng(11);
    std::normal_distribution<double> d;

    double iso_dev = 0, grp_dev = 0, cons_dev = 0;
    Mat mdbl = prop.msqrt * prop.msqrt;
    for (int trial = 0; trial < 5; ++trial) {
        CVec v(2 * red.m);
        for (int k = 0; k < v.size(); ++k) v[k] = Complex(d(rng), d(rng));
        // middle unitary factor: U(t) v = M^{1/2} apply(t, M^{-1/2} v)
        CVec xy0 = prop.minvsqrt * v;
        double q0 = std::real(xy0.dot(mdbl * xy0));
        for (double t : {0.1, 1.0, 10.0}) {
            CVec ut = prop.msqrt * prop.apply(t, xy0);
            iso_dev = std::max(iso_dev, std::abs(ut.norm() / v.norm() - 1.0));
            CVec half = prop.apply(t / 2, prop.apply(t / 2, xy0));
            CVec full = prop.apply(t, xy0);
            grp_dev = std::max(grp_dev, (half - full).norm() / full.norm());
            double qt = std::real(full.dot(mdbl * full));
            cons_dev = std::max(cons_dev, std::abs(qt - q0) / std::abs(q0));
        }
    }
    bool pass = iso_dev <= 1e-10 && grp_dev <= 1e-9 && cons_dev <= 1e-9;
    report(4, pass,
           fmt("isometry dev %.2e, group law %.2e, energy drift %.2e", iso_dev, grp_dev,
               cons_dev));
}

void criterion_5() {
    ModelSystem ms = default_system(140, 18.0);
    GroundState gs = minimize(ms);
    coercivity_constant(ms, gs);
    Vec vp = ms.grid.x.array() * (-ms.grid.x.array().square() / 50.0).exp();
    double T = 10.0, dt = 1e-3;

    Drive unit = Drive::gaussian(vp, 1.0, 2.0, 0.5);
    Trajectory lin = propagate_linearized(gs, ms, unit, T, T, 1.0, 2e-3);
    Vec drho_lin = lin.densities.back();

    std::vector<double> eps_list = {1e-2, 3e-3, 1e-3, 3e-4}, rem;
    for (double eps : eps_list) {
        Drive drive = Drive::gaussian(vp, eps, 2.0, 0.5);
        Trajectory traj =
            propagate_nonlinear(ms, gs, drive, T, dt, static_cast<int>(T / dt));
        Vec r = traj.densities.back() - gs.rho0 - eps * drho_lin;
        rem.push_back(std::sqrt(gs.h) * r.norm());
    }
    double slope = loglog_slope(eps_list, rem);
    bool pass = std::abs(slope - 2.0) <= 0.1;
    report(5, pass, fmt("remainder slope = %.4f", slope));
}

void criterion_6() {
    ModelSystem ms = default_system(140, 18.0);
    GroundState gs = minimize(ms);
    coercivity_constant(ms, gs);
    AssembledOps ops = assemble(ms, gs);
    std::mt19937 rng(23);

    // application agreement between the two doubled representations
    CMat mre = ops.mdyn.reim_matrix();
    double app_dev = 0;
    for (int trial = 0; trial < 50; ++trial) {
        CMat u = random_variation(gs, rng);
        u /= norm_w(gs.h, u);
        CMat want = ops.mdyn.apply(u);

        int d = gs.n() * gs.N();
        CVec stacked(2 * d);
        stacked.head(d) = CMat(u.real().cast<Complex>()).reshaped();
        stacked.tail(d) = CMat(u.imag().cast<Complex>()).reshaped();
        CVec out = mre * stacked;
        CMat got = out.head(d).reshaped(gs.n(), gs.N()) +
                   Complex(0, 1) * out.tail(d).reshaped(gs.n(), gs.N());
        app_dev = std::max(app_dev, (got - want).cwiseAbs().maxCoeff());
    }

    // spectra of the two doubled matrices
    CMat mca = ops.mdyn.casida_matrix();
    Eigen::ComplexEigenSolver<CMat> e1(mca), e2(mre);
    std::vector<double> s1, s2;
    double imag_dev = 0;
    for (int k = 0; k < e1.eigenvalues().size(); ++k) {
        s1.push_back(e1.eigenvalues()[k].real());
        s2.push_back(e2.eigenvalues()[k].real());
        imag_dev = std::max({imag_dev, std::abs(e1.eigenvalues()[k].imag()),
                             std::abs(e2.eigenvalues()[k].imag())});
    }
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    double spec_dev = 0;
    for (size_t k = 0; k < s1.size(); ++k)
        spec_dev = std::max(spec_dev, std::abs(s1[k] - s2[k]));
    spec_dev = std::max(spec_dev, imag_dev);

    bool pass = app_dev <= 1e-12 && spec_dev <= 1e-10;
    report(6, pass, fmt("apply dev %.2e, spectra dev %.2e", app_dev, spec_dev));
}

void criterion_7() {
    const GroundState& gs = default_gs();
    ModelSystem ms = default_system();
    FrequencyGrid fg = FrequencyGrid::linspace(0.1, 1.4, 14, 5e-3);
    double r = dyson_residual(gs, ms, fg);
    report(7, r <= 1e-8, fmt("max residual = %.2e", r));
}

void criterion_8() {
    // The block structure holds exactly only at a self-consistent stationary
    // point; leakage scales with the SCF eigenresidual, so converge tightly.
    ModelSystem ms = default_system();
    ScfOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 4000;
    GroundState gs = minimize(ms, opts);
    coercivity_constant(ms, gs);
    AssembledOps ops = assemble(ms, gs);
    std::mt19937 rng(31);
    const Complex mi(0, -1);

    double worst = 0, gauge_s0 = 0, gauge_k0 = 0;
    for (int trial = 0; trial < 20; ++trial) {
        CMat u = random_variation(gs, rng);
        VariationSplit sp = split_variation(gs, u);

        // forbidden components measured relative to the full image: the
        // generator carries the kinetic scale ~1/h^2, so an absolute test
        // would just measure the Laplacian norm
        CMat ua = sp.gauge / norm_w(gs.h, sp.gauge);
        CMat img = mi * ops.mdyn.apply(ua);
        VariationSplit img_a = split_variation(gs, img);
        double scale = norm_w(gs.h, img);
        worst = std::max({worst, norm_w(gs.h, img_a.growth) / scale,
                          norm_w(gs.h, img_a.perp) / scale});
        gauge_s0 = std::max(gauge_s0, std::sqrt(gs.h) * s0_apply(gs, ua).norm());
        gauge_k0 = std::max(gauge_k0, norm_w(gs.h, k0_apply(ms, gs, ua)));

        CMat up = sp.perp / norm_w(gs.h, sp.perp);
        CMat imgp = mi * ops.mdyn.apply(up);
        VariationSplit img_p = split_variation(gs, imgp);
        worst = std::max(worst, norm_w(gs.h, img_p.growth) / norm_w(gs.h, imgp));
    }
    bool pass = worst <= 1e-11 && gauge_s0 <= 1e-11 && gauge_k0 <= 1e-11;
    report(8, pass,
           fmt("forbidden blocks %.2e, S0(gauge) %.2e, K0(gauge) %.2e", worst, gauge_s0,
               gauge_k0));
}

void criterion_9() {
    const GroundState& gs = res_gs();
    ModelSystem ms = res_system();
    TransitionChannel ch = TransitionChannel::make(gs, 0, 3);
    Vec etas(5);
    etas << 0.05, 0.035, 0.025, 0.0175, 0.012;

    std::vector<double> deltas = {0.025, 0.05, 0.1}, gammas;
    ResonanceEstimate pe_mid;
    for (double d : deltas) {
        ResonanceEstimate pe = pole_estimate(gs, ms, ch, d, etas);
        gammas.push_back(pe.gamma);
        if (d == 0.05) pe_mid = pe;
    }
    double slope = loglog_slope(deltas, gammas);

    double s = 4.0 * level_spacing_near(gs, std::max(ch.e0 + gs.lambda[gs.N() - 1], 0.0));
    GoldenRuleResult gr = golden_rule_width(gs, ms, ch, 0.05, s);
    double agree = std::abs(pe_mid.gamma - gr.gamma) / gr.gamma;

    // measured linewidth at strong coupling, eta = Gamma/2
    ResonanceEstimate pe1 = pole_estimate(gs, ms, ch, 1.0, etas);
    double g1 = pe1.gamma, eta = g1 / 2;
    double ctr = ch.e0 + pe1.shift, span = 2.5 * (g1 + eta);
    FrequencyGrid fg = FrequencyGrid::linspace(ctr - span, ctr + span, 161, eta);
    Vec vp = ms.grid.x.array() * (-ms.grid.x.array().square() / 800.0).exp();
    SpectrumResult sr = chi_freq(gs, ms, vp, vp, fg);
    LorentzFit fit = fit_lorentzian(fg.omega, Vec(-sr.values.imag()));
    double fwhm_ratio = 2.0 * fit.halfwidth / (2 * g1 + 2 * eta);

    bool pass = gammas[0] > 0 && std::abs(slope - 2.0) <= 0.2 && agree <= 0.15 &&
                std::abs(fwhm_ratio - 1.0) <= 0.3;
    report(9, pass,
           fmt("slope %.3f, pole/golden dev %.3f, FWHM ratio %.3f", slope, agree,
               fwhm_ratio));
}

void criterion_10() {
    const GroundState& gs = default_gs();
    ModelSystem ms = default_system();
    Vec vp = generic_probe(ms);
    FrequencyGrid fg = FrequencyGrid::linspace(0.2, 1.2, 7, 1e-2);
    SpectrumResult base = chi_freq(gs, ms, vp, vp, fg);

    const GroundState& rgs = res_gs();
    ModelSystem rms = res_system();
    TransitionChannel ch = TransitionChannel::make(rgs, 0, 3);
    double s = 4.0 * level_spacing_near(rgs, std::max(ch.e0 + rgs.lambda[rgs.N() - 1], 0.0));
    double base_gamma = golden_rule_width(rgs, rms, ch, 0.05, s).gamma;

    // rotate the occupied frame, then re-canonicalize (the response formulas
    // take eigen-orbitals; any frame of the same subspace must round-trip)
    auto rotated = [](const GroundState& g, const Mat& r) {
        GroundState out = g;
        Mat psi = g.orbitals * r;
        Mat lag = g.h * (psi.transpose() * (g.H0 * psi));
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (lag + lag.transpose()));
        out.orbitals = psi * es.eigenvectors();
        out.lambda = es.eigenvalues();
        return out;
    };

    std::mt19937 rng(41);
    double spec_dev = 0, gamma_dev = 0, subspace_dev = 0;
    for (int trial = 0; trial < 5; ++trial) {
        Mat r = random_orthogonal(gs.N(), rng);
        GroundState g2 = rotated(gs, r);
        subspace_dev = std::max(subspace_dev, subspace_distance(gs.h, gs.orbitals, g2.orbitals));
        SpectrumResult sr = chi_freq(g2, ms, vp, vp, fg);
        for (int k = 0; k < fg.omega.size(); ++k)
            spec_dev = std::max(spec_dev, std::abs(sr.values[k] - base.values[k]) /
                                              std::abs(base.values[k]));

        GroundState r2 = rotated(rgs, random_orthogonal(rgs.N(), rng));
        double g = golden_rule_width(r2, rms, ch, 0.05, s).gamma;
        gamma_dev = std::max(gamma_dev, std::abs(g - base_gamma) / base_gamma);
    }
    bool pass = spec_dev <= 1e-8 && gamma_dev <= 1e-8;
    report(10, pass,
           fmt("spectrum dev %.2e, width dev %.2e, subspace dev %.2e", spec_dev,
               gamma_dev, subspace_dev));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%s (%d failure%s)\n", n_fail == 0 ? "ALL PASS" : "FAILURES", n_fail,
                n_fail == 1 ? "" : "s");
    return n_fail;
}
