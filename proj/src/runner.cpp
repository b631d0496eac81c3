#include "tdlr/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"
#include "tdlr/dynamics.hpp"
#include "tdlr/resonance.hpp"
#include "tdlr/response.hpp"

namespace tdlr {

namespace {

using nlohmann::ordered_json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path);
    out << body;
}

ordered_json meta_block(const Config& cfg, const RunOptions& opts) {
    return {{"version", kVersion}, {"config_hash", cfg.hash()}, {"seed", opts.seed}};
}

Drive make_drive(const Config& cfg, const Vec& vp) {
    const std::string& spec = cfg.drive.f_spec;
    double eps = cfg.drive.eps;
    if (spec.rfind("gaussian:", 0) == 0) {
        double t0, sigma;
        if (std::sscanf(spec.c_str() + 9, "%lf,%lf", &t0, &sigma) != 2 || sigma <= 0)
            throw ConfigError("[drive] f: expected gaussian:t0,sigma");
        return Drive::gaussian(vp, eps, t0, sigma);
    }
    if (spec == "step") return Drive::step(vp, eps);
    if (spec.rfind("sinusoid:", 0) == 0) {
        double w0;
        if (std::sscanf(spec.c_str() + 9, "%lf", &w0) != 1)
            throw ConfigError("[drive] f: expected sinusoid:w0");
        return Drive::sinusoid(vp, eps, w0);
    }
    throw ConfigError("[drive] f: unknown spec '" + spec + "'");
}

GroundState solve_ground(const Config& cfg) {
    GroundState gs = minimize(cfg.model, cfg.scf);
    coercivity_constant(cfg.model, gs);
    gs.require_minimum();
    return gs;
}

int cmd_scf(const Config& cfg, const RunOptions& opts) {
    GroundState gs = solve_ground(cfg);
    ordered_json j = meta_block(cfg, opts);
    j["n"] = cfg.model.grid.n;
    j["L"] = cfg.model.grid.L;
    j["N"] = cfg.model.N;
    j["energy"] = gs.energy;
    j["lambda"] = std::vector<double>(gs.lambda.data(), gs.lambda.data() + gs.lambda.size());
    j["gamma"] = gs.gamma;
    j["aufbau"] = gs.aufbau;
    j["occupied"] = gs.occupied;
    write_text(opts.out_dir + "/groundstate.json", j.dump(2) + "\n");

    std::string csv = "x";
    for (int k = 0; k < gs.N(); ++k) csv += ",psi" + std::to_string(k);
    csv += ",rho0\r\n";
    for (int i = 0; i < gs.n(); ++i) {
        csv += fmt17(cfg.model.grid.x[i]);
        for (int k = 0; k < gs.N(); ++k) csv += "," + fmt17(gs.orbitals(i, k));
        csv += "," + fmt17(gs.rho0[i]) + "\r\n";
    }
    write_text(opts.out_dir + "/orbitals.csv", csv);
    std::printf("scf: E0 = %.12f, gamma = %.6e\n", gs.energy, gs.gamma);
    return 0;
}

int cmd_check(const Config& cfg, const RunOptions& opts) {
    GroundState gs = solve_ground(cfg);
    const ModelSystem& model = cfg.model;
    const double h = gs.h;
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> gauss;
    auto randu = [&] {
        CMat u(gs.n(), gs.N());
        for (int j = 0; j < gs.N(); ++j)
            for (int i = 0; i < gs.n(); ++i) u(i, j) = Complex(gauss(rng), gauss(rng));
        return u;
    };

    std::string report;
    bool all_ok = true;
    auto item = [&](const std::string& name, bool ok, double value) {
        report += std::string(ok ? "PASS" : "FAIL") + "  " + name + "  (" + fmt17(value) + ")\n";
        all_ok = all_ok && ok;
    };

    double ortho = (gs.orbitals.transpose() * gs.orbitals * h - Mat::Identity(gs.N(), gs.N()))
                       .cwiseAbs().maxCoeff();
    item("orthonormality", ortho <= 1e-10, ortho);
    double eigres = (gs.H0 * gs.orbitals - gs.orbitals * gs.lambda.asDiagonal()).cwiseAbs().maxCoeff();
    item("eigenresidual", eigres <= 10 * cfg.scf.tol, eigres);
    item("negative occupied levels", gs.lambda.maxCoeff() < 0, gs.lambda.maxCoeff());
    item("coercivity gamma > 0", gs.gamma > 0, gs.gamma);

    double delta = opts.no_interaction ? 0.0 : opts.delta;
    AssembledOps ops = assemble(model, gs, delta);
    int nN = gs.n() * gs.N();
    double j2 = (ops.j.casida_matrix() * ops.j.casida_matrix() + CMat::Identity(2 * nN, 2 * nN))
                    .cwiseAbs().maxCoeff();
    item("J^2 = -identity", j2 <= 1e-14, j2);
    item("Mdyn symmetric", ops.mdyn.is_symmetric(1e-11), 0.0);

    // Representation equivalence on random vectors.
    double repmax = 0.0;
    for (int t = 0; t < 10; ++t) {
        CMat u = randu();
        CasidaVector cv = to_casida(u);
        CasidaVector av = ops.mdyn.apply(cv);
        CMat direct = ops.mdyn.apply(u);
        repmax = std::max(repmax, (from_casida(av) - direct).cwiseAbs().maxCoeff());
    }
    item("Casida/direct application agree", repmax <= 1e-11, repmax);

    // Gauge directions are invisible and uncoupled.
    double gmax = 0.0, kmax = 0.0;
    for (int t = 0; t < 10; ++t) {
        CMat q = randu().topRows(gs.N());
        CMat skew = 0.5 * (q - q.adjoint());
        CMat ua = gs.orbitals.cast<Complex>() * skew;
        gmax = std::max(gmax, s0_apply(gs, ua).cwiseAbs().maxCoeff());
        kmax = std::max(kmax, k0_apply(model, gs, ua, 1.0).cwiseAbs().maxCoeff());
    }
    item("gauge modes carry no density", gmax <= 1e-11, gmax);
    item("coupling annihilates gauge modes", kmax <= 1e-11, kmax);

    // Propagator isometry and group law on the unoccupied subspace.
    ReducedSpace red = build_reduced(model, gs, delta);
    PerpPropagator prop = make_propagator(red);
    CMat u0 = split_variation(gs, randu()).perp;
    double n0 = norm_w(h, u0);
    CVec xy0 = red.doubled_coeffs(u0);
    double e_ref = xy0.dot(red.doubled_matrix() * xy0).real();
    double iso = 0.0, drift = 0.0;
    for (double t : {0.1, 1.0, 10.0}) {
        // Isometry of the sandwiched exponential: the frame coefficients
        // z = W^T M^{1/2} (x;y) only pick up phases.
        CVec z0 = prop.to_frame(xy0);
        CVec zt = (Complex(0, -t) * prop.freqs.cast<Complex>().array()).exp() * z0.array();
        iso = std::max(iso, std::abs(zt.norm() - z0.norm()) / z0.norm());
        CMat ut = linearized_propagator_apply(red, prop, t, u0);
        CMat u2 = linearized_propagator_apply(red, prop, t / 2.0,
                                              linearized_propagator_apply(red, prop, t / 2.0, u0));
        iso = std::max(iso, norm_w(h, CMat(ut - u2)) / n0);
        CVec xyt = red.doubled_coeffs(ut);
        drift = std::max(drift, std::abs(xyt.dot(red.doubled_matrix() * xyt).real() - e_ref) /
                                    std::abs(e_ref));
    }
    item("propagator isometry and group law", iso <= 1e-9, iso);
    item("quadratic form conserved", drift <= 1e-9, drift);

    write_text(opts.out_dir + "/invariants.txt",
               "version " + std::string(kVersion) + "\nconfig " + cfg.hash() + "\n" + report);
    std::fputs(report.c_str(), stdout);
    if (!all_ok) throw NumericalError("invariant checks failed");
    return 0;
}

std::string spectrum_csv(const SpectrumResult& sr) {
    std::string csv = "omega,re,im\r\n";
    for (int i = 0; i < sr.omega.size(); ++i)
        csv += fmt17(sr.omega[i]) + "," + fmt17(sr.values[i].real()) + "," +
               fmt17(sr.values[i].imag()) + "\r\n";
    return csv;
}

int cmd_spectrum(const Config& cfg, const RunOptions& opts) {
    GroundState gs = solve_ground(cfg);
    Vec vp = build_probe(cfg, cfg.model);
    double delta = opts.no_interaction ? 0.0 : opts.delta;
    FrequencyGrid fg = FrequencyGrid::linspace(cfg.freq.wmin, cfg.freq.wmax, cfg.freq.nw, cfg.freq.eta);
    SpectrumResult sr = chi_freq(gs, cfg.model, vp, vp, fg, delta);
    write_text(opts.out_dir + "/spectrum.csv", spectrum_csv(sr));
    ordered_json j = meta_block(cfg, opts);
    j["eta"] = fg.eta;
    j["delta"] = delta;
    j["n_omega"] = cfg.freq.nw;
    write_text(opts.out_dir + "/spectrum_meta.json", j.dump(2) + "\n");
    std::printf("spectrum: %d points written\n", cfg.freq.nw);
    return 0;
}

int cmd_kick(const Config& cfg, const RunOptions& opts) {
    GroundState gs = solve_ground(cfg);
    Vec vp = build_probe(cfg, cfg.model);
    double delta = opts.no_interaction ? 0.0 : opts.delta;
    Drive drive = make_drive(cfg, vp);

    int nsteps = static_cast<int>(cfg.drive.T / cfg.drive.dt);
    int stride = std::max(1, nsteps / 2000);
    Trajectory traj =
        propagate_nonlinear(cfg.model, gs, drive, cfg.drive.T, cfg.drive.dt, stride, delta);
    std::string csv = "t,norm_u,obs\r\n";
    for (size_t k = 0; k < traj.times.size(); ++k) {
        double obs = gs.h * vp.dot(traj.densities[k] - gs.rho0);
        csv += fmt17(traj.times[k]) + "," + fmt17(norm_w(gs.h, traj.states[k])) + "," +
               fmt17(obs) + "\r\n";
    }
    write_text(opts.out_dir + "/trajectory.csv", csv);

    FrequencyGrid fg = FrequencyGrid::linspace(cfg.freq.wmin, cfg.freq.wmax, cfg.freq.nw, cfg.freq.eta);
    SpectrumResult sr =
        kick_spectrum(gs, cfg.model, vp, cfg.drive.T, cfg.drive.dt, fg, delta, cfg.drive.eps);
    write_text(opts.out_dir + "/spectrum.csv", spectrum_csv(sr));
    ordered_json j = meta_block(cfg, opts);
    j["eta"] = fg.eta;
    j["delta"] = delta;
    j["T"] = cfg.drive.T;
    j["dt"] = cfg.drive.dt;
    j["eps"] = cfg.drive.eps;
    write_text(opts.out_dir + "/spectrum_meta.json", j.dump(2) + "\n");
    std::printf("kick: %zu trajectory samples, %d spectrum points\n", traj.times.size(), cfg.freq.nw);
    return 0;
}

int cmd_resonance(const Config& cfg, const RunOptions& opts) {
    GroundState gs = solve_ground(cfg);
    auto ch = TransitionChannel::make(gs, cfg.resonance.i0, cfg.resonance.a0);
    double spacing = level_spacing_near(gs, std::max(ch.e0 + gs.lambda[gs.N() - 1], 0.0));
    double s = cfg.resonance.s > 0 ? cfg.resonance.s : 4.0 * spacing;
    Vec eta_seq = Eigen::Map<const Vec>(cfg.resonance.eta_seq.data(), cfg.resonance.eta_seq.size());

    ordered_json j = meta_block(cfg, opts);
    j["e0"] = ch.e0;
    j["i0"] = ch.i0;
    j["a0"] = ch.a0;
    j["s"] = s;
    j["eta_seq"] = cfg.resonance.eta_seq;
    j["residue"] = residue_check(gs, ch);
    ordered_json results = ordered_json::array();
    for (double d : cfg.resonance.deltas) {
        ResonanceEstimate pe = pole_estimate(gs, cfg.model, ch, d, eta_seq);
        GoldenRuleResult gr = golden_rule_width(gs, cfg.model, ch, d, s);
        ordered_json r = {{"delta", d},
                          {"shift", pe.shift},
                          {"gamma_schur", pe.gamma},
                          {"gamma_golden", gr.gamma},
                          {"open_channels", gr.open_channels},
                          {"channels", std::vector<double>(gr.channels.data(),
                                                           gr.channels.data() + gr.channels.size())}};
        if (cfg.resonance.lorentz && d == cfg.resonance.deltas.back()) {
            Vec vp = build_probe(cfg, cfg.model);
            double G = pe.gamma, eta = G / 2.0;
            double ctr = ch.e0 + pe.shift, span = 2.5 * (G + eta);
            FrequencyGrid fg = FrequencyGrid::linspace(ctr - span, ctr + span, 121, eta);
            SpectrumResult sr = chi_freq(gs, cfg.model, vp, vp, fg, d);
            Vec y(fg.omega.size());
            for (int i = 0; i < y.size(); ++i) y[i] = -sr.values[i].imag();
            LorentzFit fit = fit_lorentzian(fg.omega, y);
            r["gamma_lorentz"] = fit.halfwidth - eta;
            r["lorentz_fwhm"] = 2.0 * fit.halfwidth;
            r["lorentz_eta"] = eta;
        }
        results.push_back(r);
        std::printf("resonance: delta = %g, gamma_schur = %.6e, gamma_golden = %.6e\n",
                    d, pe.gamma, gr.gamma);
    }
    j["results"] = results;
    write_text(opts.out_dir + "/resonance.json", j.dump(2) + "\n");
    return 0;
}

}  // namespace

int run(const Config& cfg, const RunOptions& opts) {
    try {
        std::filesystem::create_directories(opts.out_dir);
        if (opts.command == "scf") return cmd_scf(cfg, opts);
        if (opts.command == "check") return cmd_check(cfg, opts);
        if (opts.command == "spectrum") return cmd_spectrum(cfg, opts);
        if (opts.command == "kick") return cmd_kick(cfg, opts);
        if (opts.command == "resonance") return cmd_resonance(cfg, opts);
        throw ConfigError("unknown command: " + opts.command);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NotAMinimumError& e) {
        std::fprintf(stderr, "not a minimum: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    }
}

}  // namespace tdlr
