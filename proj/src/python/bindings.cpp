#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tdlr/dynamics.hpp"
#include "tdlr/resonance.hpp"
#include "tdlr/response.hpp"

namespace py = pybind11;
using namespace tdlr;

PYBIND11_MODULE(_tdlr, m) {
    m.doc() = "1D mean-field linear response and resonance toolbox";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NotAMinimumError>(m, "NotAMinimumError");
    py::register_exception<NumericalError>(m, "NumericalError");

    py::class_<GridSpec>(m, "GridSpec")
        .def_static("uniform", &GridSpec::uniform, py::arg("n"), py::arg("L"))
        .def_readonly("n", &GridSpec::n)
        .def_readonly("L", &GridSpec::L)
        .def_readonly("h", &GridSpec::h)
        .def_readonly("x", &GridSpec::x);

    py::class_<SoftCoulombParams>(m, "SoftCoulombParams")
        .def(py::init<double, double, double>(), py::arg("a"), py::arg("Z"), py::arg("a_ext"))
        .def_readwrite("a", &SoftCoulombParams::a)
        .def_readwrite("Z", &SoftCoulombParams::Z)
        .def_readwrite("a_ext", &SoftCoulombParams::a_ext);

    py::class_<XcPolynomial>(m, "XcPolynomial")
        .def(py::init<double, double, double>(), py::arg("c2") = 0.0, py::arg("c3") = 0.0,
             py::arg("c4") = 0.0)
        .def_readwrite("c2", &XcPolynomial::c2)
        .def_readwrite("c3", &XcPolynomial::c3)
        .def_readwrite("c4", &XcPolynomial::c4);

    py::class_<ModelSystem>(m, "ModelSystem")
        .def(py::init([](int n, double L, double a, double Z, double a_ext, double c2, double c3,
                         double c4, int N) {
                 ModelSystem ms;
                 ms.grid = GridSpec::uniform(n, L);
                 ms.sc = {a, Z, a_ext};
                 ms.xc = {c2, c3, c4};
                 ms.N = N;
                 return ms;
             }),
             py::arg("n"), py::arg("L"), py::arg("a"), py::arg("Z"), py::arg("a_ext"),
             py::arg("c2") = 0.0, py::arg("c3") = 0.0, py::arg("c4") = 0.0, py::arg("N") = 1)
        .def_readonly("grid", &ModelSystem::grid)
        .def_readonly("N", &ModelSystem::N);

    py::class_<ScfOptions>(m, "ScfOptions")
        .def(py::init<>())
        .def_readwrite("tol", &ScfOptions::tol)
        .def_readwrite("max_iter", &ScfOptions::max_iter)
        .def_readwrite("mixing", &ScfOptions::mixing)
        .def_readwrite("occupation", &ScfOptions::occupation);

    py::class_<GroundState>(m, "GroundState")
        .def_readonly("orbitals", &GroundState::orbitals)
        .def_readonly("lam", &GroundState::lambda)
        .def_readonly("rho0", &GroundState::rho0)
        .def_readonly("energy", &GroundState::energy)
        .def_readonly("gamma", &GroundState::gamma)
        .def_readonly("eigs", &GroundState::eigs)
        .def_readonly("occupied", &GroundState::occupied)
        .def_readonly("aufbau", &GroundState::aufbau)
        .def_readonly("h", &GroundState::h);

    m.def("minimize", &minimize, py::arg("model"), py::arg("options") = ScfOptions{});
    m.def("coercivity_constant", &coercivity_constant, py::arg("model"), py::arg("gs"));
    m.def("energy", &energy, py::arg("model"), py::arg("orbitals"));
    m.def("hartree_potential", &hartree_potential, py::arg("model"), py::arg("rho"));
    m.def("s0_apply", &s0_apply, py::arg("gs"), py::arg("u"));
    m.def("k0_apply", &k0_apply, py::arg("model"), py::arg("gs"), py::arg("u"),
          py::arg("delta") = 1.0);
    m.def("subspace_distance", &subspace_distance, py::arg("h"), py::arg("psi"), py::arg("phi"));
    m.def(
        "chi_time",
        [](const GroundState& gs, const ModelSystem& model, const Vec& vp, double t, double delta) {
            return chi_time(gs, model, vp, t, delta);
        },
        py::arg("gs"), py::arg("model"), py::arg("v_p"), py::arg("t"), py::arg("delta") = 1.0);
    m.def(
        "chi_freq",
        [](const GroundState& gs, const ModelSystem& model, const Vec& vp, const Vec& w,
           const Vec& omega, double eta, double delta) {
            FrequencyGrid fg;
            fg.omega = omega;
            fg.eta = eta;
            fg.validate();
            SpectrumResult sr = chi_freq(gs, model, vp, w, fg, delta);
            return std::make_pair(sr.omega, sr.values);
        },
        py::arg("gs"), py::arg("model"), py::arg("v_p"), py::arg("w"), py::arg("omega"),
        py::arg("eta"), py::arg("delta") = 1.0);
    m.def("dyson_residual",
          [](const GroundState& gs, const ModelSystem& model, const Vec& omega, double eta,
             double delta) {
              FrequencyGrid fg;
              fg.omega = omega;
              fg.eta = eta;
              fg.validate();
              return dyson_residual(gs, model, fg, delta);
          },
          py::arg("gs"), py::arg("model"), py::arg("omega"), py::arg("eta"),
          py::arg("delta") = 1.0);

    py::class_<TransitionChannel>(m, "TransitionChannel")
        .def_static("make", &TransitionChannel::make, py::arg("gs"), py::arg("i0"), py::arg("a0"),
                    py::arg("gap_tol") = 1e-8, py::arg("margin_levels") = 5.0)
        .def_readonly("i0", &TransitionChannel::i0)
        .def_readonly("a0", &TransitionChannel::a0)
        .def_readonly("e0", &TransitionChannel::e0);

    py::class_<ResonanceEstimate>(m, "ResonanceEstimate")
        .def_readonly("z_pole", &ResonanceEstimate::z_pole)
        .def_readonly("shift", &ResonanceEstimate::shift)
        .def_readonly("gamma", &ResonanceEstimate::gamma)
        .def_readonly("channels", &ResonanceEstimate::channels)
        .def_readonly("delta", &ResonanceEstimate::delta);

    py::class_<GoldenRuleResult>(m, "GoldenRuleResult")
        .def_readonly("gamma", &GoldenRuleResult::gamma)
        .def_readonly("channels", &GoldenRuleResult::channels)
        .def_readonly("open_channels", &GoldenRuleResult::open_channels)
        .def_readonly("s", &GoldenRuleResult::s);

    m.def("level_spacing_near", &level_spacing_near, py::arg("gs"), py::arg("energy"));
    m.def("pole_estimate", &pole_estimate, py::arg("gs"), py::arg("model"), py::arg("channel"),
          py::arg("delta"), py::arg("eta_seq"));
    m.def("golden_rule_width", &golden_rule_width, py::arg("gs"), py::arg("model"),
          py::arg("channel"), py::arg("delta"), py::arg("s"));
    m.def("residue_check", &residue_check, py::arg("gs"), py::arg("channel"));
}
