#pragma once

#include "tdlr/dynamics.hpp"

namespace tdlr {

struct FrequencyGrid {
  Vec omega;    // increasing
  double eta = 5e-3;

  static FrequencyGrid linspace(double w_min, double w_max, int n_w, double eta);
  void validate() const;
};

struct SpectrumResult {
  Vec omega;
  CVec values;  // <W | chi_hat(omega) V_P>
  double eta = 0.0;
  double delta = 1.0;
};

/// Time-domain density response to an impulsive V_P: zero for t < 0, else
/// the propagated perturbation contracted back to a density variation.
Vec chi_time(const GroundState& gs, const ModelSystem& model, const Vec& v_p,
             double t, double delta = 1.0);

/// Same over many times, reusing one propagator factorization.
std::vector<Vec> chi_time_series(const GroundState& gs, const ModelSystem& model,
                                 const Vec& v_p, const std::vector<double>& times,
                                 double delta = 1.0);

/// Frequency-domain response <W | chi_hat(omega + i eta) V_P> via shifted
/// solves on the unoccupied subspace; omega points are processed in
/// parallel, results ordered by omega.
SpectrumResult chi_freq(const GroundState& gs, const ModelSystem& model,
                        const Vec& v_p, const Vec& w, const FrequencyGrid& freq,
                        double delta = 1.0, int threads = 0);

/// Full potential -> density response matrix at one shift z = omega + i eta.
CMat chi_matrix(const GroundState& gs, const ReducedSpace& red, Complex z);

/// Max relative residual over the grid of the self-consistency identity
/// chi = chi0 + chi0 * f_hxc * chi between the coupled and uncoupled
/// response matrices (exact at the discrete level).
double dyson_residual(const GroundState& gs, const ModelSystem& model,
                      const FrequencyGrid& freq, double delta = 1.0);

/// Dynamical route to the same spectrum: short Gaussian impulse, full
/// nonlinear propagation, damped Fourier transform of the density signal
/// deconvolved by the pulse shape.
SpectrumResult kick_spectrum(const GroundState& gs, const ModelSystem& model,
                             const Vec& v_p, double T, double dt,
                             const FrequencyGrid& freq, double delta = 1.0,
                             double eps = 1e-3);

}  // namespace tdlr
