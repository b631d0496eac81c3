#pragma once

#include "tdlr/response.hpp"

namespace tdlr {

/// A bound->unbound single-orbital excitation embedded in the discretized
/// continuum, with the safety margins that make its width meaningful.
struct TransitionChannel {
  int i0 = 0;       // occupied orbital index
  int a0 = 0;       // eigenindex (into gs.eigs) of the target level
  double e0 = 0.0;  // bare excitation energy

  /// Validates: target unoccupied, excitation embedded above the ionization
  /// threshold, at least `margin_levels` local level spacings away from
  /// every channel threshold, and both levels simple to gap_tol.
  static TransitionChannel make(const GroundState& gs, int i0, int a0,
                                double gap_tol = 1e-8, double margin_levels = 5.0);
};

struct ResonanceEstimate {
  Complex z_pole;
  double shift = 0.0;     // real level shift (first + second order)
  double gamma = 0.0;     // width, >= 0
  Vec channels;           // per-occupied-orbital contribution to gamma
  double delta = 1.0;
  Vec etas;               // evaluation sequence
  CVec eta_values;        // pole estimate at each eta before extrapolation
};

/// Discrete spectral measure of H0 smoothed by a Gaussian of width s.
struct SpectralMeasure {
  Vec energies;
  Vec weights;
  double s = 0.0;

  double density(double energy) const;  // sum_k w_k G_s(energy - e_k)
};

/// Median spacing of the few eigenvalues of H0 nearest `energy`.
double level_spacing_near(const GroundState& gs, double energy);

/// Doubled unit vector with upper block delta_{i,i0} phi_{a0}, lower block 0.
CasidaVector transition_vector(const GroundState& gs, const TransitionChannel& ch);

/// Scalar Schur complement S(z) of the shifted doubled operator with the
/// transition coordinate eliminated; its zero near e0 is the resonance pole.
Complex schur_complement(const GroundState& gs, const ModelSystem& model, Complex z,
                         double delta, const TransitionChannel& ch);

/// Second-order pole estimate: boundary value of the Schur correction at
/// e0 + i eta extrapolated along eta_seq to eta -> 0+.
ResonanceEstimate pole_estimate(const GroundState& gs, const ModelSystem& model,
                                const TransitionChannel& ch, double delta,
                                const Vec& eta_seq);

struct GoldenRuleResult {
  double gamma = 0.0;
  Vec channels;                    // per-occupied-orbital width, >= 0
  std::vector<int> open_channels;  // occupied indices with e0 + lambda_i > 0
  double s = 0.0;
};

/// Width from the smoothed spectral density of final states: pi * sum over
/// open channels of |coupling|^2 against the measure at energy e0 + lambda_i.
GoldenRuleResult golden_rule_width(const GroundState& gs, const ModelSystem& model,
                                   const TransitionChannel& ch, double delta,
                                   double s);

/// Norm of the density footprint of the transition; ~0 marks a dark line.
double residue_check(const GroundState& gs, const TransitionChannel& ch);

/// Least-squares fit of y(w) = offset + amp / ((w - center)^2 + halfwidth^2).
struct LorentzFit {
  double center = 0.0;
  double halfwidth = 0.0;  // HWHM; FWHM = 2 * halfwidth
  double amp = 0.0;
  double offset = 0.0;
  double rms = 0.0;
};

LorentzFit fit_lorentzian(const Vec& omega, const Vec& y);

}  // namespace tdlr
