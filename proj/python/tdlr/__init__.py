"""1D mean-field linear response and resonance toolbox."""

from _tdlr import (  # noqa: F401
    ConfigError,
    GoldenRuleResult,
    GridSpec,
    GroundState,
    ModelSystem,
    NotAMinimumError,
    NumericalError,
    ResonanceEstimate,
    ScfOptions,
    SoftCoulombParams,
    TransitionChannel,
    XcPolynomial,
    chi_freq,
    chi_time,
    coercivity_constant,
    dyson_residual,
    energy,
    golden_rule_width,
    hartree_potential,
    k0_apply,
    level_spacing_near,
    minimize,
    pole_estimate,
    residue_check,
    s0_apply,
    subspace_distance,
)

__version__ = "0.1.0"
