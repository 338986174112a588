"""Oscillatory singular integrals along fewnomial phases.

Fewnomials and their scale constants, the bad/good scale decomposition,
certified principal-value multipliers, and ensemble experiments on the
operator norm sup_xi |m(xi)|.
"""

__version__ = "0.1.0"

from .errors import (
    DegeneratePhase,
    EmptyWindow,
    FewnomialError,
    IndexOutOfRange,
    InsufficientPoints,
    InvalidDimensions,
    LinearTermPresent,
    NonIncreasingExponents,
    OscintError,
    PhaseOverflow,
    ToleranceNotMet,
    ZeroCoefficient,
)
from .fewnomial import Fewnomial, ScaleFrame, eval_phase, make_fewnomial, scale_frame
from .decomposition import (
    DEFAULT_GAMMA,
    BadSets,
    DominationReport,
    GoodComponent,
    IntegerInterval,
    PartitionOfUnity,
    bad_set_0,
    bad_set_1,
    bad_sets,
    bump,
    component_cutoff,
    gamma_min,
    good_components,
    verify_domination,
)
from .quadrature import (
    DecayFit,
    GridSpec,
    MultiplierSample,
    SupResult,
    decay_fit,
    default_grid,
    multiplier_sup,
    piece_multiplier,
    pv_multiplier,
)
from .oracle import pv_multiplier_oracle
from .experiments import (
    GrowthSummary,
    PropertyReport,
    SweepRecord,
    logd_scan,
    parissis_growth,
    sample_fewnomial,
    structure_suite,
    uniformity_sweep,
)
