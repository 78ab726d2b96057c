"""Bell-CHSH analysis of continuous phase-resolved measurement records."""

__version__ = "0.1.0"

from .chsh_core import (  # noqa: E402
    CHSHEstimate,
    SettingsQuad,
    canonical_settings,
    chsh_combine,
    grid_max_chsh,
    s_max_visibility,
)
from .circular_stats import (  # noqa: E402
    Histogram,
    PhaseGrid,
    PointMass,
    Uniform,
    WrappedGaussian,
    gamma_of_density,
    harmonic_moment,
)
from .estimator_pipeline import (  # noqa: E402
    analyze_record,
    chsh_raw,
    chsh_reduced,
    estimate_gamma,
    estimate_local,
)
from .quantum_oracle import chsh_traditional  # noqa: E402
from .record_synth import (  # noqa: E402
    ClassicalDeterministic,
    ClassicalSharedLambda,
    PhaseDiffusion,
    QuantumLocked,
    synth_pair,
)
