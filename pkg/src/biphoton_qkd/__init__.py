"""Simulator for the four-basis biphoton-qutrit key distribution protocol.

The library covers the qutrit amplitude algebra and its four mutually
unbiased bases, the polarization observables (Stokes parameters, degree
of polarization, two-point Poincare picture), the optical station models
(interferometric source, coincidence-analyzer bank with its loss chain)
and the end-to-end session engine with optional intercept-resend
eavesdropping.  The ``biphoton-qkd`` CLI fronts the session engine.
"""

from .optics import (
    BrownTwissScheme,
    ControlSettings,
    FilterMode,
    LossModel,
    coincidence_probability,
    measure,
    prepare,
    settings_for,
)
from .polarization import (
    PhotonPoint,
    StokesVector,
    WavePlateSetting,
    angle_between,
    apply_waveplate,
    degree_of_polarization,
    dop_from_alpha,
    from_poincare,
    poincare_points,
    stokes,
)
from .protocol import (
    Eavesdropper,
    PulseLog,
    PulseRecord,
    RandomStream,
    SessionConfig,
    SessionStats,
    alice_choose,
    eve_intercept_resend,
    run_session,
    sift,
)
from .qutrit import (
    BasisId,
    MubSet,
    Qutrit,
    StateId,
    equal_up_to_global_phase,
    inner,
    mub_set,
    protocol_state,
)

__version__ = "0.1.0"

__all__ = [
    "BasisId",
    "BrownTwissScheme",
    "ControlSettings",
    "Eavesdropper",
    "FilterMode",
    "LossModel",
    "MubSet",
    "PhotonPoint",
    "PulseLog",
    "PulseRecord",
    "Qutrit",
    "RandomStream",
    "SessionConfig",
    "SessionStats",
    "StateId",
    "StokesVector",
    "WavePlateSetting",
    "alice_choose",
    "angle_between",
    "apply_waveplate",
    "coincidence_probability",
    "degree_of_polarization",
    "dop_from_alpha",
    "equal_up_to_global_phase",
    "eve_intercept_resend",
    "from_poincare",
    "inner",
    "measure",
    "mub_set",
    "poincare_points",
    "prepare",
    "protocol_state",
    "run_session",
    "settings_for",
    "sift",
    "stokes",
]
