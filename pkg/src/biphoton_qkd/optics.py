"""Station models for the qutrit link.

Alice's side is a two-arm interferometric source: one half-wave plate
splits amplitude between |2,0> and |0,2>, a second sets the |1,1>
weight, and two phase shifters fix the relative phases.  Bob's side is
a bank of three coincidence (Brown-Twiss) analyzers behind a symmetric
three-output splitter; each analyzer is tuned to one state of his
chosen basis and fires on a coincidence with a probability set by the
overlap with the incoming state and the splitter/filter loss chain.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .qutrit import BasisId, Qutrit, StateId, inner, protocol_state

_TWO_PI = 2.0 * math.pi
# Overlap magnitudes below this count as exact extinction (zero coincidence).
ORTHOGONAL_ATOL = 1e-12


class FilterMode(Enum):
    """Loss regime of the analyzers' polarization filters.

    WORST: the filters act independently on the two photons and reject
    half of the otherwise-coincident cases.  BEST: the filters act
    identically on both photons and the coincidence rate no longer
    depends on how the pair was split.
    """

    WORST = "worst"
    BEST = "best"

    @property
    def factor(self) -> float:
        return 0.5 if self is FilterMode.WORST else 1.0


@dataclass(frozen=True)
class ControlSettings:
    """Source controls: two half-wave plate angles and two phase shifts.

    hwp1 splits amplitude between |2,0> and |0,2>; hwp2 sets the |1,1>
    weight; ps1 is the |0,2> phase relative to |2,0>; ps2 the |1,1>
    phase relative to the type-I superposition.  Angles are radians;
    phases are reduced mod 2 pi on construction.
    """

    hwp1: float
    hwp2: float
    ps1: float
    ps2: float

    def __post_init__(self) -> None:
        for name in ("hwp1", "hwp2", "ps1", "ps2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "ps1", self.ps1 % _TWO_PI)
        object.__setattr__(self, "ps2", self.ps2 % _TWO_PI)


@dataclass(frozen=True)
class LossModel:
    """Loss budget of one analyzer bank.

    coincidence_split is the probability that the non-polarizing
    beam splitter sends the two photons to different detectors;
    filter_mode selects the polarization-filter bound; the detector
    efficiency applies per detector (squared for a coincidence).
    """

    filter_mode: FilterMode = FilterMode.WORST
    splitter_outputs: int = 3
    coincidence_split: float = 0.5
    detector_efficiency: float = 1.0

    def __post_init__(self) -> None:
        if self.splitter_outputs != 3:
            raise ValueError("the analyzer bank has exactly three outputs")
        if not 0.0 <= self.coincidence_split <= 1.0:
            raise ValueError("coincidence_split must lie in [0, 1]")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise ValueError("detector_efficiency must lie in (0, 1]")


@dataclass(frozen=True)
class BrownTwissScheme:
    """One coincidence analyzer, tuned to a single polarization state."""

    tuned_state: Qutrit


def prepare(settings: ControlSettings) -> Qutrit:
    """Emit the qutrit produced by the source at the given settings.

    c1 = cos(2 hwp2) cos(2 hwp1), c3 = cos(2 hwp2) sin(2 hwp1) e^{i ps1},
    c2 = sin(2 hwp2) e^{i ps2}; unit norm by construction.
    """
    c_outer = math.cos(2.0 * settings.hwp2)
    return Qutrit(
        c_outer * math.cos(2.0 * settings.hwp1),
        math.sin(2.0 * settings.hwp2) * cmath.exp(1j * settings.ps2),
        c_outer * math.sin(2.0 * settings.hwp1) * cmath.exp(1j * settings.ps1),
    )


@lru_cache(maxsize=None)
def settings_for(basis: int, state: int) -> ControlSettings:
    """Canonical source settings reproducing protocol_state(basis, state).

    The ray's free phase is fixed by making the first nonzero amplitude
    real positive; the canonical solution has plate angles in [0, pi/4]
    and phases in [0, 2 pi).  prepare(settings_for(b, s)) equals the
    protocol state up to a global phase.
    """
    target = protocol_state(BasisId(basis), StateId(state))
    c1, c2, c3 = target.amplitudes()
    for ref in (c1, c2, c3):
        if abs(ref) > ORTHOGONAL_ATOL:
            gauge = ref / abs(ref)
            c1, c2, c3 = c1 / gauge, c2 / gauge, c3 / gauge
            break
    a2 = min(1.0, abs(c2))
    return ControlSettings(
        hwp1=math.atan2(abs(c3), abs(c1)) / 2.0,
        hwp2=math.asin(a2) / 2.0,
        ps1=cmath.phase(c3) if abs(c3) > ORTHOGONAL_ATOL else 0.0,
        ps2=cmath.phase(c2) if abs(c2) > ORTHOGONAL_ATOL else 0.0,
    )


def coincidence_probability(
    scheme: BrownTwissScheme, incoming: Qutrit, loss: LossModel
) -> float:
    """Probability that the analyzer registers a coincidence.

    coincidence_split x filter factor x |<tuned|incoming>|^2 x efficiency^2.
    Overlaps within ORTHOGONAL_ATOL of zero give exactly 0: extinction on
    the orthogonal state is the analyzer's defining criterion, not a limit.
    """
    amplitude = abs(inner(scheme.tuned_state, incoming))
    if amplitude < ORTHOGONAL_ATOL:
        return 0.0
    eff = loss.detector_efficiency
    return (
        loss.coincidence_split
        * loss.filter_mode.factor
        * amplitude
        * amplitude
        * eff
        * eff
    )


def measure(incoming: Qutrit, bob_basis: int, loss: LossModel, rng) -> StateId | None:
    """One analyzer-bank trial; returns the fired scheme's StateId or None.

    The splitter routes the pulse to one of the three schemes uniformly;
    scheme k is tuned to protocol_state(bob_basis, k).  Consumes exactly
    two rng draws (route, coincidence) regardless of the outcome.
    """
    k = rng.randint(loss.splitter_outputs)
    scheme = BrownTwissScheme(protocol_state(bob_basis, k))
    p = coincidence_probability(scheme, incoming, loss)
    return StateId(k) if rng.uniform() < p else None
