"""Amplitude algebra for single-mode biphoton qutrits.

A qutrit is a unit complex triple (c1, c2, c3) over the two-photon Fock
states |2,0>, |1,1>, |0,2> of one spatial/frequency mode with H/V
polarization components.  This module builds the four mutually unbiased
bases used by the key-distribution protocol (12 states total) and the
ray-equality predicate: physical states are rays, so two vectors that
differ only by a global phase are the same state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

# A construction-time norm deviation beyond this is a logic error, not
# rounding; anything smaller is divided out, leaving stored norms within
# 1e-12 of 1.
_REJECT_ATOL = 1e-9


class BasisId(IntEnum):
    """The four protocol bases; 0 is the natural HV Fock basis."""

    NATURAL = 0
    PRIME = 1
    DOUBLE_PRIME = 2
    TRIPLE_PRIME = 3


class StateId(IntEnum):
    """Position of a state inside one basis; doubles as the trit alphabet."""

    ALPHA = 0
    BETA = 1
    GAMMA = 2


@dataclass(frozen=True)
class Qutrit:
    """Unit-norm amplitude triple (renormalized on construction).

    Rejects non-finite amplitudes and norms more than 1e-9 away from 1;
    smaller deviations are treated as accumulated rounding and divided out.
    """

    c1: complex
    c2: complex
    c3: complex

    def __post_init__(self) -> None:
        c1, c2, c3 = complex(self.c1), complex(self.c2), complex(self.c3)
        for c in (c1, c2, c3):
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("qutrit amplitudes must be finite")
        norm = math.sqrt(abs(c1) ** 2 + abs(c2) ** 2 + abs(c3) ** 2)
        if abs(norm - 1.0) > _REJECT_ATOL:
            raise ValueError(
                f"amplitude norm {norm:.12g} deviates from 1 beyond {_REJECT_ATOL:g}"
            )
        object.__setattr__(self, "c1", c1 / norm)
        object.__setattr__(self, "c2", c2 / norm)
        object.__setattr__(self, "c3", c3 / norm)

    @classmethod
    def from_unnormalized(cls, c1: complex, c2: complex, c3: complex) -> "Qutrit":
        """Scale an arbitrary nonzero finite triple to unit norm."""
        c1, c2, c3 = complex(c1), complex(c2), complex(c3)
        norm = math.sqrt(abs(c1) ** 2 + abs(c2) ** 2 + abs(c3) ** 2)
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite amplitude triple")
        return cls(c1 / norm, c2 / norm, c3 / norm)

    def amplitudes(self) -> tuple[complex, complex, complex]:
        return (self.c1, self.c2, self.c3)


@dataclass(frozen=True)
class MubSet:
    """The four ordered protocol bases, 4 x 3 states."""

    bases: tuple[tuple[Qutrit, Qutrit, Qutrit], ...]


def inner(a: Qutrit, b: Qutrit) -> complex:
    """Hermitian inner product <a|b> = sum conj(a_k) b_k."""
    return (
        a.c1.conjugate() * b.c1
        + a.c2.conjugate() * b.c2
        + a.c3.conjugate() * b.c3
    )


def equal_up_to_global_phase(a: Qutrit, b: Qutrit, tol: float = 1e-9) -> bool:
    """True when a and b are the same ray: |<a|b>| >= 1 - tol."""
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    return abs(inner(a, b)) >= 1.0 - tol


@lru_cache(maxsize=1)
def mub_set() -> MubSet:
    """Build the 12 protocol states.

    Basis 0 is the HV Fock basis.  Bases 1-3 have uniform amplitudes
    1/sqrt(3) with phase patterns drawn from the cube roots of unity;
    every cross-basis overlap has squared modulus 1/3.
    """
    w = cmath.exp(2j * math.pi / 3)
    wb = w.conjugate()
    r = 1.0 / math.sqrt(3.0)

    def q(x: complex, y: complex, z: complex) -> Qutrit:
        return Qutrit(r * x, r * y, r * z)

    basis0 = (Qutrit(1, 0, 0), Qutrit(0, 1, 0), Qutrit(0, 0, 1))
    basis1 = (q(1, 1, 1), q(1, w, wb), q(1, wb, w))
    basis2 = (q(w, 1, 1), q(1, w, 1), q(1, 1, w))
    basis3 = (q(wb, 1, 1), q(1, wb, 1), q(1, 1, wb))
    return MubSet((basis0, basis1, basis2, basis3))


def protocol_state(basis: int, state: int) -> Qutrit:
    """The (basis, state) entry of mub_set(); ids are range-checked."""
    return mub_set().bases[BasisId(basis)][StateId(state)]
