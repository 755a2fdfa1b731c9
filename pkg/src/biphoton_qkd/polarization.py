"""Polarization observables of a biphoton qutrit.

Stokes parameters of the two-photon field, the degree of polarization,
the two-point Poincare-sphere picture (each photon of the pair is one
point on the sphere) with its inverse, and the wave-plate action on the
amplitude triple.

The two-point mapping factors the state into a symmetrized product of
two single-photon creation operators a(theta, phi) = cos(theta/2) a_H +
e^{i phi} sin(theta/2) a_V.  Writing t = e^{i phi} tan(theta/2) for the
stereographic coordinate of a photon, the two coordinates are the roots
of

    c1 t^2 - sqrt(2) c2 t + c3 = 0.

When c1 or c3 vanishes the quadratic degenerates and a root moves to a
pole of the sphere, so this single code path covers every unit-norm
input with no singular branches.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .qutrit import Qutrit

_SQRT2 = math.sqrt(2.0)
_TWO_PI = 2.0 * math.pi
# |c1| below this is treated as an exact degeneracy (root at the V pole).
_DEGENERATE_ATOL = 1e-300


@dataclass(frozen=True)
class StokesVector:
    """Stokes parameters in photon-number units (s0 is the photon count)."""

    s0: float
    s1: float
    s2: float
    s3: float

    def polarized_magnitude(self) -> float:
        return math.sqrt(self.s1 ** 2 + self.s2 ** 2 + self.s3 ** 2)


@dataclass(frozen=True)
class PhotonPoint:
    """A single photon's position on the Poincare sphere.

    theta is the polar angle in [0, pi] (0 = H pole), phi the azimuthal
    angle in [0, 2 pi).
    """

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta {self.theta!r} outside [0, pi]")
        if not 0.0 <= self.phi < _TWO_PI:
            raise ValueError(f"phi {self.phi!r} outside [0, 2 pi)")

    def unit_vector(self) -> tuple[float, float, float]:
        """Radius vector in (s1, s2, s3) component order."""
        st = math.sin(self.theta)
        return (math.cos(self.theta), st * math.cos(self.phi), st * math.sin(self.phi))


@dataclass(frozen=True)
class WavePlateSetting:
    """A retarder: retardance in radians, fast axis measured from vertical."""

    retardance: float
    axis_angle: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.retardance) and math.isfinite(self.axis_angle)):
            raise ValueError("wave-plate parameters must be finite")
        object.__setattr__(self, "retardance", self.retardance % _TWO_PI)

    @classmethod
    def half_wave(cls, axis_angle: float) -> "WavePlateSetting":
        return cls(math.pi, axis_angle)

    @classmethod
    def quarter_wave(cls, axis_angle: float) -> "WavePlateSetting":
        return cls(math.pi / 2.0, axis_angle)


def stokes(q: Qutrit) -> StokesVector:
    """Stokes parameters of the two-photon state.

    On the three-dimensional Fock representation: <n_H> = 2|c1|^2 + |c2|^2,
    <n_V> = 2|c3|^2 + |c2|^2 and <a_H^+ a_V> = sqrt(2)(conj(c1) c2 +
    conj(c2) c3); s2 and s3 are twice the real and imaginary parts of the
    cross moment.
    """
    n_h = 2.0 * abs(q.c1) ** 2 + abs(q.c2) ** 2
    n_v = 2.0 * abs(q.c3) ** 2 + abs(q.c2) ** 2
    cross = _SQRT2 * (q.c1.conjugate() * q.c2 + q.c2.conjugate() * q.c3)
    return StokesVector(n_h + n_v, n_h - n_v, 2.0 * cross.real, 2.0 * cross.imag)


def degree_of_polarization(q: Qutrit) -> float:
    """P = |(s1, s2, s3)| / s0, clamped into [0, 1] against rounding."""
    s = stokes(q)
    return min(1.0, s.polarized_magnitude() / s.s0)


def dop_from_alpha(alpha: float) -> float:
    """Polarization degree from the central angle between the pair's points.

    P = 2 cos(alpha/2) / (1 + cos^2(alpha/2)) for alpha in [0, pi].
    """
    if not 0.0 <= alpha <= math.pi:
        raise ValueError(f"alpha {alpha!r} outside [0, pi]")
    c = math.cos(alpha / 2.0)
    return min(1.0, 2.0 * c / (1.0 + c * c))


def angle_between(p: PhotonPoint, p2: PhotonPoint) -> float:
    """Central angle between two Poincare points (arccos clamped)."""
    d = sum(x * y for x, y in zip(p.unit_vector(), p2.unit_vector()))
    return math.acos(min(1.0, max(-1.0, d)))


def _root_to_point(t: complex) -> PhotonPoint:
    r = abs(t)
    if r == 0.0:
        return PhotonPoint(0.0, 0.0)
    phi = math.atan2(t.imag, t.real) % _TWO_PI
    if phi >= _TWO_PI:  # atan2 returning -0.0-adjacent values can wrap to 2 pi
        phi = 0.0
    return PhotonPoint(2.0 * math.atan(r), phi)


_V_POLE = PhotonPoint(math.pi, 0.0)


def poincare_points(q: Qutrit) -> tuple[PhotonPoint, PhotonPoint]:
    """The two single-photon Poincare points of the pair.

    Roots of the stereographic quadratic, in canonical order (sorted by
    theta, then phi).  The pole phases are canonicalized to phi = 0.
    """
    a, b, c = q.c1, -_SQRT2 * q.c2, q.c3
    if abs(a) < _DEGENERATE_ATOL:
        if abs(b) < _DEGENERATE_ATOL:
            pts = [_V_POLE, _V_POLE]  # only |0,2> populated: both photons V
        else:
            pts = [_root_to_point(-c / b), _V_POLE]
    else:
        # Citardauq-style split avoids cancellation between -b and the radical.
        sq = cmath.sqrt(b * b - 4.0 * a * c)
        half = -(b + sq) / 2.0 if abs(b + sq) >= abs(b - sq) else -(b - sq) / 2.0
        if half == 0.0:  # b = 0 and c = 0: both roots at the H pole
            pts = [PhotonPoint(0.0, 0.0), PhotonPoint(0.0, 0.0)]
        else:
            pts = [_root_to_point(half / a), _root_to_point(c / half)]
    pts.sort(key=lambda p: (p.theta, p.phi))
    return (pts[0], pts[1])


def from_poincare(p: PhotonPoint, p2: PhotonPoint) -> Qutrit:
    """Normalized symmetrized two-photon state for a pair of points.

    Expands a(theta, phi)^+ a(theta', phi')^+ |vac> over the Fock triple;
    exactly symmetric under swapping the two points.
    """
    u1 = math.cos(p.theta / 2.0)
    z1 = cmath.exp(1j * p.phi) * math.sin(p.theta / 2.0)
    u2 = math.cos(p2.theta / 2.0)
    z2 = cmath.exp(1j * p2.phi) * math.sin(p2.theta / 2.0)
    # Products grouped pairwise so the result is bitwise swap-symmetric.
    return Qutrit.from_unnormalized(
        _SQRT2 * (u1 * u2),
        u1 * z2 + z1 * u2,
        _SQRT2 * (z1 * z2),
    )


def jones_matrix(w: WavePlateSetting) -> np.ndarray:
    """2x2 unitary of the retarder on the (H, V) mode pair."""
    # Axis angle is referenced to vertical; rotate into the H-referenced frame.
    th = w.axis_angle + math.pi / 2.0
    c, s = math.cos(th), math.sin(th)
    rot = np.array([[c, -s], [s, c]], dtype=complex)
    return rot @ np.diag([1.0, cmath.exp(1j * w.retardance)]) @ rot.T


def _pair_matrix(j: np.ndarray) -> np.ndarray:
    """Induced 3x3 unitary on (c1, c2, c3): the symmetric square of j."""
    (j11, j12), (j21, j22) = j
    return np.array(
        [
            [j11 * j11, _SQRT2 * j11 * j12, j12 * j12],
            [_SQRT2 * j11 * j21, j11 * j22 + j12 * j21, _SQRT2 * j12 * j22],
            [j21 * j21, _SQRT2 * j21 * j22, j22 * j22],
        ],
        dtype=complex,
    )


def apply_waveplate(q: Qutrit, w: WavePlateSetting) -> Qutrit:
    """Act with a wave plate on both photons of the pair.

    The plate's 2x2 unitary on the mode operators induces a 3x3 unitary
    on the amplitude triple; the degree of polarization is invariant.
    """
    out = _pair_matrix(jones_matrix(w)) @ np.array(q.amplitudes())
    return Qutrit.from_unnormalized(out[0], out[1], out[2])
