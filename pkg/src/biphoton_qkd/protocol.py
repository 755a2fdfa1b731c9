"""End-to-end key-session engine.

Per pulse: Alice draws a basis and a state and emits the corresponding
qutrit from her source; an optional intercept-resend eavesdropper
projects it in a random basis and resends the outcome; Bob draws a
basis and runs one analyzer-bank trial.  Sifting keeps the pulses whose
bases matched and whose analyzer actually fired; undetected pulses are
announced as lost.

Randomness discipline: every draw consumes exactly one uniform variate
from the session stream and each step has a fixed budget (2 draws for
alice_choose, 2 for the eavesdropper, 1 for Bob's basis, 2 for measure),
so a session is replayable from its seed alone.  run_session consumes
the same flat variate sequence in vectorized blocks: a session produces
bit-identical records to a per-pulse loop over the scalar operations
with the same seed.
"""

from __future__ import annotations

import operator
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .optics import BrownTwissScheme, LossModel, coincidence_probability, prepare, settings_for
from .qutrit import BasisId, Qutrit, StateId, inner, mub_set, protocol_state

_CHUNK = 1 << 18


class Eavesdropper(Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept-resend"


class RandomStream:
    """Deterministic uniform stream (PCG64); one variate per draw.

    The same seed yields the same sequence on every platform, and
    uniform_block(n) returns exactly the values of n uniform() calls,
    which is what lets the vectorized session replay the scalar one.
    """

    __slots__ = ("_gen",)

    def __init__(self, seed: int):
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def uniform(self) -> float:
        """One double in [0, 1)."""
        return float(self._gen.random())

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n); consumes exactly one variate."""
        return min(int(self.uniform() * n), n - 1)

    def uniform_block(self, n: int) -> np.ndarray:
        return self._gen.random(n)


@dataclass(frozen=True)
class SessionConfig:
    n_pulses: int
    seed: int
    eavesdropper: Eavesdropper = Eavesdropper.NONE
    loss: LossModel = field(default_factory=LossModel)

    def __post_init__(self) -> None:
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class PulseRecord:
    """Everything that happened to one pulse; eve fields only when present."""

    alice_basis: BasisId
    alice_state: StateId
    eve_basis: BasisId | None
    eve_outcome: StateId | None
    bob_basis: BasisId
    bob_outcome: StateId | None

    def __post_init__(self) -> None:
        if (self.eve_basis is None) != (self.eve_outcome is None):
            raise ValueError("eve_basis and eve_outcome must be set together")


@dataclass(frozen=True)
class SessionStats:
    n_pulses: int
    n_basis_matched: int
    n_registered_matched: int
    sifted_length: int
    trit_error_rate: float
    total_loss_fraction: float

    def __post_init__(self) -> None:
        if not 0 <= self.n_basis_matched <= self.n_pulses:
            raise ValueError("n_basis_matched out of range")
        if not 0 <= self.n_registered_matched <= self.n_basis_matched:
            raise ValueError("n_registered_matched out of range")
        if self.sifted_length != self.n_registered_matched:
            raise ValueError("sifted_length must equal n_registered_matched")
        if not 0.0 <= self.trit_error_rate <= 1.0:
            raise ValueError("trit_error_rate out of range")
        if not 0.0 <= self.total_loss_fraction <= 1.0:
            raise ValueError("total_loss_fraction out of range")


class PulseLog(Sequence):
    """Columnar per-pulse trace; indexing materializes PulseRecord values.

    Columns are int8 arrays; -1 marks a missing outcome (no detection)
    and the eve columns are absent entirely when no eavesdropper ran.
    """

    __slots__ = ("alice_basis", "alice_state", "eve_basis", "eve_outcome",
                 "bob_basis", "bob_outcome")

    def __init__(self, alice_basis, alice_state, eve_basis, eve_outcome,
                 bob_basis, bob_outcome):
        self.alice_basis = alice_basis
        self.alice_state = alice_state
        self.eve_basis = eve_basis
        self.eve_outcome = eve_outcome
        self.bob_basis = bob_basis
        self.bob_outcome = bob_outcome

    def __len__(self) -> int:
        return len(self.alice_basis)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        i = operator.index(i)
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError("pulse index out of range")
        out = self.bob_outcome[i]
        if self.eve_basis is None:
            eve_b = eve_o = None
        else:
            eve_b = BasisId(int(self.eve_basis[i]))
            eve_o = StateId(int(self.eve_outcome[i]))
        return PulseRecord(
            alice_basis=BasisId(int(self.alice_basis[i])),
            alice_state=StateId(int(self.alice_state[i])),
            eve_basis=eve_b,
            eve_outcome=eve_o,
            bob_basis=BasisId(int(self.bob_basis[i])),
            bob_outcome=StateId(int(out)) if out >= 0 else None,
        )


def alice_choose(rng: RandomStream) -> tuple[BasisId, StateId, Qutrit]:
    """Draw a uniform basis and state, emit the source output (2 draws)."""
    basis = BasisId(rng.randint(4))
    state = StateId(rng.randint(3))
    return basis, state, prepare(settings_for(basis, state))


def _eve_measure(q: Qutrit, rng: RandomStream) -> tuple[BasisId, StateId, Qutrit]:
    """Ideal projective measurement in a random basis (2 draws)."""
    basis = BasisId(rng.randint(4))
    u = rng.uniform()
    states = mub_set().bases[basis]
    p0 = abs(inner(states[0], q)) ** 2
    p1 = abs(inner(states[1], q)) ** 2
    outcome = 0 if u < p0 else (1 if u < p0 + p1 else 2)
    return basis, StateId(outcome), states[outcome]


def eve_intercept_resend(q: Qutrit, rng: RandomStream) -> Qutrit:
    """Intercept-resend attack: lossless projection, resend the outcome.

    Eve's basis is uniform over the four; the returned state is the
    basis state she observed.  Consumes exactly two rng draws.
    """
    return _eve_measure(q, rng)[2]


def _emitted_states() -> list[Qutrit]:
    return [prepare(settings_for(b, s)) for b in range(4) for s in range(3)]


def _detection_table(loss: LossModel, incoming: list[Qutrit]) -> np.ndarray:
    """p[bob_basis, scheme, state_index] via the scalar coincidence law."""
    table = [
        [
            [
                coincidence_probability(
                    BrownTwissScheme(protocol_state(bb, k)), q, loss
                )
                for q in incoming
            ]
            for k in range(3)
        ]
        for bb in range(4)
    ]
    return np.array(table, dtype=np.float64)


def _eve_thresholds(incoming: list[Qutrit]) -> np.ndarray:
    """Cumulative outcome thresholds (p0, p0+p1) per eve basis and input."""
    bases = mub_set().bases
    table = []
    for e in range(4):
        states = bases[e]
        row = []
        for q in incoming:
            p0 = abs(inner(states[0], q)) ** 2
            p1 = abs(inner(states[1], q)) ** 2
            row.append((p0, p0 + p1))
        table.append(row)
    return np.array(table, dtype=np.float64)


def run_session(cfg: SessionConfig) -> tuple[SessionStats, PulseLog]:
    """Run a full session; deterministic given cfg (seed included).

    Returns the aggregate statistics and the per-pulse trace.  The trace
    is bit-identical to driving alice_choose / eve_intercept_resend /
    measure per pulse with a fresh RandomStream(cfg.seed).
    """
    rng = RandomStream(cfg.seed)
    eve_on = cfg.eavesdropper is Eavesdropper.INTERCEPT_RESEND
    n = cfg.n_pulses
    cols = 7 if eve_on else 5

    emitted = _emitted_states()
    resent = [mub_set().bases[b][s] for b in range(4) for s in range(3)]
    det_emitted = _detection_table(cfg.loss, emitted)
    det_resent = _detection_table(cfg.loss, resent) if eve_on else None
    eve_cum = _eve_thresholds(emitted) if eve_on else None

    alice_b = np.empty(n, dtype=np.int8)
    alice_s = np.empty(n, dtype=np.int8)
    eve_b = np.empty(n, dtype=np.int8) if eve_on else None
    eve_o = np.empty(n, dtype=np.int8) if eve_on else None
    bob_b = np.empty(n, dtype=np.int8)
    bob_o = np.empty(n, dtype=np.int8)

    n_matched = 0
    n_registered = 0
    n_errors = 0

    start = 0
    while start < n:
        m = min(_CHUNK, n - start)
        u = rng.uniform_block(m * cols).reshape(m, cols)
        ab = np.minimum((u[:, 0] * 4).astype(np.int64), 3)
        a_state = np.minimum((u[:, 1] * 3).astype(np.int64), 2)
        src = ab * 3 + a_state
        if eve_on:
            eb = np.minimum((u[:, 2] * 4).astype(np.int64), 3)
            cum = eve_cum[eb, src]
            ej = (u[:, 3, None] >= cum).sum(axis=1)
            bb = np.minimum((u[:, 4] * 4).astype(np.int64), 3)
            k = np.minimum((u[:, 5] * 3).astype(np.int64), 2)
            p = det_resent[bb, k, eb * 3 + ej]
            detected = u[:, 6] < p
        else:
            bb = np.minimum((u[:, 2] * 4).astype(np.int64), 3)
            k = np.minimum((u[:, 3] * 3).astype(np.int64), 2)
            p = det_emitted[bb, k, src]
            detected = u[:, 4] < p

        stop = start + m
        alice_b[start:stop] = ab
        alice_s[start:stop] = a_state
        bob_b[start:stop] = bb
        bob_o[start:stop] = np.where(detected, k, -1)
        if eve_on:
            eve_b[start:stop] = eb
            eve_o[start:stop] = ej

        matched = ab == bb
        hit = matched & detected
        n_matched += int(matched.sum())
        n_registered += int(hit.sum())
        n_errors += int((hit & (k != a_state)).sum())
        start = stop

    stats = SessionStats(
        n_pulses=n,
        n_basis_matched=n_matched,
        n_registered_matched=n_registered,
        sifted_length=n_registered,
        trit_error_rate=n_errors / n_registered if n_registered else 0.0,
        total_loss_fraction=1.0 - n_registered / n,
    )
    log = PulseLog(alice_b, alice_s, eve_b, eve_o, bob_b, bob_o)
    return stats, log


def sift(records) -> tuple[list[int], list[int]]:
    """Keep matched-basis registered pulses; return (alice, bob) trits."""
    if isinstance(records, PulseLog):
        keep = (records.alice_basis == records.bob_basis) & (records.bob_outcome >= 0)
        return (
            records.alice_state[keep].tolist(),
            records.bob_outcome[keep].tolist(),
        )
    alice: list[int] = []
    bob: list[int] = []
    for rec in records:
        if rec.alice_basis == rec.bob_basis and rec.bob_outcome is not None:
            alice.append(int(rec.alice_state))
            bob.append(int(rec.bob_outcome))
    return alice, bob
