import cmath
import math

import pytest

from biphoton_qkd import (
    BasisId,
    Qutrit,
    StateId,
    equal_up_to_global_phase,
    inner,
    mub_set,
    protocol_state,
)

W = cmath.exp(2j * math.pi / 3)
INV_SQRT3 = 1.0 / math.sqrt(3.0)

ALL_STATES = [protocol_state(b, s) for b in range(4) for s in range(3)]


def assert_amplitudes(q, expected, tol=1e-15):
    for got, want in zip(q.amplitudes(), expected):
        assert abs(got - want) <= tol


def test_ids_are_range_checked():
    assert BasisId(0) is BasisId.NATURAL
    assert StateId(2) is StateId.GAMMA
    with pytest.raises(ValueError):
        BasisId(4)
    with pytest.raises(ValueError):
        StateId(3)
    with pytest.raises(ValueError):
        BasisId(-1)


def test_construction_renormalizes_rounding_noise():
    q = Qutrit(1.0 + 3e-10, 0.0, 0.0)
    norm = math.sqrt(sum(abs(c) ** 2 for c in q.amplitudes()))
    assert abs(norm - 1.0) <= 1e-12


def test_construction_rejects_bad_input():
    with pytest.raises(ValueError):
        Qutrit(0.9, 0.0, 0.0)
    with pytest.raises(ValueError):
        Qutrit(complex("nan"), 1.0, 0.0)
    with pytest.raises(ValueError):
        Qutrit(complex(0, math.inf), 1.0, 0.0)
    with pytest.raises(ValueError):
        Qutrit.from_unnormalized(0.0, 0.0, 0.0)


def test_from_unnormalized_scales():
    q = Qutrit.from_unnormalized(3.0, 4.0j, 0.0)
    assert_amplitudes(q, (0.6, 0.8j, 0.0))


def test_catalog_entries():
    ms = mub_set()
    assert_amplitudes(ms.bases[0][0], (1.0, 0.0, 0.0))
    assert_amplitudes(ms.bases[0][1], (0.0, 1.0, 0.0))
    assert_amplitudes(
        ms.bases[1][1], (INV_SQRT3, INV_SQRT3 * W, INV_SQRT3 * W.conjugate())
    )
    assert_amplitudes(ms.bases[2][0], (INV_SQRT3 * W, INV_SQRT3, INV_SQRT3))
    assert_amplitudes(
        ms.bases[3][2], (INV_SQRT3, INV_SQRT3, INV_SQRT3 * W.conjugate())
    )


def test_inner_examples():
    alpha = protocol_state(0, 0)
    alpha_p = protocol_state(1, 0)
    beta_p = protocol_state(1, 1)
    assert abs(inner(alpha, alpha) - 1.0) <= 1e-15
    assert abs(abs(inner(alpha, alpha_p)) ** 2 - 1.0 / 3.0) <= 1e-15
    # (1 + w + conj(w)) / 3 vanishes identically
    assert abs(inner(alpha_p, beta_p)) <= 1e-15


def test_each_basis_is_orthonormal():
    for basis in mub_set().bases:
        for i in range(3):
            for j in range(3):
                target = 1.0 if i == j else 0.0
                assert abs(inner(basis[i], basis[j]) - target) <= 1e-12


def test_cross_basis_overlaps_are_one_third():
    bases = mub_set().bases
    checked = 0
    for b1 in range(4):
        for b2 in range(b1 + 1, 4):
            for i in range(3):
                for j in range(3):
                    overlap_sq = abs(inner(bases[b1][i], bases[b2][j])) ** 2
                    assert abs(overlap_sq - 1.0 / 3.0) <= 1e-12
                    checked += 1
    assert checked == 54


def test_phase_predicate_examples():
    alpha = protocol_state(0, 0)
    shifted = Qutrit(*(c * cmath.exp(1j * math.pi / 7) for c in alpha.amplitudes()))
    assert equal_up_to_global_phase(alpha, shifted, 1e-12)
    assert not equal_up_to_global_phase(alpha, protocol_state(0, 1), 1e-9)
    # e^{-2 pi i / 3} times the first double-primed state
    rotated = Qutrit(
        INV_SQRT3, INV_SQRT3 * W.conjugate(), INV_SQRT3 * W.conjugate()
    )
    assert equal_up_to_global_phase(protocol_state(2, 0), rotated, 1e-12)
    with pytest.raises(ValueError):
        equal_up_to_global_phase(alpha, alpha, 0.0)


def test_phase_predicate_is_equivalence_on_catalog():
    tol = 1e-9
    n = len(ALL_STATES)
    rel = [
        [equal_up_to_global_phase(a, b, tol) for b in ALL_STATES] for a in ALL_STATES
    ]
    for i in range(n):
        assert rel[i][i]
        for j in range(n):
            assert rel[i][j] == rel[j][i]
            for k in range(n):
                if rel[i][j] and rel[j][k]:
                    assert rel[i][k]


def test_protocol_state_matches_mub_set():
    ms = mub_set()
    for b in range(4):
        for s in range(3):
            assert protocol_state(b, s) == ms.bases[b][s]


def test_all_public_states_are_unit_norm():
    for q in ALL_STATES:
        norm = math.sqrt(sum(abs(c) ** 2 for c in q.amplitudes()))
        assert abs(norm - 1.0) <= 1e-12
