import math

import pytest

from biphoton_qkd import (
    BasisId,
    BrownTwissScheme,
    ControlSettings,
    FilterMode,
    LossModel,
    RandomStream,
    StateId,
    coincidence_probability,
    equal_up_to_global_phase,
    measure,
    prepare,
    protocol_state,
    settings_for,
)

WORST = LossModel(filter_mode=FilterMode.WORST)
BEST = LossModel(filter_mode=FilterMode.BEST)


def binomial_3sigma(p, n):
    return 3.0 * math.sqrt(p * (1.0 - p) / n)


def test_prepare_pure_fock_settings():
    q = prepare(ControlSettings(hwp1=0.0, hwp2=0.0, ps1=1.2, ps2=0.7))
    assert equal_up_to_global_phase(q, protocol_state(0, 0), 1e-12)
    q = prepare(ControlSettings(hwp1=0.3, hwp2=math.pi / 4.0, ps1=2.2, ps2=0.0))
    assert equal_up_to_global_phase(q, protocol_state(0, 1), 1e-12)


def test_prepare_output_is_normalized():
    for hwp1, hwp2, ps1, ps2 in [(0.1, 0.2, 0.3, 0.4), (1.0, 0.5, 4.0, 5.5)]:
        q = prepare(ControlSettings(hwp1, hwp2, ps1, ps2))
        norm = math.sqrt(sum(abs(c) ** 2 for c in q.amplitudes()))
        assert abs(norm - 1.0) <= 1e-15


@pytest.mark.parametrize("basis", range(4))
@pytest.mark.parametrize("state", range(3))
def test_settings_round_trip_catalog(basis, state):
    settings = settings_for(basis, state)
    assert 0.0 <= settings.hwp1 <= math.pi / 4.0 + 1e-12
    assert 0.0 <= settings.hwp2 <= math.pi / 4.0 + 1e-12
    assert 0.0 <= settings.ps1 < 2.0 * math.pi
    assert 0.0 <= settings.ps2 < 2.0 * math.pi
    assert equal_up_to_global_phase(
        prepare(settings), protocol_state(basis, state), 1e-9
    )


def test_settings_for_canonical_values():
    s = settings_for(0, 0)
    assert s.hwp1 == pytest.approx(0.0, abs=1e-12)
    assert s.hwp2 == pytest.approx(0.0, abs=1e-12)
    s = settings_for(1, 1)
    assert s.hwp2 == pytest.approx(math.asin(1.0 / math.sqrt(3.0)) / 2.0, abs=1e-12)
    assert s.hwp1 == pytest.approx(math.pi / 8.0, abs=1e-12)
    assert s.ps2 == pytest.approx(2.0 * math.pi / 3.0, abs=1e-12)
    assert s.ps1 == pytest.approx(4.0 * math.pi / 3.0, abs=1e-12)


def test_control_settings_reduce_phases():
    s = ControlSettings(0.0, 0.0, -math.pi, 5.0 * math.pi)
    assert 0.0 <= s.ps1 < 2.0 * math.pi
    assert 0.0 <= s.ps2 < 2.0 * math.pi
    with pytest.raises(ValueError):
        ControlSettings(math.nan, 0.0, 0.0, 0.0)


def test_loss_model_validation():
    with pytest.raises(ValueError):
        LossModel(splitter_outputs=2)
    with pytest.raises(ValueError):
        LossModel(coincidence_split=1.5)
    with pytest.raises(ValueError):
        LossModel(detector_efficiency=0.0)
    assert WORST.filter_mode.factor == 0.5
    assert BEST.filter_mode.factor == 1.0


def test_coincidence_probability_fixed_points():
    tuned = BrownTwissScheme(protocol_state(1, 0))
    assert coincidence_probability(tuned, protocol_state(1, 0), WORST) == pytest.approx(
        0.25, abs=1e-15
    )
    # Orthogonal input extinguishes the coincidence rate exactly.
    assert coincidence_probability(tuned, protocol_state(1, 1), WORST) == 0.0
    assert coincidence_probability(tuned, protocol_state(1, 2), BEST) == 0.0
    hv = BrownTwissScheme(protocol_state(0, 0))
    assert coincidence_probability(hv, protocol_state(1, 0), BEST) == pytest.approx(
        1.0 / 6.0, abs=1e-12
    )


def test_coincidence_probability_monotone_in_efficiency():
    tuned = BrownTwissScheme(protocol_state(2, 2))
    previous = 0.0
    for eff in (0.25, 0.5, 0.75, 1.0):
        loss = LossModel(detector_efficiency=eff)
        p = coincidence_probability(tuned, protocol_state(2, 2), loss)
        assert p >= previous
        previous = p
    assert previous == pytest.approx(0.25, abs=1e-15)


def test_measure_outcome_is_never_orthogonal():
    rng = RandomStream(2024)
    incoming = protocol_state(3, 1)
    for _ in range(20000):
        outcome = measure(incoming, BasisId(3), WORST, rng)
        if outcome is not None:
            assert outcome == StateId(1)


def test_measure_draw_budget_is_two():
    rng_a = RandomStream(99)
    rng_b = RandomStream(99)
    incoming = protocol_state(0, 0)
    for _ in range(50):
        measure(incoming, BasisId(1), WORST, rng_a)
        rng_b.uniform()
        rng_b.uniform()
    assert rng_a.uniform() == rng_b.uniform()


@pytest.mark.parametrize(
    "loss,rate", [(WORST, 1.0 / 12.0), (BEST, 1.0 / 6.0)]
)
def test_matched_basis_detection_rate(loss, rate):
    n = 1_000_000
    rng = RandomStream(101 if loss is WORST else 201)
    incoming = prepare(settings_for(2, 1))
    hits = 0
    for _ in range(n):
        if measure(incoming, BasisId(2), loss, rng) is not None:
            hits += 1
    assert abs(hits / n - rate) <= binomial_3sigma(rate, n)


def test_mismatched_basis_outcomes_uniform():
    n = 300_000
    rng = RandomStream(517)
    incoming = protocol_state(0, 0)
    counts = [0, 0, 0]
    for _ in range(n):
        outcome = measure(incoming, BasisId(1), WORST, rng)
        if outcome is not None:
            counts[outcome] += 1
    detections = sum(counts)
    # overall detection rate is also 1/12 for unbiased input
    assert abs(detections / n - 1.0 / 12.0) <= binomial_3sigma(1.0 / 12.0, n)
    for c in counts:
        assert abs(c / detections - 1.0 / 3.0) <= binomial_3sigma(1.0 / 3.0, detections)
