import numpy as np
import pytest

from biphoton_qkd import Qutrit


@pytest.fixture
def qutrit_sampler():
    """Factory for seeded Haar-like random qutrits.

    min_c1c3 filters out inputs near the poles of the two-point mapping
    (|c1||c3| must exceed it), matching the documented oracle domain.
    """

    def make(n: int, seed: int, min_c1c3: float = 0.0) -> list[Qutrit]:
        rng = np.random.default_rng(seed)
        out = []
        while len(out) < n:
            v = rng.normal(size=3) + 1j * rng.normal(size=3)
            v = v / np.linalg.norm(v)
            if abs(v[0]) * abs(v[2]) <= min_c1c3:
                continue
            out.append(Qutrit(complex(v[0]), complex(v[1]), complex(v[2])))
        return out

    return make
