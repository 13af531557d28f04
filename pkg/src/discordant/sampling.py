"""Random X-states for tests and verification runs."""
import numpy as np

from .qcore import canonical_mueller, cp_check, mueller_row


def random_x_mueller(rng, max_tries=100000):
    """Canonical sub-X Mueller matrix drawn by rejection.

    ``(m11, m22, m03, m30, m33)`` are uniform on ``[-1, 1]^5``; draws failing
    complete positivity are rejected.
    """
    for _ in range(max_tries):
        m11, m22, m03, m30, m33 = rng.uniform(-1.0, 1.0, size=5)
        m, _ = canonical_mueller(mueller_row(m03, m11, m22, m30, m33))
        if cp_check(m).physical:
            return m
    raise RuntimeError("rejection sampler exhausted")


def random_x_muellers(n, seed=0):
    rng = np.random.default_rng(seed)
    return [random_x_mueller(rng) for _ in range(n)]
