import numpy as np
import pytest

from qneclab.fields import VectorField, combine, make_bump


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def bump_sum(rng, n_terms=3, amp=0.4):
    """Random sum of bumps, kept gentle enough for well-behaved flows."""
    field = None
    for _ in range(n_terms):
        term = make_bump(rng.uniform(-2.0, 2.0), rng.uniform(0.3, 1.0),
                         rng.uniform(-amp, amp))
        field = term if field is None else combine(field, term, 1.0, 1.0)
    return field


def constant_window_field(value=1.0, halfwidth=5.0):
    """Field identically equal to `value` on [-halfwidth, halfwidth].

    Not a legal compactly-supported field at the window edge; used only to
    exercise the flow ODE against the trivial autonomous solution u + v*t
    for trajectories that stay in the interior.
    """
    def jet_fn(us):
        f = np.full_like(us, float(value))
        z = np.zeros_like(us)
        return f, z, z.copy(), z.copy()

    return VectorField(picture="line", support=(-halfwidth, halfwidth),
                       _jet_fn=jet_fn, label="const")
