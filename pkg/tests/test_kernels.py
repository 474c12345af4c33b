"""Exchange kernels: spot values, rational identities, pole guards, derivatives.

Derivatives are cross-checked against central finite differences; the kernels
are rational, so a 1e-6 step leaves plenty of headroom at 1e-7 tolerance.
"""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from segment_bethe import kernels as kn
from segment_bethe.errors import PoleError
from segment_bethe.params import BoundaryParams

STEP = 1e-6
DTOL = 1e-7

spectral = st.complex_numbers(
    min_magnitude=0.05, max_magnitude=2.0, allow_nan=False, allow_infinity=False
)


def central(fn, z, step=STEP):
    return (fn(z + step) - fn(z - step)) / (2 * step)


def test_spot_values():
    assert kn.f(2, 1) == 0
    assert kn.h(1, 0) == 3
    assert kn.w(0, 0) == -1
    assert kn.Q(2, 1) == 4
    assert kn.phi(0) == 2


def test_phi_reflection():
    u = 0.37 + 0.21j
    assert np.isclose(kn.phi(-u - 1), 2 * u / (2 * u + 1))


@given(u=spectral, v=spectral)
@settings(max_examples=200, deadline=None)
def test_f_and_h_are_q_ratios(u, v):
    assume(abs(u - v) > 0.05 and abs(u + v + 1) > 0.05)
    qq = kn.Q(u, v)
    assert abs(kn.f(u, v) - kn.Q(-u, v) / qq) < 1e-10
    assert abs(kn.h(u, v) - kn.Q(u + 1, v) / qq) < 1e-10


def test_big_f_matches_definition():
    u, v = 0.8 + 0.3j, -0.2 + 0.5j
    expected = -(u + 1) * (2 * v + 1) / ((v + 1) * kn.Q(u, v))
    assert np.isclose(kn.F(u, v), expected)


@pytest.mark.parametrize(
    "fn,point",
    [
        (kn.f, (0.5, 0.5)),  # u = v
        (kn.f, (0.5, -1.5)),  # u + v + 1 = 0
        (kn.g, (0.3, -0.5)),  # 2v + 1 = 0
        (kn.k, (-0.5, 0.2)),  # 2u + 1 = 0
        (kn.w, (0.25, -1.25)),
        (kn.x, (-0.5, 0.1)),
        (kn.y, (0.3, -0.5)),
        (kn.F, (0.4, -1.0)),  # v = -1
    ],
)
def test_pole_guards(fn, point):
    with pytest.raises(PoleError):
        fn(*point)


def test_pole_error_names_kernel():
    with pytest.raises(PoleError, match="phi"):
        kn.phi(-0.5)
    with pytest.raises(PoleError, match="tilde_phi"):
        kn.tilde_phi(-1.2, 1.2)


def test_scalar_derivatives(rng):
    for _ in range(10):
        u = complex(rng.uniform(0.3, 1.5), rng.uniform(-0.5, 0.5))
        assert abs(kn.d_phi(u) - central(kn.phi, u)) < DTOL
        p = complex(rng.uniform(1.5, 3.0), rng.uniform(-0.3, 0.3))
        got = kn.d_tilde_phi(u, p)
        ref = central(lambda z: kn.tilde_phi(z, p), u)
        assert abs(got - ref) < DTOL * max(1.0, abs(got))


def test_pair_derivatives(rng):
    for _ in range(10):
        u = complex(rng.uniform(0.8, 1.6), rng.uniform(0.1, 0.5))
        v = complex(rng.uniform(-0.6, -0.1), rng.uniform(-0.5, -0.1))
        cases = [
            (kn.d_f_du(u, v), lambda z: kn.f(z, v), u),
            (kn.d_f_dv(u, v), lambda z: kn.f(u, z), v),
            (kn.d_h_du(u, v), lambda z: kn.h(z, v), u),
            (kn.d_h_dv(u, v), lambda z: kn.h(u, z), v),
            (kn.d_Q_du(u, v), lambda z: kn.Q(z, v), u),
            (kn.d_Q_dv(u, v), lambda z: kn.Q(u, z), v),
        ]
        for got, fn, at in cases:
            assert abs(got - central(fn, at)) < DTOL * max(1.0, abs(got))


def test_trace_coefficient_derivatives(rng):
    bp = BoundaryParams(1.3 + 0.2j, 2.1 - 0.3j, 0.7 + 0.4j, -0.5 + 0.6j)
    for _ in range(5):
        u = complex(rng.uniform(0.3, 1.2), rng.uniform(-0.4, 0.4))
        got = kn.d_alpha_bar(u, bp)
        ref = central(lambda z: kn.alpha_bar(z, bp), u)
        assert abs(got - ref) < DTOL * max(1.0, abs(got))
        got = kn.d_delta_bar(u, bp)
        ref = central(lambda z: kn.delta_bar(z, bp), u)
        assert abs(got - ref) < DTOL * max(1.0, abs(got))


def test_kernel_values_consistency():
    u, v = 0.9 + 0.2j, -0.3 + 0.6j
    kv = kn.kernel_values(u, v)
    assert kv.f == kn.f(u, v)
    assert kv.g == kn.g(u, v)
    assert kv.w == kn.w(u, v)
    assert kv.h == kn.h(u, v)
    assert kv.k == kn.k(u, v)
    assert kv.n == kn.n(u, v)
    assert kv.x == kn.x(u, v)
    assert kv.s == kn.s(u, v)
    assert kv.q == kn.q(u, v)
    assert kv.r == kn.r(u, v)
    assert kv.y == kn.y(u, v)
    assert kv.big_q == kn.Q(u, v)
    assert kv.big_f == kn.F(u, v)
    assert kv.phi_u == kn.phi(u)
    assert kv.phi_v == kn.phi(v)


def test_products():
    u = 1.1 + 0.3j
    others = (0.2 - 0.4j, -0.7 + 0.1j)
    assert np.isclose(kn.f_product(u, others), kn.f(u, others[0]) * kn.f(u, others[1]))
    assert np.isclose(kn.h_product(u, others), kn.h(u, others[0]) * kn.h(u, others[1]))
    assert np.isclose(kn.Q_product(u, others), kn.Q(u, others[0]) * kn.Q(u, others[1]))
    assert kn.f_product(u, ()) == 1
    assert kn.h_product(u, ()) == 1
    assert kn.Q_product(u, ()) == 1


def test_kernels_accept_mpmath_scalars():
    import mpmath

    u = mpmath.mpc("0.9", "0.2")
    v = mpmath.mpc("-0.3", "0.6")
    got = kn.f(u, v)
    ref = kn.f(complex(u), complex(v))
    assert abs(complex(got) - ref) < 1e-15
