"""Rational exchange kernels and eigenvalue building blocks.

Single-letter names follow the conventional labelling of the exchange-relation
coefficients; all of them are plain rational functions of one or two spectral
parameters.  Every function is written in terms of ``+ - * /`` only, so the
same code path runs on ``complex`` and on ``mpmath.mpc`` scalars.

Denominators are guarded: an evaluation within ``POLE_TOL`` of a pole raises
:class:`~segment_bethe.errors.PoleError` naming the kernel, so parameter sweeps
can redraw instead of silently blowing up.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PoleError

POLE_TOL = 1e-9

__all__ = [
    "POLE_TOL",
    "f",
    "g",
    "w",
    "h",
    "k",
    "n",
    "x",
    "s",
    "q",
    "r",
    "y",
    "phi",
    "tilde_phi",
    "Q",
    "F",
    "KernelValues",
    "kernel_values",
    "f_product",
    "h_product",
    "Q_product",
]


def _guard(name, point, *denominators):
    for d in denominators:
        a = abs(d)
        if a < POLE_TOL:
            raise PoleError(name, point, float(a))


def f(u, v):
    _guard("f", (u, v), u - v, u + v + 1)
    return (u - v - 1) * (u + v) / ((u - v) * (u + v + 1))


def g(u, v):
    _guard("g", (u, v), 2 * v + 1, u - v)
    return 2 * v / ((2 * v + 1) * (u - v))


def w(u, v):
    _guard("w", (u, v), u + v + 1)
    return -1 / (u + v + 1)


def h(u, v):
    _guard("h", (u, v), u - v, u + v + 1)
    return (u - v + 1) * (u + v + 2) / ((u - v) * (u + v + 1))


def k(u, v):
    _guard("k", (u, v), u - v, 2 * u + 1)
    return -2 * (u + 1) / ((u - v) * (2 * u + 1))


def n(u, v):
    _guard("n", (u, v), u + v + 1, 2 * v + 1, 2 * u + 1)
    return 4 * v * (u + 1) / ((u + v + 1) * (2 * v + 1) * (2 * u + 1))


def x(u, v):
    _guard("x", (u, v), 2 * u + 1, u + v + 1, u - v)
    return 2 * u * (u - v + 1) / ((2 * u + 1) * (u + v + 1) * (u - v))


def s(u, v):
    _guard("s", (u, v), 2 * u + 1, 2 * v + 1, u - v)
    return -2 * u / ((2 * u + 1) * (2 * v + 1) * (u - v))


def q(u, v):
    _guard("q", (u, v), u + v + 1, u - v)
    return (u + v) / ((u + v + 1) * (u - v))


def r(u, v):
    _guard("r", (u, v), 2 * u + 1, u - v)
    return -2 * u / ((2 * u + 1) * (u - v))


def y(u, v):
    _guard("y", (u, v), u + v + 1, 2 * v + 1)
    return -1 / ((u + v + 1) * (2 * v + 1))


def phi(u):
    """2(u+1)/(2u+1); the reflected value phi(-u-1) = 2u/(2u+1)."""
    _guard("phi", u, 2 * u + 1)
    return 2 * (u + 1) / (2 * u + 1)


def tilde_phi(u, p):
    _guard("tilde_phi", u, p + u, p - u - 1)
    return (u + 1) * (2 * u + 1) / ((p + u) * (p - u - 1))


def Q(u, v):
    """(u-v)(u+v+1); symmetric under u -> -u-1 and v -> -v-1 up to sign."""
    return (u - v) * (u + v + 1)


def F(u, v):
    """Coupling of the unwanted terms in the off-shell transfer action."""
    _guard("F", (u, v), v + 1, u - v, u + v + 1)
    return -(u + 1) * (2 * v + 1) / ((v + 1) * Q(u, v))


# Derivatives used by Jacobians and the norm matrix.


def d_phi(u):
    _guard("phi", u, 2 * u + 1)
    return -2 / ((2 * u + 1) * (2 * u + 1))


def d_tilde_phi(u, p):
    _guard("tilde_phi", u, p + u, p - u - 1)
    num = (u + 1) * (2 * u + 1)
    den = (p + u) * (p - u - 1)
    d_num = 4 * u + 3
    d_den = -(2 * u + 1)
    return (d_num * den - num * d_den) / (den * den)


def d_Q_du(u, v):
    return 2 * u + 1


def d_Q_dv(u, v):
    return -(2 * v + 1)


def d_f_du(u, v):
    _guard("f", (u, v), u - v, u + v + 1)
    qq = Q(u, v)
    num = (2 * u - 1) * qq - (u - v - 1) * (u + v) * (2 * u + 1)
    return num / (qq * qq)


def d_f_dv(u, v):
    _guard("f", (u, v), u - v, u + v + 1)
    qq = Q(u, v)
    return -2 * u * (2 * v + 1) / (qq * qq)


def d_h_du(u, v):
    _guard("h", (u, v), u - v, u + v + 1)
    qq = Q(u, v)
    num = (2 * u + 3) * qq - (u - v + 1) * (u + v + 2) * (2 * u + 1)
    return num / (qq * qq)


def d_h_dv(u, v):
    _guard("h", (u, v), u - v, u + v + 1)
    qq = Q(u, v)
    return 2 * (u + 1) * (2 * v + 1) / (qq * qq)


# Trace coefficients of the transfer matrix in the plain and modified bases.
# ``bp`` is a BoundaryParams instance; only q, xi_plus/xi_minus and rho enter.


def alpha(u, bp):
    return phi(u) * (bp.q + u)


def delta(u, bp):
    return bp.q - (u + 1)


def beta(u, bp):
    return bp.xi_minus * (u + 1)


def gamma(u, bp):
    return bp.xi_plus * (u + 1)


def alpha_bar(u, bp):
    return phi(u) * (bp.q + u * (1 - bp.rho))


def delta_bar(u, bp):
    return bp.q - (1 + u) * (1 - bp.rho)


def d_alpha_bar(u, bp):
    return d_phi(u) * (bp.q + u * (1 - bp.rho)) + phi(u) * (1 - bp.rho)


def d_delta_bar(u, bp):
    return -(1 - bp.rho)


# Products over root sets.


def f_product(u, others):
    out = 1
    for v in others:
        out = out * f(u, v)
    return out


def h_product(u, others):
    out = 1
    for v in others:
        out = out * h(u, v)
    return out


def Q_product(u, others):
    out = 1
    for v in others:
        out = out * Q(u, v)
    return out


@dataclass(frozen=True)
class KernelValues:
    """All exchange kernels at one ordered pair of spectral parameters."""

    f: complex
    g: complex
    w: complex
    h: complex
    k: complex
    n: complex
    x: complex
    s: complex
    q: complex
    r: complex
    y: complex
    big_q: complex
    big_f: complex
    phi_u: complex
    phi_v: complex


def kernel_values(u, v) -> KernelValues:
    return KernelValues(
        f=f(u, v),
        g=g(u, v),
        w=w(u, v),
        h=h(u, v),
        k=k(u, v),
        n=n(u, v),
        x=x(u, v),
        s=s(u, v),
        q=q(u, v),
        r=r(u, v),
        y=y(u, v),
        big_q=Q(u, v),
        big_f=F(u, v),
        phi_u=phi(u),
        phi_v=phi(v),
    )
