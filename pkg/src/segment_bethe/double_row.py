"""Double-row monodromy, its modified entries, transfer matrix, Hamiltonian.

The auxiliary space is always the first (slowest) tensor factor; chain sites
occupy factors 1..N in order.  Operator-valued entries are extracted by block
decomposition over the auxiliary space, so entry ``a`` of a chain operator is
the upper-left ``2^N x 2^N`` block.

Builders are memoised on ``(u, cs, bp)``; cached arrays are frozen read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels as kn
from .boundary import k_minus, k_plus, q_similarity, r_matrix
from .errors import ConstructionError, ParameterError, PoleError
from .linalg import (
    QuantumOperator,
    embed_site,
    embed_two_site,
    identity,
    kron,
    relative_residual,
    trace_aux,
)
from .boundary import SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Y, SIGMA_Z
from .params import BoundaryParams, ChainSpec

__all__ = [
    "DoubleRowEntries",
    "ModifiedEntries",
    "bulk_monodromy",
    "hat_monodromy",
    "double_row",
    "modified_entries",
    "transfer_matrix",
    "transfer_forms_residual",
    "crossing_residual",
    "hamiltonian",
    "check_exchange_relations",
]


@dataclass(frozen=True)
class DoubleRowEntries:
    """Operator entries A, B, C, D of one double-row monodromy."""

    a: QuantumOperator
    b: QuantumOperator
    c: QuantumOperator
    d: QuantumOperator


@dataclass(frozen=True)
class ModifiedEntries:
    a_bar: QuantumOperator
    b_bar: QuantumOperator
    c_bar: QuantumOperator
    d_bar: QuantumOperator


def _freeze(m: np.ndarray) -> np.ndarray:
    m.flags.writeable = False
    return m


@lru_cache(maxsize=4096)
def bulk_monodromy(u, cs: ChainSpec) -> np.ndarray:
    """Ordered product of R-matrices coupling the auxiliary space to each site."""
    u = complex(u)
    n = cs.sites
    m = identity(1 << (n + 1))
    for i, theta in enumerate(cs.thetas):
        m = m @ embed_two_site(r_matrix(u - theta), n + 1, 0, 1 + i)
    return _freeze(m)


@lru_cache(maxsize=4096)
def hat_monodromy(u, cs: ChainSpec) -> np.ndarray:
    """Return-trip monodromy: same couplings in reverse order, shifted signs."""
    u = complex(u)
    n = cs.sites
    m = identity(1 << (n + 1))
    for i in reversed(range(n)):
        m = m @ embed_two_site(r_matrix(u + cs.thetas[i]), n + 1, 0, 1 + i)
    return _freeze(m)


@lru_cache(maxsize=4096)
def double_row(u, cs: ChainSpec, bp: BoundaryParams) -> DoubleRowEntries:
    """Entries of the double-row monodromy with the dressed d-shift applied."""
    u = complex(u)
    if abs(2 * u + 1) < kn.POLE_TOL:
        raise PoleError("double_row", u, abs(2 * u + 1))
    n = cs.sites
    half = 1 << n
    full = (
        bulk_monodromy(u, cs)
        @ kron(k_minus(u, bp), identity(half))
        @ hat_monodromy(u, cs)
    )
    a = full[:half, :half]
    b = full[:half, half:]
    c = full[half:, :half]
    d = full[half:, half:] - a / (2 * u + 1)
    return DoubleRowEntries(
        a=QuantumOperator(n, _freeze(a.copy())),
        b=QuantumOperator(n, _freeze(b.copy())),
        c=QuantumOperator(n, _freeze(c.copy())),
        d=QuantumOperator(n, _freeze(d.copy())),
    )


def _assemble(entries: DoubleRowEntries, u: complex) -> np.ndarray:
    """Rebuild the raw 2x2 block matrix over the auxiliary space."""
    a = entries.a.matrix
    return np.block(
        [
            [a, entries.b.matrix],
            [entries.c.matrix, entries.d.matrix + a / (2 * u + 1)],
        ]
    )


@lru_cache(maxsize=4096)
def modified_entries(u, cs: ChainSpec, bp: BoundaryParams) -> ModifiedEntries:
    """Entries after conjugating the auxiliary space by the similarity matrix.

    Built twice: once from the closed-form linear combinations of the plain
    entries, once by actually conjugating with ``q_similarity``.  The two
    routes must agree to 1e-12; disagreement means a construction bug, not a
    numerical accident, so it raises.
    """
    u = complex(u)
    if bp.diagonal_mode:
        raise ParameterError("modified entries are undefined for diagonal couplings")
    e = double_row(u, cs, bp)
    a, b = e.a.matrix, e.b.matrix
    c, d = e.c.matrix, e.d.matrix
    rho = bp.rho
    xp, xm = bp.xi_plus, bp.xi_minus
    pu = kn.phi(u)
    pm = kn.phi(-u - 1)
    pref = 1 / (2 * (rho - 1))
    a_bar = pref * ((rho * pu - 2) * a + rho * d - xm * b - xp * c)
    d_bar = pref * ((rho * pm - 2) * d + rho * pu * pm * a + xm * pu * b + xp * pu * c)
    b_bar = pref * (xm * pm * a - xm * d + (xm * xm / rho) * b - rho * c)
    c_bar = pref * (xp * pm * a - xp * d - rho * b + (xp * xp / rho) * c)

    # Independent route: conjugate the full block matrix and re-split.
    n = cs.sites
    half = 1 << n
    qm = q_similarity(bp)
    big = kron(np.linalg.inv(qm), identity(half)) @ _assemble(e, u) @ kron(
        qm, identity(half)
    )
    a2 = big[:half, :half]
    b2 = big[:half, half:]
    c2 = big[half:, :half]
    d2 = big[half:, half:] - a2 / (2 * u + 1)
    for name, m1, m2 in (
        ("a", a_bar, a2),
        ("b", b_bar, b2),
        ("c", c_bar, c2),
        ("d", d_bar, d2),
    ):
        res = relative_residual(m1 - m2, m1, m2)
        if res > 1e-12:
            raise ConstructionError(
                f"modified entry {name!r}: construction routes disagree ({res:.3e})"
            )
    return ModifiedEntries(
        a_bar=QuantumOperator(n, _freeze(a_bar)),
        b_bar=QuantumOperator(n, _freeze(b_bar)),
        c_bar=QuantumOperator(n, _freeze(c_bar)),
        d_bar=QuantumOperator(n, _freeze(d_bar)),
    )


def _transfer_trace_form(u: complex, cs: ChainSpec, bp: BoundaryParams) -> np.ndarray:
    e = double_row(u, cs, bp)
    return (
        kn.alpha(u, bp) * e.a.matrix
        + kn.delta(u, bp) * e.d.matrix
        + kn.beta(u, bp) * e.b.matrix
        + kn.gamma(u, bp) * e.c.matrix
    )


def _transfer_modified_form(
    u: complex, cs: ChainSpec, bp: BoundaryParams
) -> np.ndarray:
    m = modified_entries(u, cs, bp)
    return kn.alpha_bar(u, bp) * m.a_bar.matrix + kn.delta_bar(u, bp) * m.d_bar.matrix


def transfer_forms_residual(u, cs: ChainSpec, bp: BoundaryParams) -> float:
    """Relative disagreement between the two transfer-matrix decompositions."""
    u = complex(u)
    t1 = _transfer_trace_form(u, cs, bp)
    t2 = _transfer_modified_form(u, cs, bp)
    return relative_residual(t1 - t2, t1, t2)


@lru_cache(maxsize=4096)
def transfer_matrix(u, cs: ChainSpec, bp: BoundaryParams) -> QuantumOperator:
    """Double-row transfer matrix t(u).

    Always cross-checked against the literal auxiliary-space trace; for
    generic couplings the modified (two-term) decomposition is verified as
    well.
    """
    u = complex(u)
    n = cs.sites
    half = 1 << n
    t1 = _transfer_trace_form(u, cs, bp)
    direct = trace_aux(
        kron(k_plus(u, bp), identity(half)) @ _assemble(double_row(u, cs, bp), u)
    )
    res = relative_residual(t1 - direct, t1, direct)
    if res > 1e-12:
        raise ConstructionError(f"transfer trace decomposition broke ({res:.3e})")
    if not bp.diagonal_mode:
        res = transfer_forms_residual(u, cs, bp)
        if res > 1e-11:
            raise ConstructionError(
                f"transfer matrix: modified form disagrees ({res:.3e})"
            )
    return QuantumOperator(n, _freeze(t1))


def crossing_residual(u, cs: ChainSpec, bp: BoundaryParams) -> float:
    """Measured (not enforced) residual of t(-u-1) against t(u)."""
    t1 = transfer_matrix(u, cs, bp).matrix
    t2 = transfer_matrix(-u - 1, cs, bp).matrix
    return relative_residual(t1 - t2, t1, t2)


def hamiltonian(cs: ChainSpec, bp: BoundaryParams) -> QuantumOperator:
    """Open-chain Hamiltonian with boundary fields, homogeneous point only."""
    if not cs.is_homogeneous:
        raise ParameterError("hamiltonian is defined at the homogeneous point")
    if bp.p == 0 or bp.q == 0:
        raise ParameterError("boundary couplings p, q must be nonzero")
    n = cs.sites
    hm = (1 / bp.q) * (
        embed_site(SIGMA_Z, n, 0)
        + bp.xi_plus * embed_site(SIGMA_PLUS, n, 0)
        + bp.xi_minus * embed_site(SIGMA_MINUS, n, 0)
    )
    for i in range(n - 1):
        for sig in (SIGMA_X, SIGMA_Y, SIGMA_Z):
            hm = hm + embed_two_site(kron(sig, sig), n, i, i + 1)
    hm = hm + (1 / bp.p) * embed_site(SIGMA_Z, n, n - 1)
    return QuantumOperator(n, _freeze(hm))


def _relation_residuals(eu, ev, u: complex, v: complex) -> dict:
    """Residuals of the quadratic exchange relations for one entry family."""
    au, bu, cu, du = eu
    av, bv, cv, dv = ev
    kv = kn.kernel_values(u, v)
    out = {}

    def put(name, lhs, rhs):
        out[name] = relative_residual(lhs - rhs, lhs, rhs)

    put("bb", bu @ bv, bv @ bu)
    put("cc", cu @ cv, cv @ cu)
    put("ab", au @ bv, kv.f * bv @ au + kv.g * bu @ av + kv.w * bu @ dv)
    put("ca", cv @ au, kv.f * au @ cv + kv.g * av @ cu + kv.w * dv @ cu)
    put("db", du @ bv, kv.h * bv @ du + kv.k * bu @ dv + kv.n * bu @ av)
    put("cd", cv @ du, kv.h * du @ cv + kv.k * dv @ cu + kv.n * av @ cu)
    put(
        "cb",
        cu @ bv,
        bv @ cu
        + kv.s * au @ av
        + kv.x * av @ au
        + kv.y * du @ av
        + kv.r * au @ dv
        + kv.q * av @ du
        + kv.w * du @ dv,
    )
    return out


def check_exchange_relations(u, v, cs: ChainSpec, bp: BoundaryParams) -> dict:
    """Scale-free residuals of every exchange relation at the pair (u, v).

    Keys are prefixed ``plain:`` / ``modified:``; the modified family is
    skipped for diagonal couplings.
    """
    u, v = complex(u), complex(v)

    def unpack_plain(w):
        e = double_row(w, cs, bp)
        return e.a.matrix, e.b.matrix, e.c.matrix, e.d.matrix

    res = {
        f"plain:{name}": val
        for name, val in _relation_residuals(
            unpack_plain(u), unpack_plain(v), u, v
        ).items()
    }
    if not bp.diagonal_mode:

        def unpack_mod(w):
            m = modified_entries(w, cs, bp)
            return m.a_bar.matrix, m.b_bar.matrix, m.c_bar.matrix, m.d_bar.matrix

        res.update(
            {
                f"modified:{name}": val
                for name, val in _relation_residuals(
                    unpack_mod(u), unpack_mod(v), u, v
                ).items()
            }
        )
    return res
