"""Bethe vectors, transfer-matrix action checks, and basis expansions.

States are built by repeated application of the modified creation operator to
the reference state (plain operators in the diagonal limit).  All checks
return scale-free residuals: defect norm over the largest term norm entering
the identity, so a tolerance means the same thing at every chain size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from . import kernels as kn
from .bethe import (
    dressed_unwanted,
    dressed_value,
    inhomogeneous_unwanted,
    inhomogeneous_value,
    lambda_total,
    vacuum_eigenvalues,
)
from .double_row import double_row, modified_entries, transfer_matrix
from .errors import ParameterError
from .linalg import vacuum_state
from .params import BoundaryParams, ChainSpec

__all__ = [
    "BetheVector",
    "ExpansionCoefficients",
    "build_psi",
    "build_dual_psi",
    "check_offshell_action",
    "check_central_relation",
    "check_multiple_actions",
    "check_c_action",
    "check_cb_sweep",
    "w_coefficients",
    "w0_scalar",
    "check_expansion",
    "diagonal_w0_product",
]


@dataclass(frozen=True)
class BetheVector:
    roots: tuple
    vector: np.ndarray
    dual: bool = False


def _creation(u, cs, bp) -> np.ndarray:
    if bp.diagonal_mode:
        return double_row(u, cs, bp).b.matrix
    return modified_entries(u, cs, bp).b_bar.matrix


def _annihilation(u, cs, bp) -> np.ndarray:
    if bp.diagonal_mode:
        return double_row(u, cs, bp).c.matrix
    return modified_entries(u, cs, bp).c_bar.matrix


def build_psi(roots, cs: ChainSpec, bp: BoundaryParams) -> BetheVector:
    """Creation-operator product applied to the reference state."""
    vec = vacuum_state(cs.sites)
    for u in roots:
        vec = _creation(u, cs, bp) @ vec
    return BetheVector(tuple(roots), vec)


def build_dual_psi(roots, cs: ChainSpec, bp: BoundaryParams) -> BetheVector:
    """Dual state: annihilation-operator product applied to the left vacuum."""
    vec = vacuum_state(cs.sites)
    for u in roots:
        vec = vec @ _annihilation(u, cs, bp)
    return BetheVector(tuple(roots), vec, dual=True)


def _psi_cache(cs, bp):
    memo = {}

    def get(roots):
        key = tuple(roots)
        if key not in memo:
            memo[key] = build_psi(key, cs, bp).vector
        return memo[key]

    return get


def _dual_cache(cs, bp):
    memo = {}

    def get(roots):
        key = tuple(roots)
        if key not in memo:
            memo[key] = build_dual_psi(key, cs, bp).vector
        return memo[key]

    return get


def _residual(lhs, terms) -> float:
    rhs = sum(terms)
    scale = max([np.linalg.norm(lhs)] + [np.linalg.norm(t) for t in terms])
    if scale == 0.0:
        return float(np.linalg.norm(lhs - rhs))
    return float(np.linalg.norm(lhs - rhs) / scale)


def _swap(roots, i, u):
    """Root list with roots[i] replaced by u."""
    out = list(roots)
    out[i] = u
    return tuple(out)


def _without(roots, *idx):
    return tuple(r for j, r in enumerate(roots) if j not in idx)


def _remainder_coeff(u, bp, dual: bool):
    xi = bp.xi_plus if dual else bp.xi_minus
    return (bp.rho * (bp.rho - 1) / xi) * 2 * (u + 1)


def check_offshell_action(u, roots, cs: ChainSpec, bp: BoundaryParams) -> dict:
    """Residuals of the full off-shell transfer action on ket and bra states."""
    u = complex(u)
    roots = tuple(roots)
    if len(roots) != cs.sites:
        raise ParameterError("off-shell action requires one root per site")
    t = transfer_matrix(u, cs, bp).matrix
    lam = lambda_total(u, roots, cs, bp)
    coeffs = [
        kn.F(u, roots[i])
        * (
            dressed_unwanted(i, roots, cs, bp)
            + inhomogeneous_unwanted(i, roots, cs, bp)
        )
        for i in range(len(roots))
    ]

    psi = _psi_cache(cs, bp)
    terms = [lam * psi(roots)]
    terms += [c * psi(_swap(roots, i, u)) for i, c in enumerate(coeffs)]
    right = _residual(t @ psi(roots), terms)

    dual = _dual_cache(cs, bp)
    terms = [lam * dual(roots)]
    terms += [c * dual(_swap(roots, i, u)) for i, c in enumerate(coeffs)]
    left = _residual(dual(roots) @ t, terms)
    return {"right": right, "left": left}


def check_central_relation(u, roots, cs: ChainSpec, bp: BoundaryParams) -> dict:
    """Residuals of the inhomogeneous-term identity (requires generic couplings)."""
    u = complex(u)
    roots = tuple(roots)
    if bp.diagonal_mode:
        raise ParameterError("central relation needs generic couplings")
    if len(roots) != cs.sites:
        raise ParameterError("central relation requires one root per site")

    lam_g = inhomogeneous_value(u, roots, cs, bp)
    coeffs = [
        kn.F(u, roots[i]) * inhomogeneous_unwanted(i, roots, cs, bp)
        for i in range(len(roots))
    ]

    psi = _psi_cache(cs, bp)
    lhs = _remainder_coeff(u, bp, dual=False) * (
        _creation(u, cs, bp) @ psi(roots)
    )
    terms = [lam_g * psi(roots)]
    terms += [c * psi(_swap(roots, i, u)) for i, c in enumerate(coeffs)]
    right = _residual(lhs, terms)

    dual = _dual_cache(cs, bp)
    lhs = _remainder_coeff(u, bp, dual=True) * (
        dual(roots) @ _annihilation(u, cs, bp)
    )
    terms = [lam_g * dual(roots)]
    terms += [c * dual(_swap(roots, i, u)) for i, c in enumerate(coeffs)]
    left = _residual(lhs, terms)
    return {"right": right, "left": left}


def check_multiple_actions(u, roots, cs: ChainSpec, bp: BoundaryParams) -> dict:
    """Residuals of the sweep of diagonal entries through a creation string.

    The four operator identities are checked as full matrix equalities; the
    partial transfer action (valid for any number of roots) is checked on the
    reference state and its dual.
    """
    u = complex(u)
    roots = tuple(roots)
    m = len(roots)

    def cre(w):
        return _creation(w, cs, bp)

    def ann(w):
        return _annihilation(w, cs, bp)

    if bp.diagonal_mode:
        e_u = double_row(u, cs, bp)
        a_u, d_u = e_u.a.matrix, e_u.d.matrix

        def diag_ops(w):
            e = double_row(w, cs, bp)
            return e.a.matrix, e.d.matrix

    else:
        m_u = modified_entries(u, cs, bp)
        a_u, d_u = m_u.a_bar.matrix, m_u.d_bar.matrix

        def diag_ops(w):
            e = modified_entries(w, cs, bp)
            return e.a_bar.matrix, e.d_bar.matrix

    def cre_product(ws):
        out = np.eye(1 << cs.sites, dtype=complex)
        for w in ws:
            out = out @ cre(w)
        return out

    def ann_product(ws):
        out = np.eye(1 << cs.sites, dtype=complex)
        for w in ws:
            out = out @ ann(w)
        return out

    b_all = cre_product(roots)
    c_all = ann_product(roots)
    out = {}

    # Diagonal operator through the creation string.
    terms_a = [kn.f_product(u, roots) * (b_all @ a_u)]
    terms_d = [kn.h_product(u, roots) * (b_all @ d_u)]
    terms_ca = [kn.f_product(u, roots) * (a_u @ c_all)]
    terms_cd = [kn.h_product(u, roots) * (d_u @ c_all)]
    for i in range(m):
        ui = roots[i]
        rest = _without(roots, i)
        a_i, d_i = diag_ops(ui)
        b_swapped = cre_product((u,) + rest)
        c_swapped = ann_product((u,) + rest)
        ga = kn.g(u, ui) * kn.f_product(ui, rest)
        wd = kn.w(u, ui) * kn.h_product(ui, rest)
        kd = kn.k(u, ui) * kn.h_product(ui, rest)
        na = kn.n(u, ui) * kn.f_product(ui, rest)
        terms_a.append(ga * (b_swapped @ a_i) + wd * (b_swapped @ d_i))
        terms_d.append(kd * (b_swapped @ d_i) + na * (b_swapped @ a_i))
        terms_ca.append(ga * (a_i @ c_swapped) + wd * (d_i @ c_swapped))
        terms_cd.append(kd * (d_i @ c_swapped) + na * (a_i @ c_swapped))
    out["a_through_b"] = _residual(a_u @ b_all, terms_a)
    out["d_through_b"] = _residual(d_u @ b_all, terms_d)
    out["c_through_a"] = _residual(c_all @ a_u, terms_ca)
    out["c_through_d"] = _residual(c_all @ d_u, terms_cd)

    # Partial off-shell action on the reference state and its dual.
    t = transfer_matrix(u, cs, bp).matrix
    lam_d = dressed_value(u, roots, cs, bp)
    coeffs = [
        kn.F(u, roots[i]) * dressed_unwanted(i, roots, cs, bp) for i in range(m)
    ]
    psi = _psi_cache(cs, bp)
    dual = _dual_cache(cs, bp)
    terms = [lam_d * psi(roots)]
    terms += [c * psi(_swap(roots, i, u)) for i, c in enumerate(coeffs)]
    if not bp.diagonal_mode:
        terms.append(
            _remainder_coeff(u, bp, dual=False) * (cre(u) @ psi(roots))
        )
    out["partial_right"] = _residual(t @ psi(roots), terms)

    terms = [lam_d * dual(roots)]
    terms += [c * dual(_swap(roots, i, u)) for i, c in enumerate(coeffs)]
    if not bp.diagonal_mode:
        terms.append(
            _remainder_coeff(u, bp, dual=True) * (dual(roots) @ ann(u))
        )
    out["partial_left"] = _residual(dual(roots) @ t, terms)
    return out


# ---------------------------------------------------------------------------
# Annihilation-operator action on a Bethe vector.


def _h_single(u, idx, roots, cs, bp):
    vk = roots[idx]
    rest = _without(roots, idx)
    l1u, l2u = vacuum_eigenvalues(u, cs, bp)
    l1k, l2k = vacuum_eigenvalues(vk, cs, bp)
    fu, hu = kn.f_product(u, rest), kn.h_product(u, rest)
    fk, hk = kn.f_product(vk, rest), kn.h_product(vk, rest)
    return l1u * (
        l1k * (kn.s(u, vk) + kn.x(u, vk)) * fu * fk
        + l2k * kn.r(u, vk) * fu * hk
    ) + l2u * (
        l1k * (kn.q(u, vk) + kn.y(u, vk)) * hu * fk
        + l2k * kn.w(u, vk) * hu * hk
    )


def _alpha11(u, uk, ul):
    return (
        kn.g(u, ul) * (kn.s(u, uk) * kn.f(uk, ul) + kn.f(uk, u) * kn.x(u, uk))
        + kn.n(u, ul) * (kn.y(u, uk) * kn.f(uk, ul) + kn.f(uk, u) * kn.q(u, uk))
        + kn.g(u, uk) * (kn.s(u, uk) * kn.g(uk, ul) + kn.r(u, uk) * kn.n(uk, ul))
        + kn.n(u, uk) * (kn.y(u, uk) * kn.g(uk, ul) + kn.w(u, uk) * kn.n(uk, ul))
    )


def _alpha12(u, uk, ul):
    return (
        kn.k(u, ul) * (kn.f(uk, u) * kn.q(u, uk) + kn.f(uk, ul) * kn.y(u, uk))
        + kn.w(u, ul) * (kn.f(uk, ul) * kn.s(u, uk) + kn.f(uk, u) * kn.x(u, uk))
        + kn.g(u, uk) * (kn.k(uk, ul) * kn.r(u, uk) + kn.s(u, uk) * kn.w(uk, ul))
        + kn.n(u, uk) * (kn.k(uk, ul) * kn.w(u, uk) + kn.y(u, uk) * kn.w(uk, ul))
    )


def _alpha21(u, uk, ul):
    return (
        kn.r(u, uk) * (kn.g(u, ul) * kn.h(uk, ul) + kn.n(uk, ul) * kn.w(u, uk))
        + kn.g(uk, ul) * (kn.k(u, uk) * kn.y(u, uk) + kn.s(u, uk) * kn.w(u, uk))
        + kn.w(u, uk) * (kn.h(uk, ul) * kn.n(u, ul) + kn.k(u, uk) * kn.n(uk, ul))
    )


def _alpha22(u, uk, ul):
    return (
        kn.r(u, uk) * (kn.h(uk, ul) * kn.w(u, ul) + kn.k(uk, ul) * kn.w(u, uk))
        + kn.w(u, uk) * (kn.h(uk, ul) * kn.k(u, ul) + kn.k(u, uk) * kn.k(uk, ul))
        + kn.w(uk, ul) * (kn.k(u, uk) * kn.y(u, uk) + kn.s(u, uk) * kn.w(u, uk))
    )


def _h_pair(u, kidx, lidx, roots, cs, bp):
    vk, vl = roots[kidx], roots[lidx]
    rest = _without(roots, kidx, lidx)
    l1k, l2k = vacuum_eigenvalues(vk, cs, bp)
    l1l, l2l = vacuum_eigenvalues(vl, cs, bp)
    fk, hk = kn.f_product(vk, rest), kn.h_product(vk, rest)
    fl, hl = kn.f_product(vl, rest), kn.h_product(vl, rest)
    return l1k * (
        l1l * _alpha11(u, vk, vl) * fk * fl + l2l * _alpha12(u, vk, vl) * fk * hl
    ) + l2k * (
        l1l * _alpha21(u, vk, vl) * hk * fl
        + l2l * _alpha22(u, vl, vk) * hk * hl
    )


def check_cb_sweep(u, roots, cs: ChainSpec, bp: BoundaryParams) -> float:
    """Annihilation through a plain creation string, resolved on the vacuum.

    Uses plain operators regardless of couplings, which isolates the
    single-root and pair exchange weights from the modified-basis bookkeeping.
    """
    u = complex(u)
    roots = tuple(roots)
    n = cs.sites
    vec = vacuum_state(n)

    def plain_b_string(ws):
        out = vec
        for wv in ws:
            out = double_row(wv, cs, bp).b.matrix @ out
        return out

    lhs = double_row(u, cs, bp).c.matrix @ plain_b_string(roots)
    terms = []
    for i in range(len(roots)):
        terms.append(_h_single(u, i, roots, cs, bp) * plain_b_string(_without(roots, i)))
    for i, j in combinations(range(len(roots)), 2):
        terms.append(
            _h_pair(u, i, j, roots, cs, bp)
            * plain_b_string((u,) + _without(roots, i, j))
        )
    return _residual(lhs, terms)


def check_c_action(u, roots, cs: ChainSpec, bp: BoundaryParams) -> float:
    """Residual of the five-group modified annihilation action on a state."""
    u = complex(u)
    roots = tuple(roots)
    if bp.diagonal_mode:
        raise ParameterError("modified annihilation action needs generic couplings")
    psi = _psi_cache(cs, bp)
    rxm = bp.rho / bp.xi_minus
    l1u, l2u = vacuum_eigenvalues(u, cs, bp)

    lhs = _annihilation(u, cs, bp) @ psi(roots)
    terms = [-(rxm * rxm) * (_creation(u, cs, bp) @ psi(roots))]
    terms.append(
        rxm
        * (
            kn.phi(-u - 1) * l1u * kn.f_product(u, roots)
            - l2u * kn.h_product(u, roots)
        )
        * psi(roots)
    )
    for i in range(len(roots)):
        vi = roots[i]
        rest = _without(roots, i)
        l1i, l2i = vacuum_eigenvalues(vi, cs, bp)
        coef = -rxm * kn.w(u, vi) * (
            2 * vi * l1i * kn.g(u, vi) * kn.f_product(vi, rest)
            + (1 + 2 * vi) * l2i * kn.k(vi, u) * kn.h_product(vi, rest)
        )
        terms.append(coef * psi((u,) + rest))
    for i in range(len(roots)):
        terms.append(_h_single(u, i, roots, cs, bp) * psi(_without(roots, i)))
    for i, j in combinations(range(len(roots)), 2):
        terms.append(
            _h_pair(u, i, j, roots, cs, bp) * psi((u,) + _without(roots, i, j))
        )
    return _residual(lhs, terms)


# ---------------------------------------------------------------------------
# Expansion of modified states over plain creation strings.


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Coefficients of a modified creation string over plain strings.

    ``levels[i]`` maps the index tuple of the retained plain roots to the
    coefficient in front of the corresponding plain string.  ``w0`` is the
    fully-contracted coefficient; ``w0_matrix`` the same number obtained from
    the vacuum matrix element of the modified string.
    """

    roots: tuple
    levels: dict
    w0: complex
    w0_matrix: complex | None


def _base_w(u1, rest, cs, bp):
    l1, l2 = vacuum_eigenvalues(u1, cs, bp)
    return kn.phi(-u1 - 1) * l1 * kn.f_product(u1, rest) - l2 * kn.h_product(
        u1, rest
    )


def _w_value(part_out, part_keep, cs, bp):
    """Symmetrised nested product over orderings of the contracted roots."""
    part_out = tuple(part_out)
    if not part_out:
        return 1.0 + 0j
    total = 0j
    for perm in permutations(part_out):
        prod = 1.0 + 0j
        for jdx, uj in enumerate(perm):
            prod = prod * _base_w(uj, perm[jdx + 1 :] + tuple(part_keep), cs, bp)
        total = total + prod
    return total / math.factorial(len(part_out))


def w0_scalar(roots, cs: ChainSpec, bp: BoundaryParams):
    """Fully contracted expansion coefficient, kept in the input scalar type."""
    return _w_value(tuple(roots), (), cs, bp)


def w_coefficients(roots, cs: ChainSpec, bp: BoundaryParams) -> ExpansionCoefficients:
    roots = tuple(roots)
    nn = len(roots)
    levels: dict[int, dict[tuple, complex]] = {}
    for i in range(nn + 1):
        level = {}
        for keep in combinations(range(nn), i):
            keep_roots = tuple(roots[j] for j in keep)
            out_roots = tuple(roots[j] for j in range(nn) if j not in keep)
            level[keep] = _w_value(out_roots, keep_roots, cs, bp)
        levels[i] = level
    w0 = levels[0][()]
    w0_matrix = None
    if not bp.diagonal_mode:
        vec = build_psi(roots, cs, bp).vector
        w0_matrix = complex(
            (2 * (bp.rho - 1) / bp.xi_minus) ** nn * vec[0]
        )
    return ExpansionCoefficients(roots, levels, complex(w0), w0_matrix)


def check_expansion(roots, cs: ChainSpec, bp: BoundaryParams) -> dict:
    """Residuals of the modified-string expansion over plain strings."""
    roots = tuple(roots)
    if bp.diagonal_mode:
        raise ParameterError("expansion is defined for generic couplings")
    nn = len(roots)
    coeff = w_coefficients(roots, cs, bp)
    rho, xp, xm = bp.rho, bp.xi_plus, bp.xi_minus
    vec = vacuum_state(cs.sites)

    def plain_string(ws, dual=False):
        out = vec
        for wv in ws:
            e = double_row(wv, cs, bp)
            out = out @ e.c.matrix if dual else e.b.matrix @ out
        return out

    pref_right = ((rho - 2) * xm / (2 * (rho - 1) * xp)) ** nn
    terms = []
    for i, level in coeff.levels.items():
        for keep, wval in level.items():
            keep_roots = tuple(roots[j] for j in keep)
            terms.append(
                pref_right
                * (rho / xm) ** (nn - i)
                * wval
                * plain_string(keep_roots)
            )
    right = _residual(build_psi(roots, cs, bp).vector, terms)

    pref_left = ((rho - 2) * xp / (2 * (rho - 1) * xm)) ** nn
    terms = []
    for i, level in coeff.levels.items():
        for keep, wval in level.items():
            keep_roots = tuple(roots[j] for j in keep)
            terms.append(
                pref_left
                * (rho / xp) ** (nn - i)
                * wval
                * plain_string(keep_roots, dual=True)
            )
    left = _residual(build_dual_psi(roots, cs, bp).vector, terms)

    w0_routes = abs(coeff.w0 - coeff.w0_matrix) / max(
        abs(coeff.w0), abs(coeff.w0_matrix), 1e-300
    )
    return {"right": right, "left": left, "w0_routes": w0_routes}


def diagonal_w0_product(roots, cs: ChainSpec, bp: BoundaryParams) -> complex:
    """Closed product form of the contracted coefficient at diagonal on-shell roots."""
    roots = tuple(roots)
    out = 1.0 + 0j
    for i, v in enumerate(roots):
        _, lam2 = vacuum_eigenvalues(v, cs, bp)
        out = out * ((-2 * v - 1) / (v + bp.q)) * lam2
        for vj in roots[i + 1 :]:
            out = out * (v + vj + 2) / (v + vj)
    return out
