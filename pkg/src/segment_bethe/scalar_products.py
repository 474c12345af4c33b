"""Scalar products of Bethe states: brute force and determinant formulas.

Conventions for the determinant formulas: one root set is on shell (solves
the Bethe system), the other is free.  Matrices are indexed so that row ``i``
differentiates/evaluates against the ``i``-th member of one set and column
``j`` against the ``j``-th member of the other; see each builder's docstring.

The formulas are evaluated through the generic scalar layer, so passing
``precision="extended"`` reruns the same code on mpmath scalars.
"""

from __future__ import annotations

import math
import warnings

from . import kernels as kn
from .bethe import (
    det_small,
    lambda_total_derivative,
    refine_roots,
    residual_jacobian,
    vacuum_eigenvalue_derivatives,
    vacuum_eigenvalues,
)
from .double_row import double_row
from .errors import ConditioningWarning, ParameterError
from .linalg import vacuum_state
from .params import BoundaryParams, ChainSpec
from .precision import lift, lift_problem, lift_roots, validate_precision, workdps
from .vectors import build_dual_psi, build_psi, w0_scalar

__all__ = [
    "scalar_product_direct",
    "cauchy_matrix",
    "cauchy_det_factorized",
    "slavnov_jacobian",
    "slavnov_modified",
    "gaudin_matrix",
    "gaudin_korepin_norm",
    "norm_from_slavnov_limit",
    "slavnov_diagonal",
    "n1_identities",
    "PROXIMITY_THRESHOLD",
]

PROXIMITY_THRESHOLD = 1e-3


def scalar_product_direct(bra_roots, ket_roots, cs: ChainSpec, bp: BoundaryParams):
    """Brute-force scalar product of two Bethe states (bilinear pairing)."""
    bra = build_dual_psi(bra_roots, cs, bp).vector
    ket = build_psi(ket_roots, cs, bp).vector
    return complex(bra @ ket)


def _proximity(first, second) -> float:
    dmin = math.inf
    for a in first:
        for b in second:
            dmin = min(dmin, abs(a - b), abs(a + b + 1))
    return dmin


def _warn_if_close(first, second):
    dmin = _proximity(first, second)
    if dmin < PROXIMITY_THRESHOLD:
        loss = max(0.0, 2 * math.log10(1.0 / max(dmin, 1e-300)))
        warnings.warn(
            ConditioningWarning(
                f"root sets approach a determinant pole (distance {dmin:.2e}); "
                f"roughly {loss:.0f} digits lost in double precision"
            ),
            stacklevel=3,
        )
    return dmin


def _v_kernel(a, b):
    return 2 * (a + 1) * (2 * b + 1) / kn.Q(a, b)


def cauchy_matrix(free, onshell):
    """Matrix with entries 2(free_i + 1)(2 onshell_j + 1) / Q(free_i, onshell_j)."""
    return [[_v_kernel(a, b) for b in onshell] for a in free]


def cauchy_det_factorized(free, onshell):
    """Closed product form of the cauchy_matrix determinant."""
    mm = len(free)
    out = 1
    for i in range(mm):
        out = out * 2 * (free[i] + 1) * (2 * onshell[i] + 1)
    for i in range(mm):
        for j in range(i + 1, mm):
            out = out * kn.Q(onshell[j], onshell[i]) * kn.Q(free[i], free[j])
    den = 1
    for a in free:
        for b in onshell:
            den = den * kn.Q(a, b)
    return out / den


def slavnov_jacobian(
    free,
    onshell,
    cs: ChainSpec,
    bp: BoundaryParams,
    include_dressed: bool = True,
    include_inhomogeneous: bool = True,
):
    """Rows: derivative in onshell[i]; columns: eigenvalue at free[j]."""
    mm = len(onshell)
    return [
        [
            lambda_total_derivative(
                free[j],
                tuple(onshell),
                i,
                cs,
                bp,
                include_dressed=include_dressed,
                include_inhomogeneous=include_inhomogeneous,
            )
            for j in range(mm)
        ]
        for i in range(mm)
    ]


def _slavnov_prefactor(nn, bp):
    rho = bp.rho
    return ((rho - 2) / (2 * (rho - 1) * (rho - 1))) ** nn


def slavnov_modified(
    bra_roots,
    ket_roots,
    cs: ChainSpec,
    bp: BoundaryParams,
    onshell: str = "bra",
    precision: str = "double",
    warn: bool = True,
):
    """Determinant formula for the scalar product with one set on shell.

    ``onshell`` names the set that solves the Bethe system; the formula
    differentiates the eigenvalue in the on-shell roots and evaluates at the
    free ones.
    """
    validate_precision(precision)
    if bp.diagonal_mode:
        raise ParameterError("use slavnov_diagonal for diagonal couplings")
    if len(bra_roots) != len(ket_roots):
        raise ParameterError("scalar product needs equally sized root sets")
    if onshell not in ("bra", "ket"):
        raise ParameterError("onshell must be 'bra' or 'ket'")
    if warn:
        _warn_if_close(bra_roots, ket_roots)
    nn = len(bra_roots)
    if nn == 0:
        return 1.0 + 0j

    cs_l, bp_l = lift_problem(cs, bp, precision)
    on = lift_roots(bra_roots if onshell == "bra" else ket_roots, precision)
    free = lift_roots(ket_roots if onshell == "bra" else bra_roots, precision)

    jac = slavnov_jacobian(free, on, cs_l, bp_l)
    vmat = cauchy_matrix(free, on)
    w0 = w0_scalar(on, cs_l, bp_l)
    pref = _slavnov_prefactor(nn, bp_l)
    return pref * w0 * det_small(jac) / det_small(vmat)


# ---------------------------------------------------------------------------
# Norm: Gaudin-Korepin determinant.


def _gaudin_diag_explicit(i, roots, cs, bp):
    ui = roots[i]
    rest = tuple(roots[:i]) + tuple(roots[i + 1 :])
    lam1, dlam1, lam2, dlam2 = vacuum_eigenvalue_derivatives(ui, cs, bp)
    pm = kn.phi(-ui - 1)
    pu = kn.phi(ui)
    ab = kn.alpha_bar(ui, bp)
    db = kn.delta_bar(ui, bp)
    tp = kn.tilde_phi(ui, bp.p)
    dtp_rel = kn.d_tilde_phi(ui, bp.p) / tp
    q_m = kn.Q_product(-ui, rest)
    q_p = kn.Q_product(ui + 1, rest)
    sum_m = 0
    sum_p = 0
    for ukk in rest:
        sum_m = sum_m + 1 / kn.Q(-ui, ukk)
        sum_p = sum_p + 1 / kn.Q(ui + 1, ukk)
    term1 = (
        -pm
        * ab
        * lam1
        * q_m
        * ((2 * ui - 1) * sum_m + (1 / ui - dtp_rel + kn.d_alpha_bar(ui, bp) / ab))
    )
    term2 = (
        pu
        * db
        * lam2
        * q_p
        * (
            (2 * ui + 3) * sum_p
            + (1 / (ui + 1) - dtp_rel + kn.d_delta_bar(ui, bp) / db)
        )
    )
    term3 = -dlam1 * (pm * ab * q_m - bp.rho * tp * lam2 / (2 * ui + 1))
    term4 = dlam2 * (pu * db * q_p + bp.rho * tp * lam1 / (2 * ui + 1))
    return term1 + term2 + term3 + term4


def gaudin_matrix(
    roots, cs: ChainSpec, bp: BoundaryParams, diag: str = "explicit"
):
    """Norm determinant matrix on an on-shell set.

    ``diag`` picks the diagonal construction: ``explicit`` uses the closed
    form, ``derivative`` uses Q-product times the Bethe-system Jacobian
    diagonal.  Off-diagonal entries depend on (i, j) only through the excluded
    pair.
    """
    roots = tuple(roots)
    mm = len(roots)
    if diag not in ("explicit", "derivative"):
        raise ParameterError("diag must be 'explicit' or 'derivative'")
    if diag == "derivative":
        jac = residual_jacobian(roots, cs, bp)
    rows = []
    for i in range(mm):
        row = []
        for j in range(mm):
            if i == j:
                if diag == "explicit":
                    row.append(_gaudin_diag_explicit(i, roots, cs, bp))
                else:
                    rest = tuple(roots[:i]) + tuple(roots[i + 1 :])
                    row.append(kn.Q_product(roots[i], rest) * jac[i][i])
            else:
                uj = roots[j]
                rest = tuple(
                    roots[m] for m in range(mm) if m not in (i, j)
                )
                lam1, lam2 = vacuum_eigenvalues(uj, cs, bp)
                val = (2 * uj + 1) * (
                    kn.phi(-uj - 1)
                    * kn.alpha_bar(uj, bp)
                    * lam1
                    * kn.Q_product(-uj, rest)
                    - kn.phi(uj)
                    * kn.delta_bar(uj, bp)
                    * lam2
                    * kn.Q_product(uj + 1, rest)
                )
                row.append(val)
        rows.append(row)
    return rows


def gaudin_korepin_norm(
    roots,
    cs: ChainSpec,
    bp: BoundaryParams,
    diag: str = "explicit",
    precision: str = "double",
):
    """Square norm of an on-shell Bethe state from the Gaudin-Korepin formula."""
    validate_precision(precision)
    if bp.diagonal_mode:
        raise ParameterError("norm formula applies to generic couplings")
    roots = tuple(roots)
    nn = len(roots)
    if nn == 0:
        return 1.0 + 0j
    cs_l, bp_l = lift_problem(cs, bp, precision)
    roots_l = lift_roots(roots, precision)
    gm = gaudin_matrix(roots_l, cs_l, bp_l, diag=diag)
    w0 = w0_scalar(roots_l, cs_l, bp_l)
    pref = _slavnov_prefactor(nn, bp_l)
    den = 1
    for u in roots_l:
        den = den * 2 * (u + 1)
    for i in range(nn):
        for j in range(i + 1, nn):
            den = den * kn.Q(roots_l[j], roots_l[i]) * kn.Q(roots_l[i], roots_l[j])
    return pref * w0 * det_small(gm) / den


def norm_from_slavnov_limit(
    roots,
    cs: ChainSpec,
    bp: BoundaryParams,
    eps: float = 1e-8,
    precision: str = "extended",
    dps: int = 60,
):
    """Norm as the coincident-set limit of the determinant scalar product.

    Shifts the free set off the on-shell one by ``eps`` along the all-ones
    direction and extrapolates the last three evaluations to zero (Neville).
    Extended precision is the default: the Jacobian entries blow up like
    1/eps^2, so doubles lose the limit long before it stabilises.
    """
    validate_precision(precision)
    roots = tuple(roots)
    if precision == "double":
        steps = [eps * (0.5**j) for j in range(3)]
        on = roots
        cs_l, bp_l = cs, bp
    else:
        with workdps(dps):
            on = refine_roots(lift_roots(roots), *lift_problem(cs, bp), tol=1e-40)
        cs_l, bp_l = lift_problem(cs, bp)
        steps = [lift(eps) * (0.5**j) for j in range(3)]

    def evaluate(e):
        free = tuple(u + e for u in on)
        jac = slavnov_jacobian(free, on, cs_l, bp_l)
        vmat = cauchy_matrix(free, on)
        w0 = w0_scalar(on, cs_l, bp_l)
        return (
            _slavnov_prefactor(len(on), bp_l)
            * w0
            * det_small(jac)
            / det_small(vmat)
        )

    def neville(xs, ys):
        # Polynomial extrapolation to 0 in the step parameter.
        table = list(ys)
        mm = len(xs)
        for level in range(1, mm):
            for i in range(mm - level):
                table[i] = (
                    xs[i + level] * table[i] - xs[i] * table[i + 1]
                ) / (xs[i + level] - xs[i])
        return table[0]

    if precision == "double":
        values = [evaluate(e) for e in steps]
        return complex(neville(steps, values))
    with workdps(dps):
        values = [evaluate(e) for e in steps]
        out = neville(steps, values)
        return complex(out)


# ---------------------------------------------------------------------------
# Diagonal limit.


def slavnov_diagonal(
    bra_roots, ket_roots, cs: ChainSpec, bp: BoundaryParams, warn: bool = True
):
    """Determinant formula for diagonal couplings; the ket set is on shell."""
    if not bp.diagonal_mode:
        raise ParameterError("diagonal formula needs diagonal couplings")
    if len(bra_roots) != len(ket_roots):
        raise ParameterError("scalar product needs equally sized root sets")
    if warn:
        _warn_if_close(bra_roots, ket_roots)
    mm = len(ket_roots)
    if mm == 0:
        return 1.0 + 0j
    on = tuple(ket_roots)
    free = tuple(bra_roots)
    pref = 1
    for i, v in enumerate(on):
        _, lam2 = vacuum_eigenvalues(v, cs, bp)
        pref = pref * lam2 * (2 * v + 1) / (v + bp.q)
        for vj in on[:i]:
            pref = pref * (v + vj + 2) / (v + vj)
    jac = slavnov_jacobian(free, on, cs, bp, include_inhomogeneous=False)
    vmat = cauchy_matrix(free, on)
    return pref * det_small(jac) / det_small(vmat)


# ---------------------------------------------------------------------------
# One-root identities.


def _lambda_g_pair(u, v, cs, bp):
    lam1, lam2 = vacuum_eigenvalues(u, cs, bp)
    return bp.rho * kn.tilde_phi(u, bp.p) * lam1 * lam2 / kn.Q(u, v)


def _s_diag_formula(u1, v1, cs, bp):
    l1u, l2u = vacuum_eigenvalues(u1, cs, bp)
    l1v, l2v = vacuum_eigenvalues(v1, cs, bp)
    return (
        (kn.s(u1, v1) + kn.x(u1, v1)) * l1u * l1v
        + kn.y(u1, v1) * l2u * l1v
        + kn.r(u1, v1) * l1u * l2v
        + kn.q(u1, v1) * l1v * l2u
        + kn.w(u1, v1) * l2u * l2v
    )


def n1_identities(
    u1,
    v1,
    cs: ChainSpec,
    bp: BoundaryParams,
    onshell_root=None,
) -> dict:
    """Closed-form single-root scalar products and their cross-checks.

    Returns named residuals; when an on-shell root is supplied the reduction
    of the mixed form to the one-root determinant formula is checked with the
    ket root on shell.
    """
    if cs.sites != 1:
        raise ParameterError("single-root identities need a one-site chain")
    if bp.diagonal_mode:
        raise ParameterError("single-root identities need generic couplings")
    u1, v1 = complex(u1), complex(v1)
    rho = bp.rho

    def w0(u):
        return w0_scalar((u,), cs, bp)

    def s_mixed(a, b):
        """Mixed closed form with the plain-basis product and both tails."""
        sd = _s_diag_formula(a, b, cs, bp)
        return ((rho - 2) / (2 * (rho - 1) ** 2)) * (
            (rho - 1) * sd
            + _lambda_g_pair(a, b, cs, bp) * w0(b) / (2 * (a + 1))
            + _lambda_g_pair(b, a, cs, bp) * w0(a) / (2 * (b + 1))
        )

    direct = scalar_product_direct((u1,), (v1,), cs, bp)
    good = s_mixed(u1, v1)
    s1 = ((rho - 2) / (2 * (rho - 1))) ** 2 * _s_diag_formula(
        u1, v1, cs, bp
    ) + (rho * (rho - 2) / (2 * (rho - 1)) ** 2) * w0(u1) * w0(v1)

    l1u, l2u = vacuum_eigenvalues(u1, cs, bp)
    l1v, l2v = vacuum_eigenvalues(v1, cs, bp)
    pmu = kn.phi(-u1 - 1)
    pmv = kn.phi(-v1 - 1)
    s2 = (
        _s_diag_formula(u1, v1, cs, bp)
        - (rho / (2 * (rho - 1) ** 2))
        * (
            _lambda_g_pair(u1, v1, cs, bp) * w0(v1) / (2 * (u1 + 1))
            + _lambda_g_pair(v1, u1, cs, bp) * w0(u1) / (2 * (v1 + 1))
        )
        + (rho / (2 * (rho - 1)))
        * (
            pmv
            * l1v
            * (
                ((u1 + v1 - 1) / (u1 + v1 + 1)) * pmu * l1u
                - ((u1 - v1 + 2) / (u1 - v1)) * l2u
            )
            - l2v
            * (
                ((u1 - v1 - 2) / (u1 - v1)) * pmu * l1u
                - ((u1 + v1 + 3) / (u1 + v1 + 1)) * l2u
            )
        )
    )

    values = {"direct": direct, "mixed": good, "plain_basis": s1, "compact": s2}
    scale = max(abs(v) for v in values.values())
    four_way = max(
        abs(a - b) for a in values.values() for b in values.values()
    ) / max(scale, 1e-300)
    out = {"four_way": four_way, "values": values}

    # Brute-force check of the plain-basis two-operator product formula.
    vac = vacuum_state(1)
    sd_matrix = complex(
        vac
        @ double_row(u1, cs, bp).c.matrix
        @ double_row(v1, cs, bp).b.matrix
        @ vac
    )
    sd_formula = _s_diag_formula(u1, v1, cs, bp)
    out["plain_product"] = abs(sd_matrix - sd_formula) / max(
        abs(sd_matrix), abs(sd_formula), 1e-300
    )

    if onshell_root is not None:
        wv = complex(onshell_root)
        dlam = lambda_total_derivative(u1, (wv,), 0, cs, bp)
        det_form = (
            ((rho - 2) / (2 * (rho - 1) ** 2))
            * w0(wv)
            * dlam
            / _v_kernel(u1, wv)
        )
        mixed_on = s_mixed(u1, wv)
        direct_on = scalar_product_direct((u1,), (wv,), cs, bp)
        slav = slavnov_modified((u1,), (wv,), cs, bp, onshell="ket")
        scale = max(abs(det_form), abs(mixed_on), abs(direct_on), abs(slav))
        out["prescription"] = abs(det_form - mixed_on) / max(scale, 1e-300)
        out["determinant_direct"] = abs(det_form - direct_on) / max(
            scale, 1e-300
        )
        out["determinant_general"] = abs(det_form - slav) / max(scale, 1e-300)
    return out
