"""Determinant scalar products and norms against brute-force pairings."""

import warnings

import numpy as np
import pytest

from segment_bethe.bethe import (
    det_small,
    inhomogeneous_value,
    refine_roots,
)
from segment_bethe.errors import ConditioningWarning, ParameterError
from segment_bethe.params import BoundaryParams, draw_spectral_point, draw_spectral_points
from segment_bethe.scalar_products import (
    PROXIMITY_THRESHOLD,
    cauchy_det_factorized,
    cauchy_matrix,
    gaudin_korepin_norm,
    gaudin_matrix,
    n1_identities,
    norm_from_slavnov_limit,
    scalar_product_direct,
    slavnov_diagonal,
    slavnov_jacobian,
    slavnov_modified,
)

SLAVNOV_TOL = 1e-8


def test_direct_empty_sets(cs2, bp):
    assert scalar_product_direct((), (), cs2, bp) == 1.0
    assert slavnov_modified((), (), cs2, bp) == 1.0


def test_direct_permutation_invariant(cs2, bp, rng):
    bra = tuple(draw_spectral_points(rng, 2, cs=cs2, bp=bp))
    ket = tuple(draw_spectral_points(rng, 2, avoid=bra, cs=cs2, bp=bp))
    base = scalar_product_direct(bra, ket, cs2, bp)
    assert scalar_product_direct(bra[::-1], ket, cs2, bp) == pytest.approx(base)
    assert scalar_product_direct(bra, ket[::-1], cs2, bp) == pytest.approx(base)


@pytest.mark.parametrize("placement", ["bra", "ket"])
def test_slavnov_vs_direct_n1(cs1, bp, solved1, rng, placement):
    for sol in solved1:
        free = tuple(draw_spectral_points(rng, 1, avoid=sol.roots, cs=cs1, bp=bp))
        bra, ket = (sol.roots, free) if placement == "bra" else (free, sol.roots)
        det_val = slavnov_modified(bra, ket, cs1, bp, onshell=placement)
        ref = scalar_product_direct(bra, ket, cs1, bp)
        assert abs(det_val - ref) <= SLAVNOV_TOL * max(abs(det_val), abs(ref))


@pytest.mark.parametrize("placement", ["bra", "ket"])
def test_slavnov_vs_direct_n2(cs2, bp, solved2, rng, placement):
    for sol in solved2:
        free = tuple(draw_spectral_points(rng, 2, avoid=sol.roots, cs=cs2, bp=bp))
        bra, ket = (sol.roots, free) if placement == "bra" else (free, sol.roots)
        det_val = slavnov_modified(bra, ket, cs2, bp, onshell=placement)
        ref = scalar_product_direct(bra, ket, cs2, bp)
        assert abs(det_val - ref) <= SLAVNOV_TOL * max(abs(det_val), abs(ref))


def test_conditioning_warning(cs2, bp, solved2):
    on = solved2[0].roots
    close = (on[0] + 0.5 * PROXIMITY_THRESHOLD, on[1] + 0.8)
    with pytest.warns(ConditioningWarning):
        slavnov_modified(close, on, cs2, bp, onshell="ket")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        slavnov_modified(close, on, cs2, bp, onshell="ket", warn=False)


def test_slavnov_guards(cs2, bp, bp_diag, rng):
    roots = tuple(draw_spectral_points(rng, 2, cs=cs2, bp=bp))
    other = tuple(draw_spectral_points(rng, 2, avoid=roots, cs=cs2, bp=bp))
    with pytest.raises(ParameterError):
        slavnov_modified(roots, other[:1], cs2, bp)
    with pytest.raises(ParameterError):
        slavnov_modified(roots, other, cs2, bp, onshell="both")
    with pytest.raises(ParameterError):
        slavnov_modified(roots, other, cs2, bp_diag)
    with pytest.raises(ParameterError):
        slavnov_diagonal(roots, other, cs2, bp)
    with pytest.raises(ParameterError):
        gaudin_korepin_norm(roots, cs2, bp_diag)
    with pytest.raises(ParameterError):
        gaudin_matrix(roots, cs2, bp, diag="auto")


def test_cauchy_factorization(rng, cs2, bp):
    for size in (1, 2, 3):
        free = tuple(draw_spectral_points(rng, size, cs=cs2, bp=bp))
        on = tuple(draw_spectral_points(rng, size, avoid=free, cs=cs2, bp=bp))
        det_val = det_small(cauchy_matrix(free, on))
        closed = cauchy_det_factorized(free, on)
        assert abs(det_val - closed) <= 1e-10 * max(abs(det_val), abs(closed))


def test_leading_jacobian_factorizes(cs2, bp, rng):
    # With the dressed part switched off every Jacobian row is an explicit
    # rational row, and the determinant collapses to the eigenvalue product
    # times the Cauchy determinant.
    on = tuple(draw_spectral_points(rng, 2, cs=cs2, bp=bp))
    free = tuple(draw_spectral_points(rng, 2, avoid=on, cs=cs2, bp=bp))
    jac = slavnov_jacobian(free, on, cs2, bp, include_dressed=False)
    lhs = det_small(jac)
    prod = 1.0 + 0j
    for v in free:
        prod = prod * inhomogeneous_value(v, on, cs2, bp) / (2 * (v + 1))
    rhs = prod * det_small(cauchy_matrix(free, on))
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))


def test_gaudin_diagonal_routes_agree(cs2, bp, solved2):
    for sol in solved2:
        explicit = det_small(gaudin_matrix(sol.roots, cs2, bp, diag="explicit"))
        derived = det_small(gaudin_matrix(sol.roots, cs2, bp, diag="derivative"))
        assert abs(explicit - derived) <= 1e-10 * max(abs(explicit), abs(derived))


def test_norm_vs_direct(cs1, cs2, bp, solved1, solved2):
    for cs, sols in ((cs1, solved1), (cs2, solved2)):
        for sol in sols:
            ref = scalar_product_direct(sol.roots, sol.roots, cs, bp)
            for diag in ("explicit", "derivative"):
                val = gaudin_korepin_norm(sol.roots, cs, bp, diag=diag)
                assert abs(val - ref) <= SLAVNOV_TOL * max(abs(val), abs(ref))


def test_norm_limit_n1(cs1, bp, solved1):
    sol = solved1[0]
    ref = gaudin_korepin_norm(sol.roots, cs1, bp)
    lim = norm_from_slavnov_limit(sol.roots, cs1, bp)
    assert abs(lim - ref) <= 1e-6 * max(abs(lim), abs(ref))


def test_slavnov_diagonal_vs_direct(cs2, bp_diag, solved2_diag, rng):
    assert slavnov_diagonal((), (), cs2, bp_diag) == 1.0
    for magnons in (1, 2):
        for sol in solved2_diag[magnons]:
            free = tuple(
                draw_spectral_points(rng, magnons, avoid=sol.roots, cs=cs2, bp=bp_diag)
            )
            det_val = slavnov_diagonal(free, sol.roots, cs2, bp_diag)
            ref = scalar_product_direct(free, sol.roots, cs2, bp_diag)
            assert abs(det_val - ref) <= SLAVNOV_TOL * max(abs(det_val), abs(ref))


def test_n1_identities(cs1, bp, solved1, rng):
    u = draw_spectral_point(rng, cs=cs1, bp=bp)
    v = draw_spectral_point(rng, (u,), cs=cs1, bp=bp)
    out = n1_identities(u, v, cs1, bp, onshell_root=solved1[0].roots[0])
    assert out["four_way"] <= 1e-11
    assert out["plain_product"] <= 1e-11
    assert out["prescription"] <= 1e-11
    assert out["determinant_direct"] <= 1e-10
    assert out["determinant_general"] <= 1e-11
    assert set(out["values"]) == {"direct", "mixed", "plain_basis", "compact"}


def test_n1_guards(cs1, cs2, bp, bp_diag):
    with pytest.raises(ParameterError):
        n1_identities(0.3 + 0.1j, 0.7 - 0.2j, cs2, bp)
    with pytest.raises(ParameterError):
        n1_identities(0.3 + 0.1j, 0.7 - 0.2j, cs1, bp_diag)


def test_modified_product_reaches_diagonal_limit(cs2, bp, bp_diag, solved2_diag, rng):
    # Scaling both couplings by t sends rho ~ t^2 to zero.  Tracking the
    # full-sector on-shell roots along the path, the general determinant
    # formula must approach the diagonal one linearly in |rho|.
    v0 = solved2_diag[2][0].roots
    free = tuple(draw_spectral_points(rng, 2, avoid=v0, cs=cs2, bp=bp_diag))
    ref = slavnov_diagonal(free, v0, cs2, bp_diag)
    errors = []
    for t in (1e-1, 1e-2, 1e-3):
        bp_t = BoundaryParams(bp.p, bp.q, t * bp.xi_plus, t * bp.xi_minus)
        vt = refine_roots(v0, cs2, bp_t, tol=1e-13)
        val = slavnov_modified(free, vt, cs2, bp_t, onshell="ket")
        err = abs(val / ref - 1)
        assert err <= 50 * abs(bp_t.rho)
        errors.append(err)
    assert errors[1] <= errors[0] / 20
    assert errors[2] <= errors[1] / 20
    assert errors[2] <= 1e-3
