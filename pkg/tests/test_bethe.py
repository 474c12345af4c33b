"""Eigenvalue expressions, Bethe system, Jacobians, and the two solvers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segment_bethe.bethe import (
    bethe_residuals,
    bethe_residuals_scaled,
    det_small,
    eigenvalue_dressed,
    eigenvalue_inhomogeneous,
    lambda_total,
    lambda_total_derivative,
    normalize_root_set,
    refine_roots,
    residual_jacobian,
    root_sets_match,
    solve_bethe,
    solve_bethe_diagonal,
    solve_small,
    vacuum_eigenvalue_derivatives,
    vacuum_eigenvalues,
)
from segment_bethe.double_row import double_row, transfer_matrix
from segment_bethe.errors import ConvergenceError, ParameterError
from segment_bethe.linalg import vacuum_state
from segment_bethe.params import draw_spectral_point, draw_spectral_points

STEP = 1e-6
DTOL = 1e-6


def test_vacuum_eigenvalues_from_operators(cs2, bp, rng):
    # The diagonal double-row entries act diagonally on the reference state;
    # the off-diagonal c entry kills it.
    u = draw_spectral_point(rng, cs=cs2, bp=bp)
    e = double_row(u, cs2, bp)
    vac = vacuum_state(cs2.sites)
    lam1, lam2 = vacuum_eigenvalues(u, cs2, bp)
    assert np.allclose(e.a.matrix @ vac, lam1 * vac)
    assert np.allclose(e.d.matrix @ vac, lam2 * vac)
    assert np.allclose(e.c.matrix @ vac, 0.0)
    assert np.linalg.norm(e.b.matrix @ vac) > 1e-6


def test_vacuum_eigenvalue_derivatives(cs2, bp, rng):
    u = draw_spectral_point(rng, cs=cs2, bp=bp)
    lam1, dlam1, lam2, dlam2 = vacuum_eigenvalue_derivatives(u, cs2, bp)
    v1p, v2p = vacuum_eigenvalues(u + STEP, cs2, bp)
    v1m, v2m = vacuum_eigenvalues(u - STEP, cs2, bp)
    assert abs(lam1 - vacuum_eigenvalues(u, cs2, bp)[0]) == 0
    assert abs(dlam1 - (v1p - v1m) / (2 * STEP)) < DTOL * max(1.0, abs(dlam1))
    assert abs(dlam2 - (v2p - v2m) / (2 * STEP)) < DTOL * max(1.0, abs(dlam2))
    assert lam2 == vacuum_eigenvalues(u, cs2, bp)[1]


def test_eigenvalue_terms_sum(cs2, bp, rng):
    roots = tuple(draw_spectral_points(rng, 2, cs=cs2, bp=bp))
    u = draw_spectral_point(rng, roots, cs=cs2, bp=bp)
    dressed, unwanted = eigenvalue_dressed(u, roots, cs2, bp)
    extra, extra_unwanted, total = eigenvalue_inhomogeneous(u, roots, cs2, bp)
    assert np.isclose(total, dressed + extra)
    assert np.isclose(lambda_total(u, roots, cs2, bp), total)
    assert len(unwanted) == len(extra_unwanted) == 2


def test_inhomogeneous_term_needs_full_root_count(cs2, bp, rng):
    roots = (draw_spectral_point(rng, cs=cs2, bp=bp),)
    with pytest.raises(ParameterError):
        eigenvalue_inhomogeneous(0.3 + 0.2j, roots, cs2, bp)
    with pytest.raises(ParameterError):
        bethe_residuals(roots, cs2, bp)


def test_lambda_total_derivative_finite_difference(cs2, bp, rng):
    roots = tuple(draw_spectral_points(rng, 2, cs=cs2, bp=bp))
    v = draw_spectral_point(rng, roots, cs=cs2, bp=bp)
    for i in range(2):
        got = lambda_total_derivative(v, roots, i, cs2, bp)
        up = list(roots)
        up[i] += STEP
        down = list(roots)
        down[i] -= STEP
        ref = (
            lambda_total(v, tuple(up), cs2, bp)
            - lambda_total(v, tuple(down), cs2, bp)
        ) / (2 * STEP)
        assert abs(got - ref) < DTOL * max(1.0, abs(got))


def test_residual_jacobian_finite_difference(cs2, bp, rng):
    roots = tuple(draw_spectral_points(rng, 2, cs=cs2, bp=bp))
    jac = residual_jacobian(roots, cs2, bp)
    for j in range(2):
        up = list(roots)
        up[j] += STEP
        down = list(roots)
        down[j] -= STEP
        rp = bethe_residuals(tuple(up), cs2, bp)
        rm = bethe_residuals(tuple(down), cs2, bp)
        for i in range(2):
            ref = (rp[i] - rm[i]) / (2 * STEP)
            assert abs(jac[i][j] - ref) < DTOL * max(1.0, abs(jac[i][j]))


def test_residuals_scaled_are_bounded_by_raw(cs2, bp, rng):
    roots = tuple(draw_spectral_points(rng, 2, cs=cs2, bp=bp))
    raw, scales = bethe_residuals_scaled(roots, cs2, bp)
    assert all(s > 0 for s in scales)
    assert [complex(r) for r in raw] == [
        complex(r) for r in bethe_residuals(roots, cs2, bp)
    ]


def test_solve_small_matches_numpy(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    b = rng.normal(size=4) + 1j * rng.normal(size=4)
    got = solve_small([list(row) for row in a], list(b))
    assert np.allclose(got, np.linalg.solve(a, b))


def test_det_small_matches_numpy(rng):
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert np.isclose(det_small([list(r) for r in a]), np.linalg.det(a))


def test_det_small_singular():
    assert det_small([[1.0, 2.0], [2.0, 4.0]]) == 0


def test_solve_small_singular_raises():
    with pytest.raises(ConvergenceError):
        solve_small([[1.0, 2.0], [2.0, 4.0]], [1.0, 0.0])


@given(
    data=st.lists(
        st.tuples(
            st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
            st.booleans(),
        ),
        min_size=1,
        max_size=4,
    ),
    seed=st.integers(min_value=0, max_value=999),
)
@settings(max_examples=100, deadline=None)
def test_normalize_root_set_invariance(data, seed):
    # The representative must not depend on per-root reflections u -> -u-1
    # or on the input order.
    roots = [u for u, _ in data]
    flipped = [(-u - 1 if flip else u) for u, flip in data]
    perm = np.random.default_rng(seed).permutation(len(flipped))
    shuffled = [flipped[i] for i in perm]
    base = normalize_root_set(roots)
    assert normalize_root_set(shuffled) == pytest.approx(base)


def test_root_sets_match_cases():
    a = (0.3 + 0.1j, -0.9 + 0.4j)
    assert root_sets_match(a, (a[1], a[0]))
    assert root_sets_match(a, (-a[0] - 1, a[1]))
    assert not root_sets_match(a, (a[0] + 0.1, a[1]))
    assert not root_sets_match(a, a[:1])


def test_refine_roots_recovers_solution(cs2, bp, solved2):
    sol = solved2[0]
    noisy = tuple(r + 1e-5 * (1 + 1j) for r in sol.roots)
    polished = refine_roots(noisy, cs2, bp, tol=1e-12)
    assert root_sets_match(polished, sol.roots, tol=1e-8)
    _, scales = bethe_residuals_scaled(polished, cs2, bp)
    raw = bethe_residuals(polished, cs2, bp)
    assert max(abs(r) / s for r, s in zip(raw, scales)) <= 1e-12


def test_solve_bethe_completeness_n1(solved1):
    assert len(solved1) == 2
    assert all(s.on_shell for s in solved1)
    assert all(len(s.roots) == 1 for s in solved1)
    assert all(s.eigenvalue_residual <= 1e-8 for s in solved1)


def test_solve_bethe_completeness_n2(solved2):
    assert len(solved2) == 4
    assert all(s.on_shell for s in solved2)
    assert sorted(s.branch for s in solved2) == [0, 1, 2, 3]
    for i, a in enumerate(solved2):
        for b in solved2[i + 1 :]:
            assert not root_sets_match(a.roots, b.roots)


def test_solved_eigenvalues_in_spectrum(cs2, bp, solved2, rng):
    # The eigenvalue expression on each root set must reproduce an actual
    # transfer-matrix eigenvalue at a fresh spectral point.
    probe = draw_spectral_point(rng, cs=cs2, bp=bp)
    spectrum = np.linalg.eigvals(transfer_matrix(probe, cs2, bp).matrix)
    for sol in solved2:
        lam = lambda_total(probe, sol.roots, cs2, bp)
        assert min(abs(spectrum - lam)) <= 1e-8 * max(1.0, abs(lam))


def test_multistart_agrees_with_spectrum_strategy(cs1, bp):
    multi = solve_bethe(
        cs1, bp, rng=np.random.default_rng(42), strategy="multistart"
    )
    spect = solve_bethe(cs1, bp, rng=np.random.default_rng(43))
    assert len(multi) == len(spect) == 2
    for m in multi:
        assert any(root_sets_match(m.roots, s.roots, tol=1e-7) for s in spect)


def test_solver_mode_guards(cs1, bp, bp_diag):
    with pytest.raises(ParameterError):
        solve_bethe(cs1, bp_diag)
    with pytest.raises(ParameterError):
        solve_bethe_diagonal(cs1, bp, magnons=1)
    with pytest.raises(ParameterError):
        solve_bethe_diagonal(cs1, bp_diag, magnons=5)
    with pytest.raises(ParameterError):
        solve_bethe(cs1, bp, strategy="annealing")


def test_diagonal_sector_counts(solved2_diag):
    assert len(solved2_diag[0]) == 1
    assert len(solved2_diag[1]) == 2
    assert len(solved2_diag[2]) == 1
    for sols in solved2_diag.values():
        for s in sols:
            assert s.on_shell and s.eigenvalue_residual <= 1e-8


def test_diagonal_empty_sector_is_vacuum(cs2, bp_diag, solved2_diag, rng):
    # Zero magnons: the dressed eigenvalue must match the vacuum expectation
    # value of the transfer matrix.
    sol = solved2_diag[0][0]
    assert sol.roots == ()
    probe = draw_spectral_point(rng, cs=cs2, bp=bp_diag)
    vac = vacuum_state(cs2.sites)
    expect = complex(vac @ transfer_matrix(probe, cs2, bp_diag).matrix @ vac)
    lam = lambda_total(probe, (), cs2, bp_diag)
    assert abs(lam - expect) <= 1e-10 * max(1.0, abs(expect))
