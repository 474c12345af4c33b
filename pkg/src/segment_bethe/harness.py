"""Reproducible verification runs: configuration, named checks, reports.

Every subcommand draws its random data from a dedicated PCG64 stream keyed by
(seed, stream id), so a check produces the same residuals whether it runs on
its own or as part of ``all``.  One check = one record; the report payload
(everything except wall times) is byte-stable for a fixed seed and version.
"""

from __future__ import annotations

import csv
import io
import json
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._version import REPORT_SCHEMA, __version__
from .bethe import (
    det_small,
    lambda_total,
    refine_roots,
    root_sets_match,
    solve_bethe,
    solve_bethe_diagonal,
)
from .boundary import (
    check_dual_reflection,
    check_gl2_invariance,
    check_reflection,
    check_unitarity,
    check_ybe,
    k_plus,
    modified_k_plus_entries,
    q_similarity,
)
from .double_row import (
    check_exchange_relations,
    hamiltonian,
    transfer_forms_residual,
    transfer_matrix,
)
from .errors import ParameterError
from .linalg import relative_residual
from .params import (
    BoundaryParams,
    ChainSpec,
    draw_boundary_params,
    draw_chain_spec,
    draw_spectral_point,
    draw_spectral_points,
)
from .precision import validate_precision
from .scalar_products import (
    cauchy_det_factorized,
    cauchy_matrix,
    gaudin_korepin_norm,
    gaudin_matrix,
    n1_identities,
    norm_from_slavnov_limit,
    scalar_product_direct,
    slavnov_diagonal,
    slavnov_modified,
)
from .vectors import (
    check_c_action,
    check_cb_sweep,
    check_central_relation,
    check_expansion,
    check_multiple_actions,
    check_offshell_action,
    diagonal_w0_product,
    w0_scalar,
)

# Tolerances are looked up by longest matching name prefix so that, e.g.,
# "exchange" covers every exchange-plain-*/exchange-modified-* record while a
# config override may still pin one exact record.
DEFAULT_TOLERANCES = {
    "ybe": 1e-12,
    "r-unitarity": 1e-12,
    "reflection": 1e-12,
    "dual-reflection": 1e-12,
    "gl2-invariance": 1e-12,
    "kplus-diagonalization": 1e-12,
    "exchange": 1e-11,
    "transfer-trace-vs-modified": 1e-11,
    "transfer-commutation": 1e-10,
    "hamiltonian-commutation": 1e-10,
    "spectrum-completeness": 0.5,
    "spectrum-eigenvalue-agreement": 1e-8,
    "bethe-onshell-residual": 1e-10,
    "root-sets-distinct": 0.5,
    "offshell-action": 1e-9,
    "central-relation": 1e-9,
    "c-action": 1e-9,
    "multiple-actions": 1e-10,
    "cb-sweep": 1e-9,
    "expansion": 1e-10,
    "w0-routes": 1e-10,
    "slavnov-onshell": 1e-8,
    "slavnov-n4": 1e-6,
    "cauchy-factorization": 1e-10,
    "slavnov-diagonal": 1e-8,
    "w0-diagonal-product": 1e-10,
    "norm-vs-direct": 1e-8,
    "gaudin-diagonal-routes": 1e-10,
    "norm-limit-consistency": 1e-6,
    "n1-four-way": 1e-11,
    "n1-plain-product": 1e-11,
    "n1-prescription": 1e-11,
    "n1-determinant-direct": 1e-10,
    "n1-determinant-general": 1e-11,
    "n1-norm-limit": 1e-6,
}

_STREAMS = {
    "algebra": 0,
    "exchange": 1,
    "spectrum": 2,
    "offshell": 3,
    "slavnov": 4,
    "norm": 5,
    "n1": 6,
}


def _stream(config: "RunConfig", name: str) -> np.random.Generator:
    """Per-suite PCG64 generator; (seed, stream id) is the full entropy."""
    return np.random.default_rng([config.seed, _STREAMS[name]])


def _lookup(table: dict, name: str):
    if name in table:
        return table[name]
    best = None
    for key in table:
        if name.startswith(key) and (best is None or len(key) > len(best)):
            best = key
    return table[best] if best is not None else None


@dataclass(frozen=True)
class RunConfig:
    """Everything a verification run depends on.

    Boundary couplings are either fully drawn from the seed (the default) or
    pinned by giving ``p`` and ``q`` together, with ``xi_plus``/``xi_minus``
    optional (both absent means diagonal couplings).  ``thetas`` is the string
    ``"random"`` or an explicit generic tuple of length ``sites``.
    """

    sites: int = 2
    seed: int = 0
    draws: int = 20
    precision: str = "double"
    p: complex | None = None
    q: complex | None = None
    xi_plus: complex | None = None
    xi_minus: complex | None = None
    thetas: tuple | str = "random"
    tolerances: dict = field(default_factory=dict)
    direct_cap: int = 5

    def __post_init__(self):
        if self.sites < 1:
            raise ParameterError("sites must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must fit in 64 bits")
        if self.draws < 1:
            raise ParameterError("draws must be at least 1")
        validate_precision(self.precision)
        if (self.p is None) != (self.q is None):
            raise ParameterError("p and q must be given together")
        if self.p is None and (
            self.xi_plus is not None or self.xi_minus is not None
        ):
            raise ParameterError("xi couplings need p and q as well")
        if self.thetas != "random":
            thetas = tuple(complex(t) for t in self.thetas)
            if len(thetas) != self.sites:
                raise ParameterError("thetas must match the site count")
            if not ChainSpec(self.sites, thetas).is_generic():
                raise ParameterError("explicit thetas must be generic")
            object.__setattr__(self, "thetas", thetas)
        for name, tol in self.tolerances.items():
            if _lookup(DEFAULT_TOLERANCES, name) is None:
                raise ParameterError(f"unknown tolerance override {name!r}")
            if not float(tol) > 0:
                raise ParameterError(f"tolerance {name!r} must be positive")

    def boundary(self, rng, diagonal: bool = False) -> BoundaryParams:
        if self.p is not None:
            if diagonal:
                return BoundaryParams(self.p, self.q)
            return BoundaryParams(
                self.p, self.q, self.xi_plus or 0j, self.xi_minus or 0j
            )
        bp = draw_boundary_params(rng)
        if diagonal:
            return BoundaryParams(bp.p, bp.q)
        return bp

    def chain(self, rng, sites: int | None = None) -> ChainSpec:
        n = self.sites if sites is None else sites
        if self.thetas == "random" or n != self.sites:
            return draw_chain_spec(rng, n)
        return ChainSpec(n, self.thetas)

    def tolerance(self, name: str) -> float:
        hit = _lookup(self.tolerances, name)
        if hit is not None:
            return float(hit)
        hit = _lookup(DEFAULT_TOLERANCES, name)
        if hit is None:
            raise ParameterError(f"no tolerance registered for {name!r}")
        return hit

    def echo(self) -> dict:
        boundary: dict | str = "random"
        if self.p is not None:
            boundary = {
                "p": _jsonable(self.p),
                "q": _jsonable(self.q),
                "xi_plus": _jsonable(self.xi_plus or 0j),
                "xi_minus": _jsonable(self.xi_minus or 0j),
            }
        return {
            "sites": self.sites,
            "seed": int(self.seed),
            "draws": self.draws,
            "precision": self.precision,
            "boundary": boundary,
            "thetas": _jsonable(self.thetas),
            "tolerances": {
                k: float(v) for k, v in sorted(self.tolerances.items())
            },
            "direct_cap": self.direct_cap,
        }


def _jsonable(value):
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return value
    if isinstance(value, complex):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if value is None:
        return None
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass(frozen=True)
class CheckRecord:
    name: str
    anchor: str
    residual: float
    tolerance: float
    passed: bool
    wall_time: float

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "name": self.name,
            "anchor": self.anchor,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": bool(self.passed),
        }
        if include_timing:
            out["wall_time"] = float(self.wall_time)
        return out


@dataclass
class VerificationReport:
    command: str
    config: dict
    checks: list[CheckRecord] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, include_timing: bool = True) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "checks": [c.to_dict(include_timing) for c in self.checks],
            "all_pass": self.all_passed,
            "details": self.details,
        }

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(
            self.to_dict(include_timing), sort_keys=True, indent=2
        )

    def canonical_payload(self) -> bytes:
        """Serialization used for determinism comparisons: no wall times."""
        return json.dumps(
            self.to_dict(include_timing=False),
            sort_keys=True,
            separators=(",", ":"),
        ).encode("utf-8")


class _Recorder:
    def __init__(self, config: RunConfig, command: str):
        self.config = config
        self.report = VerificationReport(command=command, config=config.echo())

    def add(self, name, anchor, residual, wall_time, tol_key=None):
        tol = self.config.tolerance(tol_key or name)
        residual = float(residual)
        self.report.checks.append(
            CheckRecord(name, anchor, residual, tol, residual <= tol, wall_time)
        )

    def run(self, name, anchor, fn, tol_key=None):
        start = time.perf_counter()
        residual = fn()
        self.add(name, anchor, residual, time.perf_counter() - start, tol_key)

    def detail(self, key, value):
        self.report.details[key] = _jsonable(value)


# ---------------------------------------------------------------------------
# check-algebra: R- and K-matrix identities.


def run_check_algebra(config: RunConfig) -> VerificationReport:
    rec = _Recorder(config, "check-algebra")
    rng = _stream(config, "algebra")
    bp = config.boundary(rng)
    us = draw_spectral_points(rng, 10, bp=bp)
    vs = draw_spectral_points(rng, 10, avoid=us, bp=bp)
    ms = []
    while len(ms) < 10:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(m)) > 0.2:
            ms.append(m)

    rec.run("ybe", "yang-baxter", lambda: max(map(check_ybe, us, vs)))
    rec.run("r-unitarity", "r-unitarity", lambda: max(map(check_unitarity, us)))
    rec.run(
        "reflection",
        "boundary-reflection",
        lambda: max(check_reflection(u, v, bp) for u, v in zip(us, vs)),
    )
    rec.run(
        "dual-reflection",
        "dual-boundary-reflection",
        lambda: max(check_dual_reflection(u, v, bp) for u, v in zip(us, vs)),
    )
    rec.run(
        "gl2-invariance",
        "gl2-invariance",
        lambda: max(check_gl2_invariance(u, m) for u, m in zip(us, ms)),
    )
    if not bp.diagonal_mode:
        rec.run(
            "kplus-diagonalization",
            "twist-diagonalization",
            lambda: max(_kplus_diag_residual(u, bp) for u in us),
        )
    return rec.report


def _kplus_diag_residual(u, bp) -> float:
    qm = q_similarity(bp)
    got = np.linalg.solve(qm, k_plus(u, bp) @ qm)
    expected = np.diag(modified_k_plus_entries(u, bp))
    return relative_residual(got - expected, got, expected)


# ---------------------------------------------------------------------------
# exchange: quadratic operator relations plus transfer-matrix consistency.


def run_exchange(config: RunConfig) -> VerificationReport:
    rec = _Recorder(config, "exchange")
    rng = _stream(config, "exchange")
    bp = config.boundary(rng)
    cs = config.chain(rng)

    start = time.perf_counter()
    maxima: dict[str, float] = {}
    for _ in range(config.draws):
        u = draw_spectral_point(rng, cs=cs, bp=bp)
        v = draw_spectral_point(rng, (u,), cs=cs, bp=bp)
        for key, res in check_exchange_relations(u, v, cs, bp).items():
            maxima[key] = max(maxima.get(key, 0.0), res)
    elapsed = time.perf_counter() - start
    for key in maxima:
        family, relation = key.split(":")
        rec.add(
            f"exchange-{family}-{relation}",
            f"fundamental-exchange-{relation}",
            maxima[key],
            elapsed,
            tol_key="exchange",
        )

    points = draw_spectral_points(rng, 5, cs=cs, bp=bp)
    partners = draw_spectral_points(rng, 5, avoid=points, cs=cs, bp=bp)
    if not bp.diagonal_mode:
        rec.run(
            "transfer-trace-vs-modified",
            "transfer-trace-decomposition",
            lambda: max(transfer_forms_residual(u, cs, bp) for u in points),
        )
    rec.run(
        "transfer-commutation",
        "commuting-transfer-family",
        lambda: max(
            _commutator_residual(
                transfer_matrix(u, cs, bp).matrix,
                transfer_matrix(v, cs, bp).matrix,
            )
            for u, v in zip(points, partners)
        ),
    )

    cs0 = ChainSpec(cs.sites, (0j,) * cs.sites)
    ham = hamiltonian(cs0, bp).matrix
    rec.run(
        "hamiltonian-commutation",
        "hamiltonian-from-transfer",
        lambda: max(
            _commutator_residual(ham, transfer_matrix(u, cs0, bp).matrix)
            for u in points
        ),
    )
    return rec.report


def _commutator_residual(a, b) -> float:
    lhs = a @ b
    rhs = b @ a
    return relative_residual(lhs - rhs, lhs, rhs)


# ---------------------------------------------------------------------------
# spectrum / solve-bethe: brute-force diagonalization vs Bethe root sets.


def _spectrum_suite(config: RunConfig, command: str) -> VerificationReport:
    rec = _Recorder(config, command)
    rng = _stream(config, "spectrum")
    bp = config.boundary(rng)
    cs = config.chain(rng)

    start = time.perf_counter()
    if bp.diagonal_mode:
        solutions = []
        for magnons in range(cs.sites + 1):
            sector = solve_bethe_diagonal(cs, bp, magnons, rng=rng)
            solutions.extend(sector)
    else:
        solutions = solve_bethe(cs, bp, rng=rng)
    elapsed = time.perf_counter() - start

    expected = 2**cs.sites
    rec.add(
        "spectrum-completeness",
        "spectrum-completeness",
        float(expected - len(solutions)),
        elapsed,
    )
    rec.add(
        "spectrum-eigenvalue-agreement",
        "eigenvalue-expression-vs-diagonalization",
        max((s.eigenvalue_residual for s in solutions), default=0.0),
        elapsed,
    )
    rec.add(
        "bethe-onshell-residual",
        "bethe-system-residual",
        max((max(s.residuals_scaled, default=0.0) for s in solutions), default=0.0),
        elapsed,
    )
    duplicates = 0
    nonempty = [s.roots for s in solutions if s.roots]
    for i in range(len(nonempty)):
        for j in range(i + 1, len(nonempty)):
            if len(nonempty[i]) == len(nonempty[j]) and root_sets_match(
                nonempty[i], nonempty[j]
            ):
                duplicates += 1
    rec.add("root-sets-distinct", "root-set-dedup", float(duplicates), elapsed)

    probe = draw_spectral_point(rng, cs=cs, bp=bp)
    table = []
    for idx, sol in enumerate(solutions):
        table.append(
            {
                "branch": idx,
                "magnons": len(sol.roots),
                "roots": list(sol.roots),
                "bethe_residual": max(sol.residuals_scaled, default=0.0),
                "eigenvalue_residual": sol.eigenvalue_residual,
                "eigenvalue_at_probe": lambda_total(probe, sol.roots, cs, bp),
                "on_shell": sol.on_shell,
            }
        )
    rec.detail("probe_point", probe)
    rec.detail("branches", table)
    rec.detail("csv", _roots_csv(solutions))
    return rec.report


def _roots_csv(solutions) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "branch",
            "root_index",
            "root_re",
            "root_im",
            "bethe_residual",
            "eigenvalue_residual",
        ]
    )
    for idx, sol in enumerate(solutions):
        eig = repr(float(sol.eigenvalue_residual))
        if not sol.roots:
            writer.writerow([idx, "", "", "", "", eig])
        for j, root in enumerate(sol.roots):
            writer.writerow(
                [
                    idx,
                    j,
                    repr(float(root.real)),
                    repr(float(root.imag)),
                    repr(float(sol.residuals_scaled[j])),
                    eig,
                ]
            )
    return buf.getvalue()


def run_spectrum(config: RunConfig) -> VerificationReport:
    return _spectrum_suite(config, "spectrum")


def run_solve_bethe(config: RunConfig) -> VerificationReport:
    return _spectrum_suite(config, "solve-bethe")


# ---------------------------------------------------------------------------
# offshell: transfer action, central relation, C-action, expansion.


def run_offshell(config: RunConfig) -> VerificationReport:
    rec = _Recorder(config, "offshell")
    rng = _stream(config, "offshell")
    bp = config.boundary(rng)
    if bp.diagonal_mode:
        raise ParameterError(
            "the offshell suite needs off-diagonal boundary couplings"
        )
    cs = config.chain(rng)

    start = time.perf_counter()
    maxima: dict[str, float] = {}

    def fold(key, value):
        maxima[key] = max(maxima.get(key, 0.0), float(value))

    for _ in range(config.draws):
        roots = tuple(draw_spectral_points(rng, cs.sites, cs=cs, bp=bp))
        u = draw_spectral_point(rng, roots, cs=cs, bp=bp)
        off = check_offshell_action(u, roots, cs, bp)
        fold("offshell-action-right", off["right"])
        fold("offshell-action-left", off["left"])
        central = check_central_relation(u, roots, cs, bp)
        fold("central-relation-right", central["right"])
        fold("central-relation-left", central["left"])
        for value in check_multiple_actions(u, roots, cs, bp).values():
            fold("multiple-actions", value)
        fold("cb-sweep", check_cb_sweep(u, roots, cs, bp))
        fold("c-action", check_c_action(u, roots, cs, bp))
        expansion = check_expansion(roots, cs, bp)
        fold("expansion-right", expansion["right"])
        fold("expansion-left", expansion["left"])
        fold("w0-routes", expansion["w0_routes"])
    elapsed = time.perf_counter() - start

    anchors = {
        "offshell-action-right": "offshell-transfer-action",
        "offshell-action-left": "offshell-transfer-action",
        "central-relation-right": "inhomogeneous-central-relation",
        "central-relation-left": "inhomogeneous-central-relation",
        "multiple-actions": "operator-commutation-sweep",
        "cb-sweep": "cb-kernel-sweep",
        "c-action": "annihilation-action-expansion",
        "expansion-right": "modified-state-expansion",
        "expansion-left": "modified-state-expansion",
        "w0-routes": "w0-coefficient-routes",
    }
    for name in anchors:
        rec.add(name, anchors[name], maxima[name], elapsed)
    return rec.report


# ---------------------------------------------------------------------------
# slavnov: determinant formula vs direct contraction, plus diagonal limit.


def run_slavnov(config: RunConfig) -> VerificationReport:
    rec = _Recorder(config, "slavnov")
    rng = _stream(config, "slavnov")
    sites = config.sites
    tol_key = "slavnov-n4" if sites >= 4 else "slavnov-onshell"
    if sites > config.direct_cap:
        raise ParameterError(
            f"direct scalar products capped at {config.direct_cap} sites"
        )

    worst = {"bra": 0.0, "ket": 0.0, "cauchy": 0.0}
    redraws = 0
    start = time.perf_counter()
    last = None
    for d in range(config.draws):
        bp = config.boundary(rng)
        cs = config.chain(rng)
        solutions = solve_bethe(cs, bp, rng=rng)
        sol = solutions[d % len(solutions)]
        on = sol.roots
        last = (cs, bp)
        for _ in range(8):
            free = tuple(
                draw_spectral_points(rng, sites, avoid=on, cs=cs, bp=bp)
            )
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                formula_bra = slavnov_modified(
                    on, free, cs, bp, onshell="bra", precision=config.precision
                )
                direct_bra = scalar_product_direct(on, free, cs, bp)
                formula_ket = slavnov_modified(
                    free, on, cs, bp, onshell="ket", precision=config.precision
                )
                direct_ket = scalar_product_direct(free, on, cs, bp)
            if caught:
                redraws += 1
                continue
            break
        worst["bra"] = max(
            worst["bra"], _pair_residual(formula_bra, direct_bra)
        )
        worst["ket"] = max(
            worst["ket"], _pair_residual(formula_ket, direct_ket)
        )
        worst["cauchy"] = max(
            worst["cauchy"],
            _pair_residual(
                det_small(cauchy_matrix(free, on)),
                cauchy_det_factorized(free, on),
            ),
        )
    elapsed = time.perf_counter() - start
    rec.add(
        "slavnov-onshell-bra",
        "modified-slavnov-determinant",
        worst["bra"],
        elapsed,
        tol_key=tol_key,
    )
    rec.add(
        "slavnov-onshell-ket",
        "modified-slavnov-determinant",
        worst["ket"],
        elapsed,
        tol_key=tol_key,
    )
    rec.add(
        "cauchy-factorization",
        "cauchy-determinant-factorization",
        worst["cauchy"],
        elapsed,
    )
    rec.detail("conditioning_redraws", redraws)

    if sites <= 3:
        cs, bp_generic = last[0], last[1]
        bp_diag = BoundaryParams(bp_generic.p, bp_generic.q)
        start = time.perf_counter()
        worst_diag = 0.0
        worst_w0 = 0.0
        for magnons in range(sites + 1):
            sols = solve_bethe_diagonal(cs, bp_diag, magnons, rng=rng)
            on = sols[0].roots
            if magnons == 0:
                continue
            free = tuple(
                draw_spectral_points(rng, magnons, avoid=on, cs=cs, bp=bp_diag)
            )
            formula = slavnov_diagonal(free, on, cs, bp_diag)
            direct = scalar_product_direct(free, on, cs, bp_diag)
            worst_diag = max(worst_diag, _pair_residual(formula, direct))
            if magnons == sites:
                worst_w0 = _pair_residual(
                    diagonal_w0_product(on, cs, bp_diag),
                    w0_scalar(on, cs, bp_diag),
                )
        elapsed = time.perf_counter() - start
        rec.add(
            "slavnov-diagonal",
            "diagonal-slavnov-determinant",
            worst_diag,
            elapsed,
        )
        rec.add(
            "w0-diagonal-product", "w0-diagonal-product", worst_w0, elapsed
        )
    return rec.report


def _pair_residual(a, b) -> float:
    a, b = complex(a), complex(b)
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# ---------------------------------------------------------------------------
# norm: Gaudin-Korepin determinant vs the direct self-product.


def run_norm(config: RunConfig) -> VerificationReport:
    rec = _Recorder(config, "norm")
    rng = _stream(config, "norm")
    if config.sites > config.direct_cap:
        raise ParameterError(
            f"direct scalar products capped at {config.direct_cap} sites"
        )

    worst_norm = 0.0
    worst_routes = 0.0
    start = time.perf_counter()
    sample = None
    for d in range(config.draws):
        bp = config.boundary(rng)
        cs = config.chain(rng)
        solutions = solve_bethe(cs, bp, rng=rng)
        sol = solutions[d % len(solutions)]
        on = sol.roots
        formula = gaudin_korepin_norm(
            on, cs, bp, diag="explicit", precision=config.precision
        )
        direct = scalar_product_direct(on, on, cs, bp)
        worst_norm = max(worst_norm, _pair_residual(formula, direct))
        explicit = gaudin_matrix(on, cs, bp, diag="explicit")
        derivative = gaudin_matrix(on, cs, bp, diag="derivative")
        for i in range(len(on)):
            worst_routes = max(
                worst_routes,
                _pair_residual(explicit[i][i], derivative[i][i]),
            )
        if sample is None:
            sample = (on, cs, bp, formula)
    elapsed = time.perf_counter() - start
    rec.add("norm-vs-direct", "gaudin-korepin-norm", worst_norm, elapsed)
    rec.add(
        "gaudin-diagonal-routes",
        "gaudin-diagonal-routes",
        worst_routes,
        elapsed,
    )

    on, cs, bp, formula = sample
    rec.run(
        "norm-limit-consistency",
        "slavnov-coincident-limit",
        lambda: _pair_residual(
            norm_from_slavnov_limit(on, cs, bp), formula
        ),
    )
    return rec.report


# ---------------------------------------------------------------------------
# n1: closed-form one-root identities and the determinant prescription.


def run_n1(config: RunConfig) -> VerificationReport:
    rec = _Recorder(config, "n1")
    rng = _stream(config, "n1")
    bp = config.boundary(rng)
    if bp.diagonal_mode:
        raise ParameterError(
            "the n1 suite needs off-diagonal boundary couplings"
        )
    cs = config.chain(rng, sites=1)

    solutions = solve_bethe(cs, bp, rng=rng)
    # The prescription residual scales with the root's Bethe residual, and
    # its tolerance sits at 1e-11, so polish beyond the solver default.
    polished = [
        refine_roots(s.roots, cs, bp, tol=1e-14) for s in solutions
    ]
    worst: dict[str, float] = {}
    start = time.perf_counter()
    for d in range(config.draws):
        u1 = draw_spectral_point(rng, cs=cs, bp=bp)
        v1 = draw_spectral_point(rng, (u1,), cs=cs, bp=bp)
        root = polished[d % len(polished)][0]
        out = n1_identities(u1, v1, cs, bp, onshell_root=root)
        for key, name in (
            ("four_way", "n1-four-way"),
            ("plain_product", "n1-plain-product"),
            ("prescription", "n1-prescription"),
            ("determinant_direct", "n1-determinant-direct"),
            ("determinant_general", "n1-determinant-general"),
        ):
            worst[name] = max(worst.get(name, 0.0), float(out[key]))
    elapsed = time.perf_counter() - start
    anchors = {
        "n1-four-way": "single-root-identities",
        "n1-plain-product": "single-root-identities",
        "n1-prescription": "determinant-prescription",
        "n1-determinant-direct": "determinant-prescription",
        "n1-determinant-general": "determinant-prescription",
    }
    for name in anchors:
        rec.add(name, anchors[name], worst[name], elapsed)

    on = polished[0]
    rec.run(
        "n1-norm-limit",
        "slavnov-coincident-limit",
        lambda: _pair_residual(
            norm_from_slavnov_limit(on, cs, bp),
            gaudin_korepin_norm(on, cs, bp),
        ),
    )
    return rec.report


# ---------------------------------------------------------------------------
# all: the fixed registry, one merged report.


def run_all(config: RunConfig) -> VerificationReport:
    merged = VerificationReport(command="all", config=config.echo())
    for name in ("check-algebra", "exchange", "spectrum", "offshell",
                 "slavnov", "norm", "n1"):
        part = COMMANDS[name](config)
        merged.checks.extend(part.checks)
        if part.details:
            merged.details[name] = part.details
    return merged


COMMANDS = {
    "check-algebra": run_check_algebra,
    "exchange": run_exchange,
    "spectrum": run_spectrum,
    "solve-bethe": run_solve_bethe,
    "offshell": run_offshell,
    "slavnov": run_slavnov,
    "norm": run_norm,
    "n1": run_n1,
    "all": run_all,
}


def run(command: str, config: RunConfig) -> VerificationReport:
    if command not in COMMANDS:
        raise ParameterError(f"unknown subcommand {command!r}")
    return COMMANDS[command](config)
