"""Boundary couplings, chain data and the random draws used by the checks.

Parameters are deliberately immutable (hashable) so operator builders can
memoise on them.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# Rejection thresholds for degenerate parameter combinations.
RHO_ONE_TOL = 1e-8
GENERIC_TOL = 1e-9


def _sqrt(z):
    """Principal square root that works for both complex and mpmath scalars."""
    if isinstance(z, (complex, float, int)):
        return cmath.sqrt(z)
    import mpmath

    return mpmath.sqrt(z)


@dataclass(frozen=True)
class BoundaryParams:
    """Left/right boundary couplings.

    ``p`` sits at the diagonal (right) end, ``q`` with the off-diagonal
    couplings ``xi_plus``/``xi_minus`` at the left end.  Either both ``xi``
    vanish (diagonal mode) or neither does.
    """

    p: complex
    q: complex
    xi_plus: complex = 0j
    xi_minus: complex = 0j

    def __post_init__(self):
        has_plus = self.xi_plus != 0
        has_minus = self.xi_minus != 0
        if has_plus != has_minus:
            raise ParameterError(
                "off-diagonal couplings must both vanish or both be nonzero"
            )
        if has_plus and abs(self.rho - 1) <= RHO_ONE_TOL:
            # xi_plus*xi_minus = -1 makes the similarity transform singular.
            raise ParameterError("couplings give rho too close to 1")

    @property
    def diagonal_mode(self) -> bool:
        return self.xi_plus == 0 and self.xi_minus == 0

    @property
    def rho(self):
        """Root of rho^2 - 2 rho = xi_plus*xi_minus on the principal branch."""
        return 1 - _sqrt(1 + self.xi_plus * self.xi_minus)


@dataclass(frozen=True)
class ChainSpec:
    """Number of sites and the inhomogeneity attached to each site."""

    sites: int
    thetas: tuple

    def __post_init__(self):
        if self.sites < 1:
            raise ParameterError("need at least one site")
        if len(self.thetas) != self.sites:
            raise ParameterError("one inhomogeneity per site required")

    @classmethod
    def homogeneous(cls, sites: int) -> "ChainSpec":
        return cls(sites, (0j,) * sites)

    @property
    def is_homogeneous(self) -> bool:
        return all(t == 0 for t in self.thetas)

    def is_generic(self, tol: float = GENERIC_TOL) -> bool:
        """Pairwise theta_i != +-theta_j and 2 theta_i != +-1."""
        ts = self.thetas
        for i, a in enumerate(ts):
            if abs(2 * a - 1) < tol or abs(2 * a + 1) < tol:
                return False
            for b in ts[i + 1 :]:
                if abs(a - b) < tol or abs(a + b) < tol:
                    return False
        return True


def _uniform_disc(rng: np.random.Generator, radius: float) -> complex:
    r = radius * np.sqrt(rng.uniform())
    phase = rng.uniform(0.0, 2 * np.pi)
    return complex(r * np.cos(phase), r * np.sin(phase))


def _annulus(rng: np.random.Generator, rmin: float, rmax: float) -> complex:
    r = rng.uniform(rmin, rmax)
    phase = rng.uniform(0.0, 2 * np.pi)
    return complex(r * np.cos(phase), r * np.sin(phase))


def draw_boundary_params(
    rng: np.random.Generator, diagonal: bool = False
) -> BoundaryParams:
    """Draw boundary couplings away from every degenerate combination."""
    while True:
        p = complex(rng.uniform(1.0, 3.0), rng.uniform(-0.5, 0.5))
        q = complex(rng.uniform(1.0, 3.0), rng.uniform(-0.5, 0.5))
        if diagonal:
            return BoundaryParams(p, q)
        xi_plus = _annulus(rng, 0.2, 1.5)
        xi_minus = _annulus(rng, 0.2, 1.5)
        try:
            bp = BoundaryParams(p, q, xi_plus, xi_minus)
        except ParameterError:
            continue
        if abs(bp.rho) < 1e-3:
            continue  # keeps xi^2/rho coefficients tame
        return bp


def draw_chain_spec(
    rng: np.random.Generator,
    sites: int,
    radius: float = 0.4,
    min_sep: float = 1e-3,
) -> ChainSpec:
    """Generic inhomogeneities in a small disc, mutually well separated."""
    thetas: list[complex] = []
    while len(thetas) < sites:
        cand = _uniform_disc(rng, radius)
        if abs(cand) < min_sep:
            continue
        if any(
            abs(cand - t) < min_sep or abs(cand + t) < min_sep for t in thetas
        ):
            continue
        thetas.append(cand)
    return ChainSpec(sites, tuple(thetas))


def draw_spectral_point(
    rng: np.random.Generator,
    avoid: tuple = (),
    cs: ChainSpec | None = None,
    bp: BoundaryParams | None = None,
    radius: float = 2.0,
    clearance: float = 1e-3,
) -> complex:
    """One spectral parameter keeping clear of kernel poles.

    Rejection is against ``2u+1 = 0``, against ``u - a`` and ``u + a + 1``
    for every ``a`` in ``avoid``, and against the parameter-dependent pole
    loci of the dressed/inhomogeneous eigenvalue terms.
    """
    for _ in range(10_000):
        u = _uniform_disc(rng, radius)
        if abs(2 * u + 1) < clearance:
            continue
        if any(
            abs(u - a) < clearance or abs(u + a + 1) < clearance for a in avoid
        ):
            continue
        if cs is not None and any(
            min(abs(u - t), abs(u + t), abs(u + 1 - t), abs(u + 1 + t))
            < clearance
            for t in cs.thetas
        ):
            continue
        if bp is not None:
            if abs(u + bp.p) < clearance or abs(bp.p - u - 1) < clearance:
                continue
            if abs(u + bp.q) < clearance:
                continue
        return u
    raise ParameterError("could not draw a spectral point clear of poles")


def draw_spectral_points(
    rng: np.random.Generator,
    count: int,
    avoid: tuple = (),
    cs: ChainSpec | None = None,
    bp: BoundaryParams | None = None,
    radius: float = 2.0,
    clearance: float = 1e-3,
) -> list[complex]:
    points: list[complex] = []
    while len(points) < count:
        u = draw_spectral_point(
            rng,
            avoid=tuple(avoid) + tuple(points),
            cs=cs,
            bp=bp,
            radius=radius,
            clearance=clearance,
        )
        points.append(u)
    return points
