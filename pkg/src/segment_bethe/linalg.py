"""Dense complex tensor algebra: products, embeddings, partial trace, spectra.

Everything here is plain numpy on complex128 arrays.  Chains of interest stay
below ten sites, so dense is both simplest and fastest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError

__all__ = [
    "MAX_DIM",
    "QuantumOperator",
    "kron",
    "trace_aux",
    "eig",
    "det",
    "identity",
    "embed_site",
    "embed_two_site",
    "vacuum_state",
    "dual_vacuum_state",
    "frobenius",
    "relative_residual",
]

# Hard cap on tensor-product dimension: 2^14 covers an aux space plus 13 sites.
MAX_DIM = 1 << 14


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class QuantumOperator:
    """Operator on a chain of ``sites`` spin-1/2 factors."""

    sites: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 1 << self.sites
        if self.matrix.shape != (dim, dim):
            raise DimensionError(
                f"operator on {self.sites} sites needs shape {(dim, dim)}, "
                f"got {self.matrix.shape}"
            )


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def kron(a, b) -> np.ndarray:
    """Tensor product with the first factor slowest (standard kron order)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise DimensionError(
            f"tensor product of dims {a.shape[0]} x {b.shape[0]} exceeds "
            f"MAX_DIM = {MAX_DIM}"
        )
    return np.kron(a, b)


def trace_aux(m) -> np.ndarray:
    """Partial trace over the first (auxiliary) two-dimensional factor."""
    m = as_matrix(m)
    dim = m.shape[0]
    if dim % 2 or m.shape[1] != dim:
        raise DimensionError("trace_aux needs a square matrix of even dimension")
    half = dim // 2
    return m[:half, :half] + m[half:, half:]


def eig(m, vectors: bool = False):
    """Eigenvalues (and optionally right eigenvectors) of a dense matrix."""
    m = as_matrix(m)
    try:
        if vectors:
            vals, vecs = np.linalg.eig(m)
            return vals, vecs
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc


def det(m) -> complex:
    """Determinant; triangular matrices short-circuit to the diagonal product."""
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape[1] != n:
        raise DimensionError("determinant needs a square matrix")
    strict_lower = np.tril(m, -1)
    strict_upper = np.triu(m, 1)
    if not strict_lower.any() or not strict_upper.any():
        return complex(np.prod(np.diag(m)))
    return complex(np.linalg.det(m))


def embed_site(op2, nfactors: int, site: int) -> np.ndarray:
    """Embed a single-factor operator at position ``site`` of ``nfactors``."""
    op2 = as_matrix(op2)
    out = np.ones((1, 1), dtype=complex)
    for k in range(nfactors):
        out = kron(out, op2 if k == site else identity(2))
    return out


def embed_two_site(op4, nfactors: int, first: int, second: int) -> np.ndarray:
    """Embed a two-factor operator acting on positions ``first`` and ``second``.

    ``op4`` is given on the product (first ⊗ second); the embedding works for
    arbitrary, not necessarily adjacent, positions.
    """
    if first == second:
        raise DimensionError("two-site embedding needs distinct positions")
    op4 = as_matrix(op4)
    dim = 1 << nfactors
    if dim > MAX_DIM:
        raise DimensionError(f"total dimension {dim} exceeds MAX_DIM = {MAX_DIM}")
    # Axes after reshape: (row_first, row_second, col_first, col_second);
    # every tensordot with the identity appends a (row, col) pair.
    full = op4.reshape(2, 2, 2, 2)
    for _ in range(nfactors - 2):
        full = np.tensordot(full, np.eye(2, dtype=complex), axes=0)
    others = [k for k in range(nfactors) if k not in (first, second)]
    row_axis = {first: 0, second: 1}
    col_axis = {first: 2, second: 3}
    for m, k in enumerate(others):
        row_axis[k] = 4 + 2 * m
        col_axis[k] = 5 + 2 * m
    perm = [row_axis[k] for k in range(nfactors)] + [
        col_axis[k] for k in range(nfactors)
    ]
    return full.transpose(perm).reshape(dim, dim)


def vacuum_state(sites: int) -> np.ndarray:
    """All spins up."""
    v = np.zeros(1 << sites, dtype=complex)
    v[0] = 1.0
    return v


def dual_vacuum_state(sites: int) -> np.ndarray:
    return vacuum_state(sites)


def frobenius(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def relative_residual(delta, *scales) -> float:
    """Norm of a defect divided by the largest norm among the compared terms."""
    top = frobenius(delta)
    bottom = max((frobenius(s) for s in scales), default=0.0)
    if bottom == 0.0:
        return top
    return top / bottom
