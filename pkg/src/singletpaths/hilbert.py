"""Dense complex linear algebra over small Hilbert spaces.

State vectors are 1-d complex128 arrays and operators are square complex128
matrices, kept as plain numpy arrays. Every dimension in this package is tiny
(2, 4, 8, or a 1-d pointer grid), so direct dense factorizations are accurate
to machine precision and nothing sparser or fancier is warranted.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import DimensionMismatchError, SingularBasisError

__all__ = [
    "IDENTITY2",
    "SIGMA1",
    "SIGMA2",
    "SIGMA3",
    "apply",
    "as_operator",
    "as_state",
    "dagger",
    "inner",
    "is_hermitian",
    "norm",
    "random_hermitian",
    "solve_linear",
    "tensor",
]

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
for _m in (IDENTITY2, SIGMA1, SIGMA2, SIGMA3):
    _m.setflags(write=False)
del _m


def as_state(vec, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-d complex vector, optionally checking its length."""
    out = np.asarray(vec, dtype=complex)
    if out.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-d state vector, got shape {out.shape}")
    if dim is not None and out.shape[0] != dim:
        raise DimensionMismatchError(f"expected a vector of dimension {dim}, got {out.shape[0]}")
    if not np.isfinite(out).all():
        raise ValueError("state vector contains NaN or Inf entries")
    return out


def as_operator(mat, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite square complex matrix, optionally checking its size."""
    out = np.asarray(mat, dtype=complex)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise DimensionMismatchError(f"expected a square operator, got shape {out.shape}")
    if dim is not None and out.shape[0] != dim:
        raise DimensionMismatchError(f"expected an operator of dimension {dim}, got {out.shape[0]}")
    if not np.isfinite(out).all():
        raise ValueError("operator contains NaN or Inf entries")
    return out


def dagger(mat) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(mat)).T


def is_hermitian(mat, tol: float = 1e-12) -> bool:
    m = as_operator(mat)
    return float(np.max(np.abs(m - dagger(m)))) <= tol


def norm(vec) -> float:
    return float(np.linalg.norm(as_state(vec)))


def tensor(a, b, *rest) -> np.ndarray:
    """Kronecker product of two or more factors, all vectors or all matrices."""
    arrays = [np.asarray(f, dtype=complex) for f in (a, b, *rest)]
    kinds = {arr.ndim for arr in arrays}
    if len(kinds) != 1 or kinds.pop() not in (1, 2):
        raise DimensionMismatchError("tensor factors must be all vectors or all matrices")
    return reduce(np.kron, arrays)


def inner(bra, ket) -> complex:
    """<bra|ket>, conjugate-linear in the first argument."""
    b = as_state(bra)
    k = as_state(ket, dim=b.shape[0])
    return complex(np.vdot(b, k))


def apply(op, ket) -> np.ndarray:
    """Matrix-vector product op|ket>."""
    o = as_operator(op)
    k = as_state(ket, dim=o.shape[0])
    return o @ k


def solve_linear(columns, target, rank_tol: float = 1e-10, residual_tol: float = 1e-10) -> np.ndarray:
    """Coefficients c such that sum_i c[i] * columns[i] = target.

    The stacked column matrix must have full column rank: its smallest singular
    value has to clear ``rank_tol`` (relative to the largest), otherwise
    :class:`SingularBasisError` is raised. Square systems go through LAPACK's
    partially pivoted LU; non-square ones fall back to least squares. The
    reconstruction residual is checked against ``residual_tol``.
    """
    a = np.column_stack([as_state(c) for c in columns])
    t = as_state(target, dim=a.shape[0])
    singular_values = np.linalg.svd(a, compute_uv=False)
    if singular_values[-1] <= rank_tol * max(1.0, float(singular_values[0])):
        raise SingularBasisError(
            f"expansion columns are numerically dependent "
            f"(smallest singular value {singular_values[-1]:.3e})"
        )
    if a.shape[0] == a.shape[1]:
        coeff = np.linalg.solve(a, t)
    else:
        coeff, *_ = np.linalg.lstsq(a, t, rcond=None)
    residual = float(np.linalg.norm(a @ coeff - t))
    if residual > residual_tol:
        raise SingularBasisError(f"solve residual {residual:.3e} exceeds {residual_tol:.1e}")
    return coeff


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random Hermitian matrix with complex Gaussian entries."""
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (m + dagger(m)) / 2.0
