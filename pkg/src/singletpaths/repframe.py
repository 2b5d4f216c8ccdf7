"""Transforms between path representations built from different commuting pairs.

Two orthonormal bases {zeta_i} and {xi_j} of the same 4-dim space each induce
a path ensemble for the singlet. The path values of any observable transform
linearly between the two, with complex coefficients

    ptilde[j | i] = <zeta_i|xi_j> <xi_j|psi> / <zeta_i|psi>

that behave like conditional pseudo-probabilities: rows sum to one, and
weighting by the source-path probabilities reproduces the target-path
probabilities--yet individual entries may be complex or fall outside [0, 1].
A real-valued n x n toy model shows the same mechanism without any quantum
input: expressing row averages of a random variable as linear means of its
column averages forces coefficients outside the unit interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularToyModelError, ZeroProbabilityPathError
from .hilbert import as_state

__all__ = [
    "PseudoProbMatrix",
    "ToyGrid",
    "col_averages",
    "omega_rank",
    "pseudo_prob_matrix",
    "random_toy_grid",
    "row_averages",
    "toy_residual",
    "toy_solve",
    "verify_transform",
]


@dataclass(frozen=True)
class PseudoProbMatrix:
    """Complex conditional pseudo-probabilities linking two path ensembles."""

    entries: np.ndarray  # shape (n_source, n_target)
    source_probabilities: np.ndarray
    target_probabilities: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.entries)
        row_defect = float(np.max(np.abs(rows.sum(axis=1) - 1.0)))
        mix_defect = float(
            np.max(np.abs(self.source_probabilities @ rows - self.target_probabilities))
        )
        if row_defect > 1e-10 or mix_defect > 1e-10:
            raise ValueError(
                f"pseudo-probability constraints violated "
                f"(row defect {row_defect:.2e}, mixture defect {mix_defect:.2e})"
            )


def _check_orthonormal(basis: np.ndarray, name: str) -> None:
    gram = basis.conj() @ basis.T
    if float(np.max(np.abs(gram - np.eye(basis.shape[0])))) > 1e-10:
        raise ValueError(f"{name} basis is not orthonormal")


def pseudo_prob_matrix(basis_source, basis_target, psi) -> PseudoProbMatrix:
    """Conditional pseudo-probabilities from one orthonormal basis to another.

    Both bases are given as arrays whose rows are the basis states. Every
    source state must have nonzero overlap with ``psi``; a vanishing overlap
    leaves the conditional weights undefined and raises
    :class:`ZeroProbabilityPathError`.
    """
    source = np.asarray(basis_source, dtype=complex)
    target = np.asarray(basis_target, dtype=complex)
    state = as_state(psi, dim=source.shape[1])
    _check_orthonormal(source, "source")
    _check_orthonormal(target, "target")

    source_amp = source.conj() @ state  # <zeta_i|psi>
    target_amp = target.conj() @ state  # <xi_j|psi>
    if float(np.min(np.abs(source_amp))) <= 1e-12:
        raise ZeroProbabilityPathError("a source path has zero probability")

    overlap = source.conj() @ target.T  # <zeta_i|xi_j>
    entries = overlap * target_amp[np.newaxis, :] / source_amp[:, np.newaxis]
    return PseudoProbMatrix(
        entries=entries,
        source_probabilities=np.abs(source_amp) ** 2,
        target_probabilities=np.abs(target_amp) ** 2,
    )


def verify_transform(matrix: PseudoProbMatrix, values_source, values_target) -> float:
    """Max defect of the linear transform law between two value tables.

    ``values_source[i]`` should equal ``sum_j ptilde[j|i] * values_target[j]``;
    the returned residual is the largest absolute deviation over source paths.
    """
    vs = np.asarray(values_source, dtype=complex)
    vt = np.asarray(values_target, dtype=complex)
    return float(np.max(np.abs(vs - matrix.entries @ vt)))


def omega_rank(
    matrix: PseudoProbMatrix,
    source_path: int,
    values_source,
    tables_target,
    tol: float = 1e-8,
) -> int:
    """Rank of the difference vectors spanned by a set of observables.

    For source path ``i`` and each observable o, the vector
    ``(values_target[o][j] - values_source[o][i])_j`` lies in the hyperplane
    orthogonal to the conjugated i-th row of the transform matrix (this is
    checked). The returned number is the rank of the stacked vectors from an
    SVD with threshold ``tol``; the three non-identity generators of the
    target's commuting algebra span rank 3.
    """
    vs = np.asarray(values_source, dtype=complex)
    vt = np.atleast_2d(np.asarray(tables_target, dtype=complex))
    omega = vt - vs[:, np.newaxis]
    row = matrix.entries[source_path]
    hyperplane_defect = float(np.max(np.abs(omega @ row)))
    if hyperplane_defect > 1e-8:
        raise ValueError(
            f"difference vectors leave the transform hyperplane (defect {hyperplane_defect:.2e})"
        )
    singular_values = np.linalg.svd(omega, compute_uv=False)
    return int(np.sum(singular_values > tol * max(1.0, float(singular_values[0]))))


@dataclass(frozen=True)
class ToyGrid:
    """Finely resolved real probabilistic model on an n x n event grid."""

    probs: np.ndarray  # joint probabilities p[i, j]
    values: np.ndarray  # random-variable values z[i, j]

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        z = np.asarray(self.values, dtype=float)
        if p.shape != z.shape or p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("probs and values must be equal square matrices")
        if p.min() < 0.0 or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be nonnegative and sum to 1")
        if not (np.isfinite(p).all() and np.isfinite(z).all()):
            raise ValueError("grid entries must be finite")

    @property
    def n(self) -> int:
        return self.probs.shape[0]


def random_toy_grid(n: int, seed: int) -> ToyGrid:
    """Seeded random grid with strictly positive joint probabilities."""
    rng = np.random.default_rng(seed)
    probs = rng.random((n, n)) + 0.05
    probs /= probs.sum()
    values = rng.normal(size=(n, n))
    return ToyGrid(probs=probs, values=values)


def row_averages(grid: ToyGrid) -> np.ndarray:
    """Average of z along each row, weighted by the joint probabilities."""
    row_mass = grid.probs.sum(axis=1)
    return (grid.probs * grid.values).sum(axis=1) / row_mass


def col_averages(grid: ToyGrid) -> np.ndarray:
    """Average of z along each column, weighted by the joint probabilities."""
    col_mass = grid.probs.sum(axis=0)
    return (grid.probs * grid.values).sum(axis=0) / col_mass


def toy_solve(grid: ToyGrid) -> np.ndarray:
    """Conditional weights expressing row averages through column averages.

    Solves, in the unknown real matrix ptilde,

        row_avg[i] = sum_j ptilde[i, j] * col_avg[j]
        sum_j ptilde[i, j] = 1
        sum_i row_mass[i] * ptilde[i, j] = col_mass[j]

    returning the minimum-Frobenius-norm solution of the stacked system. The
    system is underdetermined for n >= 2, so 'the' solution is a convention;
    minimum norm keeps it deterministic. The one genuinely unsolvable case --
    constant column averages with unequal row averages -- raises
    :class:`SingularToyModelError`. Solutions generally contain entries
    outside [0, 1]; that is the point of the model.
    """
    n = grid.n
    row_mass = grid.probs.sum(axis=1)
    col_mass = grid.probs.sum(axis=0)
    if row_mass.min() <= 0.0 or col_mass.min() <= 0.0:
        raise ValueError("every row and column needs nonzero marginal probability")
    z_row = row_averages(grid)
    z_col = col_averages(grid)

    col_spread = float(z_col.max() - z_col.min())
    row_spread = float(z_row.max() - z_row.min())
    if col_spread <= 1e-10 and row_spread > 1e-10:
        raise SingularToyModelError(
            "column averages are constant but row averages differ; "
            "no weights can satisfy the mean constraints"
        )

    if n == 1:
        return np.ones((1, 1))

    # Unknowns flattened row-major; 3n stacked equations (one redundant).
    a = np.zeros((3 * n, n * n))
    b = np.zeros(3 * n)
    for i in range(n):
        a[i, i * n : (i + 1) * n] = z_col
        b[i] = z_row[i]
        a[n + i, i * n : (i + 1) * n] = 1.0
        b[n + i] = 1.0
    for j in range(n):
        a[2 * n + j, j::n] = row_mass
        b[2 * n + j] = col_mass[j]
    solution, *_ = np.linalg.lstsq(a, b, rcond=None)
    ptilde = solution.reshape(n, n)

    residual = toy_residual(grid, ptilde)
    if residual > 1e-9:
        raise SingularToyModelError(
            f"stacked system is inconsistent (best residual {residual:.2e})"
        )
    return ptilde


def toy_residual(grid: ToyGrid, ptilde) -> float:
    """Largest violation of the three toy-model constraint families."""
    p = np.asarray(ptilde, dtype=float)
    row_mass = grid.probs.sum(axis=1)
    col_mass = grid.probs.sum(axis=0)
    star = np.max(np.abs(p @ col_averages(grid) - row_averages(grid)))
    rows = np.max(np.abs(p.sum(axis=1) - 1.0))
    mix = np.max(np.abs(row_mass @ p - col_mass))
    return float(max(star, rows, mix))
