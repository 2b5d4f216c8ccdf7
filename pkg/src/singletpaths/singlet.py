"""Pseudo-classical path ensembles for the two-photon polarization singlet.

Fixing a strong measurement direction for photon A (the x axis) and one at
angle ``phi`` for photon B picks a complete commuting pair of polarization
observables. Its joint eigenbasis splits the singlet into four post-selection
branches ("paths"), each carrying a Born probability and assigning every
observable its complex weak value. Two independent routes to those values are
implemented and cross-checked at construction time:

* the direct weak-value quotient <branch|O|psi> / <branch|psi>, and
* the unique expansion of O|psi> over {1, s1_A, sphi_B, s1_A*sphi_B} applied
  to |psi>, evaluated at the branch eigenvalue tuples.

The same tables support exact Heisenberg-picture dynamics, the reconstruction
of quantum averages and two-point correlations, and covariance-based
classicality diagnostics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCscoError, OrthogonalPostselectionError
from .hilbert import (
    IDENTITY2,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    apply,
    as_operator,
    as_state,
    dagger,
    inner,
    is_hermitian,
    solve_linear,
    tensor,
)

__all__ = [
    "LABELS",
    "UP",
    "DOWN",
    "ClassicalityReport",
    "CommutativeRep",
    "CscoChoice",
    "PathEnsemble",
    "PseudoValueTable",
    "build_singlet",
    "classicality_check",
    "commutative_representative",
    "correlation_strong",
    "covariance",
    "csco_eigenbasis",
    "csco_operators",
    "eom_residual",
    "heisenberg_evolve",
    "label_index",
    "op_a",
    "op_b",
    "path_probabilities",
    "pseudo_value_table",
    "reconstruct_average",
    "reconstruct_correlation",
    "sigma_axis",
    "sigma_vec",
    "weak_value",
]

#: Path labels in canonical order: (sign for photon A, sign for photon B).
LABELS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

UP = np.array([1.0, 0.0], dtype=complex)
DOWN = np.array([0.0, 1.0], dtype=complex)
UP.setflags(write=False)
DOWN.setflags(write=False)

_TWO_PI = 2.0 * math.pi


def label_index(label) -> int:
    """Position of a (sA, sB) label in the canonical ordering."""
    return LABELS.index(tuple(label))


def sigma_axis(angle: float) -> np.ndarray:
    """Polarization component along the x-y plane direction at ``angle``."""
    return math.cos(angle) * SIGMA1 + math.sin(angle) * SIGMA2


def sigma_vec(direction) -> np.ndarray:
    """Polarization component along a 3-d unit vector."""
    v = np.asarray(direction, dtype=float)
    return v[0] * SIGMA1 + v[1] * SIGMA2 + v[2] * SIGMA3


def op_a(m) -> np.ndarray:
    """Lift a single-photon operator onto photon A of the pair."""
    return tensor(as_operator(m, 2), IDENTITY2)


def op_b(m) -> np.ndarray:
    """Lift a single-photon operator onto photon B of the pair."""
    return tensor(IDENTITY2, as_operator(m, 2))


def build_singlet() -> np.ndarray:
    """(|ud> - |du>)/sqrt(2) in the lexicographic {uu, ud, du, dd} basis."""
    return np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class CscoChoice:
    """Measurement angle for photon B relative to photon A's x axis.

    Angles are wrapped into [0, 2*pi). Values within 1e-12 of 0 or pi are
    rejected: there the B direction is (anti)parallel to the A axis, the
    commuting pair degenerates, and the four expansion columns collapse.
    Callers probing the parallel limit should pass a small positive angle.
    """

    phi: float

    def __post_init__(self) -> None:
        phi = float(self.phi) % _TWO_PI
        if min(phi, abs(phi - math.pi), _TWO_PI - phi) <= 1e-12:
            raise DegenerateCscoError(
                f"phi={self.phi!r} puts the B direction on the A axis; "
                "the commuting pair is degenerate there"
            )
        object.__setattr__(self, "phi", phi)


def csco_operators(choice: CscoChoice) -> tuple[np.ndarray, np.ndarray]:
    """The commuting pair (sigma1 on A, sigma_phi on B) as 4-dim operators."""
    return op_a(SIGMA1), op_b(sigma_axis(choice.phi))


def csco_eigenbasis(choice: CscoChoice) -> np.ndarray:
    """Joint eigenvectors of the commuting pair, rows ordered as LABELS.

    Row k is the normalized product state whose eigenvalue signs are
    LABELS[k]; at ``phi = pi/2`` the first row is (1, i, 1, i)/2.
    """
    phase = cmath.exp(1j * choice.phi)
    basis = np.empty((4, 4), dtype=complex)
    for k, (sign_a, sign_b) in enumerate(LABELS):
        part_a = (UP + sign_a * DOWN) / math.sqrt(2.0)
        part_b = (UP + sign_b * phase * DOWN) / math.sqrt(2.0)
        basis[k] = tensor(part_a, part_b)
    return basis


@dataclass(frozen=True)
class PathEnsemble:
    """Four post-selection branches with Born probabilities."""

    phi: float
    labels: tuple
    probabilities: np.ndarray
    postselect_states: np.ndarray  # row k is the branch state for labels[k]

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.min() < -1e-15 or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("path probabilities must be nonnegative and sum to 1")


def path_probabilities(choice: CscoChoice) -> PathEnsemble:
    """Born probabilities of the four singlet branches.

    The (+,+) and (-,-) branches each weigh (1 - cos phi)/4, the mixed ones
    (1 + cos phi)/4.
    """
    basis = csco_eigenbasis(choice)
    psi = build_singlet()
    amplitudes = basis.conj() @ psi
    return PathEnsemble(
        phi=choice.phi,
        labels=LABELS,
        probabilities=np.abs(amplitudes) ** 2,
        postselect_states=basis,
    )


def weak_value(obs, postselect, psi) -> complex:
    """<post|obs|psi> / <post|psi>; complex and unbounded by the spectrum."""
    post = as_state(postselect)
    state = as_state(psi, dim=post.shape[0])
    overlap = inner(post, state)
    if abs(overlap) <= 1e-12:
        raise OrthogonalPostselectionError(
            "post-selection state is orthogonal to the pre-selected state"
        )
    return inner(post, apply(obs, state)) / overlap


@dataclass(frozen=True)
class CommutativeRep:
    """Coefficients over (1, s1_A, sphi_B, s1_A*sphi_B) reproducing obs|psi>."""

    coeff_identity: complex
    coeff_a: complex
    coeff_b: complex
    coeff_ab: complex

    def evaluate(self, sign_a: int, sign_b: int) -> complex:
        return (
            self.coeff_identity
            + self.coeff_a * sign_a
            + self.coeff_b * sign_b
            + self.coeff_ab * sign_a * sign_b
        )

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.coeff_identity, self.coeff_a, self.coeff_b, self.coeff_ab], dtype=complex
        )


def commutative_representative(obs, choice: CscoChoice, psi) -> CommutativeRep:
    """Unique expansion of obs|psi> over the commuting-pair algebra.

    Raises :class:`SingularBasisError` when the four columns degenerate,
    which happens exactly on the excluded angles phi in {0, pi}.
    """
    state = as_state(psi, dim=4)
    sig_a, sig_b = csco_operators(choice)
    columns = [state, sig_a @ state, sig_b @ state, sig_a @ sig_b @ state]
    coeff = solve_linear(columns, apply(as_operator(obs, 4), state))
    return CommutativeRep(*(complex(c) for c in coeff))


@dataclass(frozen=True)
class PseudoValueTable:
    """Complex path values of one observable over the four branches."""

    phi: float
    values: np.ndarray  # aligned with LABELS

    def __getitem__(self, label) -> complex:
        if isinstance(label, tuple):
            return complex(self.values[label_index(label)])
        return complex(self.values[label])


def pseudo_value_table(obs, choice: CscoChoice, psi) -> PseudoValueTable:
    """Path values of ``obs``: the expansion evaluated at eigenvalue tuples.

    Construction cross-checks the polynomial route against the direct
    weak-value quotient on every branch. The check allows 1e-8 relative
    slack: near the excluded parallel angles the expansion columns are
    poorly conditioned and honest roundoff grows, while any logic error
    would show up at O(1).
    """
    rep = commutative_representative(obs, choice, psi)
    values = np.array([rep.evaluate(sa, sb) for sa, sb in LABELS], dtype=complex)
    basis = csco_eigenbasis(choice)
    direct = np.array([weak_value(obs, basis[k], psi) for k in range(4)], dtype=complex)
    assert float(np.max(np.abs(values - direct))) <= 1e-8 * max(
        1.0, float(np.max(np.abs(direct)))
    )
    return PseudoValueTable(phi=choice.phi, values=values)


def _check_same_csco(phi_1: float, phi_2: float) -> None:
    if abs(phi_1 - phi_2) > 1e-13:
        raise ValueError("path tables/ensembles belong to different commuting pairs")


def reconstruct_average(table: PseudoValueTable, ensemble: PathEnsemble) -> complex:
    """Probability-weighted path values; equals the quantum expectation <O>."""
    _check_same_csco(table.phi, ensemble.phi)
    return complex(np.sum(ensemble.probabilities * table.values))


def reconstruct_correlation(
    table_1: PseudoValueTable, table_2: PseudoValueTable, ensemble: PathEnsemble
) -> complex:
    """Weighted conj(v1)*v2 over paths; equals the quantum correlation <O1 O2>."""
    _check_same_csco(table_1.phi, ensemble.phi)
    _check_same_csco(table_2.phi, ensemble.phi)
    return complex(np.sum(ensemble.probabilities * np.conj(table_1.values) * table_2.values))


def heisenberg_evolve(obs, hamiltonian, t: float) -> np.ndarray:
    """exp(+iHt) obs exp(-iHt) via the spectral decomposition of Hermitian H."""
    ham = as_operator(hamiltonian)
    if not is_hermitian(ham):
        raise ValueError("hamiltonian must be Hermitian")
    eigvals, eigvecs = np.linalg.eigh(ham)
    forward = (eigvecs * np.exp(1j * eigvals * t)) @ dagger(eigvecs)
    return forward @ as_operator(obs, ham.shape[0]) @ dagger(forward)


def eom_residual(obs, hamiltonian, choice: CscoChoice, t: float, dt: float, psi=None) -> float:
    """Finite-difference defect of the path equations of motion.

    Compares the central difference of the evolved path values with the path
    values of i[H, O(t)]; the mismatch is the O(dt^2) discretization error of
    the derivative, so halving dt should shrink it fourfold.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    state = build_singlet() if psi is None else as_state(psi, dim=4)
    obs_t = heisenberg_evolve(obs, hamiltonian, t)
    ahead = pseudo_value_table(heisenberg_evolve(obs, hamiltonian, t + dt), choice, state)
    behind = pseudo_value_table(heisenberg_evolve(obs, hamiltonian, t - dt), choice, state)
    derivative = (ahead.values - behind.values) / (2.0 * dt)
    ham = as_operator(hamiltonian, 4)
    commutator_term = 1j * (ham @ obs_t - obs_t @ ham)
    rhs = pseudo_value_table(commutator_term, choice, state)
    return float(np.max(np.abs(derivative - rhs.values)))


def covariance(
    product_table: PseudoValueTable,
    table_1: PseudoValueTable,
    table_2: PseudoValueTable,
    label,
) -> complex:
    """(O1*O2)_path - conj((O1)_path) * (O2)_path at one label."""
    return product_table[label] - np.conj(table_1[label]) * table_2[label]


@dataclass(frozen=True)
class ClassicalityReport:
    """Outcome of a covariance sweep along one path."""

    classical: bool
    delta: float
    covariances: tuple
    offenders: tuple  # indices into the checked pairs with |cov| >= delta
    eom_residuals: tuple  # per pair: defect of the approximate commutator rule


def classicality_check(pairs, choice: CscoChoice, psi, label, delta: float) -> ClassicalityReport:
    """Covariance test along one path: classical iff all |cov| < delta.

    For each pair (H, O) the report also carries the residual of the
    approximate rule i([H,O])_path ~ i(conj(H_path) O_path - conj(O_path)
    H_path), which closes exactly when the pair covariances vanish.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    state = as_state(psi, dim=4)
    covariances = []
    eom_defects = []
    for first, second in pairs:
        o1 = as_operator(first, 4)
        o2 = as_operator(second, 4)
        t1 = pseudo_value_table(o1, choice, state)
        t2 = pseudo_value_table(o2, choice, state)
        t12 = pseudo_value_table(o1 @ o2, choice, state)
        t21 = pseudo_value_table(o2 @ o1, choice, state)
        covariances.append(covariance(t12, t1, t2, label))
        exact = 1j * (t12[label] - t21[label])
        approximate = 1j * (
            np.conj(t1[label]) * t2[label] - np.conj(t2[label]) * t1[label]
        )
        eom_defects.append(abs(exact - approximate))
    offenders = tuple(i for i, cov in enumerate(covariances) if abs(cov) >= delta)
    return ClassicalityReport(
        classical=not offenders,
        delta=float(delta),
        covariances=tuple(covariances),
        offenders=offenders,
        eom_residuals=tuple(eom_defects),
    )


def correlation_strong(direction_a, direction_b) -> float:
    """<Psi| (a.sigma) x (b.sigma) |Psi> for unit Bloch vectors; equals -a.b."""
    psi = build_singlet()
    op = tensor(sigma_vec(direction_a), sigma_vec(direction_b))
    return float(np.real(inner(psi, apply(op, psi))))
