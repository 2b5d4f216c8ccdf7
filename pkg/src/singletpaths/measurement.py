"""Measurement and collapse dynamics on the device-photon composite.

A third polarization qubit prepared in |down> plays the measuring device. At
t = 0 a step unitary copies photon A's x polarization onto the device's z
polarization; photon B operators commute with it and stay untouched. The
eight-path ensemble over the enlarged commuting triple supports Bayes
conditioning on the readout, marginalization of the device, and a check that
the surviving two-path family represents the expected collapsed single-photon
state. The pointer models from textbook measurement theory are included: a
projective sampler drawing Born-distributed outcomes, and a weak Gaussian
pointer whose mean position shift tracks the real part of the weak value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ImpossibleOutcomeError,
    OrthogonalPostselectionError,
    ZeroProbabilityPathError,
)
from .hilbert import (
    IDENTITY2,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    as_operator,
    as_state,
    dagger,
    inner,
    tensor,
)
from .singlet import (
    DOWN,
    LABELS,
    UP,
    CscoChoice,
    build_singlet,
    csco_eigenbasis,
    weak_value,
)

__all__ = [
    "EIGHT_LABELS",
    "CompositeState",
    "EightPathEnsemble",
    "MarginalPathEnsemble",
    "MeasurementUnitary",
    "PointerState",
    "StrongMeasurement",
    "WeakPointerShift",
    "bayes_update",
    "build_composite",
    "dev_op",
    "eight_paths",
    "gaussian_pointer",
    "heisenberg_table",
    "marginalize_device",
    "measurement_unitary",
    "photon_a_op",
    "photon_b_op",
    "strong_pointer_measure",
    "verify_collapse",
    "weak_pointer_shift",
]

#: Eight-path labels: (device sign, photon-A sign, photon-B sign).
EIGHT_LABELS = tuple(
    (sign_dev, sign_a, sign_b) for sign_dev in (1, -1) for sign_a, sign_b in LABELS
)


def dev_op(m) -> np.ndarray:
    """Lift a single-qubit operator onto the device factor."""
    return tensor(as_operator(m, 2), IDENTITY2, IDENTITY2)


def photon_a_op(m) -> np.ndarray:
    """Lift a single-qubit operator onto photon A of the composite."""
    return tensor(IDENTITY2, as_operator(m, 2), IDENTITY2)


def photon_b_op(m) -> np.ndarray:
    """Lift a single-qubit operator onto photon B of the composite."""
    return tensor(IDENTITY2, IDENTITY2, as_operator(m, 2))


@dataclass(frozen=True)
class CompositeState:
    """Normalized state of the device x A x B composite."""

    ket: np.ndarray
    factorization: tuple[int, int, int] = (2, 2, 2)

    def __post_init__(self) -> None:
        vec = as_state(self.ket)
        if vec.shape[0] != int(np.prod(self.factorization)):
            raise ValueError("factorization does not match the state dimension")
        if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
            raise ValueError("composite state must be normalized")


def build_composite() -> CompositeState:
    """Device in |down> times the photon singlet."""
    return CompositeState(ket=tensor(DOWN, build_singlet()))


@dataclass(frozen=True)
class MeasurementUnitary:
    """Step evolution operator of the device-photon interaction."""

    t: float
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = as_operator(self.matrix, 8)
        if float(np.max(np.abs(m @ dagger(m) - np.eye(8)))) > 1e-12:
            raise ValueError("measurement evolution must be unitary")


def measurement_unitary(t: float) -> MeasurementUnitary:
    """Identity before t = 0; afterwards the x-polarization copy interaction.

    For t >= 0 the operator is
    -(s1_dev x P+_A x 1) - (s3_dev x P-_A x 1), with P+- the projectors onto
    photon A's x eigenstates. It is Hermitian and an involution.
    """
    if t < 0.0:
        return MeasurementUnitary(t=float(t), matrix=np.eye(8, dtype=complex))
    project_plus = (IDENTITY2 + SIGMA1) / 2.0
    project_minus = (IDENTITY2 - SIGMA1) / 2.0
    matrix = -tensor(SIGMA1, project_plus, IDENTITY2) - tensor(SIGMA3, project_minus, IDENTITY2)
    return MeasurementUnitary(t=float(t), matrix=matrix)


def _base_operators() -> dict[str, np.ndarray]:
    paulis = {"sigma1": SIGMA1, "sigma2": SIGMA2, "sigma3": SIGMA3}
    table: dict[str, np.ndarray] = {}
    for name, op in paulis.items():
        table[f"{name}_dev"] = dev_op(op)
        table[f"{name}_A"] = photon_a_op(op)
        table[f"{name}_B"] = photon_b_op(op)
    return table


def _closed_forms(t: float) -> dict[str, np.ndarray]:
    base = _base_operators()
    if t < 0.0:
        return base
    return {
        "sigma1_dev": tensor(SIGMA1, SIGMA1, IDENTITY2),
        "sigma2_dev": -dev_op(SIGMA2),
        "sigma3_dev": -tensor(SIGMA3, SIGMA1, IDENTITY2),
        "sigma1_A": base["sigma1_A"],
        "sigma2_A": tensor(SIGMA2, SIGMA3, IDENTITY2),
        "sigma3_A": -tensor(SIGMA2, SIGMA2, IDENTITY2),
        "sigma1_B": base["sigma1_B"],
        "sigma2_B": base["sigma2_B"],
        "sigma3_B": base["sigma3_B"],
    }


def heisenberg_table(t: float) -> dict[str, np.ndarray]:
    """Heisenberg-evolved Pauli components of all three subsystems.

    Every entry is computed as U(t)^dag O U(t) and asserted against its
    closed form to 1e-12: photon B components and photon A's x component
    never move; for t >= 0 the device picks up photon A's x polarization
    while photon A's y/z components spread onto the device.
    """
    u = measurement_unitary(t).matrix
    expected = _closed_forms(t)
    table: dict[str, np.ndarray] = {}
    for name, op in _base_operators().items():
        evolved = dagger(u) @ op @ u
        assert float(np.max(np.abs(evolved - expected[name]))) <= 1e-12
        table[name] = evolved
    return table


@dataclass(frozen=True)
class EightPathEnsemble:
    """Post-selection branches of the composite over the commuting triple."""

    rho: float
    csco: CscoChoice
    labels: tuple
    probabilities: np.ndarray
    postselect_states: np.ndarray  # row k is the branch state for labels[k]
    psi: np.ndarray
    conditioned_on: int | None = None

    def pseudo_values(self, op) -> np.ndarray:
        """Weak values of an 8-dim operator along all eight branches."""
        op8 = as_operator(op, 8)
        return np.array(
            [weak_value(op8, state, self.psi) for state in self.postselect_states],
            dtype=complex,
        )


def eight_paths(rho: float, csco: CscoChoice) -> EightPathEnsemble:
    """Eight-branch ensemble for the device x A x B composite.

    The device is post-selected in the eigenbasis of its x-y polarization at
    angle ``rho`` (never orthogonal to the |down> start, so both device
    branches keep probability 1/2); the photons use the (s1_A, sphi_B)
    eigenbasis. Branch probabilities factorize into device times pair parts,
    and the readout identity -- the evolved device z value equals photon A's
    x value equals minus photon B's x value -- is asserted on every branch.
    """
    phase = np.exp(1j * float(rho))
    device_basis = np.array(
        [(UP + phase * DOWN) / math.sqrt(2.0), (UP - phase * DOWN) / math.sqrt(2.0)]
    )
    device_amp = device_basis.conj() @ DOWN
    if float(np.min(np.abs(device_amp))) <= 1e-12:
        raise ZeroProbabilityPathError("device basis is orthogonal to its initial state")

    pair_basis = csco_eigenbasis(csco)
    pair_amp = pair_basis.conj() @ build_singlet()
    psi = build_composite().ket
    states = np.empty((8, 8), dtype=complex)
    probs = np.empty(8, dtype=float)
    for k, (sign_dev, sign_a, sign_b) in enumerate(EIGHT_LABELS):
        dev_index = 0 if sign_dev == 1 else 1
        pair_index = LABELS.index((sign_a, sign_b))
        states[k] = tensor(device_basis[dev_index], pair_basis[pair_index])
        probs[k] = abs(device_amp[dev_index]) ** 2 * abs(pair_amp[pair_index]) ** 2

    ensemble = EightPathEnsemble(
        rho=float(rho),
        csco=csco,
        labels=EIGHT_LABELS,
        probabilities=probs,
        postselect_states=states,
        psi=psi,
    )
    direct = np.abs(states.conj() @ psi) ** 2
    assert float(np.max(np.abs(direct - probs))) <= 1e-12

    evolved = heisenberg_table(1.0)
    dev_z = ensemble.pseudo_values(evolved["sigma3_dev"])
    a_x = ensemble.pseudo_values(evolved["sigma1_A"])
    b_x = ensemble.pseudo_values(evolved["sigma1_B"])
    assert float(np.max(np.abs(dev_z - a_x))) <= 1e-10
    assert float(np.max(np.abs(a_x + b_x))) <= 1e-10
    return ensemble


def bayes_update(ensemble: EightPathEnsemble, outcome: int) -> EightPathEnsemble:
    """Condition on the device readout (+-1 for photon A's x polarization).

    Branches inconsistent with the outcome drop to probability zero; the rest
    renormalize by the total surviving probability. Conditioning twice on the
    same outcome is a no-op.
    """
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    keep = np.array([label[1] == outcome for label in ensemble.labels])
    total = float(ensemble.probabilities[keep].sum())
    if total <= 0.0:
        raise ImpossibleOutcomeError(f"outcome {outcome:+d} has zero probability")
    probs = np.where(keep, ensemble.probabilities / total, 0.0)
    return replace(ensemble, probabilities=probs, conditioned_on=outcome)


@dataclass(frozen=True)
class MarginalPathEnsemble:
    """Two-path description of photon B after the device is traced out."""

    phi: float
    outcome: int
    labels: tuple
    probabilities: np.ndarray
    postselect_states: np.ndarray  # one representative 8-dim branch per label
    psi: np.ndarray

    def pseudo_values(self, op) -> np.ndarray:
        """Weak values of a single-photon operator on photon B's two paths."""
        lifted = photon_b_op(op)
        return np.array(
            [weak_value(lifted, state, self.psi) for state in self.postselect_states],
            dtype=complex,
        )


def marginalize_device(ensemble: EightPathEnsemble) -> MarginalPathEnsemble:
    """Trace the device out of a conditioned eight-path ensemble.

    Surviving branches pair up across the device label; photon-B observables
    take identical values within each pair (asserted), so each pair collapses
    to a single coarser path with the summed probability: (1 - cos phi)/2 and
    (1 + cos phi)/2 for readout +1.
    """
    if ensemble.conditioned_on is None:
        raise ValueError("ensemble must be conditioned on a readout first")
    outcome = ensemble.conditioned_on
    probs = np.empty(2, dtype=float)
    representatives = np.empty((2, 8), dtype=complex)
    paulis = (SIGMA1, SIGMA2, SIGMA3)
    for slot, sign_b in enumerate((1, -1)):
        indices = [
            k
            for k, label in enumerate(ensemble.labels)
            if label[1] == outcome and label[2] == sign_b
        ]
        probs[slot] = float(ensemble.probabilities[indices].sum())
        representatives[slot] = ensemble.postselect_states[indices[0]]
        for op in paulis:
            lifted = photon_b_op(op)
            branch_values = [
                weak_value(lifted, ensemble.postselect_states[k], ensemble.psi)
                for k in indices
            ]
            assert max(abs(v - branch_values[0]) for v in branch_values) <= 1e-12
    return MarginalPathEnsemble(
        phi=ensemble.csco.phi,
        outcome=outcome,
        labels=(1, -1),
        probabilities=probs,
        postselect_states=representatives,
        psi=ensemble.psi,
    )


def verify_collapse(marginal: MarginalPathEnsemble) -> float:
    """Deviation of the marginal ensemble from the collapsed photon-B state.

    A readout of +1 leaves photon B in |x->, a readout of -1 in |x+>. The
    collapsed single-photon state gets its own two-path representation over
    the sphi eigenbasis; the returned residual is the largest mismatch of
    probabilities and of the three Pauli path values.
    """
    collapsed = (UP - DOWN) / math.sqrt(2.0) if marginal.outcome == 1 else (
        UP + DOWN
    ) / math.sqrt(2.0)
    phase = np.exp(1j * marginal.phi)
    basis = np.array(
        [(UP + phase * DOWN) / math.sqrt(2.0), (UP - phase * DOWN) / math.sqrt(2.0)]
    )
    amps = basis.conj() @ collapsed
    residual = float(np.max(np.abs(np.abs(amps) ** 2 - marginal.probabilities)))
    for op in (SIGMA1, SIGMA2, SIGMA3):
        single = np.array(
            [weak_value(op, basis[k], collapsed) for k in range(2)], dtype=complex
        )
        residual = max(residual, float(np.max(np.abs(single - marginal.pseudo_values(op)))))
    return residual


def _spectral_clusters(op) -> tuple[np.ndarray, list[np.ndarray]]:
    """Distinct eigenvalues of a Hermitian operator and their eigenvector groups."""
    matrix = as_operator(op)
    if float(np.max(np.abs(matrix - dagger(matrix)))) > 1e-12:
        raise ValueError("observable must be Hermitian")
    eigvals, eigvecs = np.linalg.eigh(matrix)
    scale = max(1.0, float(np.max(np.abs(eigvals))))
    outcomes: list[float] = []
    groups: list[np.ndarray] = []
    start = 0
    for k in range(1, len(eigvals) + 1):
        if k == len(eigvals) or eigvals[k] - eigvals[start] > 1e-10 * scale:
            outcomes.append(float(np.mean(eigvals[start:k])))
            groups.append(eigvecs[:, start:k])
            start = k
    return np.array(outcomes), groups


@dataclass(frozen=True)
class StrongMeasurement:
    """Result of one projective measurement with a rigid pointer."""

    outcome: float
    probability: float
    post_state: np.ndarray
    pointer_shift: float  # eta * outcome


def strong_pointer_measure(psi, obs, eta: float, seed) -> StrongMeasurement:
    """Projective measurement: the pointer is kicked to q = eta * outcome.

    Eigenvalues within 1e-10 (relative) share a projector. The outcome is
    drawn from the Born weights of ``psi`` and the state is projected onto
    the winning eigenspace and renormalized. ``seed`` may be an integer or a
    numpy Generator (so trial loops can share one stream).
    """
    state = as_state(psi)
    outcomes, groups = _spectral_clusters(obs)
    weights = np.array([float(np.sum(np.abs(dagger(g) @ state) ** 2)) for g in groups])
    weights /= weights.sum()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pick = int(np.searchsorted(np.cumsum(weights), rng.random(), side="right"))
    pick = min(pick, len(outcomes) - 1)
    group = groups[pick]
    projected = group @ (dagger(group) @ state)
    projected = projected / np.linalg.norm(projected)
    return StrongMeasurement(
        outcome=float(outcomes[pick]),
        probability=float(weights[pick]),
        post_state=projected,
        pointer_shift=float(eta) * float(outcomes[pick]),
    )


@dataclass(frozen=True)
class PointerState:
    """Discretized 1-d pointer wavefunction with interaction strength eta."""

    grid: np.ndarray
    amplitudes: np.ndarray
    width: float
    strength: float

    def __post_init__(self) -> None:
        if self.width <= 0.0 or self.strength < 0.0:
            raise ValueError("pointer width must be positive and strength nonnegative")
        step = float(self.grid[1] - self.grid[0])
        total = float(np.sum(np.abs(self.amplitudes) ** 2) * step)
        if abs(total - 1.0) > 1e-10:
            raise ValueError("pointer wavefunction must be grid-normalized")

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])


def _gaussian_profile(x, width: float) -> np.ndarray:
    return (2.0 * math.pi * width**2) ** -0.25 * np.exp(-(x**2) / (4.0 * width**2))


def gaussian_pointer(
    delta_q: float, eta: float, half_width: float | None = None, n_points: int = 4096
) -> PointerState:
    """Gaussian pointer with <Q> = 0 and <Q^2> = delta_q^2 on a symmetric grid.

    The grid spans ten widths by default, where the truncated tail mass is
    negligible against every tolerance used here.
    """
    if delta_q <= 0.0:
        raise ValueError("delta_q must be positive")
    if eta < 0.0:
        raise ValueError("eta must be nonnegative")
    span = 10.0 * delta_q if half_width is None else float(half_width)
    grid = np.linspace(-span, span, n_points)
    amplitudes = _gaussian_profile(grid, delta_q).astype(complex)
    step = grid[1] - grid[0]
    amplitudes /= math.sqrt(float(np.sum(np.abs(amplitudes) ** 2) * step))
    return PointerState(grid=grid, amplitudes=amplitudes, width=float(delta_q), strength=float(eta))


@dataclass(frozen=True)
class WeakPointerShift:
    """Post-selected pointer means and the weak value they track."""

    position: float
    momentum: float  # diagnostic; tracks the imaginary part of the weak value
    weak_value: complex


def weak_pointer_shift(psi, obs, postselect, pointer: PointerState) -> WeakPointerShift:
    """Weak measurement followed by post-selection, on the pointer grid.

    The entangling unitary exp(-i eta O P) translates the pointer by
    eta*lambda on each eigenbranch; the branches are analytic Gaussians
    evaluated on the grid, so sub-grid shifts cost no interpolation error.
    The post-selected mean position satisfies
    |<q> - eta Re(weak value)| <= C eta^2 / delta_q with C <= 10 in the
    enforced weak regime eta <= delta_q / 100; the mean momentum is returned
    as a diagnostic for the imaginary part.
    """
    if pointer.strength > pointer.width / 100.0:
        raise ValueError("interaction too strong for the weak regime (eta <= delta_q/100)")
    state = as_state(psi)
    post = as_state(postselect, dim=state.shape[0])
    if abs(inner(post, state)) <= 1e-12:
        raise OrthogonalPostselectionError(
            "post-selection state is orthogonal to the pre-selected state"
        )

    matrix = as_operator(obs, state.shape[0])
    if float(np.max(np.abs(matrix - dagger(matrix)))) > 1e-12:
        raise ValueError("observable must be Hermitian")
    eigvals, eigvecs = np.linalg.eigh(matrix)
    branch_amp = (post.conj() @ eigvecs) * (eigvecs.conj().T @ state)

    q = pointer.grid
    eta = pointer.strength
    width = pointer.width
    wave = np.zeros_like(q, dtype=complex)
    slope = np.zeros_like(q, dtype=complex)
    for amp, lam in zip(branch_amp, eigvals):
        x = q - eta * lam
        profile = _gaussian_profile(x, width)
        wave += amp * profile
        slope += amp * (-x / (2.0 * width**2)) * profile

    step = pointer.step
    total = float(np.sum(np.abs(wave) ** 2) * step)
    mean_q = float(np.sum(q * np.abs(wave) ** 2) * step / total)
    mean_p = float(np.real(np.sum(np.conj(wave) * (-1j) * slope) * step / total))
    return WeakPointerShift(
        position=mean_q,
        momentum=mean_p,
        weak_value=weak_value(matrix, post, state),
    )
