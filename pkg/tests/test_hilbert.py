import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from singletpaths.errors import DimensionMismatchError, SingularBasisError
from singletpaths.hilbert import (
    IDENTITY2,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    apply,
    dagger,
    inner,
    is_hermitian,
    random_hermitian,
    solve_linear,
    tensor,
)
from singletpaths.singlet import DOWN, UP, build_singlet, op_a, op_b, sigma_axis

SQRT2 = math.sqrt(2.0)


class TestTensor:
    def test_identity_product(self):
        assert np.array_equal(tensor(IDENTITY2, IDENTITY2), np.eye(4))

    def test_basis_product(self):
        assert np.array_equal(tensor(UP, DOWN), np.array([0, 1, 0, 0], dtype=complex))

    def test_singlet_xx_correlation(self):
        # oracle: direct 4-dim matrix arithmetic on the x x x correlator
        psi = build_singlet()
        assert inner(psi, tensor(SIGMA1, SIGMA1) @ psi) == pytest.approx(-1.0, abs=1e-14)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(DimensionMismatchError):
            tensor(UP, IDENTITY2)

    @given(
        hnp.arrays(np.int64, (2, 2), elements=st.integers(-6, 6)),
        hnp.arrays(np.int64, (2, 2), elements=st.integers(-6, 6)),
        hnp.arrays(np.int64, (2, 2), elements=st.integers(-6, 6)),
    )
    @settings(max_examples=50, deadline=None)
    def test_associative_for_integer_inputs(self, a, b, c):
        left = tensor(tensor(a, b), c)
        right = tensor(a, tensor(b, c))
        assert np.array_equal(left, right)


class TestInner:
    def test_normalized_self_overlap(self):
        psi = build_singlet()
        assert inner(psi, psi) == pytest.approx(1.0, abs=1e-15)

    def test_singlet_component(self):
        assert inner(tensor(UP, DOWN), build_singlet()) == pytest.approx(1.0 / SQRT2, abs=1e-15)

    def test_branch_coefficient_closed_form(self):
        # <+;+|Psi> at phi = pi/2 equals -(1 - e^{-i phi}) / (2 sqrt(2))
        phi = math.pi / 2.0
        plus_plus = tensor((UP + DOWN) / SQRT2, (UP + cmath.exp(1j * phi) * DOWN) / SQRT2)
        expected = -(1.0 - cmath.exp(-1j * phi)) / (2.0 * SQRT2)
        assert inner(plus_plus, build_singlet()) == pytest.approx(expected, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            inner(UP, build_singlet())

    def test_adjoint_move(self, rng):
        for _ in range(20):
            m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            a = rng.normal(size=4) + 1j * rng.normal(size=4)
            b = rng.normal(size=4) + 1j * rng.normal(size=4)
            assert inner(a, m @ b) == pytest.approx(inner(dagger(m) @ a, b), abs=1e-12)


class TestApply:
    def test_identity(self):
        psi = build_singlet()
        assert np.array_equal(apply(np.eye(4), psi), psi)

    def test_sigma1_on_photon_a(self):
        # flips the singlet onto (|dd> - |uu>)/sqrt(2)
        expected = np.array([-1, 0, 0, 1], dtype=complex) / SQRT2
        assert np.allclose(apply(op_a(SIGMA1), build_singlet()), expected, atol=1e-15)

    def test_rotated_axis_on_photon_b(self):
        phi = 0.9
        expected = np.array(
            [cmath.exp(-1j * phi), 0.0, 0.0, -cmath.exp(1j * phi)], dtype=complex
        ) / SQRT2
        assert np.allclose(apply(op_b(sigma_axis(phi)), build_singlet()), expected, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            apply(IDENTITY2, build_singlet())


def test_pauli_algebra_exact():
    paulis = (SIGMA1, SIGMA2, SIGMA3)
    for i in range(3):
        for j in range(3):
            product = paulis[i] @ paulis[j]
            expected = np.eye(2, dtype=complex) if i == j else np.zeros((2, 2), complex)
            for k in range(3):
                eps = 0.5 * (i - j) * (j - k) * (k - i)  # Levi-Civita on {0,1,2}
                if eps:
                    expected = expected + 1j * eps * paulis[k]
            assert np.array_equal(product, expected)


def test_hermiticity_predicate(rng):
    assert is_hermitian(random_hermitian(4, rng))
    assert not is_hermitian(random_hermitian(4, rng) + 1j * np.eye(4))


class TestSolveLinear:
    @staticmethod
    def _expansion_columns(phi):
        psi = build_singlet()
        sig_a = op_a(SIGMA1)
        sig_b = op_b(sigma_axis(phi))
        return psi, [psi, sig_a @ psi, sig_b @ psi, sig_a @ sig_b @ psi]

    def test_target_is_first_column(self):
        _, columns = self._expansion_columns(1.1)
        coeff = solve_linear(columns, columns[0])
        assert np.allclose(coeff, [1, 0, 0, 0], atol=1e-12)

    def test_sigma1_b_expansion(self):
        psi, columns = self._expansion_columns(1.1)
        coeff = solve_linear(columns, op_b(SIGMA1) @ psi)
        assert np.allclose(coeff, [0, -1, 0, 0], atol=1e-12)

    def test_sigma1a_sigma2b_expansion(self):
        phi = 1.1
        psi, columns = self._expansion_columns(phi)
        coeff = solve_linear(columns, (op_a(SIGMA1) @ op_b(SIGMA2)) @ psi)
        expected = [math.cos(phi) / math.sin(phi), 0.0, 0.0, 1.0 / math.sin(phi)]
        assert np.allclose(coeff, expected, atol=1e-12)

    def test_degenerate_columns_rejected(self):
        # at phi = 0 the rotated axis collapses onto sigma1 and the columns
        # span only a 2-dim space
        _, columns = self._expansion_columns(0.0)
        with pytest.raises(SingularBasisError):
            solve_linear(columns, columns[1])

    def test_reapplying_coefficients_reconstructs(self, rng):
        psi, columns = self._expansion_columns(2.2)
        for _ in range(10):
            weights = rng.normal(size=4) + 1j * rng.normal(size=4)
            target = sum(w * col for w, col in zip(weights, columns))
            coeff = solve_linear(columns, target)
            rebuilt = sum(c * col for c, col in zip(coeff, columns))
            assert np.max(np.abs(rebuilt - target)) <= 1e-10
            assert np.allclose(coeff, weights, atol=1e-10)
