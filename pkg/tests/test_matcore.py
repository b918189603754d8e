"""Linear-algebra layer: oracle values, failure policy, identities.

Frozen constants come from tests/oracle_tools/gen_oracles.py, which
recomputes them by exact cofactor expansion over Fractions (no kptau, no
LAPACK).  All matrix entries are dyadic rationals so the float64 inputs
here are bit-identical to the oracle's exact inputs.
"""

import numpy as np
import pytest

from kptau import matcore
from kptau.errors import DimensionError, PoleError, SingularMatrixError

A3 = np.array(
    [
        [2.0, -1.0, 0.5],
        [0.25, 1.0, -2.0],
        [0.0, 0.75, 5.0],
    ]
)
MAT_DET = 14.34375  # exactly 459/32
MAT_INV = np.array(
    [
        [
            0.4531590413943355119825708061002178649237,
            0.3747276688453159041394335511982570806100,
            0.1045751633986928104575163398692810457516,
        ],
        [
            -0.08714596949891067538126361655773420479303,
            0.6971677559912854030501089324618736383442,
            0.2875816993464052287581699346405228758170,
        ],
        [
            0.01307189542483660130718954248366013071895,
            -0.1045751633986928104575163398692810457516,
            0.1568627450980392156862745098039215686275,
        ],
    ]
)


class TestDet:
    def test_oracle_3x3(self):
        d = matcore.det(A3)
        assert d.imag == 0.0
        assert d.real == pytest.approx(MAT_DET, rel=1e-13)

    def test_exactly_singular_returns_zero(self):
        assert matcore.det([[1.0, 2.0], [2.0, 4.0]]) == 0

    def test_empty_matrix(self):
        assert matcore.det(np.zeros((0, 0))) == 1

    def test_huge_determinant_saturates_cleanly(self):
        # product of pivots would overflow; the log accumulation turns it
        # into a clean +inf instead of a nan
        d = matcore.det(np.diag([1e200, 1e200, 1e200]))
        assert np.isinf(d.real) and d.real > 0
        d2 = matcore.det(np.diag([1e200, -1e200, 1e200]))
        assert np.isinf(d2.real) and d2.real < 0

    def test_complex_input(self):
        a = np.array([[1 + 1j, 0.5], [0.25, 2 - 1j]])
        expect = (1 + 1j) * (2 - 1j) - 0.5 * 0.25
        assert matcore.det(a) == pytest.approx(expect, rel=1e-13)

    def test_nonsquare_rejected(self):
        with pytest.raises(DimensionError):
            matcore.det(np.zeros((2, 3)))

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            matcore.det([[np.nan, 0.0], [0.0, 1.0]])


class TestInvSolve:
    def test_oracle_inverse(self):
        np.testing.assert_allclose(matcore.inv(A3), MAT_INV, rtol=1e-12, atol=0)

    def test_inverse_roundtrip(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((5, 5)) + 2 * np.eye(5)
        np.testing.assert_allclose(
            matcore.inv(a) @ a, np.eye(5), rtol=0, atol=1e-12
        )

    def test_singular_raises_with_pivot(self):
        with pytest.raises(SingularMatrixError, match="pivot"):
            matcore.inv([[1.0, 2.0], [2.0, 4.0]])

    def test_near_singular_raises(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]])
        with pytest.raises(SingularMatrixError):
            matcore.inv(a)

    def test_solve_matches_multiply(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((4, 4)) + 3 * np.eye(4)
        b = rng.standard_normal(4)
        x = matcore.solve(a, b)
        np.testing.assert_allclose(a @ x, b, rtol=0, atol=1e-12)


class TestCayley:
    def test_roundtrip(self):
        rng = np.random.default_rng(3)
        p = 0.4 * rng.standard_normal((4, 4))
        a = matcore.cayley(p)
        np.testing.assert_allclose(
            matcore.inverse_cayley(a), p, rtol=1e-10, atol=1e-12
        )

    def test_skew_gives_orthogonal(self):
        rng = np.random.default_rng(5)
        s = rng.standard_normal((4, 4))
        p = s - s.T
        a = matcore.cayley(p)
        np.testing.assert_allclose(a.T @ a, np.eye(4), rtol=0, atol=1e-12)

    def test_zero_gives_identity(self):
        np.testing.assert_allclose(matcore.cayley(np.zeros((3, 3))), np.eye(3))

    def test_eigenvalue_minus_one_raises(self):
        with pytest.raises(SingularMatrixError):
            matcore.cayley(np.diag([-1.0, 2.0]))


class TestDiagMap:
    VALS = np.array([0.3, -1.2, 2.0])

    @pytest.mark.parametrize(
        "kind,fn",
        [
            ("cosh", np.cosh),
            ("sinh", np.sinh),
            ("cos", np.cos),
            ("sin", np.sin),
            ("exp", np.exp),
            ("neg_exp", lambda v: np.exp(-v)),
        ],
    )
    def test_named_maps(self, kind, fn):
        out = matcore.diag_map(self.VALS, kind)
        np.testing.assert_allclose(out, np.diag(fn(self.VALS)), rtol=1e-15)
        assert np.count_nonzero(out - np.diag(np.diag(out))) == 0

    def test_cot_value(self):
        out = matcore.diag_map([0.5], "cot")
        assert out[0, 0] == pytest.approx(np.cos(0.5) / np.sin(0.5), rel=1e-15)

    @pytest.mark.parametrize("v", [0.0, np.pi, -2 * np.pi, np.pi + 1e-13])
    def test_cot_pole(self, v):
        with pytest.raises(PoleError):
            matcore.diag_map([0.2, v], "cot")

    def test_cot_near_pole_but_outside_guard(self):
        out = matcore.diag_map([1e-9], "cot")
        assert abs(out[0, 0]) > 1e8

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            matcore.diag_map([1.0], "tanh")

    def test_requires_vector(self):
        with pytest.raises(DimensionError):
            matcore.diag_map(np.eye(2), "cosh")


class TestBlockDeterminantIdentity:
    """det [[S, K], [-K, S]] == det(S + iK) det(S - iK) for real S, K.

    This is the identity that lets a 2n x 2n real quadratic-form
    determinant collapse to the modulus-squared of an n x n complex one;
    the stochastic formulas lean on it, so it gets its own check.
    """

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_identity(self, seed):
        rng = np.random.default_rng(seed)
        n = 4
        s = rng.standard_normal((n, n))
        k = rng.standard_normal((n, n))
        big = np.block([[s, k], [-k, s]])
        lhs = matcore.det(big)
        rhs = matcore.det(s + 1j * k) * matcore.det(s - 1j * k)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_symmetric_skew_case_positive(self):
        # S symmetric, K skew: the complex factors are conjugates, so the
        # real determinant is |det(S + iK)|^2 >= 0
        rng = np.random.default_rng(9)
        s = rng.standard_normal((3, 3))
        s = 0.5 * (s + s.T) + 3 * np.eye(3)
        k = rng.standard_normal((3, 3))
        k = 0.5 * (k - k.T)
        lhs = matcore.det(np.block([[s, k], [-k, s]]))
        z = matcore.det(s + 1j * k)
        assert lhs.real == pytest.approx(abs(z) ** 2, rel=1e-10)
        assert lhs.real > 0
