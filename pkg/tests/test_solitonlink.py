"""The determinant bridge between the tau evaluation and the hyperbolic
form certified by the stochastic estimators."""

import math

import numpy as np
import pytest

from kptau.errors import DomainError
from kptau.solitonlink import (
    cross_pole_matrix,
    determinant_link,
    link_residual,
    run_link_check,
    soliton_area_spec,
    soliton_coupling,
    soliton_weights,
)
from kptau.tauengine import SolitonParams
from kptau.wiener.specs import PathEnsembleConfig


def make_params(p, q, m):
    return SolitonParams(p=np.asarray(p, float), q=np.asarray(q, float),
                         m=np.asarray(m, float))


def random_family(rng, n):
    """Positive-regime modes with min |p_i - q_j| >= 2."""
    p = np.sort(rng.uniform(1.0, 3.0, n))[::-1].copy()
    q = np.sort(rng.uniform(-3.0, -1.0, n))
    m = np.exp(rng.uniform(-1.0, 1.0, n))
    return make_params(p, q, m)


class TestBuildingBlocks:
    def test_cross_pole_values(self):
        params = make_params([2.0, 1.0], [-1.0, -2.0], [1.0, 1.0])
        pole = cross_pole_matrix(params)
        expect = np.array([[1 / 3, 1 / 4], [1 / 2, 1 / 3]])
        np.testing.assert_allclose(pole, expect, rtol=1e-15)

    def test_scalar_coupling(self):
        params = make_params([1.5], [-1.5], [1.0])
        # P = 1/3, so A = (1 - 1/3)/(1 + 1/3) = 1/2
        assert soliton_coupling(params)[0, 0] == pytest.approx(0.5, rel=1e-15)

    def test_weights_at_origin(self):
        params = make_params([1.5], [-1.5], [math.exp(-0.4)])
        lam = soliton_weights(params, [0.0])
        assert lam[0] == pytest.approx(0.2, rel=1e-12)


class TestIdentity:
    def test_scalar_hand_value(self):
        # p = 1.5, q = -1.5, m = 1, x = 0: both sides are exactly 1
        # (lhs = cosh 0 + A sinh 0; rhs = 2^{-1} * 3/2 * (1 + 1/3))
        params = make_params([1.5], [-1.5], [1.0])
        lhs, rhs = determinant_link(params, [0.0])
        assert lhs == pytest.approx(1.0, rel=1e-14)
        assert rhs == pytest.approx(1.0, rel=1e-14)
        assert link_residual(params, [0.0]) <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_random_families(self, n):
        rng = np.random.default_rng(60 + n)
        for _ in range(5):
            params = random_family(rng, n)
            for _ in range(20):
                x = rng.uniform(-0.5, 0.5, 3)
                assert link_residual(params, x) <= 1e-10

    def test_weight_reparameterization_invariance(self):
        # scaling m by e^{2 beta} is the same point as shifting x_1 by
        # 2 beta / (p - q); the identity must not see the difference
        rng = np.random.default_rng(5)
        p, q = 2.2, -1.3
        for _ in range(10):
            m = float(np.exp(rng.uniform(-1, 1)))
            beta = float(rng.uniform(-0.8, 0.8))
            x1 = float(rng.uniform(-0.5, 0.5))
            a = determinant_link(
                make_params([p], [q], [m * math.exp(2 * beta)]), [x1]
            )
            b = determinant_link(
                make_params([p], [q], [m]), [x1 + 2 * beta / (p - q)]
            )
            assert a[0] == pytest.approx(b[0], rel=1e-12)
            assert a[1] == pytest.approx(b[1], rel=1e-12)


class TestAreaSpecBridge:
    def test_nonpositive_weight_rejected(self):
        params = make_params([1.5], [-1.5], [1.0])  # lam = 0 at x = 0
        with pytest.raises(DomainError):
            soliton_area_spec(params, [0.0])

    def test_positive_weights_accepted(self):
        params = make_params([1.5], [-1.5], [math.exp(-0.4)])
        spec = soliton_area_spec(params, [0.0])
        assert spec.lam[0] == pytest.approx(0.2, rel=1e-12)
        assert spec.a[0, 0] == pytest.approx(0.5, rel=1e-15)
        assert spec.within_envelope()


class TestRunLinkCheck:
    def test_exact_only(self):
        params = make_params([1.5], [-1.5], [1.0])
        out = run_link_check(params, [0.0])
        assert out["identity_passed"]
        assert out["mc"] is None
        assert "mc_skipped" not in out

    def test_mc_leg_certifies_determinant(self):
        params = make_params([1.5], [-1.5], [math.exp(-0.4)])
        cfg = PathEnsembleConfig(samples=20000, steps=512, seed=77)
        out = run_link_check(params, [0.0], cfg)
        assert out["identity_passed"]
        assert out["mc"] is not None
        assert out["mc"]["max_abs_z"] < 3.5
        assert out["mc"]["target"] == pytest.approx(
            1.0 / out["det_value"], rel=1e-15
        )

    def test_mc_skipped_outside_domain(self):
        params = make_params([1.5], [-1.5], [1.0])
        cfg = PathEnsembleConfig(samples=1000, steps=256, seed=1)
        out = run_link_check(params, [0.0], cfg)
        assert out["identity_passed"]
        assert out["mc"] is None
        assert "weights must be positive" in out["mc_skipped"]

    def test_mc_skipped_outside_envelope(self):
        # wide separation pushes the coupling past 1/2 while the weight
        # sits at 1.0: both envelope clauses fail
        params = make_params([5.0], [-5.0], [math.exp(-2.0)])
        cfg = PathEnsembleConfig(samples=1000, steps=256, seed=1)
        out = run_link_check(params, [0.0], cfg)
        assert out["identity_passed"]
        assert out["mc"] is None
        assert "envelope" in out["mc_skipped"]
