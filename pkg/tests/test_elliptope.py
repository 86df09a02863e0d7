"""
Elliptope Test Suite

Membership in the set of correlation matrices, the n=3 sections and
volume, the unit-row Cholesky parameterization, and the three samplers.
"""

import math

import numpy as np
import pytest

from conftest import random_correlation
from krige._random import make_rng
from krige.elliptope import (
    CholeskyParam,
    Elliptope3Point,
    SAMPLERS,
    cholesky_to_corr,
    corr_to_cholesky,
    elliptope3_contains,
    elliptope3_section,
    elliptope3_volume,
    elliptope_contains,
    polygon_area,
    sample_cholesky,
    sample_gram,
    sample_rejection,
)
from krige.errors import InvalidInput, SingularInput
from krige.model_core import validate_variogram


class TestMembership:

    @pytest.mark.parametrize("point, inside", [
        ((0.0, 0.0, 0.0), True),
        ((1.0, 1.0, 1.0), True),
        ((0.9, 0.9, 0.0), False),
        ((1.2, 0.0, 0.0), False),
    ])
    def test_cubic(self, point, inside):
        assert elliptope3_contains(point) is inside

    def test_cubic_value(self):
        assert Elliptope3Point(0.9, 0.9, 0.0).cubic() == pytest.approx(-0.62)

    def test_general_n(self):
        assert elliptope_contains(np.eye(5))
        assert elliptope_contains(np.ones((4, 4)))
        assert not elliptope_contains(Elliptope3Point(0.9, 0.9, 0.0).matrix())

    def test_general_n_needs_unit_diagonal(self):
        with pytest.raises(InvalidInput):
            elliptope_contains(2.0 * np.eye(3))

    def test_agreement_on_cube(self):
        gen = make_rng(5)
        pts = gen.uniform(-1.0, 1.0, size=(100_000, 3))
        disagree = 0
        for x, y, z in pts[:5000]:
            p = Elliptope3Point(x, y, z)
            if abs(p.cubic()) > 1e-6 and elliptope3_contains(p) != elliptope_contains(p.matrix()):
                disagree += 1
        assert disagree == 0
        cubic = 1.0 - (pts ** 2).sum(axis=1) + 2.0 * pts.prod(axis=1)
        mats = np.broadcast_to(np.eye(3), (pts.shape[0], 3, 3)).copy()
        mats[:, 0, 1] = mats[:, 1, 0] = pts[:, 0]
        mats[:, 0, 2] = mats[:, 2, 0] = pts[:, 1]
        mats[:, 1, 2] = mats[:, 2, 1] = pts[:, 2]
        psd = np.linalg.eigvalsh(mats)[:, 0] >= -1e-12
        clear = np.abs(cubic) > 1e-9
        assert np.array_equal((cubic >= 0)[clear], psd[clear])

    def test_convexity(self):
        gen = make_rng(9)
        r1 = random_correlation(gen, 5)
        r2 = random_correlation(gen, 5)
        for t in np.linspace(0.0, 1.0, 11):
            assert elliptope_contains(t * r1 + (1.0 - t) * r2)

    def test_affine_image_is_valid_variogram(self):
        r = random_correlation(make_rng(4), 4)
        sigma2 = 0.6
        assert validate_variogram(sigma2 * (1.0 - r), sigma2).valid


class TestSections:

    def test_unit_circle(self):
        section = elliptope3_section(0.0)
        assert section.area == pytest.approx(math.pi)
        np.testing.assert_allclose(np.hypot(section.boundary[:, 0], section.boundary[:, 1]), 1.0)

    def test_degenerate_segment(self):
        section = elliptope3_section(1.0)
        assert section.area == 0.0
        np.testing.assert_allclose(section.boundary[:, 0], section.boundary[:, 1], atol=1e-15)

    @pytest.mark.parametrize("c", [-0.7, 0.5, 0.95])
    def test_boundary_on_ellipse(self, c):
        section = elliptope3_section(c, points=64)
        x, y = section.boundary[:, 0], section.boundary[:, 1]
        np.testing.assert_allclose(x * x + y * y - 2.0 * c * x * y, 1.0 - c * c, atol=1e-10)
        assert section.coefficients['xy'] == pytest.approx(-2.0 * c)

    def test_area_half(self):
        section = elliptope3_section(0.5, points=4096)
        assert section.area == pytest.approx(2.7207, abs=1e-4)
        assert polygon_area(section.boundary) == pytest.approx(section.area, rel=1e-5)

    def test_level_out_of_range(self):
        with pytest.raises(InvalidInput):
            elliptope3_section(1.5)

    def test_volume(self):
        assert elliptope3_volume() == pytest.approx(math.pi ** 2 / 2.0, abs=1e-4)


class TestCholeskyParam:

    def test_zero_coefficients(self):
        p = CholeskyParam.from_coefficients(4, np.zeros(6))
        np.testing.assert_array_equal(cholesky_to_corr(p).entries, np.eye(4))

    def test_determinant_n3(self):
        t12, t13, t23 = 0.3, -0.5, 0.4
        p = CholeskyParam.from_coefficients(3, [t12, t13, t23])
        r = cholesky_to_corr(p).entries
        np.testing.assert_allclose(np.diag(r), 1.0, atol=1e-15)
        expected = (1.0 - t12 ** 2 - t13 ** 2) * (1.0 - t23 ** 2)
        assert np.linalg.det(r) == pytest.approx(expected, rel=1e-12)
        assert np.prod(p.diagonal ** 2) == pytest.approx(expected, rel=1e-12)

    def test_determinant_n3_many(self, rng):
        for _ in range(1000):
            radius = 0.999 * math.sqrt(rng.uniform())
            angle = rng.uniform(0.0, 2.0 * math.pi)
            t12, t13 = radius * math.cos(angle), radius * math.sin(angle)
            t23 = rng.uniform(-0.999, 0.999)
            r = cholesky_to_corr(CholeskyParam.from_coefficients(3, [t12, t13, t23])).entries
            expected = (1.0 - t12 ** 2 - t13 ** 2) * (1.0 - t23 ** 2)
            assert np.linalg.det(r) == pytest.approx(expected, abs=1e-12)

    def test_row_norm_violation(self):
        with pytest.raises(InvalidInput):
            CholeskyParam.from_coefficients(3, [0.8, 0.8, 0.0])

    def test_identity_inverse(self):
        p = corr_to_cholesky(np.eye(3))
        np.testing.assert_array_equal(p.coefficients, 0.0)

    def test_two_by_two(self):
        p = corr_to_cholesky([[1.0, 0.6], [0.6, 1.0]])
        np.testing.assert_allclose(p.coefficients, [0.6])
        np.testing.assert_allclose(p.diagonal, [0.8, 1.0])
        assert np.prod(p.diagonal ** 2) == pytest.approx(0.64)
        assert p.identifiable

    @pytest.mark.parametrize("n", [3, 6, 8])
    def test_round_trip(self, rng, n):
        r = random_correlation(rng, n)
        np.testing.assert_allclose(cholesky_to_corr(corr_to_cholesky(r)).entries, r, atol=1e-10)

    def test_round_trip_many(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 9))
            r = random_correlation(rng, n)
            p = corr_to_cholesky(r)
            assert p.identifiable
            np.testing.assert_allclose(cholesky_to_corr(p).entries, r, rtol=0, atol=1e-10)

    def test_singular_rejected(self):
        with pytest.raises(SingularInput):
            corr_to_cholesky(np.ones((3, 3)))

    def test_boundary_not_identifiable(self):
        p = CholeskyParam.from_coefficients(2, [1.0])
        assert not p.identifiable
        np.testing.assert_allclose(cholesky_to_corr(p).entries, np.ones((2, 2)))


class TestSamplers:

    def test_rejection_n2_accepts_everything(self):
        draws = sample_rejection(2, 1000, rng_seed=1)
        assert draws.count == 1000
        assert draws.acceptance_rate == 1.0

    def test_rejection_acceptance_n3(self):
        draws = sample_rejection(3, 100_000, rng_seed=2024)
        assert draws.count == 100_000
        assert draws.acceptance_rate == pytest.approx(math.pi ** 2 / 16.0, abs=0.01)

    def test_rejection_budget(self):
        draws = sample_rejection(8, 10, rng_seed=3, max_draws=1000)
        assert draws.timed_out
        assert draws.proposals == 1000
        assert draws.count < 10
        assert draws.warnings

    @pytest.mark.parametrize("method", sorted(SAMPLERS))
    def test_reproducible_and_valid(self, method):
        a = SAMPLERS[method](4, 50, 77)
        b = SAMPLERS[method](4, 50, 77)
        assert a.draws.tobytes() == b.draws.tobytes()
        for r in a.draws:
            assert elliptope_contains(r)
        assert len(a.matrices()) == 50

    def test_gram_symmetric_about_zero(self):
        count = 20_000
        draws = sample_gram(2, count, rng_seed=8)
        rho = draws.draws[:, 0, 1]
        assert abs(rho.mean()) <= 4.0 / math.sqrt(count)

    def test_cholesky_factor_rows(self):
        draws = sample_cholesky(5, 100, rng_seed=12)
        np.testing.assert_allclose(np.diagonal(draws.draws, axis1=1, axis2=2), 1.0)
        assert draws.summary()['method'] == 'cholesky'

    def test_bad_request(self):
        with pytest.raises(InvalidInput):
            sample_gram(1, 10, rng_seed=0)
