"""Tests for the trigonometric basis and the bandwidth regularizer."""

import math

import numpy as np
import pytest

from cliffscale import streams
from cliffscale.harmonic.basis import (
    BandwidthRegularizer,
    HarmonicFunction,
    build_basis_matrix,
    eval_harmonic,
    frequency_lattice,
    nneg,
    regularizer_gradient,
    regularizer_value,
    sample_harmonic,
)


def rng_for(*key):
    return streams.stream(777, *key)


class TestNneg:
    def test_b1_d2_lattice(self):
        kept = nneg(frequency_lattice(1, 2))
        assert kept == [(0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]

    def test_exactly_one_of_each_sign_pair(self):
        lattice = frequency_lattice(3, 2)
        kept = set(nneg(lattice))
        for v in lattice:
            if any(v):
                neg = tuple(-c for c in v)
                assert (v in kept) != (neg in kept)

    def test_half_lattice_count(self):
        for B in range(4):
            for d in (1, 2, 3):
                size = (2 * B + 1) ** d
                assert len(nneg(frequency_lattice(B, d))) == (size + 1) // 2

    def test_order_preserving(self):
        vs = [(1, 0), (0, 1), (-1, 0), (0, 0)]
        assert nneg(vs) == [(1, 0), (0, 1), (0, 0)]


class TestHarmonicFunction:
    def test_constant(self):
        h = HarmonicFunction(B=0, d=2, cos_coeffs={(0, 0): 1.0}, sin_coeffs={})
        rng = rng_for(1)
        for _ in range(10):
            assert eval_harmonic(h, rng.uniform(size=2)) == pytest.approx(1.0)

    def test_single_cosine(self):
        coeffs = {v: 0.0 for v in nneg(frequency_lattice(1, 2))}
        coeffs[(1, 0)] = 1.0
        sins = {v: 0.0 for v in nneg(frequency_lattice(1, 2)) if v != (0, 0)}
        h = HarmonicFunction(B=1, d=2, cos_coeffs=coeffs, sin_coeffs=sins)
        assert eval_harmonic(h, np.array([0.25, 0.7])) == pytest.approx(0.0, abs=1e-12)
        assert eval_harmonic(h, np.array([0.0, 0.3])) == pytest.approx(1.0)

    def test_periodicity(self):
        h = sample_harmonic(2, 2, rng_for(2))
        rng = rng_for(3)
        for _ in range(20):
            x = rng.uniform(size=2)
            for axis in range(2):
                shifted = x.copy()
                shifted[axis] = shifted[axis] + 1.0
                assert eval_harmonic(h, shifted) == pytest.approx(eval_harmonic(h, x), abs=1e-12)

    def test_coefficient_count(self):
        h = sample_harmonic(2, 2, rng_for(4))
        assert h.coefficient_count == 25

    def test_invalid_keys_rejected(self):
        with pytest.raises(ValueError):
            HarmonicFunction(B=1, d=1, cos_coeffs={(0,): 1.0}, sin_coeffs={})


class TestSampleHarmonic:
    def test_b0_single_coefficient(self):
        h = sample_harmonic(0, 2, rng_for(5))
        assert h.coefficient_count == 1

    def test_normalized_monte_carlo_norm(self):
        h = sample_harmonic(2, 2, rng_for(6))
        assert h.norm_squared() == pytest.approx(1.0, abs=1e-12)
        xs = rng_for(7).uniform(size=(1_000_000, 2))
        assert np.mean(eval_harmonic(h, xs) ** 2) == pytest.approx(1.0, rel=0.01)

    def test_unnormalized_keeps_raw_draws(self):
        h = sample_harmonic(1, 2, rng_for(8), normalize=False)
        assert h.norm_squared() != pytest.approx(1.0)


class TestBasisMatrix:
    def test_count_matches_lattice(self):
        for B in range(5):
            for d in (1, 2, 3):
                if (2 * B + 1) ** d > 200:
                    continue
                pts = rng_for(9, B, d).uniform(size=(8, d))
                V = build_basis_matrix(B, d, pts)
                assert V.shape == (8, (2 * B + 1) ** d)

    def test_zero_frequency_column_is_ones(self):
        pts = rng_for(10).uniform(size=(30, 2))
        V = build_basis_matrix(2, 2, pts)
        assert np.allclose(V[:, 0], 1.0)

    def test_square_system_invertible(self):
        pts = np.array([[0.0], [1.0 / 3.0], [2.0 / 3.0]])
        V = build_basis_matrix(1, 1, pts)
        assert V.shape == (3, 3)
        assert abs(np.linalg.det(V)) > 1e-6

    def test_gram_approaches_half_identity(self):
        # (1/m) V'V -> diag(1, 1/2, ..., 1/2) by Monte-Carlo integration.
        m = 100_000
        pts = rng_for(11).uniform(size=(m, 2))
        V = build_basis_matrix(1, 1, pts[:, :1])
        gram = V.T @ V / m
        expected = np.diag([1.0, 0.5, 0.5])
        assert np.abs(gram - expected).max() < 0.02


class TestRegularizer:
    def test_in_span_values_give_zero(self):
        rng = rng_for(12)
        pts = rng.uniform(size=(400, 2))
        reg = BandwidthRegularizer(B=2, d=2, points=pts, lam=1.0)
        V = build_basis_matrix(2, 2, pts)
        z = rng.standard_normal(V.shape[1])
        y = V @ z
        assert regularizer_value(reg, y) <= 1e-10 * max(1.0, float(y @ y) / len(y))

    def test_zero_vector(self):
        reg = BandwidthRegularizer(B=1, d=2, points=rng_for(13).uniform(size=(50, 2)), lam=1.0)
        assert regularizer_value(reg, np.zeros(50)) == 0.0

    def test_bandlimited_targets_are_annihilated(self):
        pts = rng_for(14).uniform(size=(500, 2))
        reg = BandwidthRegularizer(B=2, d=2, points=pts, lam=1.0)
        for t in range(20):
            h = sample_harmonic(2, 2, rng_for(15, t))
            assert regularizer_value(reg, h(pts)) <= 1e-8

    def test_out_of_band_tone_calibration(self):
        pts = rng_for(16).uniform(size=(20_000, 2))
        reg = BandwidthRegularizer(B=2, d=2, points=pts, lam=1.0)
        tone = np.cos(2 * math.pi * 3.0 * pts[:, 0])
        assert regularizer_value(reg, tone) == pytest.approx(0.5, abs=0.02)

    def test_out_of_band_error_shrinks_with_m(self):
        # Monte-Carlo convergence: quadrupling m should roughly halve the
        # residual's distance to 1/2. Compare medians across repeats.
        gaps = []
        for m in (500, 2000, 8000):
            vals = []
            for t in range(20):
                pts = rng_for(17, m, t).uniform(size=(m, 2))
                reg = BandwidthRegularizer(B=2, d=2, points=pts, lam=1.0)
                tone = np.cos(2 * math.pi * 3.0 * pts[:, 0])
                vals.append(abs(regularizer_value(reg, tone) - 0.5))
            gaps.append(np.median(vals))
        assert gaps[0] / gaps[1] > 1.4
        assert gaps[1] / gaps[2] > 1.4

    def test_projector_symmetric_idempotent(self):
        pts = rng_for(18).uniform(size=(120, 2))
        reg = BandwidthRegularizer(B=1, d=2, points=pts, lam=1.0)
        P = reg.residual_matrix()
        assert np.abs(P - P.T).max() <= 1e-10
        assert np.abs(P @ P - P).max() <= 1e-8
        assert reg.bandlimited_rank == 9

    def test_full_rank_when_oversampled(self):
        pts = rng_for(19).uniform(size=(2000, 2))
        reg = BandwidthRegularizer(B=2, d=2, points=pts, lam=1.0)
        assert reg.bandlimited_rank == 25

    def test_gradient_matches_finite_differences(self):
        rng = rng_for(20)
        pts = rng.uniform(size=(80, 2))
        reg = BandwidthRegularizer(B=1, d=2, points=pts, lam=1.0)
        y = rng.standard_normal(80)
        grad = regularizer_gradient(reg, y)
        step = 1e-6
        for _ in range(10):
            direction = rng.standard_normal(80)
            direction /= np.linalg.norm(direction)
            forward = regularizer_value(reg, y + step * direction)
            backward = regularizer_value(reg, y - step * direction)
            numeric = (forward - backward) / (2 * step)
            analytic = float(grad @ direction)
            assert numeric == pytest.approx(analytic, rel=1e-5, abs=1e-10)

    def test_gradient_zero_in_span(self):
        rng = rng_for(21)
        pts = rng.uniform(size=(100, 2))
        reg = BandwidthRegularizer(B=1, d=2, points=pts, lam=1.0)
        V = build_basis_matrix(1, 2, pts)
        y = V @ rng.standard_normal(9)
        assert np.abs(regularizer_gradient(reg, y)).max() < 1e-10

    def test_gradient_orthogonal_to_span(self):
        rng = rng_for(22)
        pts = rng.uniform(size=(150, 2))
        reg = BandwidthRegularizer(B=2, d=2, points=pts, lam=1.0)
        y = rng.standard_normal(150)
        grad = regularizer_gradient(reg, y)
        V = build_basis_matrix(2, 2, pts)
        assert np.abs(V.T @ grad).max() <= 1e-8

    def test_length_mismatch_rejected(self):
        reg = BandwidthRegularizer(B=1, d=2, points=rng_for(23).uniform(size=(40, 2)), lam=1.0)
        with pytest.raises(ValueError):
            regularizer_value(reg, np.zeros(41))
