import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import naive_dft2, naive_idft2, naive_image_mix
from stylemix.spectral import (
    forward_dft,
    image_style_mix,
    mix_amplitude,
    polar_decompose,
    recompose,
    reconstruct_channel,
)

SIZES = [(1, 1), (2, 2), (7, 5), (8, 8), (3, 11)]


class TestForwardDft:
    def test_constant_channel_is_dc_only(self):
        c, h, w = 0.37, 6, 9
        spec = forward_dft(np.full((h, w), c))
        assert spec[0, 0] == pytest.approx(c * h * w, abs=1e-9)
        rest = spec.copy()
        rest[0, 0] = 0
        assert np.max(np.abs(rest)) < 1e-9 * h * w

    @pytest.mark.parametrize("shape", [(8, 8), (7, 5), (2, 2), (5, 7), (1, 6)])
    def test_matches_naive_oracle(self, shape):
        x = np.random.default_rng(hash(shape) % 2**32).random(shape)
        assert np.max(np.abs(forward_dft(x) - naive_dft2(x))) < 1e-9

    def test_index_convention(self):
        # a single impulse at (y=1, x=2) of a 4x5 channel: F[v,u] = exp(-2j pi (2u/5 + v/4))
        x = np.zeros((4, 5))
        x[1, 2] = 1.0
        spec = forward_dft(x)
        v, u = 3, 1
        assert spec[v, u] == pytest.approx(np.exp(-2j * np.pi * (2 * u / 5 + v / 4)), abs=1e-12)

    def test_batched_leading_axes(self):
        x = np.random.default_rng(5).random((3, 7, 5))
        spec = forward_dft(x)
        for c in range(3):
            assert np.array_equal(spec[c], forward_dft(x[c]))

    def test_rejects_non_finite(self):
        x = np.zeros((3, 3))
        x[1, 1] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            forward_dft(x)

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
                  elements=st.floats(-10, 10)))
    def test_conjugate_symmetry(self, x):
        spec = forward_dft(x)
        h, w = x.shape
        mirror = spec[(-np.arange(h)) % h][:, (-np.arange(w)) % w]
        assert np.max(np.abs(spec - np.conj(mirror)), initial=0) < 1e-9


class TestPolar:
    def test_pythagorean(self):
        amp, phase = polar_decompose(np.array([3 + 4j]))
        assert amp[0] == 5.0
        assert phase[0] == math.atan2(4, 3)

    @pytest.mark.parametrize("z", [0j, complex(-0.0, 0.0), complex(0.0, -0.0), complex(-0.0, -0.0)])
    def test_zero_coefficient_gets_phase_zero(self, z):
        amp, phase = polar_decompose(np.array([z]))
        assert amp[0] == 0.0 and phase[0] == 0.0

    def test_phase_range_excludes_minus_pi(self):
        amp, phase = polar_decompose(np.array([complex(-2.0, -0.0), complex(-2.0, 0.0)]))
        assert phase.tolist() == [math.pi, math.pi]

    def test_recompose_identity(self):
        rng = np.random.default_rng(7)
        spec = rng.normal(size=(16, 9)) + 1j * rng.normal(size=(16, 9))
        amp, phase = polar_decompose(spec)
        assert np.all(amp >= 0)
        assert np.all((phase > -np.pi) & (phase <= np.pi))
        assert np.max(np.abs(recompose(amp, phase) - spec) / np.abs(spec)) < 1e-12


class TestMixAmplitude:
    def test_endpoints_exact(self):
        rng = np.random.default_rng(8)
        a, b = rng.random((5, 6)), rng.random((5, 6))
        assert np.array_equal(mix_amplitude(a, b, 0.0), a)
        assert np.array_equal(mix_amplitude(a, b, 1.0), b)

    def test_midpoint(self):
        assert mix_amplitude(np.array([2.0]), np.array([6.0]), 0.5).tolist() == [4.0]

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shapes differ"):
            mix_amplitude(np.ones((2, 2)), np.ones((2, 3)), 0.5)

    @pytest.mark.parametrize("omega", [-0.1, 1.5])
    def test_omega_range(self, omega):
        with pytest.raises(ValueError, match="omega"):
            mix_amplitude(np.ones(2), np.ones(2), omega)

    @settings(max_examples=60)
    @given(arrays(np.float64, 12, elements=st.floats(0, 1e6)),
           arrays(np.float64, 12, elements=st.floats(0, 1e6)),
           st.floats(0, 1))
    def test_convex_hull(self, a, b, omega):
        m = mix_amplitude(a, b, omega)
        assert np.all(np.minimum(a, b) <= m) and np.all(m <= np.maximum(a, b))

    @settings(max_examples=60)
    @given(arrays(np.float64, 12, elements=st.floats(0, 1e3)),
           arrays(np.float64, 12, elements=st.floats(0, 1e3)),
           st.floats(0, 1), st.floats(0, 1))
    def test_linear_in_omega(self, a, b, w1, w2):
        lhs = mix_amplitude(a, b, w1) + mix_amplitude(a, b, w2)
        rhs = 2 * mix_amplitude(a, b, (w1 + w2) / 2)
        scale = np.maximum(1.0, np.maximum(a, b))
        assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale)


class TestReconstruct:
    @pytest.mark.parametrize("shape", SIZES + [(64, 64), (33, 20)])
    def test_round_trip(self, shape):
        x = np.random.default_rng(11).random(shape)
        amp, phase = polar_decompose(forward_dft(x))
        out, residue = reconstruct_channel(amp, phase, return_residue=True)
        assert np.max(np.abs(out - x)) < 1e-9
        assert residue < 1e-12

    def test_matches_naive_inverse(self):
        rng = np.random.default_rng(12)
        a, b = rng.random((6, 5)), rng.random((6, 5))
        amp_a, ph_a = polar_decompose(forward_dft(a))
        amp_b, _ = polar_decompose(forward_dft(b))
        mixed = mix_amplitude(amp_a, amp_b, 0.4)
        expect = naive_idft2(mixed * np.exp(1j * ph_a)).real
        assert np.max(np.abs(reconstruct_channel(mixed, ph_a) - expect)) < 1e-9

    def test_mixed_residue_is_tiny(self):
        rng = np.random.default_rng(13)
        for shape in [(8, 8), (7, 5), (31, 16)]:
            a, b = rng.random(shape), rng.random(shape)
            pa, pb = polar_decompose(forward_dft(a)), polar_decompose(forward_dft(b))
            omega = rng.uniform(0, 1)
            out, res = reconstruct_channel(mix_amplitude(pa.amplitude, pb.amplitude, omega),
                                           pa.phase, return_residue=True)
            assert res < 1e-6 * np.sqrt(np.mean(out**2))

    def test_broken_symmetry_warns(self):
        amp = np.ones((4, 4))
        phase = np.zeros((4, 4))
        phase[0, 1] = 1.0  # no matching conjugate at [0, 3]
        with pytest.warns(RuntimeWarning, match="imaginary residue"):
            reconstruct_channel(amp, phase)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            reconstruct_channel(np.ones((2, 2)), np.ones((2, 3)))


class TestImageStyleMix:
    def test_two_by_two_hand_value(self):
        src = np.array([[[0.0, 0.0], [0.0, 1.0]]])
        sty = np.ones((1, 2, 2))
        # source spectrum [[1,-1],[-1,1]], style [[4,0],[0,0]]; mixed amplitude
        # [[2.5,.5],[.5,.5]] with source signs, inverse gives:
        expect = np.array([[[0.5, 0.5], [0.5, 1.0]]])
        out = image_style_mix(src, sty, 0.5)
        assert np.max(np.abs(out - expect)) < 1e-12
        assert np.max(np.abs(naive_image_mix(src, sty, 0.5) - expect)) < 1e-12

    @pytest.mark.parametrize("shape", [(3, 6, 5), (1, 7, 7), (3, 4, 8)])
    def test_matches_naive_chain(self, shape):
        rng = np.random.default_rng(14)
        src, sty = rng.random(shape), rng.random(shape)
        omega = 0.73
        assert np.max(np.abs(image_style_mix(src, sty, omega) - naive_image_mix(src, sty, omega))) < 1e-9

    @pytest.mark.parametrize("shape", [(3, 16, 16), (3, 15, 10), (1, 9, 1), (3, 1, 12)])
    def test_matches_explicit_op_chain(self, shape):
        rng = np.random.default_rng(15)
        src, sty = rng.random(shape), rng.random(shape)
        omega = 0.61
        p_src = polar_decompose(forward_dft(src))
        p_sty = polar_decompose(forward_dft(sty))
        ref, ref_res = reconstruct_channel(mix_amplitude(p_src.amplitude, p_sty.amplitude, omega),
                                           p_src.phase, return_residue=True)
        out, res = image_style_mix(src, sty, omega, return_residue=True)
        assert np.max(np.abs(out - np.clip(ref, 0, 1))) < 1e-12
        assert np.all(res < 1e-12) and np.all(ref_res < 1e-12)

    def test_same_images_any_omega(self):
        rng = np.random.default_rng(16)
        img = rng.random((3, 12, 9))
        for omega in rng.uniform(0, 1, 10):
            assert np.max(np.abs(image_style_mix(img, img, omega) - img)) < 1e-6

    def test_omega_zero_returns_source(self):
        rng = np.random.default_rng(17)
        src, sty = rng.random((3, 10, 14)), rng.random((3, 10, 14))
        assert np.max(np.abs(image_style_mix(src, sty, 0.0) - src)) < 1e-6

    def test_omega_one_carries_style_amplitude(self):
        rng = np.random.default_rng(18)
        src, sty = rng.random((1, 10, 10)), rng.random((1, 10, 10))
        p_src = polar_decompose(forward_dft(src))
        a_sty = polar_decompose(forward_dft(sty)).amplitude
        unclamped = reconstruct_channel(mix_amplitude(p_src.amplitude, a_sty, 1.0), p_src.phase)
        assert np.max(np.abs(np.abs(forward_dft(unclamped)) - a_sty)) < 1e-6

    def test_shape_mismatch_refused(self):
        with pytest.raises(ValueError, match="shapes differ"):
            image_style_mix(np.zeros((3, 4, 4)), np.zeros((3, 4, 5)), 0.5)

    def test_channel_count_checked(self):
        with pytest.raises(ValueError, match="1 or 3 channels"):
            image_style_mix(np.zeros((2, 4, 4)), np.zeros((2, 4, 4)), 0.5)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3).map(lambda c: 1 if c < 3 else 3), st.integers(1, 13), st.integers(1, 13),
           st.floats(0, 1), st.integers(0, 2**32 - 1))
    def test_shape_preserved_and_finite(self, c, h, w, omega, seed):
        rng = np.random.default_rng(seed)
        src, sty = rng.random((c, h, w)), rng.random((c, h, w))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = image_style_mix(src, sty, omega)
        assert out.shape == src.shape
        assert np.all(np.isfinite(out)) and out.min() >= 0 and out.max() <= 1

    def test_bit_stable(self):
        rng = np.random.default_rng(19)
        src, sty = rng.random((3, 40, 30)), rng.random((3, 40, 30))
        assert np.array_equal(image_style_mix(src, sty, 0.8), image_style_mix(src, sty, 0.8))
