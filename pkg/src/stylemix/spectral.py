"""Image-level style mixing in the Fourier domain.

The source image keeps its phase (content layout) while its amplitude
(global style: brightness, contrast) is blended with the amplitude of the
style-diversified image across the whole spectrum.

Spectra are unshifted, DC at ``[0, 0]``, and indexed ``[v, u]`` to match a
channel indexed ``[y, x]``.
"""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np
import scipy.fft

from .tensor_io import validate_image

# Imaginary residue above this fraction of the channel RMS means the
# spectrum lost conjugate symmetry somewhere.
RESIDUE_WARN_RATIO = 1e-3


class PolarSpectrum(NamedTuple):
    amplitude: np.ndarray
    phase: np.ndarray


def forward_dft(channel) -> np.ndarray:
    """Unnormalized 2-D DFT over the last two axes.

    ``F[v, u] = sum_x sum_y f[y, x] * exp(-2j*pi*(u*x/W + v*y/H))``. Leading
    axes, if any, are transformed independently.
    """
    channel = np.asarray(channel, dtype=np.float64)
    if channel.ndim < 2:
        raise ValueError(f"expected at least 2 dimensions, got shape {channel.shape}")
    if not np.all(np.isfinite(channel)):
        raise ValueError("channel contains non-finite values")
    return scipy.fft.fft2(channel, axes=(-2, -1))


def polar_decompose(spec) -> PolarSpectrum:
    spec = np.asarray(spec, dtype=np.complex128)
    amplitude = np.abs(spec)
    phase = np.arctan2(spec.imag, spec.real)
    # keep the range (-pi, pi]; arctan2(-0.0, x<0) gives -pi
    phase[phase == -np.pi] = np.pi
    phase[amplitude == 0] = 0.0
    return PolarSpectrum(amplitude, phase)


def recompose(amplitude, phase) -> np.ndarray:
    return np.asarray(amplitude) * np.exp(1j * np.asarray(phase))


def mix_amplitude(a_src, a_sty, omega: float) -> np.ndarray:
    """Convex blend ``(1 - omega) * a_src + omega * a_sty`` over every frequency."""
    a_src = np.asarray(a_src, dtype=np.float64)
    a_sty = np.asarray(a_sty, dtype=np.float64)
    if a_src.shape != a_sty.shape:
        raise ValueError(f"amplitude shapes differ: {a_src.shape} vs {a_sty.shape}")
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    mixed = (1.0 - omega) * a_src + omega * a_sty
    # rounding can step one ulp outside the hull of the two inputs
    return np.clip(mixed, np.minimum(a_src, a_sty), np.maximum(a_src, a_sty))


def _check_residue(real: np.ndarray, residue: np.ndarray, stacklevel: int) -> None:
    scale = np.sqrt(np.mean(real**2, axis=(-2, -1)))
    ratio = residue / np.where(scale > 0, scale, 1.0)
    if np.any(ratio > RESIDUE_WARN_RATIO):
        warnings.warn(
            f"imaginary residue reached {float(np.max(ratio)):.3g} of the channel RMS; "
            "the mixed spectrum is not conjugate-symmetric",
            RuntimeWarning,
            stacklevel=stacklevel,
        )


def _inverse_real(spec: np.ndarray, return_residue: bool):
    z = scipy.fft.ifft2(spec, axes=(-2, -1))
    real = np.ascontiguousarray(z.real)
    residue = np.sqrt(np.mean(z.imag**2, axis=(-2, -1)))
    _check_residue(real, residue, stacklevel=4)
    if return_residue:
        return real, residue
    return real


def reconstruct_channel(a_mixed, p_src, return_residue: bool = False):
    """Real part of the inverse DFT of ``a_mixed * exp(1j * p_src)``.

    With ``return_residue=True`` also returns the RMS of the discarded
    imaginary part (per leading index for batched input).
    """
    a_mixed = np.asarray(a_mixed, dtype=np.float64)
    p_src = np.asarray(p_src, dtype=np.float64)
    if a_mixed.shape != p_src.shape:
        raise ValueError(f"amplitude/phase shapes differ: {a_mixed.shape} vs {p_src.shape}")
    return _inverse_real(recompose(a_mixed, p_src), return_residue)


def _unit_phasor(spec: np.ndarray, amplitude: np.ndarray) -> np.ndarray:
    # exp(1j * phase) without the trig round trip; zero bins get phase 0
    nonzero = amplitude > 0
    phasor = np.ones_like(spec)
    np.divide(spec, amplitude, out=phasor, where=nonzero)
    return phasor


def _half_residue(half: np.ndarray, width: int) -> np.ndarray:
    """RMS of the imaginary part that ``irfft2`` drops from a half spectrum.

    Only the self-conjugate columns (u = 0 and, for even width, u = W/2)
    carry an independent anti-Hermitian part; by Parseval its energy over
    ``(H*W)**2`` is the mean squared imaginary residue of the full inverse.
    """
    h = half.shape[-2]
    mirror = (-np.arange(h)) % h
    cols = [0] + ([width // 2] if width % 2 == 0 else [])
    energy = np.zeros(half.shape[:-2])
    for c in cols:
        col = half[..., :, c]
        anti = 0.5 * (col - np.conj(col[..., mirror]))
        energy = energy + np.sum(anti.real**2 + anti.imag**2, axis=-1)
    return np.sqrt(energy) / (h * width)


def image_style_mix(src, sty, omega: float, return_residue: bool = False):
    """Mix the amplitude spectrum of ``sty`` into ``src``, keeping ``src``'s phase.

    Both images are ``(C, H, W)`` arrays of identical shape; each channel is
    transformed independently and the result is clamped to [0, 1]. With
    ``return_residue=True`` the per-channel imaginary residue RMS is
    returned alongside the image.

    Equivalent to ``forward_dft -> polar_decompose -> mix_amplitude ->
    reconstruct_channel`` per channel, evaluated on the non-redundant half
    of the conjugate-symmetric spectra.
    """
    src = validate_image(src, "source image")
    sty = validate_image(sty, "styled image")
    if src.shape != sty.shape:
        raise ValueError(f"image shapes differ: {src.shape} vs {sty.shape}")
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    h, w = src.shape[-2:]
    f_src = scipy.fft.rfft2(src, axes=(-2, -1))
    a_src = np.abs(f_src)
    a_mixed = mix_amplitude(a_src, np.abs(scipy.fft.rfft2(sty, axes=(-2, -1))), omega)
    mixed = a_mixed * _unit_phasor(f_src, a_src)
    real = scipy.fft.irfft2(mixed, s=(h, w), axes=(-2, -1))
    residue = _half_residue(mixed, w)
    _check_residue(real, residue, stacklevel=3)
    out = np.clip(real, 0.0, 1.0)
    if return_residue:
        return out, residue
    return out
