"""Analytic test responses, violation injectors and a periodic Hilbert oracle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectrum import RescaledResponse, SampledResponse

GAUSS_X0 = 0.1
GAUSS_SIGMA = 1e-2 / 6


@dataclass(frozen=True)
class TwoPoleParams:
    r: complex = 1 + 3j
    s: complex = 1 + 2j
    w_max: float = 6.0

    def __post_init__(self):
        # pole of r/(iw+s) sits at w = i*s; causality needs Im(i*s) = Re(s) > 0
        if complex(self.s).real <= 0:
            raise ValueError("Re(s) must be positive so both poles lie in the upper half plane")
        if self.w_max <= 0:
            raise ValueError("w_max must be positive")

    @property
    def poles(self) -> tuple[complex, complex]:
        s = complex(self.s)
        return 1j * s, 1j * s.conjugate()


@dataclass(frozen=True)
class DelayedGaussianParams:
    """Gaussian impulse response centred at ``t_d``.

    ``sigma`` and ``t_d`` are expressed in ``time_unit`` seconds (ns by
    default) so that ``sigma=2`` pairs with ``w_max=3.6e8`` Hz.
    """

    sigma: float = 2.0
    t_d: float = 12.0
    w_max: float = 3.6e8
    time_unit: float = 1e-9

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.t_d < 0:
            raise ValueError("t_d must be non-negative")
        if self.w_max <= 0:
            raise ValueError("w_max must be positive")


@dataclass(frozen=True)
class LineParams:
    """Uniform RLGC line; per-unit-length values are per cm, length in cm."""

    R: float = 0.8
    L: float = 4.73e-9
    G: float = 0.0
    C: float = 3.8e-12
    length: float = 10.0
    z_ref: float = 50.0
    w_min: float | None = None
    w_max: float = 5e9

    def __post_init__(self):
        if min(self.R, self.L, self.C, self.G) < 0:
            raise ValueError("R, L, G, C must be non-negative")
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.z_ref <= 0:
            raise ValueError("z_ref must be positive")


def baseband_grid(n: int, w_max: float) -> np.ndarray:
    """``n`` equispaced frequencies on ``[0, w_max]``, endpoints included."""
    if n < 2:
        raise ValueError("need at least two samples")
    return np.linspace(0.0, w_max, n)


def bandpass_grid(n: int, w_max: float) -> np.ndarray:
    """``n`` equispaced frequencies on ``(0, w_max]``; the first is ``w_max/n``."""
    if n < 2:
        raise ValueError("need at least two samples")
    return w_max * np.arange(1, n + 1) / n


def two_pole_values(p: TwoPoleParams, w) -> np.ndarray:
    r, s = complex(p.r), complex(p.s)
    w = np.asarray(w, dtype=float)
    return r / (1j * w + s) + r.conjugate() / (1j * w + s.conjugate())


def two_pole(p: TwoPoleParams = TwoPoleParams(), freqs=None, n: int = 501) -> SampledResponse:
    freqs = baseband_grid(n, p.w_max) if freqs is None else np.asarray(freqs, dtype=float)
    if freqs.size and (freqs.min() < 0 or freqs.max() > p.w_max):
        raise ValueError("frequencies must lie in [0, w_max]")
    return SampledResponse(freqs, two_pole_values(p, freqs), 0.0, p.w_max, "baseband")


def delayed_gaussian_values(p: DelayedGaussianParams, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    sigma = p.sigma * p.time_unit
    t_d = p.t_d * p.time_unit
    return np.exp(-2 * (np.pi * w * sigma) ** 2 - 2j * np.pi * w * t_d)


def delayed_gaussian(
    p: DelayedGaussianParams = DelayedGaussianParams(), freqs=None, n: int = 251
) -> SampledResponse:
    freqs = baseband_grid(n, p.w_max) if freqs is None else np.asarray(freqs, dtype=float)
    if freqs.size and freqs.min() < 0:
        raise ValueError("frequencies must be non-negative")
    w_min = 0.0 if freqs[0] == 0 else float(freqs[0])
    kind = "baseband" if w_min == 0 else "bandpass"
    return SampledResponse(
        freqs, delayed_gaussian_values(p, freqs), w_min, max(p.w_max, freqs[-1]), kind
    )


def line_s11_values(p: LineParams, freqs) -> np.ndarray:
    """S11 of a uniform line terminated in ``z_ref`` at both ports."""
    f = np.asarray(freqs, dtype=float)
    if np.any(f <= 0):
        raise ValueError("line model is undefined at DC; frequencies must be positive")
    omega = 2 * np.pi * f
    series = p.R + 1j * omega * p.L
    shunt = p.G + 1j * omega * p.C
    gamma = np.sqrt(series * shunt)
    gamma = np.where(gamma.real < 0, -gamma, gamma)
    z0 = series / gamma
    gl = gamma * p.length
    sh, ch = np.sinh(gl), np.cosh(gl)
    zr = p.z_ref
    return (z0**2 - zr**2) * sh / (2 * z0 * zr * ch + (z0**2 + zr**2) * sh)


def transmission_line_s11(p: LineParams = LineParams(), freqs=None, n: int = 1250) -> SampledResponse:
    freqs = bandpass_grid(n, p.w_max) if freqs is None else np.asarray(freqs, dtype=float)
    w_min = float(freqs[0]) if p.w_min is None else p.w_min
    return SampledResponse(freqs, line_s11_values(p, freqs), w_min, p.w_max, "bandpass")


def _axis(data):
    if isinstance(data, RescaledResponse):
        return data.points
    if isinstance(data, SampledResponse):
        return 0.5 * data.freqs / data.w_max
    raise TypeError(f"unsupported data type {type(data).__name__}")


def _replace_values(data, values):
    if isinstance(data, RescaledResponse):
        return data.with_values(values)
    return SampledResponse(data.freqs, values, data.w_min, data.w_max, data.kind)


def add_gaussian_violation(data, a: float, x0: float = GAUSS_X0, sigma_x: float = GAUSS_SIGMA):
    """Add ``a * exp(-(|x| - x0)^2 / (2 sigma_x^2))`` to ``Re H``.

    The bump is mirrored so ``Re H`` stays even. Works on rescaled data or on
    a frequency response (``x = 0.5 w / w_max``).
    """
    if sigma_x <= 0:
        raise ValueError("sigma_x must be positive")
    x = _axis(data)
    bump = a * np.exp(-((np.abs(x) - x0) ** 2) / (2 * sigma_x**2))
    return _replace_values(data, data.values + bump)


def add_cosine_violation(data, a: float, cycles: float = 10.0):
    """Add ``a * cos(2 pi cycles x)`` to ``Re H``; ``Im H`` is untouched."""
    x = _axis(data)
    return _replace_values(data, data.values + a * np.cos(2 * np.pi * cycles * x))


def periodic_hilbert(samples) -> np.ndarray:
    """Periodic Hilbert transform of real samples on a uniform grid over one period.

    With ``phi_k(x) = exp(-2 pi i k x / b)`` the transform maps ``phi_k`` to
    ``i sgn(k) phi_k``. numpy's FFT bin ``m`` holds ``exp(+2 pi i m x / b)``,
    i.e. ``k = -m``, so bin ``m`` is multiplied by ``-i sgn(m)``. The mean
    and Nyquist bins are zeroed.
    """
    u = np.asarray(samples, dtype=float)
    n = u.size
    if n < 2 or n % 2:
        raise ValueError("periodic_hilbert needs an even number of samples")
    u_hat = np.fft.fft(u)
    m = np.fft.fftfreq(n) * n
    mult = -1j * np.sign(m)
    mult[n // 2] = 0.0
    return np.fft.ifft(u_hat * mult).real
