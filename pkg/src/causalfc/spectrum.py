"""Tabulated frequency responses and their preparation for fitting.

Frequencies are kept in Hz exactly as given. The only normalization is the
map ``x = 0.5 * w / w_max`` onto ``[0, 0.5]``, followed by conjugate
reflection onto ``[-0.5, 0.5]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12

BASEBAND = "baseband"
BANDPASS = "bandpass"


@dataclass(frozen=True, eq=False)
class SampledResponse:
    """Discrete samples ``H(w_j)`` of a transfer function.

    Attributes:
        freqs: strictly increasing, non-negative frequencies in Hz.
        values: complex response at ``freqs``.
        w_min: lower band edge in Hz.
        w_max: upper band edge in Hz.
        kind: ``"baseband"`` when ``w_min == 0`` else ``"bandpass"``.
    """

    freqs: np.ndarray
    values: np.ndarray
    w_min: float
    w_max: float
    kind: str

    def __post_init__(self):
        freqs = np.array(self.freqs, dtype=float)
        values = np.array(self.values, dtype=complex)
        freqs.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "w_min", float(self.w_min))
        object.__setattr__(self, "w_max", float(self.w_max))

        if freqs.ndim != 1 or values.ndim != 1:
            raise ValueError("freqs and values must be one-dimensional")
        if freqs.size != values.size:
            raise ValueError(
                f"freqs and values differ in length ({freqs.size} != {values.size})"
            )
        if freqs.size < 2:
            raise ValueError("at least two samples are required")
        if not (np.all(np.isfinite(freqs)) and np.all(np.isfinite(values))):
            raise ValueError("non-finite frequency or value")
        steps = np.diff(freqs)
        if np.any(steps == 0):
            raise ValueError("duplicate frequencies")
        if np.any(steps < 0):
            raise ValueError("frequencies must be strictly increasing")
        if self.w_max <= 0:
            raise ValueError("w_max must be positive")
        if self.w_min < 0:
            raise ValueError("w_min must be non-negative")
        if freqs[0] < self.w_min or freqs[-1] > self.w_max:
            raise ValueError("samples fall outside [w_min, w_max]")
        expected = BANDPASS if self.w_min > 0 else BASEBAND
        if self.kind != expected:
            raise ValueError(
                f"kind {self.kind!r} inconsistent with w_min={self.w_min} "
                f"(expected {expected!r})"
            )

    @classmethod
    def from_arrays(cls, freqs, values, w_min=None, w_max=None) -> "SampledResponse":
        """Build a response, taking the band edges from the data by default."""
        freqs = np.asarray(freqs, dtype=float)
        if freqs.size == 0:
            raise ValueError("empty response")
        w_min = float(freqs[0]) if w_min is None else float(w_min)
        w_max = float(freqs[-1]) if w_max is None else float(w_max)
        kind = BANDPASS if w_min > 0 else BASEBAND
        return cls(freqs, values, w_min, w_max, kind)

    def __len__(self) -> int:
        return self.freqs.size


@dataclass(frozen=True, eq=False)
class RescaledResponse:
    """Response on the normalized axis ``x`` in ``[-0.5, 0.5]``.

    ``gap_halfwidth`` is ``a = 0.5 * w_min / w_max``; no sample lies in the
    open interval ``(-a, a)``.
    """

    points: np.ndarray
    values: np.ndarray
    gap_halfwidth: float = 0.0

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        values = np.array(self.values, dtype=complex)
        points.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "gap_halfwidth", float(self.gap_halfwidth))
        if points.ndim != 1 or points.shape != values.shape:
            raise ValueError("points and values must be 1-D arrays of equal length")
        if points.size == 0:
            raise ValueError("empty response")
        if np.any(np.diff(points) <= 0):
            raise ValueError("points must be strictly increasing")
        if np.any(np.abs(points) > 0.5 + 1e-15):
            raise ValueError("points must lie in [-0.5, 0.5]")
        a = self.gap_halfwidth
        if a > 0 and np.any(np.abs(points) < a * (1 - 1e-12)):
            raise ValueError("points inside the excluded gap (-a, a)")

    def __len__(self) -> int:
        return self.points.size

    @property
    def is_symmetric(self) -> bool:
        return _is_conjugate_symmetric(self.points, self.values)

    def nonnegative_half(self) -> "RescaledResponse":
        keep = self.points >= 0
        return RescaledResponse(self.points[keep], self.values[keep], self.gap_halfwidth)

    def with_values(self, values) -> "RescaledResponse":
        return RescaledResponse(self.points, values, self.gap_halfwidth)


def _is_conjugate_symmetric(points, values, tol=SYMMETRY_TOL) -> bool:
    if not np.allclose(points, -points[::-1], rtol=0, atol=1e-15):
        return False
    scale = max(float(np.max(np.abs(values))), 1.0)
    return bool(np.all(np.abs(values - np.conj(values[::-1])) <= tol * scale))


def rescale(resp: SampledResponse) -> RescaledResponse:
    """Map ``[0, w_max]`` onto ``[0, 0.5]`` (positive half only)."""
    if len(resp) == 0:
        raise ValueError("empty response")
    if resp.w_max <= 0:
        raise ValueError("w_max must be positive")
    x = 0.5 * resp.freqs / resp.w_max
    return RescaledResponse(x, resp.values, 0.5 * resp.w_min / resp.w_max)


def symmetrize(half: RescaledResponse, tol: float = SYMMETRY_TOL) -> RescaledResponse:
    """Reflect ``(x, H)`` to ``(-x, conj H)``.

    A sample at ``x = 0`` is kept once and must be real to within
    ``tol * max|H|``; a complex DC value means the impulse response is not
    real. Already symmetric input is returned unchanged.
    """
    pts, vals = half.points, half.values
    if np.any(pts < 0):
        if _is_conjugate_symmetric(pts, vals, tol):
            return half
        raise ValueError("input has negative points but is not conjugate-symmetric")

    scale = float(np.max(np.abs(vals))) or 1.0
    if pts[0] == 0.0:
        dc = vals[0]
        if abs(dc.imag) > tol * scale:
            raise ValueError(
                f"Im H(0) = {dc.imag:.3e} is not zero; impulse response is not real"
            )
        vals = vals.copy()
        vals[0] = dc.real
        neg_pts, neg_vals = -pts[:0:-1], np.conj(vals[:0:-1])
    else:
        neg_pts, neg_vals = -pts[::-1], np.conj(vals[::-1])
    return RescaledResponse(
        np.concatenate([neg_pts, pts]),
        np.concatenate([neg_vals, vals]),
        half.gap_halfwidth,
    )


def restrict_to_band(resp: SampledResponse, new_wmax: float) -> SampledResponse:
    """Drop samples above ``new_wmax`` and move the upper band edge there."""
    if not resp.w_min < new_wmax <= resp.w_max:
        raise ValueError(
            f"new_wmax={new_wmax} must satisfy w_min < new_wmax <= w_max "
            f"({resp.w_min}, {resp.w_max})"
        )
    keep = resp.freqs <= new_wmax
    if np.count_nonzero(keep) < 2:
        raise ValueError("fewer than two samples remain below new_wmax")
    return SampledResponse(
        resp.freqs[keep], resp.values[keep], resp.w_min, new_wmax, resp.kind
    )


def prepare(resp: SampledResponse) -> RescaledResponse:
    """Rescale and symmetrize in one step."""
    return symmetrize(rescale(resp))
