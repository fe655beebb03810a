"""Error-bound coefficients, decay fits, resolution sweeps and the causality verdict."""
from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .continuation import (
    COMPLEX_SYSTEM,
    CausalContinuation,
    ContinuationConfig,
    ReconstructionError,
    basis,
    fit,
    reconstruction_error,
)
from .lsq_svd import ABSOLUTE, SvdFactors
from .spectrum import RescaledResponse, symmetrize

CAUSAL = "causal_within_tolerance"
VIOLATIONS = "violations_detected"
INCONCLUSIVE = "inconclusive"

LOCALITY_FACTOR = 5.0
LEVEL_OFF_RATIO = 2.0
MIN_LEVEL_POINTS = 8
QUAD_POINTS_PER_WAVELENGTH = 10


@dataclass(frozen=True)
class BoundCoefficients:
    """Data-independent factors of the reconstruction error bound.

    ``coef_truncation`` multiplies the sup of the comparison series over
    the extension zone; ``coef_amplification`` multiplies the Fourier and
    noise errors.
    """

    lambda1: float
    lambda2: float
    K: int
    b: float
    N: int
    M: int

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be non-negative")
        if not 0 <= self.K <= self.M:
            raise ValueError(f"K={self.K} outside [0, M={self.M}]")

    @property
    def coef_truncation(self) -> float:
        return self.lambda1 * math.sqrt(self.K / self.b)

    @property
    def coef_amplification(self) -> float:
        return self.lambda2 * math.sqrt(self.N * (self.M - self.K))


def data_intervals(gap_halfwidth: float = 0.0) -> list[tuple[float, float]]:
    """The sampled set on the normalized axis: ``[-0.5, -a] U [a, 0.5]``."""
    a = float(gap_halfwidth)
    if a <= 0:
        return [(-0.5, 0.5)]
    return [(-0.5, -a), (a, 0.5)]


def _trapezoid_nodes(intervals, M: int, b: float):
    nodes, weights = [], []
    for lo, hi in intervals:
        if hi <= lo:
            raise ValueError(f"empty interval ({lo}, {hi})")
        n = int(math.ceil(QUAD_POINTS_PER_WAVELENGTH * (hi - lo) * M / b)) + 1
        n = max(n, 2)
        x = np.linspace(lo, hi, n)
        w = np.full(n, (hi - lo) / (n - 1))
        w[[0, -1]] *= 0.5
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def singular_function_norms(
    fac: SvdFactors, intervals, M: int, b: float, formulation: str = "real_system",
    chunk: int = 2048,
) -> np.ndarray:
    """``||v_j||_{L2}`` over the union of ``intervals`` for every column of ``V``.

    ``v_j(x) = sum_k V_kj phi_k(x)``. For the complex formulation the rows of
    ``V`` hold real parts then imaginary parts of the coefficients.
    """
    V = fac.V
    if formulation == COMPLEX_SYSTEM:
        if V.shape[0] != 2 * M:
            raise ValueError("complex formulation expects 2M rows in V")
        coef = V[:M] + 1j * V[M:]
    else:
        if V.shape[0] != M:
            raise ValueError("real formulation expects M rows in V")
        coef = V.astype(complex)
    x, w = _trapezoid_nodes(intervals, M, b)
    sq = np.zeros(V.shape[1])
    for start in range(0, x.size, chunk):
        sl = slice(start, start + chunk)
        vals = basis(x[sl], M, b) @ coef
        sq += w[sl] @ (vals.real**2 + vals.imag**2)
    return np.sqrt(sq)


def bound_coefficients(
    fac: SvdFactors,
    intervals,
    M: int,
    N: int,
    b: float,
    xi: float,
    xi_mode: str = ABSOLUTE,
    formulation: str = "real_system",
) -> BoundCoefficients:
    """Lambda_1, Lambda_2 and K for a factored design matrix.

    Args:
        fac: SVD of the design matrix.
        intervals: ``(lo, hi)`` pairs whose union is the set the norms are
            taken over, usually :func:`data_intervals`.
        M, N, b: modes, collocation points and period.
        xi, xi_mode: the truncation rule used by the solver.
        formulation: layout of ``V``.
    """
    intervals = list(intervals)
    if not intervals:
        raise ValueError("the norm domain must be non-empty")
    norms = singular_function_norms(fac, intervals, M, b, formulation)
    drop = fac.discarded(xi, xi_mode)
    keep = ~drop
    lambda1 = float(norms[drop].max()) if drop.any() else 0.0
    lambda2 = float((norms[keep] / fac.singulars[keep]).max()) if keep.any() else 0.0
    return BoundCoefficients(lambda1, lambda2, int(drop.sum()), b, N, M)


def fit_bound_coefficients(c: CausalContinuation, gap_halfwidth: float = 0.0) -> BoundCoefficients:
    """Bound coefficients for the design matrix behind a fitted continuation."""
    d = c.diagnostics
    if d is None:
        raise ValueError("continuation carries no fit diagnostics")
    return bound_coefficients(
        d.factors, data_intervals(gap_halfwidth), d.M, d.N, d.b, d.xi, d.xi_mode, d.formulation
    )


def error_bound(
    bc: BoundCoefficients, fourier_error_sup: float, noise_sup: float, hhat_sup_ext: float
) -> float:
    """Upper bound on the max reconstruction error."""
    if min(fourier_error_sup, noise_sup, hhat_sup_ext) < 0:
        raise ValueError("inputs must be non-negative")
    trunc = bc.coef_truncation * hhat_sup_ext if bc.K else 0.0
    return (1 + bc.coef_amplification) * (fourier_error_sup + noise_sup) + trunc


def jackson_bound(M: int, b: float, k_order: float, deriv_sup: float) -> float:
    """Best-approximation estimate for a ``k``-times differentiable periodic function."""
    if M < 1:
        raise ValueError("M must be at least 1")
    if k_order < 0:
        raise ValueError("k_order must be non-negative")
    return (math.pi / 2) * (b / math.pi) ** k_order * (1 / (2 * M)) ** k_order * deriv_sup


@dataclass(frozen=True)
class SmoothnessFit:
    """Least-squares fit of ``ln err = ln c_tilde + (1 - k) ln M``."""

    c_tilde: float
    k_order: float
    residual: float
    samples: tuple[tuple[int, float], ...]

    @property
    def slope(self) -> float:
        return 1.0 - self.k_order

    def predict(self, M) -> np.ndarray | float:
        """Extrapolated error norm at ``M`` modes."""
        return self.c_tilde * np.asarray(M, dtype=float) ** self.slope


def smoothness_fit(samples) -> SmoothnessFit:
    samples = tuple((int(m), float(e)) for m, e in samples)
    if len(samples) < 3:
        raise ValueError("need at least three (M, error) samples")
    Ms = np.array([m for m, _ in samples], dtype=float)
    errs = np.array([e for _, e in samples])
    if np.any(Ms <= 0):
        raise ValueError("M values must be positive")
    if np.any(~(errs > 0)):
        raise ValueError("error norms must be positive")
    lx, ly = np.log(Ms), np.log(errs)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.linalg.norm(ly - (intercept + slope * lx)))
    return SmoothnessFit(float(np.exp(intercept)), float(1 - slope), resid, samples)


@dataclass(frozen=True, eq=False)
class SweepLevel:
    M: int
    N: int
    errors: ReconstructionError

    @property
    def max_error(self) -> float:
        return self.errors.max_error


def _decimate(data: RescaledResponse) -> RescaledResponse:
    half = data.nonnegative_half()
    return symmetrize(RescaledResponse(half.points[::2], half.values[::2], data.gap_halfwidth))


def _thread_cap() -> int:
    raw = os.environ.get("CAUSALFC_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def resolution_sweep(
    data: RescaledResponse, cfg: ContinuationConfig, levels: int = 4, max_workers: int | None = None
) -> list[SweepLevel]:
    """Refit on every-other-point decimations with ``M`` halved each time.

    The first level is the data as given. Decimation works on the
    non-negative half and keeps both endpoints when its length is odd. The
    sweep stops early when a level would have fewer than 8 points. Levels
    are returned finest first.
    """
    if levels < 2:
        raise ValueError("levels must be at least 2")
    M0 = cfg.modes_for(len(data))
    plan = []
    current, M = data, M0
    for _ in range(levels):
        if len(current) < MIN_LEVEL_POINTS or M < 1:
            break
        plan.append((current, M))
        current, M = _decimate(current), M // 2

    def run(item):
        d, m = item
        c = fit(d, dataclasses.replace(cfg, M=m))
        return SweepLevel(m, len(d), reconstruction_error(d, c))

    workers = min(len(plan), max_workers or _thread_cap())
    if workers <= 1:
        return [run(p) for p in plan]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, plan))


B_CANDIDATES = (1.1, 1.5, 2.0, 3.0, 4.0)


def select_extension(
    data: RescaledResponse, cfg: ContinuationConfig, candidates=B_CANDIDATES,
    max_workers: int | None = None,
) -> tuple[float, dict[float, float]]:
    """Pick the period ``b`` with the smallest max reconstruction error.

    Returns the chosen ``b`` and the error for every candidate. Ties go to
    the earlier candidate.
    """
    candidates = tuple(float(b) for b in candidates)
    if not candidates:
        raise ValueError("no candidate periods")

    def run(b):
        c = fit(data, dataclasses.replace(cfg, b=b))
        return reconstruction_error(data, c).max_error

    workers = min(len(candidates), max_workers or _thread_cap())
    if workers <= 1:
        errs = [run(b) for b in candidates]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errs = list(pool.map(run, candidates))
    table = dict(zip(candidates, errs))
    best = min(candidates, key=lambda b: (table[b], candidates.index(b)))
    return best, table


@dataclass(frozen=True, eq=False)
class CausalityReport:
    verdict: str
    violation_bound: float
    violation_locations: tuple[float, ...]
    noise_estimate: float | None
    smoothness: SmoothnessFit | None
    errors: ReconstructionError
    floor: float = 0.0
    sweep: tuple[tuple[int, float], ...] = ()
    notes: tuple[str, ...] = field(default=())


def find_spikes(
    errors: ReconstructionError,
    floor: float = 0.0,
    locality_factor: float = LOCALITY_FACTOR,
    min_separation: int = 2,
    width: float = 0.0,
) -> np.ndarray:
    """Locations of localized peaks of ``|E|`` standing out of the background.

    A point is a candidate when ``|E| >= locality_factor * median|E|`` and
    ``|E| > floor``. Candidates closer than ``min_separation`` grid steps
    merge into one group, reported at its largest value. Groups within
    ``width`` (in ``x``) of a data segment end are boundary effects of the
    fit and are dropped; a group within ``width`` of a larger one is taken
    as its ringing and dropped as well. Locations come back sorted by
    decreasing ``|E|``.
    """
    mag = errors.magnitude
    x = errors.points
    if mag.size < 3:
        return np.empty(0)
    thresh = locality_factor * float(np.median(mag))
    hot = np.flatnonzero((mag >= thresh) & (mag > floor))
    if hot.size == 0:
        return np.empty(0)

    steps = np.diff(x)
    gap = np.flatnonzero(steps > 1.5 * np.median(steps))
    edges = [x[0], x[-1]] + [x[g] for g in gap] + [x[g + 1] for g in gap]
    margin = max(width, min_separation * float(np.median(steps)))

    groups, cur = [], [hot[0]]
    for i in hot[1:]:
        if i - cur[-1] <= min_separation:
            cur.append(i)
        else:
            groups.append(cur)
            cur = [i]
    groups.append(cur)

    peaks = []
    for g in groups:
        lo, hi = x[g[0]], x[g[-1]]
        if any(lo - margin <= e <= hi + margin for e in edges):
            continue
        peaks.append(g[int(np.argmax(mag[g]))])
    peaks.sort(key=lambda i: -mag[i])

    kept: list[int] = []
    for i in peaks:
        if all(abs(x[i] - x[j]) > margin for j in kept):
            kept.append(i)
    return x[kept].astype(float)


def verdict(
    sweep: list[SweepLevel],
    errors_full: ReconstructionError,
    known_noise: float | None = None,
    *,
    scale: float = 1.0,
    xi: float = 1e-13,
    b: float | None = None,
    locality_factor: float = LOCALITY_FACTOR,
) -> CausalityReport:
    """Classify a resolution sweep.

    Rules, first match wins:

    1. localized spikes above the floor: ``violations_detected``;
    2. finest error within a factor 2 of ``max(known_noise, floor)``:
       ``causal_within_tolerance``;
    3. errors change by under 2x over the last two halvings while above
       the floor: ``violations_detected``, noise estimate is the plateau;
    4. errors still halve at the finest level: ``causal_within_tolerance``
       with the finest error as the bound;
    5. otherwise ``inconclusive``.

    Args:
        sweep: levels from :func:`resolution_sweep`, any order.
        errors_full: errors of the finest fit, used for the spike search.
        known_noise: noise level of the data if known.
        scale: ``max |H|``; the truncation floor is ``10 * xi * scale``.
        xi: truncation tolerance of the fits.
        b: period of the fits; sets the boundary and ringing width of the
            spike search to four shortest basis wavelengths.
        locality_factor: spike threshold relative to the median ``|E|``.
    """
    if not sweep:
        raise ValueError("empty sweep")
    levels = sorted(sweep, key=lambda s: s.M)
    Ms = [s.M for s in levels]
    errs = [s.max_error for s in levels]
    finest = errs[-1]
    floor = 10 * xi * scale
    tol = LEVEL_OFF_RATIO * max(known_noise or 0.0, floor)
    notes = []

    smooth = None
    positive = [(m, e) for m, e in zip(Ms, errs) if e > 0]
    if len(positive) >= 3:
        smooth = smoothness_fit(positive)

    def ratio(i):
        return errs[i - 1] / errs[i] if errs[i] > 0 else math.inf

    last = len(errs) - 1
    decaying = last >= 1 and ratio(last) >= LEVEL_OFF_RATIO
    levelled = last >= 2 and max(ratio(last), ratio(last - 1)) < LEVEL_OFF_RATIO
    width = 4 * b / Ms[-1] if b else 0.0
    spikes = find_spikes(errors_full, floor=tol, locality_factor=locality_factor, width=width)
    sweep_pairs = tuple(zip(Ms, errs))

    def report(v, bound, noise=None):
        return CausalityReport(
            v, bound, tuple(spikes.tolist()), noise, smooth, errors_full, floor,
            sweep_pairs, tuple(notes),
        )

    if spikes.size:
        notes.append(f"{spikes.size} localized spike(s) above {locality_factor:g}x median error")
        return report(VIOLATIONS, float(errors_full.magnitude.max()),
                      float(np.median(errors_full.magnitude)))
    if finest <= tol:
        notes.append("finest error within 2x of the truncation/noise floor")
        return report(CAUSAL, finest)
    if levelled:
        notes.append("errors level off under resolution refinement")
        return report(VIOLATIONS, finest, float(np.mean(errs[-2:])))
    if decaying:
        notes.append("errors still decay at the finest level; bound is the finest error")
        return report(CAUSAL, finest)
    notes.append("no decay, no levelling and no spikes")
    return report(INCONCLUSIVE, finest)


@dataclass(frozen=True, eq=False)
class Assessment:
    """Everything produced by one :func:`assess` run."""

    continuation: CausalContinuation
    errors: ReconstructionError
    sweep: list[SweepLevel]
    report: CausalityReport
    bounds: BoundCoefficients | None = None
    extension_sup: float | None = None


def assess(
    data: RescaledResponse,
    cfg: ContinuationConfig = ContinuationConfig(),
    levels: int = 4,
    known_noise: float | None = None,
    with_bounds: bool = False,
) -> Assessment:
    """Fit, measure, sweep and classify symmetric rescaled data."""
    from .continuation import extension_sup

    c = fit(data, cfg)
    errors = reconstruction_error(data, c)
    sweep = resolution_sweep(data, cfg, levels)
    scale = float(np.max(np.abs(data.values))) or 1.0
    rep = verdict(sweep, errors, known_noise, scale=scale, xi=cfg.xi, b=cfg.b)
    bounds = ext = None
    if with_bounds:
        bounds = fit_bound_coefficients(c, data.gap_halfwidth)
        ext = extension_sup(c)
    return Assessment(c, errors, sweep, rep, bounds, ext)
