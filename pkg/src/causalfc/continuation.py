"""Causal Fourier continuations fitted by truncated-SVD least squares.

A causal continuation of period ``b`` is

    C(x) = sum_{k=1..M} alpha_k * exp(-2*pi*i*k*x/b)

with real ``alpha_k``. Only positive modes appear, so ``Re C`` and ``Im C``
form a periodic Hilbert pair for any choice of coefficients.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .lsq_svd import ABSOLUTE, XI_MODES, SvdFactors, solve_min_norm, svd
from .spectrum import RescaledResponse

REAL_SYSTEM = "real_system"
COMPLEX_SYSTEM = "complex_system"
FORMULATIONS = (REAL_SYSTEM, COMPLEX_SYSTEM)

DEFAULT_XI = 1e-13
DEFAULT_B = 2.0

# Phase reduction runs in extended precision where the platform has it; the
# arguments 2*pi*k*x/b reach several hundred radians for large M.
_LD = np.longdouble


@dataclass(frozen=True)
class ContinuationConfig:
    """Parameters of one fit.

    Attributes:
        M: number of causal modes; ``None`` picks ``floor(N/2)`` for ``N``
            symmetrized samples.
        b: period of the extension, ``1 < b <= 4``.
        xi: singular value cut-off.
        formulation: ``"real_system"`` or ``"complex_system"``.
        xi_mode: ``"absolute"`` (discard ``sigma_j < xi``) or ``"relative"``
            (discard ``sigma_j < xi * sigma_1``). The design matrix does not
            depend on the data, so the absolute cut-off is already invariant
            under data scaling.
    """

    M: int | None = None
    b: float = DEFAULT_B
    xi: float = DEFAULT_XI
    formulation: str = REAL_SYSTEM
    xi_mode: str = ABSOLUTE

    def __post_init__(self):
        if not 1 < self.b <= 4:
            raise ValueError(f"b={self.b} outside (1, 4]")
        if self.M is not None and self.M < 1:
            raise ValueError("M must be at least 1")
        if not 0 < self.xi < 1:
            raise ValueError("xi must lie in (0, 1)")
        if self.xi_mode not in XI_MODES:
            raise ValueError(f"unknown xi mode {self.xi_mode!r}")
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.formulation!r}")

    def modes_for(self, n_points: int) -> int:
        """Resolve ``M`` for a data set of ``n_points`` collocation points."""
        M = max(1, n_points // 2) if self.M is None else int(self.M)
        if M > n_points:
            raise ValueError(f"M={M} exceeds the number of collocation points N={n_points}")
        if 2 * M > n_points:
            warnings.warn(
                f"N={n_points} < 2M={2 * M}; overcollocation recommends N >= 2M",
                RuntimeWarning,
                stacklevel=3,
            )
        return M


@dataclass(frozen=True, eq=False)
class FitDiagnostics:
    factors: SvdFactors
    K: int
    threshold: float
    xi: float
    xi_mode: str
    formulation: str
    points: np.ndarray
    M: int
    b: float
    # complex_system only: ||Im alpha|| / ||alpha|| before the real part is kept
    imag_ratio: float = 0.0

    @property
    def singulars(self) -> np.ndarray:
        return self.factors.singulars

    @property
    def N(self) -> int:
        return self.points.size


@dataclass(frozen=True, eq=False)
class CausalContinuation:
    alphas: np.ndarray
    b: float
    diagnostics: FitDiagnostics | None = field(default=None, repr=False)

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=float)
        if alphas.ndim != 1 or alphas.size == 0:
            raise ValueError("alphas must be a non-empty 1-D real array")
        alphas.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)

    @property
    def M(self) -> int:
        return self.alphas.size

    def __call__(self, points) -> np.ndarray:
        return evaluate(self, points)


@dataclass(frozen=True, eq=False)
class ReconstructionError:
    """Pointwise ``E_R = Re H - Re C`` and ``E_I = Im H - Im C`` on the data grid."""

    points: np.ndarray
    e_real: np.ndarray
    e_imag: np.ndarray

    @property
    def max_real(self) -> float:
        return float(np.max(np.abs(self.e_real)))

    @property
    def max_imag(self) -> float:
        return float(np.max(np.abs(self.e_imag)))

    @property
    def l2_real(self) -> float:
        return float(np.linalg.norm(self.e_real))

    @property
    def l2_imag(self) -> float:
        return float(np.linalg.norm(self.e_imag))

    @property
    def max_error(self) -> float:
        return max(self.max_real, self.max_imag)

    @property
    def magnitude(self) -> np.ndarray:
        return np.hypot(self.e_real, self.e_imag)


def basis(points, M: int, b: float) -> np.ndarray:
    """Complex matrix ``phi_k(x_j) = exp(-2*pi*i*k*x_j/b)``, ``k = 1..M``."""
    x = np.asarray(points, dtype=float).astype(_LD)
    k = np.arange(1, M + 1, dtype=_LD)
    turns = np.multiply.outer(x, k) / _LD(b)
    turns -= np.rint(turns)
    theta = (2 * _LD(np.pi) * turns).astype(float)
    return np.cos(theta) - 1j * np.sin(theta)


def design_matrix(points, M: int, b: float, formulation: str = REAL_SYSTEM) -> np.ndarray:
    """Real least-squares matrix for either formulation.

    ``real_system`` stacks ``Re phi`` over ``Im phi`` (``2N x M``).
    ``complex_system`` is the ``N x M`` complex system written in real block
    form ``[[Re, -Im], [Im, Re]]`` acting on ``[Re alpha; Im alpha]``
    (``2N x 2M``).
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    points = np.asarray(points, dtype=float)
    if np.any(np.abs(points) > b / 2):
        raise ValueError("points must lie within [-b/2, b/2]")
    E = basis(points, M, b)
    if formulation == REAL_SYSTEM:
        return np.vstack([E.real, E.imag])
    if formulation == COMPLEX_SYSTEM:
        return np.block([[E.real, -E.imag], [E.imag, E.real]])
    raise ValueError(f"unknown formulation {formulation!r}")


def fit(data: RescaledResponse, cfg: ContinuationConfig, factors: SvdFactors | None = None
        ) -> CausalContinuation:
    """Least-squares causal continuation of symmetric data.

    ``factors`` may be passed to reuse the SVD of a design matrix already
    built for the same points, ``M``, ``b`` and formulation; the matrix does
    not depend on the data values.
    """
    if not data.is_symmetric:
        raise ValueError("data must be conjugate-symmetric; call symmetrize() first")
    M = cfg.modes_for(len(data))
    if factors is None:
        factors = svd(design_matrix(data.points, M, cfg.b, cfg.formulation))
    rhs = np.concatenate([data.values.real, data.values.imag])
    sol = solve_min_norm(factors, rhs, cfg.xi, cfg.xi_mode)

    imag_ratio = 0.0
    if cfg.formulation == COMPLEX_SYSTEM:
        re, im = sol.coeffs[:M], sol.coeffs[M:]
        total = np.hypot(np.linalg.norm(re), np.linalg.norm(im))
        imag_ratio = float(np.linalg.norm(im) / total) if total > 0 else 0.0
        alphas = re
    else:
        alphas = sol.coeffs

    diag = FitDiagnostics(
        factors=factors,
        K=sol.K,
        threshold=sol.threshold,
        xi=cfg.xi,
        xi_mode=cfg.xi_mode,
        formulation=cfg.formulation,
        points=data.points,
        M=M,
        b=cfg.b,
        imag_ratio=imag_ratio,
    )
    return CausalContinuation(alphas, cfg.b, diag)


def evaluate(c: CausalContinuation, points, chunk: int = 4096) -> np.ndarray:
    """Direct summation of the continuation at arbitrary real ``points``."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    out = np.empty(points.shape, dtype=complex)
    flat = points.ravel()
    res = out.reshape(-1)
    for start in range(0, flat.size, chunk):
        sl = slice(start, start + chunk)
        res[sl] = basis(flat[sl], c.M, c.b) @ c.alphas
    return out


def reconstruction_error(data: RescaledResponse, c: CausalContinuation) -> ReconstructionError:
    """Errors on the data points only; the extension zone is never sampled."""
    if np.any(np.abs(data.points) > 0.5 + 1e-15):
        raise ValueError("data points must lie in [-0.5, 0.5]")
    diff = data.values - evaluate(c, data.points)
    return ReconstructionError(data.points, diff.real, diff.imag)


def extension_sup(c: CausalContinuation, samples_per_mode: int = 10) -> float:
    """Sampled ``max |C(x)|`` over a full period ``[-b/2, b/2]``."""
    n = max(2 * samples_per_mode * c.M + 1, 201)
    x = np.linspace(-c.b / 2, c.b / 2, n)
    return float(np.max(np.abs(evaluate(c, x))))
