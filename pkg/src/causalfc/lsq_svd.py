"""Minimum-norm least squares by truncated singular value decomposition."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RELATIVE = "relative"
ABSOLUTE = "absolute"
XI_MODES = (RELATIVE, ABSOLUTE)


class RankZeroError(ValueError):
    """Every singular value fell below the truncation threshold."""


class SvdConvergenceError(RuntimeError):
    """The LAPACK singular value iteration did not converge."""


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """``A = U @ diag(singulars) @ V.T`` with thin ``U``.

    ``U`` is ``rows x p`` and ``V`` is ``cols x p`` where ``p = min(rows, cols)``;
    column ``j`` of ``V`` is the right singular vector ``v_j``.
    """

    U: np.ndarray
    singulars: np.ndarray
    V: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.U.shape[0], self.V.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singulars) @ self.V.T

    def threshold(self, xi: float, mode: str = RELATIVE) -> float:
        """Cut-off below which singular values are discarded."""
        if mode == RELATIVE:
            return xi * float(self.singulars[0]) if self.singulars.size else 0.0
        if mode == ABSOLUTE:
            return float(xi)
        raise ValueError(f"unknown xi mode {mode!r}; expected one of {XI_MODES}")

    def discarded(self, xi: float, mode: str = RELATIVE) -> np.ndarray:
        """Boolean mask of singular values strictly below the cut-off.

        Exact zeros are always discarded, so a zero matrix has rank zero
        under the relative rule too.
        """
        s = self.singulars
        return (s < self.threshold(xi, mode)) | (s <= 0)


@dataclass(frozen=True, eq=False)
class TruncatedSolution:
    coeffs: np.ndarray
    K: int
    kept_count: int
    threshold: float


def svd(A) -> SvdFactors:
    """Thin SVD of a real matrix.

    Raises:
        ValueError: for empty, non-2-D, complex or non-finite input.
        SvdConvergenceError: if LAPACK fails to converge.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.size == 0:
        raise ValueError("expected a non-empty 2-D matrix")
    if np.iscomplexobj(A):
        raise ValueError("expected a real matrix; use the real block form for complex systems")
    A = A.astype(float, copy=False)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(str(exc)) from exc
    return SvdFactors(U, s, Vt.T)


def solve_min_norm(
    fac: SvdFactors, rhs, xi: float = 1e-13, mode: str = RELATIVE
) -> TruncatedSolution:
    """Minimum-norm solution keeping singular values ``>= threshold``.

    With the default relative mode the threshold is ``xi * sigma_1``; a
    singular value exactly on the threshold is kept.
    """
    rhs = np.asarray(rhs, dtype=float)
    rows = fac.U.shape[0]
    if rhs.shape != (rows,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({rows},)")
    if not 0 < xi < 1:
        raise ValueError("xi must lie in (0, 1)")
    drop = fac.discarded(xi, mode)
    keep = ~drop
    if not keep.any():
        raise RankZeroError("rank zero under tolerance")
    proj = fac.U[:, keep].T @ rhs
    coeffs = fac.V[:, keep] @ (proj / fac.singulars[keep])
    return TruncatedSolution(
        coeffs, int(drop.sum()), int(keep.sum()), fac.threshold(xi, mode)
    )
