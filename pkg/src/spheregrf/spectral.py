"""Square roots of stacks of symmetric PSD blocks, with reported clipping."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IndefiniteBlocks, NotPositiveDefinite

DEFAULT_CLIP_TOL = 1e-12
INDEFINITE_TOL = 1e-6


@dataclass(frozen=True)
class ClipReport:
    count: int
    most_negative: float   # smallest pre-clip eigenvalue (0.0 when none is negative)
    clipped_mass: float    # sum of |eigenvalues| set to zero
    trace: float           # sum of pre-clip eigenvalues over all blocks
    max_eigenvalue: float

    def summary(self) -> str:
        return (f"clipped {self.count} eigenvalue(s); most negative {self.most_negative:.3e}; "
                f"clipped mass {self.clipped_mass:.3e} of trace {self.trace:.6g}")


def symmetrize(blocks: np.ndarray) -> np.ndarray:
    return 0.5 * (blocks + np.swapaxes(blocks, -1, -2))


def eig_sqrt(blocks: np.ndarray, clip_tol: float = DEFAULT_CLIP_TOL,
             strict: bool = True) -> tuple[np.ndarray, np.ndarray, ClipReport]:
    """Symmetric square roots ``V diag(sqrt(lam)) V^T`` of a stack of blocks.

    Eigenvalues below ``clip_tol * max_eigenvalue`` are set to zero. With
    ``strict``, an eigenvalue below ``-INDEFINITE_TOL * max_eigenvalue`` raises
    IndefiniteBlocks instead.

    Returns (square roots, pre-clip eigenvalues, report).
    """
    lam, vec = np.linalg.eigh(symmetrize(blocks))
    top = float(lam.max()) if lam.size else 0.0
    scale = max(top, 0.0)
    if strict and lam.size and lam.min() < -INDEFINITE_TOL * scale:
        raise IndefiniteBlocks(
            f"eigenvalue {lam.min():.3e} is below -{INDEFINITE_TOL:g} x largest ({top:.3e}); "
            "the covariance model is not valid on this grid")
    clip = lam < clip_tol * scale
    kept = np.where(clip, 0.0, lam)
    roots = (vec * np.sqrt(kept)[..., None, :]) @ np.swapaxes(vec, -1, -2)
    report = ClipReport(
        count=int(clip.sum()),
        most_negative=float(min(lam.min(), 0.0)) if lam.size else 0.0,
        clipped_mass=float(np.abs(lam[clip]).sum()),
        trace=float(lam.sum()),
        max_eigenvalue=top,
    )
    return roots, lam, report


def cholesky_sqrt(blocks: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Lower triangular factors; fails on semidefinite or indefinite blocks."""
    try:
        low = np.linalg.cholesky(symmetrize(blocks))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.diagonal(low, axis1=-2, axis2=-1) ** 2
    if pivots.size and pivots.min() <= rtol * pivots.max():
        raise NotPositiveDefinite(
            f"numerically singular: smallest pivot {pivots.min():.3e} "
            f"vs largest {pivots.max():.3e}")
    return low


def warn_if_heavy_clipping(report: ClipReport, fraction: float = 0.01):
    if report.trace > 0 and report.clipped_mass > fraction * report.trace:
        warnings.warn(
            f"clipped eigenvalue mass {report.clipped_mass:.3e} exceeds {fraction:.0%} of the "
            f"trace {report.trace:.3e}; the embedding is far from positive definite, "
            "increase kappa", RuntimeWarning, stacklevel=3)
