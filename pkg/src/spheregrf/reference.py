"""Dense covariance oracle and direct-factorization samplers (tests and benchmarks only)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .circulant import FieldRealization
from .errors import CapExceeded, NotPositiveDefinite, ValidationError
from .grid import SphereGrid, TimeGrid
from .spectral import DEFAULT_CLIP_TOL

DEFAULT_CAP = 4096


@dataclass(frozen=True)
class DenseCovariance:
    entries: np.ndarray
    origin: str  # "spatial", "spacetime" or "embedded"

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def dense_bytes(n: int) -> int:
    return 8 * n * n


def check_cap(n: int, cap: int | None = DEFAULT_CAP, max_bytes: int | None = None):
    if cap is not None and n > cap:
        raise CapExceeded(f"dense dimension {n} exceeds the cap of {cap}")
    if max_bytes is not None and dense_bytes(n) > max_bytes:
        raise CapExceeded(
            f"dense {n}x{n} matrix needs {dense_bytes(n) / 2**30:.2f} GiB, "
            f"over the cap of {max_bytes / 2**30:.2f} GiB")


def assemble_dense(grid: SphereGrid, model, tgrid: TimeGrid | None = None, cfg=None,
                   cap: int | None = DEFAULT_CAP, max_bytes: int | None = None) -> DenseCovariance:
    """Full covariance in storage order (colatitude fastest, then ring, then time).

    Spatial model only: ``Sigma``. With a time grid: ``Psi`` over the T time
    points. With an embedding config as well: the embedded ``Psi~`` over the
    ``Q`` wrapped time blocks, whose time lags follow the tent map.
    """
    nsp = grid.size
    if tgrid is None:
        check_cap(nsp, cap, max_bytes)
        return DenseCovariance(model.covariance(grid.pairwise_distances()), "spatial")

    if cfg is None:
        ntime = tgrid.T
        steps = np.arange(ntime)
        lag = np.abs(steps[:, None] - steps[None, :]) * tgrid.step
        origin = "spacetime"
    else:
        ntime = cfg.Q
        steps = np.arange(ntime)
        d = (steps[None, :] - steps[:, None]) % ntime
        lag = np.minimum(d, ntime - d) * tgrid.step
        origin = "embedded"
    check_cap(ntime * nsp, cap, max_bytes)
    dist = grid.pairwise_distances()
    out = np.empty((ntime, nsp, ntime, nsp))
    for a in range(ntime):
        for b in range(ntime):
            out[a, :, b, :] = model.covariance(dist, lag[a, b])
    return DenseCovariance(out.reshape(ntime * nsp, ntime * nsp), origin)


def dense_factor(cov: DenseCovariance, method: str = "eigen", clip_tol: float = DEFAULT_CLIP_TOL,
                 jitter: float = 0.0) -> np.ndarray:
    """Real ``S`` with ``S S^T = cov`` (plus ``jitter * I`` if given).

    ``triangular`` is the Cholesky factor and refuses singular input such as
    any pole-including grid; ``eigen`` is the symmetric square root, clipping
    tiny eigenvalues like the fast path.
    """
    a = cov.entries
    if jitter:
        a = a + jitter * np.eye(cov.n)
    if method == "triangular":
        try:
            low = np.linalg.cholesky(a)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(f"Cholesky failed: {exc}") from None
        pivots = np.diag(low) ** 2
        if pivots.min() <= 1e-10 * pivots.max():
            raise NotPositiveDefinite(
                f"matrix is numerically singular (smallest pivot {pivots.min():.3e})")
        return low
    if method == "eigen":
        lam, vec = np.linalg.eigh(a)
        lam = np.where(lam < clip_tol * max(lam.max(), 0.0), 0.0, lam)
        return (vec * np.sqrt(lam)) @ vec.T
    raise ValidationError(f"unknown factor method {method!r}")


def dense_sample(factor: np.ndarray, seed: int, count: int = 1,
                 shape: tuple | None = None) -> list[FieldRealization]:
    """``Y = S Z`` with real standard normal ``Z`` from stream ``k`` for replicate ``k``."""
    n = factor.shape[1]
    out = []
    for k in range(int(count)):
        y = factor @ rng.normals(seed, k, n)
        if shape is not None:
            y = y.reshape(shape)
        out.append(FieldRealization(y, seed, "A", k))
    return out

