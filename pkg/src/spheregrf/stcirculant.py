"""Sphere x time sampling via a torus-wrapped time axis and a two-axis DFT.

The time axis of length ``T`` is embedded in a circle of ``Q = 2 kappa T``
time blocks whose lags follow the tent map ``g``. The embedded covariance is
then block circulant in both time and longitude, so a 2-D DFT over
(time block, ring) block-diagonalizes it into ``Q * N`` blocks of size
``M x M``. The embedding need not be positive definite; negative
eigenvalues are clipped and reported, and larger ``kappa`` is the remedy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .circulant import FieldRealization, _blockwise, _dft_blocks, _pairs
from .covmodels import SpaceTimeModel
from .errors import ValidationError
from .grid import SphereGrid, TimeGrid
from .spectral import DEFAULT_CLIP_TOL, ClipReport, eig_sqrt, warn_if_heavy_clipping


@dataclass(frozen=True)
class EmbeddingConfig:
    kappa: int
    T: int

    def __post_init__(self):
        if int(self.kappa) != self.kappa or self.kappa < 1:
            raise ValidationError(f"kappa must be an integer >= 1, got {self.kappa!r}")
        if int(self.T) != self.T or self.T < 1:
            raise ValidationError(f"T must be an integer >= 1, got {self.T!r}")

    @property
    def Q(self) -> int:
        """Number of time blocks on the embedding circle."""
        return 2 * self.kappa * self.T


def reflect_time(tau: int, T: int, H: float, kappa: int) -> float:
    """Tent-map time lag of embedded time block ``tau``.

    ``tau * H / T`` up to ``kappa * T``, then ``(2 kappa T - tau) * H / T``.
    """
    Q = 2 * kappa * T
    if int(tau) != tau or not 0 <= tau <= Q - 1:
        raise ValidationError(f"tau must be an integer in [0, {Q - 1}], got {tau!r}")
    if tau <= kappa * T:
        return tau * H / T
    return (Q - tau) * H / T


def embedded_lags(tgrid: TimeGrid, cfg: EmbeddingConfig) -> np.ndarray:
    tau = np.arange(cfg.Q)
    return np.minimum(tau, cfg.Q - tau) * tgrid.H / tgrid.T


@dataclass(frozen=True)
class SpaceTimeBlockRow:
    """``blocks[tau, k]`` = cov(ring 1 at time 0, ring 1 + k at embedded lag g(tau)).

    Shape (Q, N, M, M).
    """

    blocks: np.ndarray

    @property
    def Q(self) -> int:
        return self.blocks.shape[0]

    @property
    def N(self) -> int:
        return self.blocks.shape[1]

    @property
    def M(self) -> int:
        return self.blocks.shape[2]


@dataclass(frozen=True)
class SpaceTimeSpectralBlocks:
    blocks: np.ndarray                     # (Q, N, M, M)
    imag_residue: float
    sqrt_blocks: np.ndarray | None = None
    eigenvalues: np.ndarray | None = None  # pre-clip, (Q, N, M)
    clip_report: ClipReport | None = None

    @property
    def Q(self) -> int:
        return self.blocks.shape[0]

    @property
    def N(self) -> int:
        return self.blocks.shape[1]

    @property
    def M(self) -> int:
        return self.blocks.shape[2]


def _check_cfg(tgrid: TimeGrid, cfg: EmbeddingConfig):
    if cfg.T != tgrid.T:
        raise ValidationError(f"embedding built for T={cfg.T} but time grid has T={tgrid.T}")


def assemble_st_block_row(grid: SphereGrid, tgrid: TimeGrid, cfg: EmbeddingConfig,
                          model: SpaceTimeModel) -> SpaceTimeBlockRow:
    _check_cfg(tgrid, cfg)
    dist = grid.ring_distances()
    lags = embedded_lags(tgrid, cfg)
    blocks = np.empty((cfg.Q, grid.N, grid.M, grid.M))
    for tau, lag in enumerate(lags):
        blocks[tau] = model.covariance(dist, lag)
    return SpaceTimeBlockRow(blocks)


def st_block_diagonalize(row: SpaceTimeBlockRow) -> SpaceTimeSpectralBlocks:
    """Unnormalised 2-D DFT over the (time block, ring) axes."""
    blocks, residue = _dft_blocks(row.blocks, axes=(0, 1))
    return SpaceTimeSpectralBlocks(blocks=blocks, imag_residue=residue)


def st_sqrt_blocks(spectral: SpaceTimeSpectralBlocks,
                   clip_tol: float = DEFAULT_CLIP_TOL) -> SpaceTimeSpectralBlocks:
    Q, N, M = spectral.Q, spectral.N, spectral.M
    roots, lam, report = eig_sqrt(spectral.blocks.reshape(Q * N, M, M), clip_tol, strict=False)
    warn_if_heavy_clipping(report)
    return SpaceTimeSpectralBlocks(spectral.blocks, spectral.imag_residue,
                                   roots.reshape(Q, N, M, M), lam.reshape(Q, N, M), report)


def factorize_st(grid: SphereGrid, tgrid: TimeGrid, cfg: EmbeddingConfig,
                 model: SpaceTimeModel, clip_tol: float = DEFAULT_CLIP_TOL):
    row = assemble_st_block_row(grid, tgrid, cfg, model)
    return st_sqrt_blocks(st_block_diagonalize(row), clip_tol)


def apply_st_factor(roots: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Apply ``S = (NQ)**-0.5 (F_Q kron F_N kron I_M) diag(roots)`` to z of shape (..., Q, N, M)."""
    Q, N = roots.shape[:2]
    w = _blockwise(roots, z)
    return np.fft.fft2(w, axes=(-3, -2)) / np.sqrt(N * Q)


def materialize_st_factor(spectral: SpaceTimeSpectralBlocks) -> np.ndarray:
    Q, N, M = spectral.Q, spectral.N, spectral.M
    n = Q * N * M
    cols = apply_st_factor(spectral.sqrt_blocks, np.eye(n).reshape(n, Q, N, M))
    return cols.reshape(n, n).T


def sample_spheretime(spectral: SpaceTimeSpectralBlocks, grid: SphereGrid, tgrid: TimeGrid,
                      cfg: EmbeddingConfig, seed: int, count: int = 2,
                      start: int = 0) -> list[FieldRealization]:
    """Fields of shape (T, N, M); same replicate/stream layout as ``sample_sphere``."""
    _check_cfg(tgrid, cfg)
    if spectral.sqrt_blocks is None:
        raise ValidationError("square roots not computed; call st_sqrt_blocks first")
    if (spectral.Q, spectral.N, spectral.M) != (cfg.Q, grid.N, grid.M):
        raise ValidationError("spectral blocks do not match the grid/embedding")
    out = []
    stop = start + int(count)
    for p in range(start // 2, _pairs(stop)):
        z = rng.complex_normals(seed, p, (cfg.Q, grid.N, grid.M))
        y = apply_st_factor(spectral.sqrt_blocks, z)[: tgrid.T]
        for k, part, pid in ((2 * p, y.real, "A"), (2 * p + 1, y.imag, "B")):
            if start <= k < stop:
                out.append(FieldRealization(np.ascontiguousarray(part), seed, pid, k))
    return out


def simulate_spheretime(grid: SphereGrid, tgrid: TimeGrid, model: SpaceTimeModel, seed: int,
                        count: int = 1, kappa: int = 1, clip_tol: float = DEFAULT_CLIP_TOL):
    cfg = EmbeddingConfig(kappa, tgrid.T)
    spectral = factorize_st(grid, tgrid, cfg, model, clip_tol)
    return sample_spheretime(spectral, grid, tgrid, cfg, seed, count)
