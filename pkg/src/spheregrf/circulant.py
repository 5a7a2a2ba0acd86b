"""Block circulant factorization of the covariance on a sphere grid and field sampling.

Longitudinal shift invariance of the geodesic distance makes the covariance
of the ring-ordered grid values block circulant, with ``N`` blocks of size
``M x M``. A length-``N`` DFT along the block axis of the first block row
block-diagonalizes it, so sampling costs ``N`` small eigendecompositions
plus FFTs and the ``NM x NM`` matrix never exists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .covmodels import SpatialModel
from .errors import RealnessViolation, ValidationError
from .grid import SphereGrid
from .spectral import DEFAULT_CLIP_TOL, ClipReport, cholesky_sqrt, eig_sqrt

REALNESS_TOL = 1e-8


@dataclass(frozen=True)
class BlockRow:
    """``blocks[k]`` is cov(ring 1, ring 1 + k), shape (N, M, M)."""

    blocks: np.ndarray

    @property
    def N(self) -> int:
        return self.blocks.shape[0]

    @property
    def M(self) -> int:
        return self.blocks.shape[1]


@dataclass(frozen=True)
class SpectralBlocks:
    blocks: np.ndarray                    # (N, M, M) real symmetric
    imag_residue: float                   # max |Im| of the DFT relative to max |block row|
    sqrt_blocks: np.ndarray | None = None
    eigenvalues: np.ndarray | None = None  # pre-clip, (N, M)
    clip_report: ClipReport | None = None
    method: str = "eigen"

    @property
    def N(self) -> int:
        return self.blocks.shape[0]

    @property
    def M(self) -> int:
        return self.blocks.shape[1]


@dataclass(frozen=True)
class FieldRealization:
    """One sampled field.

    ``values`` has shape (N, M) on the sphere or (T, N, M) on sphere x time.
    ``index`` is the replicate number; replicates ``2p`` and ``2p + 1`` are the
    real (pair "A") and imaginary (pair "B") parts of complex draw ``p``.
    """

    values: np.ndarray
    seed: int
    pair_id: str
    index: int = 0

    @property
    def is_spacetime(self) -> bool:
        return self.values.ndim == 3


def assemble_block_row(grid: SphereGrid, model: SpatialModel) -> BlockRow:
    return BlockRow(model.covariance(grid.ring_distances()))


def _dft_blocks(row: np.ndarray, axes) -> tuple[np.ndarray, float]:
    spec = np.fft.fft(row, axis=axes[0]) if len(axes) == 1 else np.fft.fft2(row, axes=axes)
    scale = float(np.abs(row).max()) or 1.0
    residue = float(np.abs(spec.imag).max()) / scale
    if residue > REALNESS_TOL:
        raise RealnessViolation(
            f"DFT of the block row has relative imaginary part {residue:.3e} "
            f"(> {REALNESS_TOL:g}); the input is not even/circulant")
    return np.ascontiguousarray(spec.real), residue


def block_diagonalize(row: BlockRow) -> SpectralBlocks:
    """Unnormalised DFT of the block row along the block axis."""
    blocks, residue = _dft_blocks(row.blocks, axes=(0,))
    return SpectralBlocks(blocks=blocks, imag_residue=residue)


def sqrt_blocks(spectral: SpectralBlocks, clip_tol: float = DEFAULT_CLIP_TOL,
                method: str = "eigen") -> SpectralBlocks:
    """Attach per-block square roots.

    ``method="eigen"`` clips eigenvalues below ``clip_tol`` times the largest
    eigenvalue and reports what it clipped. ``method="cholesky"`` uses lower
    triangular factors and fails on semidefinite blocks, which every grid
    has because of the repeated south pole.
    """
    if method == "eigen":
        roots, lam, report = eig_sqrt(spectral.blocks, clip_tol, strict=True)
        return SpectralBlocks(spectral.blocks, spectral.imag_residue, roots, lam, report, method)
    if method == "cholesky":
        roots = cholesky_sqrt(spectral.blocks)
        return SpectralBlocks(spectral.blocks, spectral.imag_residue, roots, None, None, method)
    raise ValidationError(f"unknown square-root method {method!r}")


def factorize(grid: SphereGrid, model: SpatialModel, clip_tol: float = DEFAULT_CLIP_TOL,
              method: str = "eigen") -> SpectralBlocks:
    return sqrt_blocks(block_diagonalize(assemble_block_row(grid, model)), clip_tol, method)


def apply_factor(roots: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Apply ``S = N**-0.5 (F_N kron I_M) diag(roots)`` to ``z`` of shape (..., N, M).

    ``F_N`` has entries ``exp(-2 pi i a q / N)``, i.e. numpy's forward FFT.
    """
    w = _blockwise(roots, z)
    return np.fft.fft(w, axis=-2) / np.sqrt(roots.shape[0])


def _blockwise(roots: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``roots[n] @ z[..., n, :]`` for every block ``n``."""
    if np.iscomplexobj(z):
        return _blockwise(roots, z.real) + 1j * _blockwise(roots, z.imag)
    return (roots @ z[..., None])[..., 0]


def materialize_factor(spectral: SpectralBlocks) -> np.ndarray:
    """Dense ``S`` with ``S S* = Sigma``; for small grids in tests only."""
    N, M = spectral.N, spectral.M
    eye = np.eye(N * M).reshape(N * M, N, M)
    cols = apply_factor(spectral.sqrt_blocks, eye)
    return cols.reshape(N * M, N * M).T


def _pairs(count: int):
    if int(count) != count or count < 0:
        raise ValidationError(f"count must be a non-negative integer, got {count!r}")
    return (int(count) + 1) // 2


def sample_sphere(spectral: SpectralBlocks, seed: int, count: int = 2,
                  start: int = 0) -> list[FieldRealization]:
    """Draw ``count`` independent fields with covariance ``Sigma``.

    Replicate ``k`` (counting from ``start``) comes from complex draw
    ``k // 2`` of the seed's stream family: its real part for even ``k``, its
    imaginary part for odd ``k``. So each replicate is reproducible alone.
    """
    if spectral.sqrt_blocks is None:
        raise ValidationError("square roots not computed; call sqrt_blocks first")
    N, M = spectral.N, spectral.M
    out = []
    stop = start + int(count)
    for p in range(start // 2, _pairs(stop)):
        z = rng.complex_normals(seed, p, (N, M))
        y = apply_factor(spectral.sqrt_blocks, z)
        for k, part, pid in ((2 * p, y.real, "A"), (2 * p + 1, y.imag, "B")):
            if start <= k < stop:
                out.append(FieldRealization(np.ascontiguousarray(part), seed, pid, k))
    return out


def simulate_sphere(grid: SphereGrid, model: SpatialModel, seed: int, count: int = 1,
                    clip_tol: float = DEFAULT_CLIP_TOL) -> list[FieldRealization]:
    return sample_sphere(factorize(grid, model, clip_tol), seed, count)
