"""Regular longitude x colatitude grids on the unit sphere, time grids, geodesic distance."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class GridPoint:
    longitude: float
    colatitude: float

    @property
    def cartesian(self) -> tuple[float, float, float]:
        lam, phi = self.longitude, self.colatitude
        return (np.cos(lam) * np.sin(phi), np.sin(lam) * np.sin(phi), np.cos(phi))


@dataclass(frozen=True)
class SphereGrid:
    """Lattice of ``N`` longitudes ``2*pi*i/N`` and ``M`` colatitudes ``pi*j/M`` (i, j from 1).

    The north pole is not a grid point; the last colatitude is the south pole,
    which therefore appears ``N`` times (once per longitude ring).

    Points are ordered ring by ring with colatitude varying fastest, so the
    flat index of ``(i, j)`` (0-based) is ``i * M + j``.
    """

    N: int
    M: int

    def __post_init__(self):
        for name in ("N", "M"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise ValidationError(f"{name} must be an integer >= 2, got {value!r}")

    @cached_property
    def longitudes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(1, self.N + 1) / self.N

    @cached_property
    def colatitudes(self) -> np.ndarray:
        return np.pi * np.arange(1, self.M + 1) / self.M

    @cached_property
    def _sin_colat(self) -> np.ndarray:
        s = np.sin(self.colatitudes)
        # snap the south pole so its N copies are bit-identical points
        s[-1] = 0.0
        return s

    @cached_property
    def _cos_colat(self) -> np.ndarray:
        return np.cos(self.colatitudes)

    @property
    def size(self) -> int:
        return self.N * self.M

    def point(self, i: int, j: int) -> GridPoint:
        """Grid point with 1-based ring ``i`` and colatitude index ``j``."""
        return GridPoint(self.longitudes[i - 1], self.colatitudes[j - 1])

    def flat_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """(longitude, colatitude) arrays of length N*M in storage order."""
        lon = np.repeat(self.longitudes, self.M)
        colat = np.tile(self.colatitudes, self.N)
        return lon, colat

    def cartesian(self) -> np.ndarray:
        """Unit vectors, shape (N*M, 3), in storage order."""
        lam = self.longitudes[:, None]
        x = np.cos(lam) * self._sin_colat[None, :]
        y = np.sin(lam) * self._sin_colat[None, :]
        z = np.broadcast_to(self._cos_colat[None, :], x.shape)
        return np.stack([x, y, z], axis=-1).reshape(-1, 3)

    def ring_distances(self) -> np.ndarray:
        """Distances from ring 1 to every ring.

        Returns ``D`` of shape (N, M, M) with ``D[k, j, l]`` the geodesic distance
        between point ``(1, j)`` and point ``(1 + k, l)`` (0-based ``k, j, l``).
        Longitudinal shift invariance makes this the whole distance structure.
        """
        dlam = self.longitudes - self.longitudes[0]
        s, c = self._sin_colat, self._cos_colat
        inner = (s[None, :, None] * s[None, None, :] * np.cos(dlam)[:, None, None]
                 + c[None, :, None] * c[None, None, :])
        return np.arccos(np.clip(inner, -1.0, 1.0))

    def pairwise_distances(self, rows=None) -> np.ndarray:
        """Dense distances between points ``rows`` (default all) and all points."""
        lon, colat = self.flat_coordinates()
        s = np.tile(self._sin_colat, self.N)
        c = np.tile(self._cos_colat, self.N)
        if rows is None:
            rows = slice(None)
        inner = (s[rows, None] * s[None, :] * np.cos(lon[None, :] - lon[rows, None])
                 + c[rows, None] * c[None, :])
        return np.arccos(np.clip(inner, -1.0, 1.0))


@dataclass(frozen=True)
class TimeGrid:
    """Times ``t = tau * H / T`` for ``tau = 1..T``."""

    T: int
    H: float

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ValidationError(f"T must be an integer >= 1, got {self.T!r}")
        if not self.H > 0 or not np.isfinite(self.H):
            raise ValidationError(f"H must be a positive real, got {self.H!r}")

    @property
    def step(self) -> float:
        return self.H / self.T

    @cached_property
    def times(self) -> np.ndarray:
        return np.arange(1, self.T + 1) * self.H / self.T


def build_sphere_grid(N: int, M: int) -> SphereGrid:
    return SphereGrid(N, M)


def build_time_grid(T: int, H: float) -> TimeGrid:
    return TimeGrid(T, float(H))


def geodesic_distance(a: GridPoint, b: GridPoint) -> float:
    """Great-circle angle between two points, in [0, pi]."""
    inner = (np.sin(a.colatitude) * np.sin(b.colatitude) * np.cos(b.longitude - a.longitude)
             + np.cos(a.colatitude) * np.cos(b.colatitude))
    return float(np.arccos(np.clip(inner, -1.0, 1.0)))


def angular_distance(lon1, colat1, lon2, colat2):
    """Vectorised geodesic distance for arrays of (longitude, colatitude) in radians."""
    inner = (np.sin(colat1) * np.sin(colat2) * np.cos(lon2 - lon1)
             + np.cos(colat1) * np.cos(colat2))
    return np.arccos(np.clip(inner, -1.0, 1.0))
