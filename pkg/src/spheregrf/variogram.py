"""Nonparametric variogram estimates on the sphere and on sphere x time.

Within a bin the estimate is half the mean squared increment over point
pairs, ``sum (X(p) - X(q))**2 / (2 * #pairs)``, so its expectation is
``sigma^2 (1 - r)`` averaged over the bin. Ordered and unordered pair sums
give the same value; ordered pairs are used internally.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, ValidationError
from .grid import SphereGrid, TimeGrid, angular_distance

DEFAULT_NBINS = 20
DEFAULT_POINT_CAP = 20000
_CHUNK_BYTES = 32 * 2**20
# bin windows are closed; the slack keeps pairs exactly on an edge from
# dropping out through rounding
EDGE_RTOL = 1e-12


@dataclass(frozen=True)
class VariogramEstimate:
    """Populated bins only.

    ``gamma`` has shape (nbins,) for one field or (R, nbins) for R replicates
    sharing the same locations. ``u`` is None for purely spatial estimates.
    """

    theta: np.ndarray
    u: np.ndarray | None
    gamma: np.ndarray
    count: np.ndarray
    theta_mean: np.ndarray  # mean pair distance within each bin
    bandwidth: float
    time_bandwidth: float | None = None

    @property
    def replicates(self) -> int:
        return 1 if self.gamma.ndim == 1 else self.gamma.shape[0]

    def mean(self) -> "VariogramEstimate":
        """Average over replicates."""
        if self.gamma.ndim == 1:
            return self
        return VariogramEstimate(self.theta, self.u, self.gamma.mean(axis=0), self.count,
                                 self.theta_mean, self.bandwidth, self.time_bandwidth)

    def replicate(self, r: int) -> "VariogramEstimate":
        gamma = self.gamma if self.gamma.ndim == 1 else self.gamma[r]
        return VariogramEstimate(self.theta, self.u, gamma, self.count,
                                 self.theta_mean, self.bandwidth, self.time_bandwidth)

    def select(self, mask) -> "VariogramEstimate":
        u = None if self.u is None else self.u[mask]
        return VariogramEstimate(self.theta[mask], u, self.gamma[..., mask], self.count[mask],
                                 self.theta_mean[mask], self.bandwidth, self.time_bandwidth)

    def spatial_margin(self) -> "VariogramEstimate":
        """Bins at zero time lag."""
        if self.u is None:
            return self
        return self.select(np.isclose(self.u, 0.0))

    def temporal_margin(self) -> "VariogramEstimate":
        """Bins at the smallest spatial centre (zero distance with the default bins)."""
        return self.select(np.isclose(self.theta, self.theta.min()))


def default_theta_bins(nbins: int = DEFAULT_NBINS) -> tuple[np.ndarray, float]:
    """``nbins`` centres tiling (0, pi) and the matching half-width."""
    width = np.pi / nbins
    return (np.arange(nbins) + 0.5) * width, width / 2


def default_st_theta_bins(nbins: int = DEFAULT_NBINS) -> tuple[np.ndarray, float]:
    """Spatial centres for space-time estimates: the spatial defaults plus a zero-distance bin."""
    centres, half = default_theta_bins(nbins)
    return np.concatenate([[0.0], centres]), half


def default_time_bins(tgrid: TimeGrid) -> tuple[np.ndarray, float]:
    return np.arange(tgrid.T) * tgrid.step, tgrid.step / 2


def _as_values(field, leading_time: bool) -> np.ndarray:
    """Stack realizations to (R, T, ...) float array."""
    if isinstance(field, (list, tuple)):
        arr = np.stack([getattr(f, "values", f) for f in field])
    else:
        arr = np.asarray(getattr(field, "values", field), dtype=float)[None]
    arr = np.asarray(arr, dtype=float)
    if not leading_time:
        arr = arr[:, None]
    return arr


def pair_variogram(lon, colat, values, theta_centers, bandwidth, times=None,
                   u_centers=None, time_bandwidth=None,
                   point_cap: int | None = DEFAULT_POINT_CAP) -> VariogramEstimate:
    """Variogram of fields observed at arbitrary points.

    ``values`` has shape (R, T, n) (or (R, n) when ``times`` is None) for R
    replicates at the same ``n`` locations and ``T`` times.
    """
    lon = np.asarray(lon, dtype=float).ravel()
    colat = np.asarray(colat, dtype=float).ravel()
    n = lon.size
    theta_centers = np.atleast_1d(np.asarray(theta_centers, dtype=float))
    if not bandwidth > 0:
        raise ValidationError(f"bandwidth must be > 0, got {bandwidth!r}")
    if np.any(theta_centers < 0) or np.any(theta_centers > np.pi):
        raise ValidationError("bin centres must lie in [0, pi]")
    values = np.asarray(values, dtype=float)
    spacetime = times is not None
    if spacetime:
        times = np.asarray(times, dtype=float).ravel()
        if u_centers is None or time_bandwidth is None:
            raise ValidationError("space-time estimates need u_centers and time_bandwidth")
        if not time_bandwidth > 0:
            raise ValidationError(f"time bandwidth must be > 0, got {time_bandwidth!r}")
        u_centers = np.atleast_1d(np.asarray(u_centers, dtype=float))
    else:
        times = np.zeros(1)
        u_centers = np.zeros(1)
        time_bandwidth = np.inf
        values = values[:, None] if values.ndim == 2 else values
    if values.ndim != 3 or values.shape[1:] != (times.size, n):
        raise ValidationError(f"values of shape {values.shape} do not match "
                              f"{times.size} time(s) x {n} location(s)")
    T = times.size
    if point_cap is not None and T * n > point_cap:
        raise CapExceeded(f"{T * n} space-time points exceed the variogram cap of {point_cap}; "
                          "pair enumeration is quadratic")
    R = values.shape[0]

    # time-pair weights: tw[d_index][t, t'] = 1 if ||t - t'| - u| <= l'
    tlag = np.abs(times[:, None] - times[None, :])
    tmask = np.abs(tlag[None] - u_centers[:, None, None]) <= time_bandwidth * (1 + EDGE_RTOL)
    nth, nu = theta_centers.size, u_centers.size

    sums = np.zeros((R, nth, nu))
    counts = np.zeros((nth, nu))
    dist_sums = np.zeros((nth, nu))

    X = values.transpose(2, 1, 0).reshape(n, T * R)      # (n, T*R)
    Xs = values.transpose(2, 1, 0)                         # (n, T, R)
    sq = Xs ** 2
    # per-location sum over times of x^2, weighted later by time-pair counts
    chunk = max(1, min(n, _CHUNK_BYTES // (8 * max(n, 1))))
    for start in range(0, n, chunk):
        rows = slice(start, min(n, start + chunk))
        dist = angular_distance(lon[rows, None], colat[rows, None], lon[None, :], colat[None, :])
        idx = np.arange(rows.start, rows.stop)
        dist[np.arange(idx.size), idx] = 0.0
        for b, centre in enumerate(theta_centers):
            m = np.abs(dist - centre) <= bandwidth * (1 + EDGE_RTOL)
            if not m.any():
                continue
            diag = m[np.arange(idx.size), idx]
            mf = m.astype(float)
            rowcnt = mf.sum(axis=1)                     # (c,)
            colcnt = mf.sum(axis=0)                     # (n,)
            npairs_sp = rowcnt.sum()
            dsum = dist[m].sum()
            mx = (mf @ X).reshape(-1, T, R)             # (c, T, R): sum_b m_ab x_{t,b}
            xa = Xs[rows]                               # (c, T, R)
            # cross[t, t', r] = sum_a x_{t,a} (m x_{t'})_a
            cross = np.einsum("atr,asr->tsr", xa, mx)
            # x^2 terms: sum_a rowcnt_a x_{t,a}^2 and sum_b colcnt_b x_{t',b}^2
            left = np.einsum("a,atr->tr", rowcnt, sq[rows])
            right = np.einsum("b,btr->tr", colcnt, sq)
            for k in range(nu):
                w = tmask[k].astype(float)              # (T, T) ordered time pairs
                ntp = w.sum()
                if ntp == 0:
                    continue
                total = (np.einsum("ts,tr->r", w, left) + np.einsum("ts,sr->r", w, right)
                         - 2.0 * np.einsum("ts,tsr->r", w, cross))
                sums[:, b, k] += total
                # drop (p, p) self pairs: same location at equal times
                self_pairs = diag.sum() * np.trace(w)
                counts[b, k] += npairs_sp * ntp - self_pairs
                dist_sums[b, k] += dsum * ntp

    th, uu = np.meshgrid(theta_centers, u_centers, indexing="ij")
    keep = counts > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        gamma = sums / (2.0 * counts)
        theta_mean = dist_sums / counts
    gamma = np.maximum(gamma[:, keep], 0.0)
    est = VariogramEstimate(
        theta=th[keep], u=uu[keep] if spacetime else None, gamma=gamma,
        count=counts[keep].astype(np.int64), theta_mean=theta_mean[keep],
        bandwidth=float(bandwidth), time_bandwidth=float(time_bandwidth) if spacetime else None)
    return est if R > 1 else est.replicate(0)


def empirical_variogram(field, grid: SphereGrid, bin_centers=None, bandwidth=None,
                        point_cap: int | None = DEFAULT_POINT_CAP) -> VariogramEstimate:
    """Spatial variogram of one field (N, M) or a list of replicate fields."""
    if bin_centers is None:
        bin_centers, default_l = default_theta_bins()
        bandwidth = default_l if bandwidth is None else bandwidth
    elif bandwidth is None:
        raise ValidationError("bandwidth is required with explicit bin centres")
    values = _as_values(field, leading_time=False)
    if values.shape[2:] != (grid.N, grid.M):
        raise ValidationError(f"field shape {values.shape[2:]} does not match grid "
                              f"({grid.N}, {grid.M})")
    lon, colat = grid.flat_coordinates()
    values = values.reshape(values.shape[0], grid.size)
    return pair_variogram(lon, colat, values, bin_centers, bandwidth, point_cap=point_cap)


def empirical_st_variogram(field, grid: SphereGrid, tgrid: TimeGrid, theta_centers=None,
                           u_centers=None, bandwidth=None, time_bandwidth=None,
                           point_cap: int | None = DEFAULT_POINT_CAP) -> VariogramEstimate:
    """Space-time variogram of one field (T, N, M) or a list of replicate fields."""
    if theta_centers is None:
        theta_centers, default_l = default_st_theta_bins()
        bandwidth = default_l if bandwidth is None else bandwidth
    if u_centers is None:
        u_centers, default_lt = default_time_bins(tgrid)
        time_bandwidth = default_lt if time_bandwidth is None else time_bandwidth
    if bandwidth is None or time_bandwidth is None:
        raise ValidationError("bandwidths are required with explicit bin centres")
    values = _as_values(field, leading_time=True)
    if values.shape[1:] != (tgrid.T, grid.N, grid.M):
        raise ValidationError(f"field shape {values.shape[1:]} does not match "
                              f"({tgrid.T}, {grid.N}, {grid.M})")
    lon, colat = grid.flat_coordinates()
    values = values.reshape(values.shape[0], tgrid.T, grid.size)
    return pair_variogram(lon, colat, values, theta_centers, bandwidth, times=tgrid.times,
                          u_centers=u_centers, time_bandwidth=time_bandwidth,
                          point_cap=point_cap)


def truth(model, estimate: VariogramEstimate) -> np.ndarray:
    """Model variogram at each bin centre."""
    if estimate.u is None:
        return model.variogram(estimate.theta)
    return model.variogram(estimate.theta, estimate.u)


def write_csv(path_or_file, estimate: VariogramEstimate, truth_values=None):
    """Columns theta,u,gamma,count (+ truth); theta in radians, u empty if spatial."""
    if estimate.gamma.ndim != 1:
        raise ValidationError("write one replicate or the mean at a time")
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["theta", "u", "gamma", "count"]
        if truth_values is not None:
            header.append("truth")
        writer.writerow(header)
        for i in range(estimate.theta.size):
            row = [repr(float(estimate.theta[i])),
                   "" if estimate.u is None else repr(float(estimate.u[i])),
                   repr(float(estimate.gamma[i])), int(estimate.count[i])]
            if truth_values is not None:
                row.append(repr(float(truth_values[i])))
            writer.writerow(row)
    finally:
        if own:
            fh.close()
