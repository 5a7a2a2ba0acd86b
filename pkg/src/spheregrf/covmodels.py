"""Isotropic covariance models on the sphere and sphere x time.

All correlation functions satisfy ``r(0) = 1``; the sill multiplies them to
give covariances. Distances are geodesic angles in radians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize, special

from .errors import ValidationError

SPATIAL_KINDS = ("exp", "gcauchy", "matern")
TEMPORAL_KINDS = ("exp", "cauchy")


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be > 0, got {value!r}")


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    # tolerate rounding from arccos / bin arithmetic
    if np.any(theta < -1e-12) or np.any(theta > np.pi + 1e-12) or np.any(np.isnan(theta)):
        raise ValidationError("geodesic distance must lie in [0, pi]")
    return np.clip(theta, 0.0, np.pi)


@dataclass(frozen=True)
class SpatialModel:
    """Correlation ``r(theta)`` of one of the catalog families.

    ``exp``:      exp(-theta / phi0)
    ``gcauchy``:  (1 + (theta / phi1)**alpha) ** (-beta / alpha)
    ``matern``:   2**(1 - nu) / Gamma(nu) * x**nu * K_nu(x),  x = theta / phi2
    """

    kind: str
    params: dict = field(default_factory=dict)
    sill: float = 1.0

    def __post_init__(self):
        p = self.params
        _positive("sill", self.sill)
        if self.kind == "exp":
            self._require("phi0")
            _positive("phi0", p["phi0"])
        elif self.kind == "gcauchy":
            self._require("phi1", "alpha", "beta")
            _positive("phi1", p["phi1"])
            _positive("beta", p["beta"])
            if not 0 < p["alpha"] <= 1:
                raise ValidationError(f"alpha must lie in (0, 1], got {p['alpha']!r}")
        elif self.kind == "matern":
            self._require("phi2", "nu")
            _positive("phi2", p["phi2"])
            if not 0 < p["nu"] <= 0.5:
                raise ValidationError(
                    f"nu must lie in (0, 1/2] for validity on the sphere, got {p['nu']!r}")
        else:
            raise ValidationError(f"unknown spatial model {self.kind!r}")

    def _require(self, *names):
        missing = [n for n in names if n not in self.params]
        if missing:
            raise ValidationError(f"{self.kind} model needs parameter(s) {', '.join(missing)}")

    def correlation(self, theta):
        theta = _check_theta(theta)
        p = self.params
        if self.kind == "exp":
            out = np.exp(-theta / p["phi0"])
        elif self.kind == "gcauchy":
            a = p["alpha"]
            out = (1.0 + (theta / p["phi1"]) ** a) ** (-p["beta"] / a)
        else:
            out = _matern(theta / p["phi2"], p["nu"])
        return out if out.ndim else float(out)

    def covariance(self, theta):
        return self.sill * self.correlation(theta)

    def variogram(self, theta):
        return self.sill * (1.0 - self.correlation(theta))


def _matern(x, nu):
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    pos = x > 0
    xp = x[pos]
    # log-space keeps x**nu * K_nu(x) finite near 0 and for large x
    log_val = ((1.0 - nu) * math.log(2.0) - special.gammaln(nu) + nu * np.log(xp)
               + np.log(special.kve(nu, xp)) - xp)
    out[pos] = np.exp(log_val)
    return out


@dataclass(frozen=True)
class TemporalCorrelation:
    """``exp``: exp(-u / c0);  ``cauchy``: 1 / (1 + (u / c1)**2)."""

    kind: str
    scale: float

    def __post_init__(self):
        if self.kind not in TEMPORAL_KINDS:
            raise ValidationError(f"unknown temporal correlation {self.kind!r}")
        _positive("c0" if self.kind == "exp" else "c1", self.scale)

    def __call__(self, u):
        u = np.abs(np.asarray(u, dtype=float))
        if self.kind == "exp":
            out = np.exp(-u / self.scale)
        else:
            out = 1.0 / (1.0 + (u / self.scale) ** 2)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class SpaceTimeModel:
    """C(theta, u) = ((1 - delta) / (1 - delta * g(u) * cos(theta))) ** tau."""

    delta: float
    tau: float
    temporal: TemporalCorrelation
    sill: float = 1.0

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValidationError(f"delta must lie in (0, 1), got {self.delta!r}")
        _positive("tau", self.tau)
        _positive("sill", self.sill)

    def correlation(self, theta, u):
        theta = _check_theta(theta)
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise ValidationError("time lag must be >= 0")
        ratio = (1.0 - self.delta) / (1.0 - self.delta * self.temporal(u) * np.cos(theta))
        out = ratio ** self.tau
        return out if np.ndim(out) else float(out)

    def covariance(self, theta, u):
        return self.sill * self.correlation(theta, u)

    def variogram(self, theta, u):
        return self.sill * (1.0 - self.correlation(theta, u))


def spatial_correlation(model: SpatialModel, theta):
    return model.correlation(theta)


def spacetime_correlation(model: SpaceTimeModel, theta, u):
    return model.correlation(theta, u)


def variogram_from_correlation(model, theta, u=None):
    """sigma^2 * (1 - r(theta)) or sigma^2 * (1 - r(theta, u))."""
    if isinstance(model, SpaceTimeModel):
        return model.variogram(theta, 0.0 if u is None else u)
    return model.variogram(theta)


# parameter solved for by default when calibrating each family
RANGE_PARAMETER = {"exp": "phi0", "gcauchy": "phi1", "matern": "phi2"}


def calibrate_range(kind: str, fixed: dict, target: tuple[float, float],
                    parameter: str | None = None, bracket=(1e-8, 1e4)) -> float:
    """Solve for one parameter of a spatial family so that ``r(theta*) = r*``.

    ``parameter`` defaults to the family's range; any other monotone parameter
    (e.g. ``beta`` for the generalized Cauchy) may be named instead.
    """
    theta_star, r_star = map(float, target)
    if not 0 < r_star < 1:
        raise ValidationError(f"target correlation must lie in (0, 1), got {r_star}")
    if not 0 < theta_star <= np.pi:
        raise ValidationError(f"target distance must lie in (0, pi], got {theta_star}")
    parameter = parameter or RANGE_PARAMETER[kind]

    def residual(x):
        return SpatialModel(kind, {**fixed, parameter: x}).correlation(theta_star) - r_star

    lo, hi = bracket
    f_lo, f_hi = residual(lo), residual(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValidationError(
            f"no root for {parameter} in [{lo:g}, {hi:g}] "
            f"(residuals {f_lo:.3g}, {f_hi:.3g})")
    return optimize.brentq(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                           maxiter=500)


# -- text configuration ------------------------------------------------------

MODEL_KEYS = ("model", "sill", "phi0", "phi1", "alpha", "beta", "phi2", "nu",
              "delta", "tau", "c0", "c1", "gkind")

_MODEL_ALIASES = {
    "exp": "exp", "exponential": "exp",
    "gcauchy": "gcauchy", "cauchy": "gcauchy",
    "matern": "matern",
    "st": "st", "st-exp": "st", "st-cauchy": "st",
}


def parse_model_spec(text: str) -> dict:
    """Parse ``key=value`` pairs separated by whitespace, commas, semicolons or newlines.

    ``#`` starts a comment. Unknown keys are rejected.
    """
    spec = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for token in re.split(r"[\s,;]+", line.strip()):
            if not token:
                continue
            if "=" not in token:
                raise ValidationError(f"expected key=value, got {token!r}")
            key, value = token.split("=", 1)
            key = key.strip().lower()
            if key not in MODEL_KEYS:
                raise ValidationError(f"unknown model key {key!r}")
            spec[key] = value.strip()
    return spec


def model_from_spec(spec: dict):
    """Build a SpatialModel or SpaceTimeModel from a mapping of the text keys."""
    spec = dict(spec)
    name = str(spec.pop("model", "")).lower()
    if name not in _MODEL_ALIASES:
        raise ValidationError(f"unknown model {name!r}")
    kind = _MODEL_ALIASES[name]
    try:
        values = {k: float(v) for k, v in spec.items() if v is not None and k != "gkind"}
    except ValueError as exc:
        raise ValidationError(f"non-numeric model parameter: {exc}") from None
    sill = values.pop("sill", 1.0)
    if kind != "st":
        wanted = {"exp": ("phi0",), "gcauchy": ("phi1", "alpha", "beta"),
                  "matern": ("phi2", "nu")}[kind]
        return SpatialModel(kind, {k: values[k] for k in wanted if k in values}, sill)

    gkind = spec.get("gkind")
    if name == "st-exp":
        gkind = "exp"
    elif name == "st-cauchy":
        gkind = "cauchy"
    gkind = (gkind or "exp").lower()
    scale_key = "c0" if gkind == "exp" else "c1"
    for key in ("delta", "tau", scale_key):
        if key not in values:
            raise ValidationError(f"space-time model needs parameter {key}")
    return SpaceTimeModel(values["delta"], values["tau"],
                          TemporalCorrelation(gkind, values[scale_key]), sill)


def with_sill(model, sill: float):
    return replace(model, sill=sill)
