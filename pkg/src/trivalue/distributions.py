"""Probability kernels used throughout the package.

Univariate and bivariate normal helpers, densities discretized on uniform
grids with composite-Simpson quadrature, and the Gaussian-copula conditional
that couples an arbitrary gridded marginal to a normal one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DegenerateDensityError

_SQRT_2PI = math.sqrt(2.0 * math.pi)

#: Default number of grid nodes; odd so the grid is Simpson-compatible.
DEFAULT_GRID_POINTS = 2001

#: Copula scores are computed from CDF values clamped to [EPS, 1-EPS]
#: so grid edges never map to infinite standard-normal scores.
CDF_CLAMP_EPS = 1e-12

#: Densities with total mass below this are treated as degenerate.
MASS_FLOOR = 1e-300


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF, accurate to ~1e-15 (erf-based)."""
    return float(ndtr(x))


def std_normal_quantile(p: float) -> float:
    """Inverse of the standard normal CDF.

    Raises ValueError unless 0 < p < 1.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile argument must lie in (0, 1), got {p}")
    return float(ndtri(p))


@dataclass(frozen=True)
class Gaussian1D:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0.0:
            raise ValueError(f"sd must be positive, got {self.sd}")

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sd
        return np.exp(-0.5 * z * z) / (self.sd * _SQRT_2PI)

    def cdf(self, x):
        return ndtr((np.asarray(x, dtype=float) - self.mean) / self.sd)

    def quantile(self, p: float) -> float:
        return self.mean + self.sd * std_normal_quantile(p)


def normal_pdf(x, g: Gaussian1D):
    """Density of N(g.mean, g.sd) at x (scalar or array)."""
    return g.pdf(x)


@dataclass(frozen=True)
class BivariateGaussian:
    """Bivariate normal over (g, d) with correlation rho."""

    mean_g: float
    mean_d: float
    sd_g: float
    sd_d: float
    rho: float

    def __post_init__(self):
        if not (self.sd_g > 0.0 and self.sd_d > 0.0):
            raise ValueError("standard deviations must be positive")
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie strictly in (-1, 1), got {self.rho}")


def conditional_g_given_delta(bvn: BivariateGaussian, delta: float) -> Gaussian1D:
    """Conditional law of g given d = delta under a bivariate normal."""
    mean = bvn.mean_g + bvn.rho * (bvn.sd_g / bvn.sd_d) * (delta - bvn.mean_d)
    sd = bvn.sd_g * math.sqrt(1.0 - bvn.rho * bvn.rho)
    return Gaussian1D(mean, sd)


def _cumulative_simpson(values: np.ndarray, h: float) -> np.ndarray:
    """Running integral at every grid node, Simpson-consistent.

    Pairs of intervals use the standard composite Simpson increment; the
    midpoint of each pair gets the matching 5/8/-1 sub-increment so the
    cumulative array agrees with composite Simpson at every even node.
    """
    n = values.size
    even = np.arange(0, n - 2, 2)
    inc_full = h / 3.0 * (values[even] + 4.0 * values[even + 1] + values[even + 2])
    inc_mid = h / 12.0 * (5.0 * values[even] + 8.0 * values[even + 1] - values[even + 2])
    pair = np.concatenate(([0.0], np.cumsum(inc_full)))
    out = np.empty(n)
    out[0::2] = pair
    out[1::2] = pair[:-1] + inc_mid
    return out


@dataclass(frozen=True)
class GridDensity:
    """A (possibly unnormalized) density sampled on a uniform grid.

    Values are non-negative; the node count is odd so composite Simpson
    applies directly. Instances are immutable: ``values`` is copied and
    marked read-only at construction.
    """

    lo: float
    hi: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 3 or vals.size % 2 == 0:
            raise ValueError("values must be a 1-D array with an odd size >= 3")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not np.all(np.isfinite(vals)):
            raise ValueError("density values must be finite")
        if np.any(vals < 0.0):
            raise ValueError("density values must be non-negative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        g = np.linspace(self.lo, self.hi, self.n_points)
        g.setflags(write=False)
        return g

    @cached_property
    def _cumulative(self) -> np.ndarray:
        c = _cumulative_simpson(self.values, self.h)
        c.setflags(write=False)
        return c

    @property
    def mass(self) -> float:
        return float(self._cumulative[-1])

    def _cumulative_at(self, x: float) -> float:
        # Off-node points: trapezoid over the linearly interpolated integrand,
        # keeping integrate() exactly additive across split points.
        i = int(min(max((x - self.lo) // self.h, 0), self.n_points - 2))
        t = x - (self.lo + i * self.h)
        v0 = self.values[i]
        vx = v0 + (self.values[i + 1] - v0) * (t / self.h)
        return float(self._cumulative[i]) + t * (v0 + vx) / 2.0


def integrate(gd: GridDensity, a: float, b: float) -> float:
    """Composite-Simpson integral of gd over [a, b].

    Limits outside the grid are clamped to it (with a warning); the mass
    outside the represented support is treated as zero. Raises ValueError
    if a > b.
    """
    if a > b:
        raise ValueError(f"integration limits out of order: a={a} > b={b}")
    if a < gd.lo or b > gd.hi:
        warnings.warn(
            f"integration limits [{a}, {b}] clamped to grid [{gd.lo}, {gd.hi}]",
            stacklevel=2,
        )
        a = max(a, gd.lo)
        b = min(b, gd.hi)
        if a > b:  # both limits on the same side of the grid
            return 0.0
    return gd._cumulative_at(b) - gd._cumulative_at(a)


def cdf_of(gd: GridDensity, x: float) -> float:
    """CDF of the normalized density at x (0 at lo, 1 at hi)."""
    mass = gd.mass
    if mass < MASS_FLOOR:
        raise DegenerateDensityError(f"total mass {mass} is numerically zero")
    if x <= gd.lo:
        return 0.0
    if x >= gd.hi:
        return 1.0
    return gd._cumulative_at(x) / mass


def normalize(gd: GridDensity) -> GridDensity:
    """Rescale to unit mass."""
    mass = gd.mass
    if mass < MASS_FLOOR:
        raise DegenerateDensityError(f"total mass {mass} is numerically zero")
    return GridDensity(gd.lo, gd.hi, gd.values / mass)


def gaussian_grid_density(
    g: Gaussian1D,
    span_sds: float = 10.0,
    n_points: int = DEFAULT_GRID_POINTS,
    normalized: bool = True,
) -> GridDensity:
    """Discretize a normal density on mean +/- span_sds * sd."""
    lo = g.mean - span_sds * g.sd
    hi = g.mean + span_sds * g.sd
    vals = g.pdf(np.linspace(lo, hi, n_points))
    gd = GridDensity(lo, hi, vals)
    return normalize(gd) if normalized else gd


def copula_scores(gd: GridDensity) -> np.ndarray:
    """Standard-normal scores of the grid nodes under the normalized CDF.

    CDF values are clamped to [CDF_CLAMP_EPS, 1 - CDF_CLAMP_EPS] so the
    edges map to finite scores.
    """
    mass = gd.mass
    if mass < MASS_FLOOR:
        raise DegenerateDensityError(f"total mass {mass} is numerically zero")
    u = np.clip(gd._cumulative / mass, CDF_CLAMP_EPS, 1.0 - CDF_CLAMP_EPS)
    return ndtri(u)


def copula_conditional_values(
    gd: GridDensity, rho: float, z_delta
) -> np.ndarray:
    """Gaussian-copula conditional density values on gd's grid.

    ``z_delta`` may be a scalar (returns a vector) or a vector of m scores
    (returns an (n_points, m) matrix). The output marginal density is
    gd(g) * phi((z_g - rho*z_delta)/s) / (s * phi(z_g)) with
    s = sqrt(1 - rho^2) and z_g the copula score of g.
    """
    if not -1.0 < rho < 1.0:
        raise ValueError(f"rho must lie strictly in (-1, 1), got {rho}")
    vals = gd.values
    if rho == 0.0:
        z = np.asarray(z_delta, dtype=float)
        if z.ndim == 0:
            return vals.copy()
        return np.repeat(vals[:, None], z.size, axis=1)
    z_g = copula_scores(gd)
    z = np.asarray(z_delta, dtype=float)
    scalar = z.ndim == 0
    if scalar:
        z = z.reshape(1)
    s2 = 1.0 - rho * rho
    expo = 0.5 * z_g[:, None] ** 2 - (z_g[:, None] - rho * z[None, :]) ** 2 / (2.0 * s2)
    out = vals[:, None] * np.exp(expo) / math.sqrt(s2)
    out[vals == 0.0, :] = 0.0
    return out[:, 0] if scalar else out


def copula_conditional_g(
    g_marginal: GridDensity, rho: float, z_delta: float
) -> GridDensity:
    """Conditional density of g given a delta copula score, as a GridDensity."""
    vals = copula_conditional_values(g_marginal, rho, float(z_delta))
    return GridDensity(g_marginal.lo, g_marginal.hi, vals)
