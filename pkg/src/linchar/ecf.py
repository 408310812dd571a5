"""Grids, empirical characteristic functions and cf distances.

A :class:`Grid` is normally a lattice: every point is an integer multiple of
``step``.  On a lattice the values at ``t/2``, ``t/4`` or ``3t`` are exact
lookups, which is what the functional equations need.  Points whose partner
falls off the lattice are simply not reported by the evaluators downstream.

All laws handled by the package are symmetric, so only the real part of the
ecf is kept.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .distributions import SampleBatch

# max number of cos evaluations held in memory at once
_BLOCK = 1 << 21


@dataclass(frozen=True, eq=False)
class Grid:
    points: np.ndarray
    step: float = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or len(pts) == 0:
            raise ValueError("grid needs a nonempty 1-d array of points")
        if pts[0] != 0.0 or np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must start at 0 and increase strictly")

    @classmethod
    def uniform(cls, t_max, m):
        """``m`` equally spaced points on ``[0, t_max]``."""
        if not (np.isfinite(t_max) and t_max > 0):
            raise ValueError(f"t_max must be positive, got {t_max}")
        if int(m) != m or m < 2:
            raise ValueError(f"grid needs at least 2 points, got {m}")
        m = int(m)
        step = t_max / (m - 1)
        return cls(step * np.arange(m), step)

    @classmethod
    def dyadic(cls, t_max, J):
        return cls.uniform(t_max, 2**int(J) + 1)

    @property
    def idx(self):
        if self.step is None:
            raise ValueError("irregular grid has no lattice indices")
        return np.rint(self.points / self.step).astype(np.int64)

    @property
    def dyadic_ok(self):
        """True when every point is a multiple of ``step`` (half-point lookups are exact)."""
        return self.step is not None

    @property
    def m(self):
        return len(self.points)

    @property
    def t_max(self):
        return float(self.points[-1])

    def subgrid(self, mask):
        return Grid(self.points[mask], self.step)

    def same_as(self, other):
        return (self.step == other.step and self.m == other.m
                and np.array_equal(self.points, other.points))

    def locate(self, num, den=1):
        """Positions of ``t * num / den`` for each grid point ``t``; -1 where absent."""
        if not self.dyadic_ok:
            raise ValueError("operation requires a lattice (dyadic) grid")
        idx = self.idx
        target, rem = np.divmod(idx * int(num), int(den))
        pos = np.searchsorted(idx, target)
        pos = np.minimum(pos, len(idx) - 1)
        found = (rem == 0) & (idx[pos] == target)
        return np.where(found, pos, -1)


@dataclass(eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray
    se: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.m,):
            raise ValueError("values do not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function values must be finite")

    @classmethod
    def from_callable(cls, f, grid):
        return cls(grid, np.asarray(f(grid.points), dtype=float))

    def take(self, num, den=1):
        """Values at ``t * num / den`` for each grid point (NaN where off-grid)."""
        pos = self.grid.locate(num, den)
        return np.where(pos >= 0, self.values[pos], np.nan)

    def take_se(self, num, den=1):
        pos = self.grid.locate(num, den)
        return np.where(pos >= 0, self.se[pos], np.nan)

    def restrict(self, mask):
        se = None if self.se is None else self.se[mask]
        return GridFunction(self.grid.subgrid(mask), self.values[mask], se, dict(self.meta))


@dataclass(eq=False)
class ECFEstimate(GridFunction):
    n: int = 0


def _as_points(grid):
    return grid.points if isinstance(grid, Grid) else np.asarray(grid, dtype=float)


def mean_cos(t, x):
    """``mean(cos(t_k * x))`` for every ``t_k``, reduced along the sample axis."""
    t = np.asarray(t, dtype=float)
    x = np.ascontiguousarray(x, dtype=float)
    out = np.empty(len(t))
    rows = max(1, _BLOCK // max(len(x), 1))
    for start in range(0, len(t), rows):
        block = np.multiply.outer(t[start:start + rows], x)
        out[start:start + rows] = np.cos(block).mean(axis=1)
    return out


def _mean_sin(t, x):
    out = np.empty(len(t))
    rows = max(1, _BLOCK // max(len(x), 1))
    for start in range(0, len(t), rows):
        out[start:start + rows] = np.sin(np.multiply.outer(t[start:start + rows], x)).mean(axis=1)
    return out


def ecf(sample, grid, check_symmetry=False):
    """Real part of the empirical characteristic function on ``grid``.

    Standard errors come from ``Var cos(tX) = (1 + f(2t)) / 2 - f(t)^2``,
    using the estimate itself at ``2t``; where ``2t`` is not on the grid the
    conservative bound ``1/sqrt(n)`` is used instead.

    With ``check_symmetry`` the imaginary part is computed as well and a
    warning is issued if it exceeds ``4/sqrt(n)`` anywhere.
    """
    x = sample.values if isinstance(sample, SampleBatch) else np.asarray(sample, float)
    n = len(x)
    if n < 1:
        raise ValueError("empty sample")
    values = mean_cos(grid.points, x)
    values[grid.points == 0] = 1.0
    if check_symmetry:
        imag = np.max(np.abs(_mean_sin(grid.points, x)))
        if imag > 4.0 / np.sqrt(n):
            warnings.warn(f"imaginary part of the ecf reaches {imag:.3g} > 4/sqrt(n); "
                          "the sample does not look symmetric", RuntimeWarning)
    return _estimate(grid, values, n)


def _estimate(grid, values, n):
    bound = 1.0 / np.sqrt(n)
    if grid.dyadic_ok:
        pos = grid.locate(2)
        v2 = np.where(pos >= 0, values[pos], np.nan)
        var = (1.0 + v2 - 2.0 * values**2) / (2.0 * n)
        se = np.where(np.isnan(v2), bound, np.sqrt(np.clip(var, 0.0, None)))
    else:
        se = np.full(grid.m, bound)
    se = np.clip(se, 0.0, bound + 1.0 / n)
    return ECFEstimate(grid, values, se, {}, n)


def lattice_ecf(x, grid, anchor=16):
    """Same as :func:`ecf` on a uniform lattice, without one ``cos`` per point.

    ``exp(i k h x)`` is advanced by complex multiplication and recomputed
    directly every ``anchor`` steps, which keeps the error within a few ulps
    while calling the trigonometric functions ``2 m / anchor`` times only.
    Used in resampling loops where the ecf is recomputed many times.
    """
    x = np.ascontiguousarray(x, dtype=float)
    idx = grid.idx
    if not np.array_equal(idx, np.arange(grid.m)):
        return ecf(x, grid)
    hx = grid.step * x
    z1 = np.cos(hx) + 1j * np.sin(hx)
    values = np.empty(grid.m)
    zk = np.ones_like(z1)
    for k in range(grid.m):
        if k and k % anchor == 0:
            zk = np.cos(k * hx) + 1j * np.sin(k * hx)
        elif k:
            zk = zk * z1
        values[k] = zk.real.mean()
    values[0] = 1.0
    return _estimate(grid, values, len(x))


def joint_ecf(pairs, s_grid, t_grid):
    """``mean(cos(s_i L1 + t_j L2))`` as an ``(len(s), len(t))`` matrix."""
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or len(pairs) == 0:
        raise ValueError("pairs must be a nonempty (n, 2) array")
    l1 = np.ascontiguousarray(pairs[:, 0])
    l2 = np.ascontiguousarray(pairs[:, 1])
    s = _as_points(s_grid)
    t = _as_points(t_grid)
    out = np.empty((len(s), len(t)))
    rows = max(1, _BLOCK // len(l1))
    for i, si in enumerate(s):
        for start in range(0, len(t), rows):
            arg = si * l1 + np.multiply.outer(t[start:start + rows], l2)
            out[i, start:start + rows] = np.cos(arg).mean(axis=1)
    return out


def gaussian_weight(t):
    return np.exp(-np.asarray(t, dtype=float) ** 2)


def cf_distance(g1, g2, weight=None):
    """Weighted L2 distance ``sqrt(int (g1 - g2)^2 w dt)`` by the trapezoidal rule.

    ``weight`` is a callable of ``t``, an array on the grid, or ``None`` for
    ``exp(-t^2)``.
    """
    if not g1.grid.same_as(g2.grid):
        raise ValueError("cf_distance needs identical grids")
    t = g1.grid.points
    if weight is None:
        w = gaussian_weight(t)
    elif callable(weight):
        w = np.asarray(weight(t), dtype=float)
    else:
        w = np.asarray(weight, dtype=float)
    if len(t) < 2:
        return 0.0
    return float(np.sqrt(np.trapezoid((g1.values - g2.values) ** 2 * w, t)))
