"""Numerical side of the uniqueness arguments for ``K(t) = 2 K(t/2)^2 - 1``.

:func:`solve_by_doubling` seeds a solution by its Taylor polynomial on a tiny
interval and pushes it outwards with the doubling map.  The map is run on
``u = 1 - K``, for which it reads ``u(2t) = 2 u(t) (2 - u(t))``: near the
origin ``K`` is within rounding of 1, and iterating ``2K^2 - 1`` directly
would amplify that rounding by ``4^depth``.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .distributions import sinc
from .ecf import Grid, GridFunction
from .func_equations import curvature_at_zero


@dataclass(frozen=True)
class FixpointConfig:
    t_max: float = 4.0
    depth: int = 20
    taylor_order: int = 4
    tolerance: float = 1e-8
    points: int = 257

    def __post_init__(self):
        if not (np.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if int(self.depth) != self.depth or self.depth < 10:
            raise ValueError(f"depth must be an integer >= 10, got {self.depth}")
        if self.t_base > 1e-2:
            raise ValueError(f"base scale t_max/2^depth = {self.t_base:.3g} exceeds 1e-2")
        if int(self.taylor_order) != self.taylor_order or self.taylor_order < 2:
            raise ValueError("taylor_order must be an integer >= 2")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if int(self.points) != self.points or self.points < 3:
            raise ValueError("points must be an integer >= 3")

    @property
    def t_base(self):
        return self.t_max / 2.0**self.depth


def apply_doubling(g):
    """``(B g)(t) = 2 g(t/2)^2 - 1`` on the grid points whose half lies on the grid."""
    if not g.grid.dyadic_ok:
        raise ValueError("apply_doubling needs a lattice (dyadic) grid")
    half = g.take(1, 2)
    ok = np.isfinite(half)
    return GridFunction(g.grid.subgrid(ok), 2.0 * half[ok] ** 2 - 1.0)


def _seed_u(tau, curvature, order, quartic):
    # 1 - K on [0, t_base] from the series of cos(sqrt(-c) t)
    u = np.zeros_like(tau)
    for k in range(1, order // 2 + 1):
        coef = curvature**k / factorial(2 * k)
        if k == 2 and quartic is not None:
            coef = quartic
        u -= coef * tau ** (2 * k)
    return u


def solve_by_doubling(config, curvature=-1.0, quartic=None):
    """Solve ``K(2t) = 2 K(t)^2 - 1`` with ``K(0) = 1``, ``K''(0) = curvature``.

    The solution is tabulated on ``config.points`` equally spaced points of
    ``[0, t_max]``.  ``quartic`` overrides the ``t^4`` coefficient of the seed
    (``curvature^2 / 24`` by default); any admissible choice converges to the
    same function as ``depth`` grows.
    """
    if not curvature < 0:
        raise ValueError(f"curvature must be negative, got {curvature}")
    grid = Grid.uniform(config.t_max, config.points)
    u = _seed_u(grid.points / 2.0**config.depth, curvature, config.taylor_order, quartic)
    for _ in range(config.depth):
        u = 2.0 * u * (2.0 - u)
    meta = {"curvature": curvature, "depth": config.depth, "t_base": config.t_base}
    return GridFunction(grid, 1.0 - u, None, meta)


def metric_d(g1, g2):
    """``sup_{t > 0} |g1(t) - g2(t)| / t^3`` over the grid."""
    if not g1.grid.same_as(g2.grid):
        raise ValueError("metric_d needs identical grids")
    t = g1.grid.points
    pos = t > 0
    if not pos.any():
        return 0.0
    return float(np.max(np.abs(g1.values[pos] - g2.values[pos]) / t[pos] ** 3))


def in_class_f(g, curvature_tol=1e-3):
    """Reason ``g`` falls outside class F, or ``None`` if it is a member."""
    if abs(g.values[0] - 1.0) > 1e-12:
        return "g(0) != 1"
    if np.any(np.abs(g.values) > 1.0 + 1e-15):
        return "|g| > 1"
    if abs(curvature_at_zero(g) + 1.0) > curvature_tol:
        return "g''(0) != -1"
    return None


@dataclass
class ContractionReport:
    ratios: list
    rejected: list

    @property
    def max_ratio(self):
        return max(self.ratios) if self.ratios else float("nan")


def contraction_check(pairs):
    """Ratios ``d(Bg1, Bg2) / d(g1, g2)`` for pairs of class-F grid functions."""
    ratios, rejected = [], []
    for i, (g1, g2) in enumerate(pairs):
        reason = in_class_f(g1) or in_class_f(g2)
        if reason:
            rejected.append((i, reason))
            continue
        d = metric_d(g1, g2)
        if d == 0.0:
            rejected.append((i, "identical pair"))
            continue
        ratios.append(metric_d(apply_doubling(g1), apply_doubling(g2)) / d)
    return ContractionReport(ratios, rejected)


def perturbed_cosines(rng, grid, size, amplitude=0.1):
    """``cos(t) + c2 t^4 + c3 t^6 + c4 t^8`` with ``c_k ~ U(-amplitude, amplitude)``.

    Members of class F on ``[0, 1]`` for ``amplitude <= 0.1``.
    """
    t = grid.points
    out = []
    for _ in range(size):
        c = rng.uniform(-amplitude, amplitude, size=3)
        out.append(GridFunction(grid, np.cos(t) + c[0] * t**4 + c[1] * t**6 + c[2] * t**8))
    return out


def viete_product(a, t, terms):
    """Partial product ``prod_{k < terms} cos(a t / 2^k)``."""
    if int(terms) != terms or terms < 1:
        raise ValueError("terms must be a positive integer")
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    for k in range(int(terms)):
        out = out * np.cos(a * t / 2.0**k)
    return out[()] if out.ndim == 0 else out


def viete_closed_form(a, t):
    """Limit of :func:`viete_product`: ``sin(2 a t) / (2 a t)``."""
    return sinc(2.0 * a * np.asarray(t, dtype=float))
