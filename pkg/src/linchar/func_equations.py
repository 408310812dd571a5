"""Residuals of the characteristic-function equations.

Every equation relates values of a cf-like function at rational multiples of
``t`` (``t``, ``t/2``, ``t/4``, ``(n - 2k) t``).  On a lattice grid those are
exact lookups; the residual is reported on the points where all of them are
available.

==========  ===============================================================
``EQ2``     ``(f(t) + 1) / 2 - f(t/2)^2``
``eq_n(n)`` ``f(t)^n - 2^(1-n) sum_k C(n,k) f((n-2k) t)`` (minus
            ``C(n, n/2) / 2^n`` for even ``n``)
``EQ21``    ``(f(s+t) + f(s-t)) / 2 - f(s) f(t)`` (two-dimensional)
``EQ31``    ``(f(t) + f(t/2)) f(t/4)^2 / 2 - f(t/2)^3``
``EQ35``    ``K(t) - (2 K(t/2)^2 - 1)``
``EQT4``    ``(f(t) + f(t/2)) f(t/2)^2 / 2 - f(t) f(t/4)^2``
==========  ===============================================================

The last one equates the cfs of ``xi X1 + (X2 + X3)/2`` and
``X1 + (X2 + X3)/4``.  Its solutions ``a t / sinh(a t)`` follow from the
half-angle identity ``(1 + cosh(t/2)) / 2 = cosh(t/4)^2``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .ecf import ECFEstimate, Grid, GridFunction

_STEP = 1e-30  # complex-step size for exact first derivatives


class EmptyDomainError(ValueError):
    pass


@dataclass(frozen=True)
class EquationId:
    name: str
    n: int = None

    def __post_init__(self):
        if self.name not in _EQUATIONS and self.name not in ("eq_odd", "eq_even", "eq21"):
            raise ValueError(f"unknown equation {self.name!r}")
        if self.name in ("eq_odd", "eq_even"):
            if self.n is None or int(self.n) != self.n or self.n < 2:
                raise ValueError("eq_odd/eq_even need an integer n >= 2")
            if (self.n % 2 == 1) != (self.name == "eq_odd"):
                raise ValueError(f"parity of n={self.n} does not match {self.name}")

    def __str__(self):
        return f"{self.name}({self.n})" if self.n is not None else self.name

    @classmethod
    def parse(cls, text, n=None):
        """``"eq2"``, ``"eq21"``, ``"eq31"``, ``"eq35"``, ``"eqt4"``, ``"eqn:5"``."""
        text = text.strip().lower()
        if ":" in text:
            text, n = text.split(":")
        if text in ("eqn", "eq_n", "eq_odd", "eq_even"):
            return eq_n(int(n))
        return cls(text)


def eq_n(n):
    n = int(n)
    return EquationId("eq_odd" if n % 2 else "eq_even", n)


def _eq2(F):
    return 0.5 * (F[1] + 1.0) - F[Fraction(1, 2)] ** 2


def _eq31(F):
    h, q = F[Fraction(1, 2)], F[Fraction(1, 4)]
    return 0.5 * (F[1] + h) * q**2 - h**3


def _eq35(F):
    return F[1] - (2.0 * F[Fraction(1, 2)] ** 2 - 1.0)


def _eqt4(F):
    h, q = F[Fraction(1, 2)], F[Fraction(1, 4)]
    return 0.5 * (F[1] + h) * h**2 - F[1] * q**2


_EQUATIONS = {
    "eq2": ((Fraction(1), Fraction(1, 2)), _eq2),
    "eq31": ((Fraction(1), Fraction(1, 2), Fraction(1, 4)), _eq31),
    "eq35": ((Fraction(1), Fraction(1, 2)), _eq35),
    "eqt4": ((Fraction(1), Fraction(1, 2), Fraction(1, 4)), _eqt4),
}

EQ2, EQ21, EQ31, EQ35, EQT4 = (EquationId(k) for k in ("eq2", "eq21", "eq31", "eq35", "eqt4"))


def _power_equation(n):
    mults = sorted({Fraction(1)} | {Fraction(n - 2 * k) for k in range((n + 1) // 2)})
    constant = comb(n, n // 2) / 2.0**n if n % 2 == 0 else 0.0

    def fn(F):
        rhs = sum(comb(n, k) * F[Fraction(n - 2 * k)] for k in range((n + 1) // 2))
        return F[1] ** n - rhs / 2.0 ** (n - 1) - constant

    return tuple(mults), fn


def _definition(eq):
    if eq.name in ("eq_odd", "eq_even"):
        return _power_equation(eq.n)
    if eq.name == "eq21":
        raise ValueError("eq21 is two-dimensional; use residual() which returns a GridFunction2D")
    return _EQUATIONS[eq.name]


@dataclass(eq=False)
class GridFunction2D:
    """Values on ``s_grid x t_grid``; NaN marks pairs whose partners are off-grid."""

    s_grid: Grid
    t_grid: Grid
    values: np.ndarray
    se: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def diagonal(self):
        return np.diag(self.values)


def residual(eq, f):
    """Pointwise residual ``LHS - RHS`` of equation ``eq`` for the grid function ``f``.

    Returns a :class:`~linchar.ecf.GridFunction` on the grid points where every
    argument the equation needs lies on the lattice.  ``meta["truncated"]``
    records that some points had to be dropped.  When ``f`` carries standard
    errors (an ecf estimate), first-order propagated errors are attached as
    ``se``; correlations between ecf values at different ``t`` are ignored.
    """
    if not f.grid.dyadic_ok:
        raise ValueError("functional equations need a lattice (dyadic) grid")
    if eq.name == "eq21":
        return _residual_2d(f)
    mults, fn = _definition(eq)
    F = {m: f.take(m.numerator, m.denominator) for m in mults}
    ok = np.logical_and.reduce([np.isfinite(v) for v in F.values()])
    F = {m: v[ok] for m, v in F.items()}
    values = fn(F)

    se = None
    if f.se is not None:
        var = np.zeros(int(ok.sum()))
        for m in mults:
            bumped = dict(F)
            bumped[m] = F[m] + 1j * _STEP
            grad = np.imag(fn(bumped)) / _STEP
            var += (grad * f.take_se(m.numerator, m.denominator)[ok]) ** 2
        se = np.sqrt(var)

    meta = {"equation": str(eq), "truncated": bool(not ok.all()),
            "dropped": int((~ok).sum())}
    if isinstance(f, ECFEstimate):
        meta["n"] = f.n
    return GridFunction(f.grid.subgrid(ok), values, se, meta)


def _residual_2d(f):
    grid = f.grid
    idx = grid.idx
    i, j = np.meshgrid(idx, idx, indexing="ij")

    def at(target):
        pos = np.minimum(np.searchsorted(idx, target), len(idx) - 1)
        return np.where(idx[pos] == target, pos, -1)

    p_sum, p_diff = at(i + j), at(np.abs(i - j))
    ok = (p_sum >= 0) & (p_diff >= 0)
    fs, ft = np.meshgrid(f.values, f.values, indexing="ij")
    f_sum = np.where(ok, f.values[p_sum], np.nan)
    f_diff = np.where(ok, f.values[p_diff], np.nan)
    values = 0.5 * (f_sum + f_diff) - fs * ft

    se = None
    if f.se is not None:
        es, et = np.meshgrid(f.se, f.se, indexing="ij")
        var = (0.5 * np.where(ok, f.se[p_sum], np.nan)) ** 2 \
            + (0.5 * np.where(ok, f.se[p_diff], np.nan)) ** 2 \
            + (ft * es) ** 2 + (fs * et) ** 2
        se = np.sqrt(var)
    meta = {"equation": "eq21", "truncated": bool(not ok.all()), "dropped": int((~ok).sum())}
    return GridFunction2D(grid, grid, values, se, meta)


def independence_residual(joint, m1, m2):
    """``joint[i, j] - m1(s_i) m2(t_j)``: zero everywhere iff the joint cf factorizes."""
    joint = np.asarray(joint, dtype=float)
    if joint.shape != (m1.grid.m, m2.grid.m):
        raise ValueError(f"joint matrix {joint.shape} does not match marginal grids "
                         f"({m1.grid.m}, {m2.grid.m})")
    return joint - np.outer(m1.values, m2.values)


def k_ratio(f, floor=0.1):
    """``K(t) = f(t) / f(t/2)`` on the longest initial stretch where ``|f(t/2)| >= floor``."""
    if not f.grid.dyadic_ok:
        raise ValueError("k_ratio needs a lattice (dyadic) grid")
    half = f.take(1, 2)
    has_half = np.isfinite(half)
    bad = has_half & ~(np.abs(np.where(has_half, half, 0.0)) >= floor)
    if bad[0] or not has_half[0]:
        raise EmptyDomainError(f"|f(0)| is below the floor {floor}")
    stop = np.argmax(bad) if bad.any() else len(bad)
    keep = has_half.copy()
    keep[stop:] = False
    values = f.values[keep] / half[keep]
    values[0] = 1.0
    sub = f.grid.subgrid(keep)
    return GridFunction(sub, values, None, {"floor": floor, "t_end": sub.t_max})


def curvature_at_zero(g):
    """Second derivative at 0 of an even grid function, from its first two nonzero points.

    Fits ``g(t) = g(0) + c t^2 / 2 + d t^4`` through ``t_1, t_2`` and returns ``c``.
    """
    t1, t2 = g.grid.points[1], g.grid.points[2]
    d1 = 2.0 * (g.values[1] - g.values[0]) / t1**2
    d2 = 2.0 * (g.values[2] - g.values[0]) / t2**2
    return (t2**2 * d1 - t1**2 * d2) / (t2**2 - t1**2)


def residual_of(eq, cf, grid):
    """Residual for an exact cf given as a callable."""
    return residual(eq, GridFunction.from_callable(cf, grid))
