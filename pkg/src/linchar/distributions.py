"""Reference laws and random coefficients.

The four symmetric families used throughout the package are

* :class:`TwoPoint` -- mass 1/2 at ``-a`` and ``+a``, cf ``cos(a t)``;
* :class:`UniformSym` -- uniform on ``(-A, A)``, cf ``sin(A t) / (A t)``;
* :class:`SechSquared` -- density ``p(x / a) / a`` with
  ``p(x) = pi / (4 cosh^2(pi x / 2))``, cf ``a t / sinh(a t)``;
* :class:`Gaussian` -- a negative control that no characterization singles out.

The discrete coefficients multiplying the first copy in a linear form are
:class:`CoefficientLaw` objects built in exact rational arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import _rng

_TAYLOR_CUTOFF = 1e-4


class UnsupportedOperation(TypeError):
    """The law does not provide the requested quantity (e.g. a density)."""


class DegenerateSampleError(ValueError):
    """The sample carries no scale information."""


# --------------------------------------------------------------------------
# special functions with removable singularities

def sinc(t):
    """``sin(t) / t`` with value 1 at the origin."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < _TAYLOR_CUTOFF
    safe = np.where(small, 1.0, t)
    t2 = t * t
    out = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(safe) / safe)
    return out[()] if out.ndim == 0 else out


def t_over_sinh(t):
    """``t / sinh(t)`` with value 1 at the origin; no overflow for large ``|t|``."""
    t = np.abs(np.asarray(t, dtype=float))
    small = t < _TAYLOR_CUTOFF
    safe = np.where(small, 1.0, t)
    t2 = t * t
    # t/sinh t = -2 t e^{-t} / expm1(-2t)
    with np.errstate(under="ignore"):
        big = -2.0 * safe * np.exp(-safe) / np.expm1(-2.0 * safe)
    out = np.where(small, 1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0, big)
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# symmetric laws

class Distribution:
    """Common interface of the symmetric reference laws."""

    family = ""

    @property
    def scale(self):
        raise NotImplementedError

    def cf(self, t):
        raise NotImplementedError

    def pdf(self, x):
        raise UnsupportedOperation(f"{self.family} has no density")

    def cdf(self, x):
        raise NotImplementedError

    def draw(self, rng, n):
        raise NotImplementedError

    def with_scale(self, scale):
        return type(self)(scale)

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"{self.family} scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class TwoPoint(Distribution):
    a: float
    family = "two-point"

    @property
    def scale(self):
        return self.a

    def cf(self, t):
        return np.cos(self.a * np.asarray(t, dtype=float))

    def pmf(self):
        return {-self.a: Fraction(1, 2), self.a: Fraction(1, 2)}

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < -self.a, 0.0, np.where(x < self.a, 0.5, 1.0))

    def draw(self, rng, n):
        signs = 2.0 * rng.integers(0, 2, size=n) - 1.0
        return self.a * signs


@dataclass(frozen=True)
class UniformSym(Distribution):
    A: float
    family = "uniform"

    @property
    def scale(self):
        return self.A

    def cf(self, t):
        return sinc(self.A * np.asarray(t, dtype=float))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < self.A, 0.5 / self.A, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((x + self.A) / (2.0 * self.A), 0.0, 1.0)

    def ppf(self, u):
        return self.A * (2.0 * np.asarray(u, dtype=float) - 1.0)

    def draw(self, rng, n):
        return self.ppf(rng.random(n))


@dataclass(frozen=True)
class SechSquared(Distribution):
    a: float
    family = "sech2"

    @property
    def scale(self):
        return self.a

    def cf(self, t):
        return t_over_sinh(self.a * np.asarray(t, dtype=float))

    def pdf(self, x):
        z = np.pi * np.asarray(x, dtype=float) / (2.0 * self.a)
        # 1/cosh^2 written via exp(-2|z|) to stay finite in the tails
        e = np.exp(-2.0 * np.abs(z))
        return np.pi / self.a * e / (1.0 + e) ** 2

    def cdf(self, x):
        return 0.5 * (1.0 + np.tanh(np.pi * np.asarray(x, dtype=float) / (2.0 * self.a)))

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        return self.a / np.pi * (np.log(u) - np.log1p(-u))

    def draw(self, rng, n):
        # uniform on the open interval (0, 1): never hits the poles of ppf
        u = (rng.integers(0, 2**53, size=n) + 0.5) / 2.0**53
        return self.ppf(u)


@dataclass(frozen=True)
class Gaussian(Distribution):
    sigma: float
    family = "gaussian"

    @property
    def scale(self):
        return self.sigma

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * (self.sigma * t) ** 2)

    def pdf(self, x):
        z = np.asarray(x, dtype=float) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * np.sqrt(2.0 * np.pi))

    def cdf(self, x):
        from scipy.special import ndtr
        return ndtr(np.asarray(x, dtype=float) / self.sigma)

    def draw(self, rng, n):
        return self.sigma * rng.standard_normal(n)


FAMILIES = {cls.family: cls for cls in (TwoPoint, UniformSym, SechSquared, Gaussian)}


def family_class(family):
    """Resolve a family tag (``"two-point"``, ``"uniform"``, ...) or class."""
    if isinstance(family, type) and issubclass(family, Distribution):
        return family
    try:
        return FAMILIES[str(family).lower()]
    except KeyError:
        raise ValueError(
            f"unknown family {family!r}; expected one of {sorted(FAMILIES)}") from None


def make(family, scale):
    return family_class(family)(float(scale))


# --------------------------------------------------------------------------
# samples

@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    n: int
    seed: int
    source: str

    def __post_init__(self):
        if len(self.values) != self.n:
            raise ValueError("values length does not match n")

    @classmethod
    def from_values(cls, values, source="data", seed=0):
        values = np.ascontiguousarray(values, dtype=float)
        return cls(values, len(values), seed, source)


def _check_count(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def sample(spec, n, seed):
    """Draw ``n`` i.i.d. values from ``spec`` on the substream of ``seed``."""
    n = _check_count(n)
    values = spec.draw(_rng.stream(seed, _rng.SAMPLE), n)
    return SampleBatch(values, n, int(seed), f"{spec!r}")


def cf_exact(spec, t):
    return spec.cf(t)


def density(spec, x):
    return spec.pdf(x)


def cdf(spec, x):
    return spec.cdf(x)


def moment_fit(family, batch):
    """Fit the scale of ``family`` from the mean of squares of ``batch``.

    Every family is symmetric, so the second raw moment determines the scale:
    ``a = sqrt(m2)`` for the two-point law, ``A = sqrt(3 m2)`` for the
    uniform law and ``a = sqrt(3 m2)`` for the squared hyperbolic secant
    law (whose variance is ``a^2 / 3``).
    """
    cls = family_class(family)
    values = batch.values if isinstance(batch, SampleBatch) else np.asarray(batch, float)
    if len(values) < 2:
        raise ValueError("moment_fit needs at least two observations")
    m2 = float(np.mean(values * values))
    if not m2 > 0:
        raise DegenerateSampleError("sample has zero second moment")
    factor = {TwoPoint: 1.0, UniformSym: 3.0, SechSquared: 3.0, Gaussian: 1.0}[cls]
    return cls(np.sqrt(factor * m2))


# --------------------------------------------------------------------------
# random coefficients

@dataclass(frozen=True)
class CoefficientLaw:
    """A finite law with rational atoms and rational probabilities."""

    name: str
    values: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise ValueError("values and probs must be nonempty and aligned")
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        if sum(self.probs, Fraction(0)) != 1:
            raise ValueError("probabilities must sum to exactly 1")

    def as_dict(self):
        return dict(zip(self.values, self.probs))

    def draw(self, rng, n):
        if len(self.values) == 1:
            return np.full(n, float(self.values[0]))
        values = np.array([float(v) for v in self.values])
        p = np.array([float(q) for q in self.probs])
        return values[rng.choice(len(values), size=n, p=p / p.sum())]

    def mix_cf(self, f, t):
        """Characteristic function of ``C * X`` given the cf ``f`` of ``X``."""
        t = np.asarray(t, dtype=float)
        return sum(float(p) * f(float(v) * t) for v, p in zip(self.values, self.probs))


def constant(c):
    c = Fraction(c)
    return CoefficientLaw(f"const({c})", (c,), (Fraction(1),))


EPS_BERNOULLI = CoefficientLaw("eps", (Fraction(0), Fraction(1)),
                               (Fraction(1, 2), Fraction(1, 2)))
XI_HALF_ONE = CoefficientLaw("xi", (Fraction(1, 2), Fraction(1)),
                             (Fraction(1, 2), Fraction(1, 2)))


def epsilon_n_pmf(n):
    """Law of the coefficient ``eps_n`` with ``E f(eps_n t) = f(t)^n`` for ``f = cos``.

    Values ``n - 2k`` for ``k < n/2`` carry ``C(n, k) / 2^(n-1)``; for even ``n``
    the value 0 additionally carries the constant term ``C(n, n/2) / 2^n``.
    """
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    values, probs = [], []
    for k in range((n + 1) // 2):
        values.append(Fraction(n - 2 * k))
        probs.append(Fraction(comb(n, k), 2 ** (n - 1)))
    if n % 2 == 0:
        values.append(Fraction(0))
        probs.append(Fraction(comb(n, n // 2), 2**n))
    return CoefficientLaw(f"eps_{n}", tuple(values), tuple(probs))
