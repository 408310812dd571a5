"""The linear forms with random coefficients and their samplers.

Each form is ``C * X_1 + w_2 X_2 + ... + w_k X_k`` where ``C`` is a
:class:`~linchar.distributions.CoefficientLaw` independent of the i.i.d.
copies ``X_i``.  The configurations are table driven (see :func:`forms`).
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import _rng
from .distributions import (EPS_BERNOULLI, XI_HALF_ONE, SampleBatch, _check_count,
                            constant, epsilon_n_pmf)


class WrongTheoremError(ValueError):
    pass


@dataclass(frozen=True)
class TheoremId:
    name: str
    n: int = None

    def __post_init__(self):
        if self.name not in ("T1", "T1A", "T2", "T3", "T4"):
            raise ValueError(f"unknown theorem {self.name!r}")
        if self.name == "T1A":
            if self.n is None or int(self.n) != self.n or self.n < 2:
                raise ValueError("T1A needs an integer n >= 2")
        elif self.n is not None:
            raise ValueError(f"{self.name} takes no n")

    @property
    def arity(self):
        return {"T1": 2, "T2": 2, "T3": 3, "T4": 3}.get(self.name, self.n)

    def __str__(self):
        return f"T1A({self.n})" if self.name == "T1A" else self.name

    @classmethod
    def parse(cls, text, n=None):
        """Parse ``"t1"``, ``"t1a"`` (with ``n``), ``"t1a:3"``, ``"T3"`` ..."""
        text = text.strip().upper()
        if ":" in text:
            text, n = text.split(":")
            n = int(n)
        if text == "T1A":
            return cls("T1A", 2 if n is None else int(n))
        return cls(text)


T1, T2, T3, T4 = TheoremId("T1"), TheoremId("T2"), TheoremId("T3"), TheoremId("T4")


def T1A(n):
    return TheoremId("T1A", n)


@dataclass(frozen=True)
class Form:
    """``coef * X_1 + sum(weights[i] * X_{i+2})``."""

    coef: object
    weights: tuple

    @property
    def arity(self):
        return 1 + len(self.weights)

    def cf(self, f, t):
        """Characteristic function of the form, given the cf ``f`` of ``X``."""
        out = self.coef.mix_cf(f, t)
        for w in self.weights:
            out = out * f(float(w) * np.asarray(t, dtype=float))
        return out

    def draw(self, spec, rng, n):
        c = self.coef.draw(rng, n)
        out = c * spec.draw(rng, n)
        for w in self.weights:
            out = out + float(w) * spec.draw(rng, n)
        return out


_h, _q = Fraction(1, 2), Fraction(1, 4)


def forms(theorem):
    """The ``(lhs, rhs)`` forms of an identical-distribution theorem."""
    if theorem.name == "T1":
        return Form(EPS_BERNOULLI, ()), Form(constant(_h), (_h,))
    if theorem.name == "T1A":
        n = theorem.n
        return Form(epsilon_n_pmf(n), ()), Form(constant(1), (Fraction(1),) * (n - 1))
    if theorem.name == "T3":
        return Form(XI_HALF_ONE, (_q, _q)), Form(constant(_h), (_h, _h))
    if theorem.name == "T4":
        return Form(XI_HALF_ONE, (_h, _h)), Form(constant(1), (_q, _q))
    raise WrongTheoremError(f"{theorem} is an independence statement, not an identity")


# the law each theorem singles out
CHARACTERIZED_FAMILY = {"T1": "two-point", "T1A": "two-point", "T2": "two-point",
                        "T3": "uniform", "T4": "sech2"}


def sample_identity_pair(theorem, spec, n, seed):
    """Independent samples of both sides of an identity.

    The two sides use disjoint substreams, so they never share draws of the
    ``X`` copies or of the coefficients.
    """
    n = _check_count(n)
    lhs_form, rhs_form = forms(theorem)
    lhs = lhs_form.draw(spec, _rng.stream(seed, _rng.FORM_LHS), n)
    rhs = rhs_form.draw(spec, _rng.stream(seed, _rng.FORM_RHS), n)
    return (SampleBatch(lhs, n, int(seed), f"{theorem}:lhs:{spec!r}"),
            SampleBatch(rhs, n, int(seed), f"{theorem}:rhs:{spec!r}"))


def sample_independence_pair(spec, n, seed):
    """``n`` pairs ``(L1, L2) = (eps X1 + (1-eps) X2, eps X1 - (1-eps) X2)``.

    Returns an ``(n, 2)`` array.
    """
    n = _check_count(n)
    rng = _rng.stream(seed, _rng.FORM_PAIR)
    eps = EPS_BERNOULLI.draw(rng, n)
    x1 = spec.draw(rng, n)
    x2 = spec.draw(rng, n)
    l1 = eps * x1 + (1.0 - eps) * x2
    l2 = eps * x1 - (1.0 - eps) * x2
    return np.column_stack([l1, l2])


def exact_distribution(form, a=1):
    """Exact law of ``form`` for two-point ``X`` (atoms ``+-a``), by enumeration.

    Returns ``{value: probability}`` with :class:`~fractions.Fraction` entries.
    """
    a = Fraction(a)
    law = {}
    for c, pc in zip(form.coef.values, form.coef.probs):
        for signs in product((-1, 1), repeat=form.arity):
            value = c * signs[0] * a + sum(w * s * a for w, s in zip(form.weights, signs[1:]))
            law[value] = law.get(value, Fraction(0)) + pc / 2**form.arity
    return {v: p for v, p in sorted(law.items()) if p}


def exact_identity_laws(theorem, a=1):
    lhs, rhs = forms(theorem)
    return exact_distribution(lhs, a), exact_distribution(rhs, a)


def identity_cf_gap(theorem, spec, t):
    """``cf(lhs) - cf(rhs)`` at ``t`` for the exact law ``spec``."""
    lhs, rhs = forms(theorem)
    return lhs.cf(spec.cf, t) - rhs.cf(spec.cf, t)
