from collections import Counter
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from linchar import distributions as d
from linchar import linear_forms as lf


def enumerate_t1():
    """Brute force over (eps, X1, X2) in {0,1} x {+-1}^2 with equal weights."""
    lhs, rhs = Counter(), Counter()
    for eps, x1, x2 in product((0, 1), (-1, 1), (-1, 1)):
        lhs[Fraction(eps * x1)] += Fraction(1, 8)
        rhs[Fraction(x1 + x2, 2)] += Fraction(1, 8)
    return dict(lhs), dict(rhs)


class TestTheoremId:
    def test_arity(self):
        assert [t.arity for t in (lf.T1, lf.T1A(5), lf.T2, lf.T3, lf.T4)] == [2, 5, 2, 3, 3]

    def test_parse(self):
        assert lf.TheoremId.parse("t1a:4") == lf.T1A(4)
        assert lf.TheoremId.parse("T3") == lf.T3

    def test_invalid(self):
        with pytest.raises(ValueError):
            lf.TheoremId("T1A", 1)
        with pytest.raises(ValueError):
            lf.TheoremId("T5")


class TestIdentityPair:
    def test_t1_two_point_support(self):
        lhs, rhs = lf.sample_identity_pair(lf.T1, d.TwoPoint(1), 2000, 0)
        assert set(np.unique(lhs.values)) <= {-1.0, 0.0, 1.0}
        assert set(np.unique(rhs.values)) <= {-1.0, 0.0, 1.0}

    def test_t1_exact_laws_by_enumeration(self):
        lhs, rhs = enumerate_t1()
        expected = {Fraction(-1): Fraction(1, 4), Fraction(0): Fraction(1, 2),
                    Fraction(1): Fraction(1, 4)}
        assert lhs == expected and rhs == expected
        assert lf.exact_identity_laws(lf.T1) == (expected, expected)

    @pytest.mark.parametrize("theorem", [lf.T1] + [lf.T1A(n) for n in range(2, 7)])
    def test_exact_laws_coincide_for_two_point(self, theorem):
        lhs, rhs = lf.exact_identity_laws(theorem, a=Fraction(3, 2))
        assert lhs == rhs
        assert sum(lhs.values()) == 1

    @pytest.mark.parametrize("theorem", [lf.T3, lf.T4])
    def test_exact_laws_differ_for_two_point(self, theorem):
        lhs, rhs = lf.exact_identity_laws(theorem)
        assert lhs != rhs

    def test_t3_rhs_variance(self):
        A = 1.5
        _, rhs = lf.sample_identity_pair(lf.T3, d.UniformSym(A), 1_000_000, 11)
        sq = rhs.values**2
        assert abs(sq.mean() - A**2 / 4) < 3 * sq.std() / np.sqrt(rhs.n)

    @pytest.mark.parametrize("theorem,spec", [(lf.T1, d.Gaussian(1)), (lf.T3, d.UniformSym(1)),
                                              (lf.T4, d.SechSquared(1)),
                                              (lf.T1A(3), d.TwoPoint(2))])
    def test_sides_are_symmetric(self, theorem, spec):
        for side in lf.sample_identity_pair(theorem, spec, 100_000, 2):
            assert abs(side.values.mean()) < 4 * side.values.std() / np.sqrt(side.n)

    def test_sides_use_disjoint_draws(self):
        lhs, rhs = lf.sample_identity_pair(lf.T3, d.UniformSym(1), 1000, 5)
        assert not np.any(np.isin(lhs.values, rhs.values))
        assert abs(np.corrcoef(lhs.values, rhs.values)[0, 1]) < 0.15

    def test_deterministic(self):
        a = lf.sample_identity_pair(lf.T4, d.SechSquared(1), 1000, 5)
        b = lf.sample_identity_pair(lf.T4, d.SechSquared(1), 1000, 5)
        assert all(x.values.tobytes() == y.values.tobytes() for x, y in zip(a, b))

    def test_t2_rejected(self):
        with pytest.raises(lf.WrongTheoremError):
            lf.sample_identity_pair(lf.T2, d.TwoPoint(1), 10, 0)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            lf.sample_identity_pair(lf.T1, d.TwoPoint(1), 0, 0)

    @pytest.mark.parametrize("theorem,spec", [(lf.T1, d.TwoPoint(0.7)),
                                              (lf.T1A(5), d.TwoPoint(1.1)),
                                              (lf.T3, d.UniformSym(2.0)),
                                              (lf.T4, d.SechSquared(0.5))])
    def test_form_cfs_agree_for_characterized_law(self, theorem, spec):
        t = np.linspace(0, 10, 101)
        np.testing.assert_allclose(lf.identity_cf_gap(theorem, spec, t), 0.0, atol=1e-14)


class TestIndependencePair:
    def test_two_point_joint_law_is_uniform_product(self):
        # brute force over (eps, X1, X2)
        joint = Counter()
        for eps, x1, x2 in product((0, 1), (-1, 1), (-1, 1)):
            joint[(eps * x1 + (1 - eps) * x2, eps * x1 - (1 - eps) * x2)] += Fraction(1, 8)
        assert joint == {(s, t): Fraction(1, 4) for s in (-1, 1) for t in (-1, 1)}

        pairs = lf.sample_independence_pair(d.TwoPoint(1), 40_000, 3)
        cells = Counter(map(tuple, pairs.tolist()))
        assert set(cells) == set(joint)
        for c in cells.values():
            assert abs(c / 40_000 - 0.25) < 4 * np.sqrt(0.25 * 0.75 / 40_000)

    @pytest.mark.parametrize("spec", [d.UniformSym(1), d.Gaussian(2), d.SechSquared(1)])
    def test_abs_equal(self, spec):
        pairs = lf.sample_independence_pair(spec, 5000, 1)
        np.testing.assert_array_equal(np.abs(pairs[:, 0]), np.abs(pairs[:, 1]))

    def test_uniform_squares_dependent(self):
        pairs = lf.sample_independence_pair(d.UniformSym(1), 20_000, 1)
        r = np.corrcoef(pairs[:, 0] ** 2, pairs[:, 1] ** 2)[0, 1]
        assert r == pytest.approx(1.0)
