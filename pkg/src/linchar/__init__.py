"""Characterizations of distributions by linear forms with random coefficients.

Samplers for the forms, residuals of the characteristic-function equations
they induce, a doubling solver for ``K(2t) = 2 K(t)^2 - 1`` and statistical
tests built on top of them.
"""

__version__ = "0.1.0"
