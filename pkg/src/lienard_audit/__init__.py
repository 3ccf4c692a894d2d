"""Numerical audit of a deformed complex Van der Pol / Liénard equation:
factorization, Bernoulli reduction, an exact orbit and Lie point symmetries."""

__version__ = "0.1.0"
