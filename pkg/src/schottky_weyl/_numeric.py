"""Scalar helpers that work for both ``float`` and ``mpmath.mpf`` inputs.

The coding and flow layers iterate expanding maps, so long orbits are run in
``mpmath`` at raised precision.  Everything below dispatches on the argument
type so the same code path serves both.
"""
import math

import mpmath

INF = math.inf


def is_mp(x):
    return isinstance(x, (mpmath.mpf, mpmath.mpc))


def is_inf(x):
    """True for the point at infinity of the projective line."""
    return x == INF or x == -INF


def sqrt(x):
    return mpmath.sqrt(x) if is_mp(x) else math.sqrt(x)


def log(x):
    return mpmath.log(x) if is_mp(x) else math.log(x)


def acosh(x):
    return mpmath.acosh(x) if is_mp(x) else math.acosh(x)


def eps_of(x):
    """Unit roundoff at the precision carried by ``x``."""
    if is_mp(x):
        return mpmath.mpf(2) ** (-mpmath.mp.prec)
    return 2.0 ** -52


def to_float(x):
    if is_inf(x):
        return INF
    return float(x)
