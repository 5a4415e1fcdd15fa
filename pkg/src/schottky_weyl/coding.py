"""The boundary map F of a product of Schottky factors and its symbolic coding.

A boundary vector ``x = (x_1, ..., x_r)`` is coded by the multi-index ``m``
of disks containing its components, and ``F(x) = g_m(x)`` componentwise.
Limit-set membership is only decidable up to a finite depth: a point passes
at depth ``n`` when it lies (within roundoff) in some depth-``n`` cover
interval of every factor.

Forward iteration of F expands errors by at least the reciprocal of the
contraction ratio at every step.  Long orbits therefore need ``mpmath`` inputs
carrying enough digits; all functions here accept them unchanged.
"""
from itertools import product

import mpmath

from ._numeric import eps_of, is_inf, is_mp
from .moebius import boundary_apply, compose
from .schottky import interval_image

__all__ = [
    "DEFAULT_DEPTH",
    "CodingError",
    "OutsideAllDisks",
    "NotInCover",
    "CodeTerminated",
    "locate",
    "locate_factor",
    "F_apply",
    "exclusion_set",
    "preimages",
    "orbit_code",
    "limit_point",
]

DEFAULT_DEPTH = 12


class CodingError(ValueError):
    pass


class OutsideAllDisks(CodingError):
    def __init__(self, factor):
        self.factor = factor
        super().__init__(f"component {factor} lies in no disk")


class NotInCover(CodingError):
    def __init__(self, factor, depth):
        self.factor = factor
        self.depth = depth
        super().__init__(f"component {factor} is not in the depth-{depth} limit-set cover")


class CodeTerminated(CodingError):
    def __init__(self, step, factor, cause=None):
        self.step = step
        self.factor = factor
        self.cause = cause
        super().__init__(f"coding stopped at step {step} in component {factor}: {cause}")


def _slack(x):
    return 8 * eps_of(x) * max(1, abs(x))


def _distance_to(x, lo, hi):
    if x < lo:
        return lo - x
    if x > hi:
        return x - hi
    return 0


def locate_factor(f, x, depth=DEFAULT_DEPTH, factor=1):
    """Letter of ``x`` in one factor, checked against the depth-``n`` cover.

    The cover is descended one level at a time.  The composite inverse branch
    of the current word is carried along, so the child intervals are images
    of disk diameters under a single contracting map.
    """
    if is_inf(x):
        raise OutsideAllDisks(factor)
    first = f.locate_letter(x)
    if first is None:
        raise OutsideAllDisks(factor)
    slack = _slack(x)
    mp = is_mp(x)
    branch = (lambda k: f.branch(k).promote()) if mp else f.branch
    phi = branch(first)
    last = first
    for level in range(2, depth + 1):
        best = None
        for k in f.letters:
            if k == -last:
                continue
            lo, hi = f.disks[k].left, f.disks[k].right
            if mp:
                lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
            lo, hi = interval_image(phi, lo, hi)
            dist = _distance_to(x, lo, hi)
            if best is None or dist < best[0]:
                best = (dist, k)
        if best[0] > slack:
            raise NotInCover(factor, level)
        last = best[1]
        phi = compose(phi, branch(last))
    return first


def locate(G, x, depth=DEFAULT_DEPTH):
    """Multi-index ``m`` with ``x_j`` in the open diameter of disk ``m_j`` of factor ``j``."""
    if len(x) != G.rank:
        raise ValueError(f"expected {G.rank} components, got {len(x)}")
    return tuple(locate_factor(f, xj, depth, j + 1) for j, (f, xj) in enumerate(zip(G.factors, x)))


def F_apply(G, x, depth=DEFAULT_DEPTH):
    """One step of the boundary map: returns ``(m, g_m(x))``."""
    m = locate(G, x, depth)
    y = tuple(boundary_apply(f.generators[k], xj) for f, k, xj in zip(G.factors, m, x))
    return m, y


def exclusion_set(G, m):
    """Multi-indices ``n`` with ``n_j = -m_j`` for at least one ``j``."""
    return frozenset(n for n in G.alphabet() if any(a == -b for a, b in zip(n, m)))


def preimages(G, x, depth=DEFAULT_DEPTH):
    """All ``(n, g_n^{-1}(x))`` with ``n`` outside the exclusion set of ``locate(x)``."""
    m = locate(G, x, depth)
    choices = [[k for k in f.letters if k != -mj] for f, mj in zip(G.factors, m)]
    out = []
    for n in product(*choices):
        y = tuple(boundary_apply(f.branch(k), xj) for f, k, xj in zip(G.factors, n, x))
        out.append((n, y))
    return out


def orbit_code(G, x, steps, depth=DEFAULT_DEPTH):
    """Letters ``m^(1), ..., m^(K)`` chosen along the forward orbit of ``x``."""
    code = []
    for t in range(steps):
        try:
            m, x = F_apply(G, x, depth)
        except (OutsideAllDisks, NotInCover) as exc:
            raise CodeTerminated(t, exc.factor, exc) from exc
        code.append(m)
    return code


def limit_point(f, letters, dps=None):
    """A point of the cover interval of ``letters``, computed by contraction.

    Applies ``g_{l_1}^{-1} o ... o g_{l_{n-1}}^{-1}`` to the centre of disk
    ``l_n``.  For a long word the result approximates the limit point with
    that code prefix to within the interval width.  With ``dps`` the
    computation runs in ``mpmath`` at that many digits.
    """
    letters = tuple(letters)
    if dps is None:
        x = f.disks[letters[-1]].center
        for l in reversed(letters[:-1]):
            x = boundary_apply(f.branch(l), x)
        return x
    with mpmath.workdps(dps):
        x = mpmath.mpf(f.disks[letters[-1]].center)
        for l in reversed(letters[:-1]):
            x = boundary_apply(f.branch(l).promote(), x)
        return +x
