"""Weyl chamber flow on a product of Schottky surfaces and its cross section.

Each factor carries an oriented geodesic of the half-plane together with a base
point on it.  The section ``C`` consists of chambers whose base point lies on
a boundary circle ``s_k`` and whose forward endpoint lies outside disk ``k``.
Flowing is done by unfolding: from a base point in the closure of the
fundamental domain the next circle hit by the geodesic is found in closed form,
and the pairing generator of that circle pulls the whole picture back.

The flow is simulated in ``mpmath``.  Boundary errors grow like ``e^t`` along
a trajectory, so the working precision must grow with the simulated time;
``working_dps`` gives a safe choice.
"""
from dataclasses import dataclass
import math

import mpmath

from ._numeric import INF, acosh, is_inf, log, sqrt, to_float
from .coding import DEFAULT_DEPTH, F_apply
from .moebius import MoebiusTransform, boundary_apply, chordal_distance, classify_and_axis, complex_apply
from .schottky import Word, word_isometry

__all__ = [
    "TANGENCY_TOL",
    "FlowError",
    "TangentCrossing",
    "NoFutureIntersection",
    "FactorChamber",
    "FlatState",
    "FirstReturn",
    "C1C2Report",
    "SemiconjugacyReport",
    "working_dps",
    "chamber_from_endpoints",
    "flat_from_words",
    "factor_crossing_times",
    "first_return",
    "simulate",
    "check_C1_C2",
    "semiconjugacy_check",
    "hyperbolic_distance",
]

TANGENCY_TOL = 1e-12
SECTION_TOL = 1e-20


class FlowError(RuntimeError):
    pass


class TangentCrossing(FlowError):
    pass


class NoFutureIntersection(FlowError):
    def __init__(self, factor):
        self.factor = factor
        super().__init__(f"no future intersection with the section in component {factor}")


@dataclass(frozen=True)
class FactorChamber:
    """An oriented geodesic ``backward -> forward`` with a base point on it.

    ``side`` is the letter of the boundary circle carrying the base point when
    the chamber lies in the section, else ``None``.
    """

    backward: object
    forward: object
    base: object
    side: int = None

    @property
    def element(self):
        """The group element ``g`` with ``g(0), g(inf), g(i)`` = backward, forward, base."""
        xm, xp, z = self.backward, self.forward, self.base
        if is_inf(xp):
            h = MoebiusTransform(1.0, xm, 0.0, 1.0)
        elif is_inf(xm):
            h = MoebiusTransform(xp, -1.0, 1.0, 0.0)
        elif xp > xm:
            h = MoebiusTransform(xp, xm, 1.0, 1.0)
        else:
            h = MoebiusTransform(xp, -xm, 1.0, -1.0)
        w = complex_apply(MoebiusTransform(h.d, -h.b, -h.c, h.a), z)
        t = log(abs(w))
        e = mpmath.exp(t / 2) if isinstance(t, mpmath.mpf) else math.exp(t / 2)
        return MoebiusTransform(h.a * e, h.b / e, h.c * e, h.d / e)


@dataclass(frozen=True)
class FlatState:
    chambers: tuple
    dps: int

    @property
    def rank(self):
        return len(self.chambers)

    def forward_endpoints(self):
        return tuple(c.forward for c in self.chambers)

    def letters(self):
        return tuple(c.side for c in self.chambers)


@dataclass(frozen=True)
class FirstReturn:
    t0: tuple
    next: FlatState
    letter: tuple


def working_dps(G, steps, margin=30):
    """Digits needed to follow ``steps`` returns without losing the orbit."""
    per_step = 0.0
    for f in G.factors:
        worst = 0.0
        for l in f.letters:
            h = f.branch(l)
            for k in f.letters:
                if k == -l:
                    continue
                for x in (f.disks[k].left, f.disks[k].right):
                    worst = max(worst, (h.c * x + h.d) ** 2)
        per_step = max(per_step, math.log10(worst))
    return int(margin + math.ceil(steps * per_step))


def _mpf(x):
    return INF if is_inf(x) else mpmath.mpf(x)


def _top_point(xm, xp):
    if is_inf(xp) or is_inf(xm):
        x = xm if is_inf(xp) else xp
        return mpmath.mpc(x, 1)
    return mpmath.mpc((xm + xp) / 2, abs(xp - xm) / 2)


def _time_param(xm, xp, z):
    """Arclength coordinate of ``z`` on the geodesic, up to an additive constant."""
    t = 0
    if not is_inf(xm):
        t = t + log(abs(z - xm))
    if not is_inf(xp):
        t = t - log(abs(z - xp))
    return t


def _crossing_point(xm, xp, disk, tol=TANGENCY_TOL):
    """Intersection of the geodesic with the boundary circle of ``disk``, or ``None``."""
    c, r = disk.center, disk.radius
    if is_inf(xm) or is_inf(xp):
        x = xm if is_inf(xp) else xp
        y2 = r * r - (x - c) ** 2
        scale = r * r
    else:
        m = (xm + xp) / 2
        R = abs(xp - xm) / 2
        if c == m:
            return None
        x = (m + c) / 2 + (R * R - r * r) / (2 * (c - m))
        y2 = R * R - (x - m) ** 2
        scale = min(R, r) ** 2
    if abs(y2) <= tol * scale:
        raise TangentCrossing(f"geodesic tangent to circle {disk.index}")
    if y2 < 0:
        return None
    return mpmath.mpc(x, sqrt(y2)) if isinstance(x, mpmath.mpf) else complex(x, math.sqrt(y2))


def _reduce(f, ch):
    """Pull the base point into the closure of the fundamental domain."""
    for _ in range(10000):
        z = ch.base
        for k in f.letters:
            d = f.disks[k]
            if abs(z - d.center) < d.radius * (1 - SECTION_TOL):
                g = f.generators[k]
                ch = FactorChamber(boundary_apply(g, ch.backward), boundary_apply(g, ch.forward),
                                   complex_apply(g, z), None)
                break
        else:
            return ch
    raise FlowError("base point reduction did not terminate")


def _next_crossing(f, ch):
    """Next circle crossed ahead of the base point: ``(gap, letter, point)`` or ``None``."""
    xm, xp = ch.backward, ch.forward
    t_here = _time_param(xm, xp, ch.base)
    best = None
    for k in f.letters:
        if k == ch.side:
            continue
        z = _crossing_point(xm, xp, f.disks[k])
        if z is None:
            continue
        gap = _time_param(xm, xp, z) - t_here
        if gap > 0 and (best is None or gap < best[0]):
            best = (gap, k, z)
    return best


def _pull_back(f, ch, k, z):
    g = f.generators[k]
    return FactorChamber(boundary_apply(g, ch.backward), boundary_apply(g, ch.forward),
                         complex_apply(g, z), -k)


def _in_section(f, ch, tol=SECTION_TOL):
    """Base on the circle ``s_k``, forward endpoint outside disk ``k``, backward inside."""
    k = ch.side
    if k is None:
        return False
    d = f.disks[k]
    on_circle = abs(abs(ch.base - d.center) - d.radius) <= tol * max(1, d.radius)
    fwd_out = is_inf(ch.forward) or abs(ch.forward - d.center) > d.radius
    bwd_in = not is_inf(ch.backward) and abs(ch.backward - d.center) < d.radius
    return on_circle and fwd_out and bwd_in and ch.base.imag > 0


def hyperbolic_distance(z, w):
    num = abs(z - w) ** 2
    return acosh(1 + num / (2 * z.imag * w.imag))


def chamber_from_endpoints(f, backward, forward, base=None):
    """Chamber on the geodesic ``backward -> forward`` reduced into the fundamental domain.

    Without ``base`` the top of the semicircle is used.  Works at the current
    ``mpmath`` precision.
    """
    xm, xp = _mpf(backward), _mpf(forward)
    if xm == xp:
        raise ValueError("geodesic endpoints must be distinct")
    z = _top_point(xm, xp) if base is None else mpmath.mpc(base)
    ch = _reduce(f, FactorChamber(xm, xp, z, None))
    # a base on a boundary circle counts as crossing it now, not in the future
    for k in f.letters:
        d = f.disks[k]
        if abs(abs(ch.base - d.center) - d.radius) <= SECTION_TOL * max(1, d.radius):
            if is_inf(ch.forward) or abs(ch.forward - d.center) > d.radius:
                return FactorChamber(ch.backward, ch.forward, ch.base, k)
            return _pull_back(f, ch, k, ch.base)
    return ch


def _enter_section(f, ch):
    """Flow a reduced chamber to its first crossing; returns ``(time, chamber in C)``."""
    nxt = _next_crossing(f, ch)
    if nxt is None:
        return None
    gap, k, z = nxt
    return gap, _pull_back(f, ch, k, z)


def _flat_entry(G, words, dps):
    if len(words) != G.rank:
        raise ValueError(f"need one word per factor ({G.rank}), got {len(words)}")
    chambers, entry, lengths = [], [], []
    with mpmath.workdps(dps):
        for j, (f, w) in enumerate(zip(G.factors, words)):
            w = w if isinstance(w, Word) else Word(tuple(w), True)
            g = word_isometry(f, w, high_precision=True)
            cl = classify_and_axis(g)
            assert cl.kind == "hyperbolic", f"word {w.letters} is not hyperbolic"
            ch = chamber_from_endpoints(f, *cl.fixed_points)
            hit = _enter_section(f, ch)
            if hit is None:
                raise NoFutureIntersection(j + 1)
            entry.append(hit[0])
            chambers.append(hit[1])
            lengths.append(cl.translation_length)
    return FlatState(tuple(chambers), dps), entry, lengths


def flat_from_words(G, words, dps=50):
    """Compact flat of the closed geodesics of ``words``, moved to its first section crossing."""
    return _flat_entry(G, words, dps)[0]


def factor_crossing_times(f, geodesic, horizon, base=None, dps=None):
    """Crossing times in ``(0, horizon]`` of the geodesic with the section, with letters.

    Times are measured from ``base`` (default: the top of the semicircle).
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if dps is None:
        dps = 30 + int(math.ceil(0.5 * horizon))
    out = []
    with mpmath.workdps(dps):
        ch = chamber_from_endpoints(f, geodesic[0], geodesic[1], base)
        t = mpmath.mpf(0)
        while True:
            nxt = _next_crossing(f, ch)
            if nxt is None:
                break
            gap, k, z = nxt
            t += gap
            if t > horizon:
                break
            out.append((float(t), k))
            ch = _pull_back(f, ch, k, z)
    return out


def first_return(G, state, horizon=None):
    """First return time vector, next section chamber and the multi-index crossed.

    The return time in each factor is the least future crossing time there;
    because the section is a product, the chamber reached at these times lies
    in the section again, which is checked explicitly.
    """
    if horizon is None:
        horizon = math.inf
    t0, nxt_chambers, letter = [], [], []
    with mpmath.workdps(state.dps):
        for j, (f, ch) in enumerate(zip(G.factors, state.chambers)):
            nxt = _next_crossing(f, ch)
            if nxt is None or nxt[0] > horizon:
                raise NoFutureIntersection(j + 1)
            gap, k, z = nxt
            new = _pull_back(f, ch, k, z)
            assert _in_section(f, new), "return chamber is not in the section"
            t0.append(gap)
            nxt_chambers.append(new)
            letter.append(k)
    assert all(t > 0 for t in t0)
    return FirstReturn(tuple(float(t) for t in t0), FlatState(tuple(nxt_chambers), state.dps), tuple(letter))


def simulate(G, state, steps, horizon=None):
    """Iterate ``first_return``; returns the list of records."""
    out = []
    for _ in range(steps):
        rec = first_return(G, state, horizon)
        out.append(rec)
        state = rec.next
    return out


@dataclass(frozen=True)
class C1C2Report:
    c1: bool
    entry_times: tuple
    periods: tuple
    gaps: tuple
    product_checks: int
    returns: int

    @property
    def passed(self):
        return self.c1 and (self.returns == 0 or all(g > 1e-6 for g in self.gaps))


def check_C1_C2(G, words, returns=10, dps=None):
    """Check that the compact flat of ``words`` meets the section, discretely.

    C1: every factor geodesic reaches the section within one period.  C2: the
    per-factor gaps between consecutive crossing times stay positive.
    """
    if dps is None:
        dps = working_dps(G, returns)
    state, entry, lengths = _flat_entry(G, words, dps)
    c1 = all(t <= L for t, L in zip(entry, lengths))
    gaps = [math.inf] * G.rank
    checks = 0
    for _ in range(returns):
        rec = first_return(G, state)
        gaps = [min(g, t) for g, t in zip(gaps, rec.t0)]
        checks += 1
        state = rec.next
    return C1C2Report(c1, tuple(float(t) for t in entry), tuple(float(L) for L in lengths),
                      tuple(gaps) if returns else (), checks, returns)


@dataclass(frozen=True)
class SemiconjugacyReport:
    max_deviation: float
    letters_agree: bool
    flow_letters: tuple
    map_letters: tuple
    deviations: tuple


def semiconjugacy_check(G, start, steps, depth=DEFAULT_DEPTH):
    """Compare forward endpoints after a return with the boundary map applied to them."""
    flow_letters, map_letters, devs = [], [], []
    state = start
    with mpmath.workdps(state.dps):
        for _ in range(steps):
            m, image = F_apply(G, state.forward_endpoints(), depth)
            rec = first_return(G, state)
            dev = max(chordal_distance(a, b) for a, b in zip(rec.next.forward_endpoints(), image))
            devs.append(to_float(dev))
            flow_letters.append(rec.letter)
            map_letters.append(m)
            state = rec.next
    return SemiconjugacyReport(max(devs, default=0.0), flow_letters == map_letters,
                               tuple(flow_letters), tuple(map_letters), tuple(devs))
