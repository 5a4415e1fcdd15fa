import math
import random

import mpmath
import numpy as np
import pytest

from schottky_weyl.coding import orbit_code
from schottky_weyl.fixtures import four_disk_factor, four_disk_product
from schottky_weyl.flow import (
    FlatState,
    NoFutureIntersection,
    TangentCrossing,
    chamber_from_endpoints,
    check_C1_C2,
    factor_crossing_times,
    first_return,
    flat_from_words,
    hyperbolic_distance,
    semiconjugacy_check,
    simulate,
    working_dps,
)
from schottky_weyl.moebius import classify_and_axis, complex_apply
from schottky_weyl.schottky import closed_geodesic, word_isometry

L1 = 2 * math.acosh(2)
L12 = 2 * math.acosh(25)
SQ3 = math.sqrt(3)


def is_rotation(a, b):
    a, b = list(a), list(b)
    return len(a) == len(b) and any(a[i:] + a[:i] == b for i in range(len(a)))


def test_flat_from_words_single_letters(F2):
    st = flat_from_words(F2, ((1,), (1,)))
    f = F2.factors[0]
    for ch in st.chambers:
        # the state sits in the section: base on the circle of its side
        d = f.disks[ch.side]
        assert abs(abs(ch.base - d.center) - d.radius) < 1e-30
        assert ch.base.imag > 0


def test_flat_axis_endpoints_before_entry(F2):
    f = F2.factors[0]
    cl = classify_and_axis(word_isometry(f, (1,)))
    assert cl.repelling == pytest.approx(-4 - SQ3, abs=1e-14)
    assert cl.attracting == pytest.approx(-4 + SQ3, abs=1e-14)
    st = flat_from_words(F2, ((1,), (1,)))
    # g_1 fixes both endpoints, so pulling back along the axis keeps them
    for ch in st.chambers:
        assert float(ch.backward) == pytest.approx(-4 - SQ3, abs=1e-14)
        assert float(ch.forward) == pytest.approx(-4 + SQ3, abs=1e-14)


def test_factor_lengths(F2):
    rep = check_C1_C2(F2, ((1,), (1, 2)), returns=0)
    assert rep.periods == pytest.approx((L1, L12), rel=1e-12)
    assert rep.c1 and rep.gaps == ()


def test_rotated_words_same_flat(F1):
    a = [r.t0[0] for r in simulate(F1, flat_from_words(F1, ((1, 2),)), 6)]
    b = [r.t0[0] for r in simulate(F1, flat_from_words(F1, ((2, 1),)), 6)]
    assert is_rotation([round(t, 9) for t in a[:2]], [round(t, 9) for t in b[:2]])
    assert sum(a[:2]) == pytest.approx(sum(b[:2]), rel=1e-12)


def test_crossing_gaps_on_axis(F):
    times = factor_crossing_times(F, (-4 - SQ3, -4 + SQ3), 30)
    gaps = [b[0] - a[0] for a, b in zip(times, times[1:])]
    assert len(gaps) >= 9
    assert all(abs(g - L1) < 1e-9 for g in gaps)
    assert {k for _, k in times} == {-1}


def test_non_limit_geodesic(F):
    assert factor_crossing_times(F, (0.5, 0.7), 100) == []
    t = factor_crossing_times(F, (0.5, -6.3), 100)
    assert 0 < len(t) < 10
    assert t == factor_crossing_times(F, (0.5, -6.3), 1000)


def _point_on(xm, xp, frac):
    c, r = (xm + xp) / 2, abs(xp - xm) / 2
    th = math.pi * (1 - frac) if xp > xm else math.pi * frac
    return complex(c + r * math.cos(th), r * math.sin(th))


def test_reversal_symmetry(F):
    # -6.3 is inside disk 1 but not a limit point: finitely many crossings in total
    xm, xp = 0.5, -6.3
    fwd = factor_crossing_times(F, (xm, xp), 100, base=_point_on(xm, xp, 1e-9))
    bwd = factor_crossing_times(F, (xp, xm), 100, base=_point_on(xm, xp, 1 - 1e-9))
    assert len(fwd) >= 2
    assert [k for _, k in bwd] == [-k for _, k in reversed(fwd)]
    total = fwd[-1][0] - fwd[0][0]
    assert bwd[-1][0] - bwd[0][0] == pytest.approx(total, rel=1e-10)


def test_tangent_crossing(F):
    # the circle of radius 2 about -1 touches |z + 2| = 1 from inside at z = -3
    with pytest.raises(TangentCrossing):
        factor_crossing_times(F, (-3.0, 1.0), 10, base=complex(-1, 2))


def test_first_return_constant_period(F2):
    st = flat_from_words(F2, ((1,), (1,)), dps=60)
    for rec in simulate(F2, st, 10):
        assert rec.t0 == pytest.approx((L1, L1), abs=1e-12)
        assert rec.letter == (-1, -1)


def test_first_return_mixed_words(F2):
    words = ((1,), (1, 2))
    dps = working_dps(F2, 12)
    recs = simulate(F2, flat_from_words(F2, words, dps), 12)
    t1 = [r.t0[0] for r in recs]
    t2 = [r.t0[1] for r in recs]
    assert all(abs(t - L1) < 1e-9 for t in t1)
    # second factor alternates between the two crossing gaps of its axis
    assert all(abs(a - b) < 1e-9 for a, b in zip(t2, t2[2:]))
    assert abs(t2[0] - t2[1]) > 1e-3
    assert t2[0] + t2[1] == pytest.approx(L12, abs=1e-8)
    # independent cross-check against factor crossing times along the same geodesic
    f = F2.factors[1]
    with mpmath.workdps(60):
        cg = closed_geodesic(f, (1, 2), high_precision=True)
        times = factor_crossing_times(f, cg.axis_endpoints, 4 * L12, dps=60)
    gaps = [b[0] - a[0] for a, b in zip(times, times[1:])]
    assert len(gaps) >= 6
    assert all(min(abs(g - t2[0]), abs(g - t2[1])) < 1e-9 for g in gaps)


def test_no_future_intersection(F1):
    f = F1.factors[0]
    with mpmath.workdps(50):
        ch = chamber_from_endpoints(f, -6.3, 0.5)
    st = FlatState((ch,), 50)
    with pytest.raises(NoFutureIntersection) as exc:
        for _ in range(20):
            st = first_return(F1, st).next
    assert exc.value.factor == 1


def test_c1_c2_examples(F2):
    rep = check_C1_C2(F2, ((1,), (1,)), returns=10)
    assert rep.passed and rep.c1
    assert rep.gaps == pytest.approx((L1, L1), rel=1e-12)
    rep = check_C1_C2(F2, ((1, 2), (2, 1)), returns=10)
    assert rep.passed and min(rep.gaps) > 0
    rep = check_C1_C2(F2, ((1,), (1,)), returns=0)
    assert rep.c1 and rep.returns == 0 and rep.passed


def test_semiconjugacy_examples(F2):
    st = flat_from_words(F2, ((1,), (1,)), working_dps(F2, 10))
    rep = semiconjugacy_check(F2, st, 10)
    assert rep.max_deviation <= 1e-8 and rep.letters_agree
    st = flat_from_words(F2, ((1, 2), (1, 2)), working_dps(F2, 12))
    rep = semiconjugacy_check(F2, st, 12)
    assert rep.letters_agree and rep.max_deviation <= 1e-8
    f = F2.factors[0]
    with mpmath.workdps(80):
        x = classify_and_axis(word_isometry(f, (1, 2), True)).attracting
        code = [m[0] for m in orbit_code(four_disk_product(1), (x,), 12)]
    for j in range(2):
        flow = [m[j] for m in rep.flow_letters]
        assert is_rotation(flow[:2], code[:2])
        assert all(flow[i] == flow[i + 2] for i in range(10))


def test_rank_one_semiconjugacy(F1):
    st = flat_from_words(F1, ((1, -2, -2),), working_dps(F1, 9))
    rep = semiconjugacy_check(F1, st, 9)
    assert rep.letters_agree and rep.max_deviation <= 1e-8


def _random_cyclic(rng, n):
    while True:
        w = [rng.choice([-2, -1, 1, 2])]
        while len(w) < n:
            k = rng.choice([-2, -1, 1, 2])
            if k != -w[-1]:
                w.append(k)
        if n == 1 or w[0] != -w[-1]:
            return tuple(w)


def test_unit_speed_and_period_length(F2):
    rng = random.Random(7)
    for _ in range(5):
        words = tuple(_random_cyclic(rng, rng.randint(1, 3)) for _ in range(2))
        steps = 2 * 3 * 2
        dps = working_dps(F2, steps)
        st = flat_from_words(F2, words, dps)
        recs = []
        with mpmath.workdps(dps):
            for _ in range(steps):
                rec = first_return(F2, st)
                for j, f in enumerate(F2.factors):
                    z = complex_apply(f.generators[rec.letter[j]], st.chambers[j].base)
                    assert float(hyperbolic_distance(z, rec.next.chambers[j].base)) == \
                        pytest.approx(rec.t0[j], abs=1e-9)
                recs.append(rec)
                st = rec.next
        for j, (f, w) in enumerate(zip(F2.factors, words)):
            L = closed_geodesic(f, w).length
            # one period of the code walks once around the closed geodesic
            assert sum(r.t0[j] for r in recs[:len(w)]) == pytest.approx(L, abs=1e-8)


def test_crossing_times_from_section_base(F2):
    # a base already on a section circle must not count as a crossing
    dps = working_dps(F2, 10)
    st = flat_from_words(F2, ((1, -2), (-2, 1, -2, -1)), dps)
    acc = np.cumsum([r.t0 for r in simulate(F2, st, 10)], axis=0)
    for j, f in enumerate(F2.factors):
        with mpmath.workdps(dps):
            ch = st.chambers[j]
            times = factor_crossing_times(f, (ch.backward, ch.forward), acc[-1, j] + 0.5, base=ch.base, dps=dps)
        assert np.allclose([t for t, _ in times], acc[:, j], atol=1e-9, rtol=0)
