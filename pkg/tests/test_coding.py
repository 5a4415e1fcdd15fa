import math
import random

from hypothesis import given, settings, strategies as st
import mpmath
import pytest

from schottky_weyl.coding import (
    CodeTerminated,
    NotInCover,
    OutsideAllDisks,
    F_apply,
    exclusion_set,
    limit_point,
    locate,
    orbit_code,
    preimages,
)
from schottky_weyl.fixtures import four_disk_factor, four_disk_product
from schottky_weyl.moebius import boundary_apply, classify_and_axis
from schottky_weyl.schottky import word_isometry

LETTERS = [-2, -1, 1, 2]
ATTR1 = -4 + math.sqrt(3)


def random_word(rng, n):
    w = [rng.choice(LETTERS)]
    while len(w) < n:
        k = rng.choice(LETTERS)
        if k != -w[-1]:
            w.append(k)
    return w


words = st.integers(0, 2**32 - 1).map(lambda seed: random_word(random.Random(seed), 30))


def test_locate_examples(F2):
    assert locate(F2, (-6.25, 2.5), depth=0) == (1, 2)
    with pytest.raises(OutsideAllDisks) as exc:
        locate(F2, (0, 0))
    assert exc.value.factor == 1
    with pytest.raises(OutsideAllDisks) as exc:
        locate(F2, (-6.25, 4.0), depth=0)
    assert exc.value.factor == 2
    assert locate(F2, (ATTR1, ATTR1), depth=40) == (-1, -1)
    # points on a boundary circle are not coded
    with pytest.raises(OutsideAllDisks):
        locate(F2, (-5.0, -5.0), depth=0)


def test_locate_rejects_non_limit_points(F2):
    with pytest.raises(NotInCover) as exc:
        locate(F2, (-6.25, 2.5))
    assert exc.value.factor == 1


def test_F_apply_examples(F1, F2):
    m, y = F_apply(F1, (ATTR1,))
    assert m == (-1,) and y[0] == pytest.approx(ATTR1, abs=1e-14)
    m, y = F_apply(F1, (-6.2,), depth=0)
    assert m == (1,) and y[0] == pytest.approx(3.0, abs=1e-12)
    # (2 x + 13) / (-x - 6) at x = -6.2, by hand
    assert (2 * -6.2 + 13) / (6.2 - 6) == pytest.approx(3.0, abs=1e-12)
    m, y = F_apply(F2, (-6.2, -6.2), depth=0)
    assert m == (1, 1) and y == pytest.approx((3.0, 3.0), abs=1e-12)


def test_exclusion_set(F1, F2):
    assert exclusion_set(F1, (1,)) == {(-1,)}
    B = exclusion_set(F2, (1, 2))
    brute = {(a, b) for a in LETTERS for b in LETTERS if a == -1 or b == -2}
    assert B == brute and len(B) == 7
    assert len(set(F2.alphabet()) - B) == 9


def test_preimage_counts(F, F1, F2):
    rng = random.Random(5)
    for _ in range(20):
        x = limit_point(F, random_word(rng, 30))
        y = limit_point(F, random_word(rng, 30))
        assert len(preimages(F1, (x,))) == 3
        assert len(preimages(F2, (x, y))) == 9


@settings(max_examples=200, deadline=None)
@given(words, words)
def test_preimage_round_trip(w1, w2):
    G = four_disk_product(2)
    f = G.factors[0]
    x = (limit_point(f, w1), limit_point(f, w2))
    m, Fx = F_apply(G, x)
    assert m == (w1[0], w2[0])
    back = dict(preimages(G, Fx, depth=8))
    assert max(abs(a - b) for a, b in zip(back[m], x)) <= 1e-10
    for n, y in preimages(G, x, depth=8):
        mm, z = F_apply(G, y, depth=8)
        assert mm == n
        assert max(abs(a - b) for a, b in zip(z, x)) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(words, words)
def test_product_is_componentwise(w1, w2):
    G = four_disk_product(2)
    G1 = four_disk_product(1)
    f = G.factors[0]
    x = (limit_point(f, w1), limit_point(f, w2))
    m, y = F_apply(G, x)
    m1, y1 = F_apply(G1, x[:1])
    m2, y2 = F_apply(G1, x[1:])
    assert m == m1 + m2 and y == y1 + y2


def _orbit_letters(G, w, steps, depth, dps):
    f = G.factors[0]
    with mpmath.workdps(dps):
        x = limit_point(f, w, dps=dps)
        return [m[0] for m in orbit_code(G, (x,), steps, depth)]


def test_admissibility_500_starts(F1):
    rng = random.Random(11)
    steps = 50
    dps = 30 + 2 * steps
    for i in range(500):
        w = random_word(rng, steps + 20)
        code = _orbit_letters(F1, w, steps, 2, dps)
        assert all(b != -a for a, b in zip(code, code[1:]))
        assert code == w[:steps]


def test_admissibility_default_depth(F1):
    rng = random.Random(12)
    for _ in range(30):
        w = random_word(rng, 70)
        code = _orbit_letters(F1, w, 50, 12, 140)
        assert code == w[:50]


def test_orbit_code_examples(F1):
    with mpmath.workdps(60):
        code = orbit_code(F1, (-4 + mpmath.sqrt(3),), 20)
    assert code == [(-1,)] * 20
    with mpmath.workdps(80):
        g = word_isometry(F1.factors[0], (1, 2), high_precision=True)
        x = classify_and_axis(g).attracting
        code = [m[0] for m in orbit_code(F1, (x,), 30)]
    assert code == [-1, -2] * 15


def test_product_codes_componentwise(F1, F2):
    rng = random.Random(3)
    f = F2.factors[0]
    with mpmath.workdps(80):
        w1, w2 = random_word(rng, 40), random_word(rng, 40)
        x = (limit_point(f, w1, 80), limit_point(f, w2, 80))
        code = orbit_code(F2, x, 20)
        c1 = orbit_code(F1, x[:1], 20)
        c2 = orbit_code(F1, x[1:], 20)
    assert code == [a + b for a, b in zip(c1, c2)]


def test_float_orbit_terminates(F1):
    # forward iteration expands roundoff; in double precision the code stops early
    with pytest.raises(CodeTerminated) as exc:
        orbit_code(F1, (limit_point(F1.factors[0], [1, 2] * 30),), 40)
    assert exc.value.step < 40 and exc.value.factor == 1


cyclic = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.sampled_from(LETTERS), min_size=n, max_size=n)
).filter(lambda w: all(b != -a for a, b in zip(w, w[1:])) and (len(w) == 1 or w[0] != -w[-1]))


@settings(max_examples=150, deadline=None)
@given(cyclic)
def test_fixed_point_codes_periodic(w):
    f = four_disk_factor()
    G = four_disk_product(1)
    n = len(w)
    with mpmath.workdps(30 + 2 * 4 * n):
        g = word_isometry(f, tuple(w), high_precision=True)
        x = classify_and_axis(g).attracting
        code = [m[0] for m in orbit_code(G, (x,), 4 * n, depth=6)]
    # brute-force: the period is |w| and the code reads the inverse letters
    assert code[:n] == [-k for k in w]
    assert all(code[i] == code[i + n] for i in range(3 * n))
