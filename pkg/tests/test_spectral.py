import csv
import math
from pathlib import Path

import numpy as np
import pytest

from schottky_weyl.fixtures import four_disk_factor, four_disk_product
from schottky_weyl.schottky import Disk, build_factor, reduced_word_array
from schottky_weyl.spectral import (
    ComplexWindow,
    GridTooLarge,
    ScanGrid,
    bowen_collocation,
    bowen_cover,
    bowen_dimension,
    cover_transition_matrix,
    euler_zeta,
    euler_zeta_words,
    primitive_lengths,
    product_det_scan,
    rotation_classes,
    zero_scan,
)
from schottky_weyl.transfer import assemble_factor_operator, chebyshev_basis, fredholm_det

GOLDEN = Path(__file__).resolve().parents[1] / "golden" / "bowen_four_disk.csv"


@pytest.fixture(scope="module")
def bowen(F):
    return bowen_dimension(F, tol=1e-7)


def det(f, s, N=24, rho=1.0):
    return fredholm_det(assemble_factor_operator(f, s, chebyshev_basis(f, N, rho))).value


def test_scan_grid():
    assert np.array_equal(ScanGrid(0, 1, 3).points(), [0, 0.5, 1])
    assert ScanGrid(0.2, 1, 1).points().tolist() == [0.2]
    with pytest.raises(ValueError):
        ScanGrid(0, 1, 0)
    with pytest.raises(ValueError):
        ScanGrid(1, 1, 3)
    with pytest.raises(ValueError):
        ComplexWindow(0, 1, 2, 1)


def test_bowen_dual_oracle(F, bowen):
    assert 0 < bowen.delta < 1
    assert abs(bowen.eigenvalue_at_delta - 1) <= 1e-7
    assert bowen.agreement <= 1e-6
    assert abs(bowen.det_at_delta) <= 1e-8


def test_bowen_matches_golden(bowen):
    lines = [l for l in GOLDEN.read_text().splitlines() if not l.startswith("#")]
    row = next(csv.DictReader(lines))
    assert abs(float(row["delta"]) - bowen.delta) <= 1e-12
    assert abs(float(row["delta_cover"]) - bowen.delta_cover) <= 1e-12
    assert GOLDEN.read_text().startswith("# generated by: schottky-weyl")


def test_cover_oracle_converges(F, bowen):
    d6 = bowen_cover(F, 6)
    d8 = bowen_cover(F, 8)
    assert abs(d8 - bowen.delta) < abs(d6 - bowen.delta) or abs(d8 - bowen.delta) < 1e-13
    A = cover_transition_matrix(F, 0.0, 3)
    assert A.shape == (36, 36)
    assert np.all(np.asarray(A.sum(axis=1)).ravel() == 3)


def test_bowen_shrinks_with_radii(bowen):
    half = four_disk_factor(0.5)
    assert bowen_collocation(half) < bowen.delta
    assert bowen_cover(half, 8) < bowen.delta


def test_bowen_needs_q2():
    f = build_factor([Disk(-2, 1, 1), Disk(2, 1, -1)])
    with pytest.raises(ValueError):
        bowen_dimension(f)


@pytest.mark.parametrize("s", [0.8, 1.0, 1.2, 1.5])
def test_euler_matches_det(F, s):
    z = euler_zeta(F, s, 12, 30)
    assert abs(z.value - det(F, s)) <= 1e-6
    assert z.tail_estimate < 1e-9


def test_euler_complex_and_limit(F):
    s = 1.2 + 0.7j
    assert abs(euler_zeta(F, s).value - det(F, s)) <= 1e-6
    assert abs(euler_zeta(F, 40.0).value - 1) <= 1e-15


def test_primitive_classes(F):
    for n in range(1, 7):
        words, lengths = primitive_lengths(F, n)
        cyc = reduced_word_array(2, n, cyclic=True).tolist()
        assert [tuple(w) for w in words.tolist()] == rotation_classes(cyc)[:len(words)] or \
            sorted(map(tuple, words.tolist())) == sorted(w for w in rotation_classes(cyc) if len(w) == n)
    # two routes to the lengths: vectorised traces and closed_geodesic
    from schottky_weyl.schottky import closed_geodesic

    words, lengths = primitive_lengths(F, 5)
    for w, L in zip(words.tolist()[:40], lengths[:40]):
        assert L == pytest.approx(closed_geodesic(F, tuple(w)).length, rel=1e-12)


def test_rotation_deduplication(F):
    words = [tuple(w) for n in range(1, 5) for w in reduced_word_array(2, n, cyclic=True).tolist()]
    s = 1.1
    ref = euler_zeta(F, s, 4, 30).value
    assert euler_zeta_words(F, s, words) == pytest.approx(ref, rel=1e-13)
    doubled = words + [w[1:] + w[:1] for w in words]
    assert euler_zeta_words(F, s, doubled) == euler_zeta_words(F, s, words)
    assert len(rotation_classes(words)) == sum(len(primitive_lengths(F, n)[0]) for n in range(1, 5))
    assert len(rotation_classes(doubled)) == len(rotation_classes(words))


def test_zero_scan_real(F, bowen):
    b24 = chebyshev_basis(F, 24)
    zeros = zero_scan(F, ScanGrid(0, 1, 21), b24)
    assert all(z.residual <= 1e-8 and z.degree == 24 for z in zeros)
    largest = max(z.location.real for z in zeros)
    assert abs(largest - bowen.delta) <= 1e-6
    for basis in (chebyshev_basis(F, 32), chebyshev_basis(F, 24, 0.95)):
        other = zero_scan(F, ScanGrid(0, 1, 21), basis)
        assert len(other) == len(zeros)
        assert max(abs(a.location - b.location) for a, b in zip(zeros, other)) <= 1e-8


def test_zero_scan_empty(F):
    b = chebyshev_basis(F, 16)
    assert zero_scan(F, ScanGrid(0.5, 1.5, 11), b) == []
    assert zero_scan(F, ComplexWindow(0.5, 1.5, 0.5, 1.5, 8), b) == []


def test_zero_scan_complex(F):
    win = ComplexWindow(0.0, 0.35, 2.0, 2.5, 16)
    z24 = zero_scan(F, win, chebyshev_basis(F, 24))
    z32 = zero_scan(F, win, chebyshev_basis(F, 32))
    assert len(z24) == 2
    for a, b in zip(z24, z32):
        assert abs(a.location - b.location) <= 1e-8
        assert a.residual <= 1e-8
        assert abs(det(F, a.location)) <= 1e-8


def test_product_scan_vanishes_at_bowen_point(F2, bowen):
    d = bowen.delta
    bases = [chebyshev_basis(f, 8) for f in F2.factors]
    grid = ScanGrid(d - 5e-4, d + 5e-4, 11)
    table = product_det_scan(F2, [grid, grid], bases, diagonal=True)
    dets = table.column("det").real
    sign = np.flatnonzero(np.sign(dets[:-1]) != np.sign(dets[1:]))
    assert len(sign) == 1
    i = sign[0]
    root = grid.points()[i] - dets[i] * grid.step / (dets[i + 1] - dets[i])
    assert abs(root - d) <= 1e-4
    assert len(table.dense_checks) >= 3
    assert all(c[3] <= 1e-9 for c in table.dense_checks)


def test_product_scan_large_parameter(F2):
    bases = [chebyshev_basis(f, 4) for f in F2.factors]
    t = product_det_scan(F2, [ScanGrid(0.7, 0.8, 2), ScanGrid(30, 60, 2)], bases)
    assert all(abs(r.det - 1) < 1e-10 for r in t.rows if r.s[1] == 60)
    assert len(t.rows) == 4


def test_product_scan_guards(F, F1, F2):
    bases = [chebyshev_basis(f, 4) for f in F2.factors]
    with pytest.raises(GridTooLarge):
        product_det_scan(F2, [ScanGrid(0, 1, 1000)] * 2, bases, max_points=10_000)
    with pytest.raises(GridTooLarge):
        product_det_scan(F2, [ScanGrid(0, 1, 2)] * 2, [chebyshev_basis(F, 20)] * 2)
    with pytest.raises(ValueError):
        product_det_scan(F1, [ScanGrid(0, 1, 2)], bases[:1])
