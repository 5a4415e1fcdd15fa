"""Classical Schottky factors built from real-centred disks, and their products.

A factor is determined by ``2q`` pairwise disjoint disks indexed by
``+-1, ..., +-q``.  The generator ``g_k`` maps the exterior of disk ``k`` onto
the interior of disk ``-k``; unless explicit matrices are supplied we use

    g_k(z) = c_{-k} + r_k r_{-k} / (c_k - z),

which pairs the two boundary circles exactly.
"""
from dataclasses import dataclass, field
from itertools import combinations
import math

import numpy as np

from .moebius import (
    IDENTITY,
    MoebiusTransform,
    boundary_apply,
    classify_and_axis,
    complex_apply,
    compose,
    inverse,
)

__all__ = [
    "Disk",
    "SchottkyFactor",
    "ProductGroup",
    "Word",
    "ValidationReport",
    "ClosedGeodesic",
    "SchottkyError",
    "OverlappingDisksError",
    "NonReducedWordError",
    "build_factor",
    "validate_factor",
    "word_isometry",
    "limit_cover",
    "interval_image",
    "enumerate_words",
    "reduced_word_array",
    "closed_geodesic",
    "canonical_generator",
]


class SchottkyError(ValueError):
    pass


class OverlappingDisksError(SchottkyError):
    def __init__(self, k, l, gap):
        self.pair = (k, l)
        self.gap = gap
        super().__init__(f"overlapping disks {k} and {l} (gap {gap:g})")


class NonReducedWordError(SchottkyError):
    pass


@dataclass(frozen=True)
class Disk:
    center: float
    radius: float
    index: int

    def __post_init__(self):
        if not self.radius > 0:
            raise SchottkyError(f"disk {self.index}: radius must be positive, got {self.radius!r}")
        if self.index == 0:
            raise SchottkyError("disk index must be nonzero")

    @property
    def left(self):
        return self.center - self.radius

    @property
    def right(self):
        return self.center + self.radius

    def contains(self, x):
        """Open-diameter membership for a real boundary point."""
        return abs(x - self.center) < self.radius


def canonical_generator(dk, dmk):
    """The pairing map ``z -> c_{-k} + r_k r_{-k} / (c_k - z)`` as a transform."""
    ck, cm = dk.center, dmk.center
    return MoebiusTransform(-cm, cm * ck + dk.radius * dmk.radius, -1.0, ck)


def _disk_gap(d1, d2):
    return abs(d1.center - d2.center) - d1.radius - d2.radius


@dataclass(frozen=True)
class SchottkyFactor:
    q: int
    disks: dict
    generators: dict = field(repr=False)

    @property
    def letters(self):
        """The alphabet ``(-q, ..., -1, 1, ..., q)`` in ascending order."""
        return tuple(range(-self.q, 0)) + tuple(range(1, self.q + 1))

    def disk(self, k):
        return self.disks[k]

    def generator(self, k):
        return self.generators[k]

    def branch(self, k):
        """Inverse branch ``g_k^{-1} = g_{-k}``, mapping into disk ``k``."""
        return self.generators[-k]

    def locate_letter(self, x):
        """Index of the disk whose open diameter contains ``x``, else ``None``."""
        for k in self.letters:
            if self.disks[k].contains(x):
                return k
        return None

    def min_gap(self):
        return min(_disk_gap(d1, d2) for d1, d2 in combinations(self.disks.values(), 2))

    def contraction_bound(self):
        """Largest derivative of any inverse branch on an admissible diameter."""
        worst = 0.0
        for l in self.letters:
            h = self.branch(l)
            for k in self.letters:
                if k == -l:
                    continue
                dk = self.disks[k]
                # |cx + d| is monotone on the diameter (pole outside), so ends suffice
                for x in (dk.left, dk.right):
                    worst = max(worst, 1 / (h.c * x + h.d) ** 2)
        return worst


@dataclass(frozen=True)
class ProductGroup:
    """Direct product of Schottky factors; rank ``r = len(factors)``."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 1:
            raise SchottkyError("a product group needs at least one factor")

    @property
    def rank(self):
        return len(self.factors)

    def alphabet(self):
        """All multi-indices in lexicographic order."""
        out = [()]
        for f in self.factors:
            out = [m + (k,) for m in out for k in f.letters]
        return out

    def __len__(self):
        return self.rank

    def __getitem__(self, j):
        return self.factors[j]


def build_factor(disk_list, generators=None, tol=1e-10):
    """Assemble and check a factor from its disks.

    ``generators`` optionally maps positive indices ``k`` to explicit matrices
    for ``g_k``; these are checked against the circle-pairing property.
    """
    disks = {}
    for d in disk_list:
        if d.index in disks:
            raise SchottkyError(f"duplicate disk index {d.index}")
        disks[d.index] = d
    q = len(disks) // 2
    if len(disks) % 2 or set(disks) != set(range(-q, 0)) | set(range(1, q + 1)):
        raise SchottkyError(f"disk indices must be exactly +-1..+-q, got {sorted(disks)}")
    for d1, d2 in combinations(disks.values(), 2):
        gap = _disk_gap(d1, d2)
        if not gap > 0:
            raise OverlappingDisksError(d1.index, d2.index, gap)
    gens = {}
    explicit = dict(generators or {})
    for k in range(1, q + 1):
        if k in explicit:
            g = explicit[k]
            if not isinstance(g, MoebiusTransform):
                g = MoebiusTransform.from_matrix(g)
            defect = _pairing_defect(g, disks[k], disks[-k], 16)
            if defect > tol or not disks[-k].contains(boundary_apply(g, math.inf)):
                raise SchottkyError(
                    f"generator {k} does not map the exterior of disk {k} "
                    f"onto the interior of disk {-k} (defect {defect:g})"
                )
        else:
            g = canonical_generator(disks[k], disks[-k])
        gens[k] = g
        gens[-k] = inverse(g)
    return SchottkyFactor(q, disks, gens)


def _pairing_defect(g, dk, dmk, samples):
    theta = 2 * np.pi * (np.arange(samples) + 0.5) / samples
    worst = 0.0
    for th in theta:
        z = complex(dk.center + dk.radius * np.cos(th), dk.radius * np.sin(th))
        w = complex_apply(g, z)
        worst = max(worst, abs(abs(w - dmk.center) - dmk.radius))
    return worst


@dataclass(frozen=True)
class ValidationReport:
    pairing_defect: float
    min_gap: float
    inverse_defect: float
    passed: bool

    def as_dict(self):
        return {
            "pairing_defect": self.pairing_defect,
            "min_gap": self.min_gap,
            "inverse_defect": self.inverse_defect,
            "passed": self.passed,
        }


def validate_factor(f, samples=64):
    """Numerical audit of a factor: circle pairing, disk gaps, inverse pairs."""
    pairing = max(_pairing_defect(f.generators[k], f.disks[k], f.disks[-k], samples) for k in f.letters)
    inv = 0.0
    for k in f.letters:
        prod = compose(f.generators[k], f.generators[-k])
        inv = max(inv, prod.max_distance(IDENTITY))
    gap = f.min_gap()
    passed = pairing <= 1e-10 and inv <= 1e-10 and gap > 0
    return ValidationReport(pairing, gap, inv, passed)


@dataclass(frozen=True)
class Word:
    letters: tuple
    cyclic: bool = False

    def __post_init__(self):
        letters = tuple(int(k) for k in self.letters)
        object.__setattr__(self, "letters", letters)
        if 0 in letters:
            raise NonReducedWordError(f"word {letters} contains the letter 0")
        for u, v in zip(letters, letters[1:]):
            if v == -u:
                raise NonReducedWordError(f"word {letters} is not reduced")
        if self.cyclic and len(letters) > 1 and letters[0] == -letters[-1]:
            raise NonReducedWordError(f"word {letters} is not cyclically reduced")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def rotate(self, n=1):
        n %= max(len(self.letters), 1)
        return Word(self.letters[n:] + self.letters[:n], self.cyclic)

    def inverse(self):
        return Word(tuple(-k for k in reversed(self.letters)), self.cyclic)


def _as_word(w, cyclic=False):
    return w if isinstance(w, Word) else Word(tuple(w), cyclic)


def word_isometry(f, w, high_precision=False):
    """The product ``g_{l_1} g_{l_2} ... g_{l_n}`` for ``w = (l_1, ..., l_n)``.

    With ``high_precision`` the product is accumulated in ``mpmath``.
    """
    w = _as_word(w)
    g = IDENTITY.promote() if high_precision else IDENTITY
    for k in w.letters:
        if k not in f.generators:
            raise SchottkyError(f"letter {k} not in alphabet of factor with q={f.q}")
        h = f.generators[k].promote() if high_precision else f.generators[k]
        g = compose(g, h)
    return g


def interval_image(g, lo, hi):
    """Image of ``[lo, hi]`` under ``g`` from its endpoint images.

    The pole ``-d/c`` must lie outside the interval.
    """
    if g.c != 0:
        pole = -g.d / g.c
        assert not (lo <= pole <= hi), "pole of inverse branch inside the interval"
    u, v = boundary_apply(g, lo), boundary_apply(g, hi)
    return (u, v) if u <= v else (v, u)


def limit_cover(f, depth):
    """Depth-``n`` cover of the limit set by the intervals ``Delta_w``.

    ``Delta_w`` for ``w = (l_1, ..., l_n)`` is the image of the diameter of
    disk ``l_n`` under ``g_{l_1}^{-1} o ... o g_{l_{n-1}}^{-1}``.  Returns a
    list of ``(Word, (left, right))`` in lexicographic word order.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    level = [((k,), (f.disks[k].left, f.disks[k].right)) for k in f.letters]
    for _ in range(depth - 1):
        nxt = []
        for w, (lo, hi) in level:
            # prepend letters: Delta_{l w} = g_l^{-1}(Delta_w) for l != -w[0]
            for l in f.letters:
                if l == -w[0]:
                    continue
                nxt.append(((l,) + w, interval_image(f.branch(l), lo, hi)))
        level = nxt
    level.sort(key=lambda item: item[0])
    return [(Word(w), iv) for w, iv in level]


def reduced_word_array(q, n, cyclic=False):
    """All reduced words of length ``n`` as an ``(count, n)`` integer array.

    Rows are in lexicographic order for the ascending alphabet.
    """
    letters = np.array(list(range(-q, 0)) + list(range(1, q + 1)), dtype=np.int64)
    words = letters[:, None]
    for _ in range(n - 1):
        last = words[:, -1]
        ext = np.repeat(words, len(letters), axis=0)
        nxt = np.tile(letters, len(words))
        keep = nxt != -np.repeat(last, len(letters))
        words = np.concatenate([ext[keep], nxt[keep][:, None]], axis=1)
    if cyclic and n > 1:
        words = words[words[:, 0] != -words[:, -1]]
    return words


def _is_lyndon(words):
    """Boolean mask of rows strictly smaller than each of their proper rotations."""
    n = words.shape[1]
    mask = np.ones(len(words), dtype=bool)
    for s in range(1, n):
        rot = np.roll(words, -s, axis=1)
        diff = words != rot
        has = diff.any(axis=1)
        first = diff.argmax(axis=1)
        idx = np.arange(len(words))
        smaller = words[idx, first] < rot[idx, first]
        mask &= has & smaller
    return mask


def enumerate_words(f, n, cyclic=False, up_to_rotation=False):
    """Reduced words of length ``n``; with ``cyclic`` only cyclically reduced ones.

    ``up_to_rotation`` keeps one primitive representative per rotation class
    (the lexicographically least rotation).
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    arr = reduced_word_array(f.q, n, cyclic)
    if up_to_rotation:
        arr = arr[_is_lyndon(arr)]
    return [Word(tuple(row), cyclic) for row in arr.tolist()]


@dataclass(frozen=True)
class ClosedGeodesic:
    axis_endpoints: tuple
    length: float


def closed_geodesic(f, w, high_precision=False):
    """Axis (repelling, attracting) and length of the closed geodesic of a cyclic word.

    For the canonical generators the attracting endpoint lies in disk ``-l_1``.
    """
    w = _as_word(w, cyclic=True)
    if not w.cyclic:
        w = Word(w.letters, True)
    if len(w) == 0:
        raise SchottkyError("closed geodesics need a nonempty word")
    g = word_isometry(f, w, high_precision)
    cl = classify_and_axis(g)
    assert cl.kind == "hyperbolic", f"word {w.letters} is not hyperbolic"
    return ClosedGeodesic(cl.fixed_points, cl.translation_length)
