"""Spectral quantities derived from the transfer operators.

* ``bowen_dimension``: the real ``delta`` with leading eigenvalue 1, solved on
  the collocation operator and, independently, on a weighted transition
  matrix over a fine limit-set cover.
* ``euler_zeta``: Selberg zeta as an Euler product over primitive closed
  geodesics; it must agree with ``det(I - M_s)``.
* ``zero_scan`` / ``product_det_scan``: zeros of the finite-section
  determinant in one parameter, and determinant tables over real slices of the
  multi-parameter family.
"""
from dataclasses import dataclass
from functools import lru_cache
import logging
import math

import numpy as np
import scipy.optimize
import scipy.sparse

from .schottky import ProductGroup, _is_lyndon, closed_geodesic, reduced_word_array
from .transfer import (
    ConvergenceError,
    assemble_factor_operator,
    assemble_product_operator,
    chebyshev_basis,
    fredholm_det,
    leading_eigenvalue,
)

__all__ = [
    "ScanGrid",
    "ComplexWindow",
    "ZeroRecord",
    "BowenResult",
    "ZetaResult",
    "ProductScanRow",
    "ProductScan",
    "GridTooLarge",
    "bowen_dimension",
    "bowen_collocation",
    "bowen_cover",
    "cover_transition_matrix",
    "primitive_lengths",
    "euler_zeta",
    "euler_zeta_words",
    "rotation_classes",
    "zero_scan",
    "winding_number",
    "product_det_scan",
]

log = logging.getLogger(__name__)


GRID_ZERO_TOL = 1e-12


class GridTooLarge(MemoryError):
    pass


@dataclass(frozen=True)
class ScanGrid:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid needs at least one point")
        if not self.start < self.stop:
            raise ValueError("grid start must be below stop")

    def points(self):
        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)

    @property
    def step(self):
        return (self.stop - self.start) / max(self.count - 1, 1)


@dataclass(frozen=True)
class ComplexWindow:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    resolution: int = 32

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("empty complex window")


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    residual: float
    degree: int
    iterations: int


# --------------------------------------------------------------------- Bowen


def _det_at(f, s, basis):
    return fredholm_det(assemble_factor_operator(f, s, basis)).value


def _bracket_unit(func, lo=0.0, hi=1.0):
    """Expand ``hi`` until ``func`` changes sign on ``[lo, hi]``."""
    flo = func(lo)
    if not flo > 0:
        raise ValueError("leading eigenvalue at s=0 must exceed 1 (is q >= 2?)")
    for _ in range(60):
        if func(hi) < 0:
            return lo, hi
        lo, hi = hi, 2 * hi
    raise ValueError("could not bracket the Bowen parameter")


def bowen_collocation(f, degree=24, rho=1.0):
    """Root of ``lambda(s) = 1`` for the collocation operator."""
    if f.q < 2:
        raise ValueError("dimension routines need q >= 2")
    basis = chebyshev_basis(f, degree, rho)
    func = lambda s: leading_eigenvalue(f, s, basis) - 1.0  # noqa: E731
    lo, hi = _bracket_unit(func)
    return scipy.optimize.brentq(func, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _cover_intervals(f, depth):
    """Words of length ``depth`` (reduced) with their cover intervals, vectorised."""
    letters = np.array(f.letters)
    words = letters[:, None]
    lo = np.array([f.disks[k].left for k in f.letters])
    hi = np.array([f.disks[k].right for k in f.letters])
    for _ in range(depth - 1):
        new_w, new_lo, new_hi = [], [], []
        for l in f.letters:
            keep = words[:, 0] != -l
            h = f.branch(l)
            u = (h.a * lo[keep] + h.b) / (h.c * lo[keep] + h.d)
            v = (h.a * hi[keep] + h.b) / (h.c * hi[keep] + h.d)
            new_w.append(np.concatenate([np.full((keep.sum(), 1), l), words[keep]], axis=1))
            new_lo.append(np.minimum(u, v))
            new_hi.append(np.maximum(u, v))
        words = np.concatenate(new_w)
        lo = np.concatenate(new_lo)
        hi = np.concatenate(new_hi)
    return words, lo, hi


def _encode(words, q):
    code = np.zeros(len(words), dtype=np.int64)
    for col in words.T:
        code = code * (2 * q + 1) + (col + q)
    return code


@lru_cache(maxsize=8)
def _cover_structure(f_key, depth):
    f = _FACTORS[f_key]
    words, lo, hi = _cover_intervals(f, depth)
    mid = 0.5 * (lo + hi)
    codes = _encode(words, f.q)
    order = np.argsort(codes)
    rows, cols, letters_used = [], [], []
    for l in f.letters:
        keep = np.flatnonzero(words[:, 0] != -l)
        target = np.concatenate([np.full((len(keep), 1), l), words[keep, :-1]], axis=1)
        tcode = _encode(target, f.q)
        pos = order[np.searchsorted(codes, tcode, sorter=order)]
        rows.append(keep)
        cols.append(pos)
        letters_used.append(np.full(len(keep), l))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    lets = np.concatenate(letters_used)
    x = mid[rows]
    deriv = np.empty(len(rows))
    for l in f.letters:
        sel = lets == l
        h = f.branch(l)
        deriv[sel] = 1.0 / (h.c * x[sel] + h.d) ** 2
    return rows, cols, np.log(deriv), len(words)


_FACTORS = {}


def _factor_key(f):
    key = tuple((k, d.center, d.radius, f.generators[k].as_tuple()) for k, d in sorted(f.disks.items()))
    _FACTORS[key] = f
    return key


def cover_transition_matrix(f, s, depth):
    """Sparse weighted transition matrix over the depth-``n`` cover.

    Row ``v`` (a word of length ``n``) has an entry in column
    ``(l, v_1, ..., v_{n-1})`` for each admissible ``l``, weighted by the
    ``s``-th power of the derivative of the inverse branch ``l`` at the
    midpoint of the interval of ``v``.
    """
    rows, cols, logd, n = _cover_structure(_factor_key(f), depth)
    return scipy.sparse.csr_matrix((np.exp(s * logd), (rows, cols)), shape=(n, n))


def _sparse_radius(A, tol=1e-14, maxiter=10000):
    v = np.ones(A.shape[0])
    lam = 0.0
    for _ in range(maxiter):
        w = A @ v
        new = np.linalg.norm(w) / np.linalg.norm(v)
        v = w / np.linalg.norm(w)
        if abs(new - lam) <= tol * new:
            return new
        lam = new
    raise ConvergenceError("cover power iteration did not converge")


def bowen_cover(f, depth=10):
    """Root of ``spectral radius = 1`` for the cover transition matrix."""
    if f.q < 2:
        raise ValueError("dimension routines need q >= 2")
    func = lambda s: _sparse_radius(cover_transition_matrix(f, s, depth)) - 1.0  # noqa: E731
    lo, hi = _bracket_unit(func)
    return scipy.optimize.brentq(func, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class BowenResult:
    delta: float
    delta_cover: float
    eigenvalue_at_delta: float
    det_at_delta: float
    degree: int
    cover_depth: int

    @property
    def agreement(self):
        return abs(self.delta - self.delta_cover)


def bowen_dimension(f, tol=1e-7, degree=24, cover_depth=10):
    """Bowen parameter from two independent oracles, checked against each other.

    Raises ``ConvergenceError`` if ``|lambda(delta) - 1| > tol`` or if the
    cover oracle disagrees by more than ``10 tol``.
    """
    delta = bowen_collocation(f, degree)
    basis = chebyshev_basis(f, degree)
    lam = leading_eigenvalue(f, delta, basis)
    if abs(lam - 1) > tol:
        raise ConvergenceError(f"|lambda(delta) - 1| = {abs(lam - 1):g} exceeds {tol:g}")
    delta_cover = bowen_cover(f, cover_depth)
    det = _det_at(f, delta, basis).real
    res = BowenResult(delta, delta_cover, lam, det, degree, cover_depth)
    if res.agreement > 10 * tol:
        raise ConvergenceError(f"Bowen oracles disagree by {res.agreement:g}")
    return res


# ---------------------------------------------------------------------- zeta


@lru_cache(maxsize=16)
def _primitive_lengths_cached(f_key, n):
    f = _FACTORS[f_key]
    words = reduced_word_array(f.q, n, cyclic=True)
    if n > 1:
        words = words[_is_lyndon(words)]
    gens = {k: f.generators[k] for k in f.letters}
    a = np.ones(len(words))
    b = np.zeros(len(words))
    c = np.zeros(len(words))
    d = np.ones(len(words))
    for col in words.T:
        ga = np.array([gens[k].a for k in col])
        gb = np.array([gens[k].b for k in col])
        gc = np.array([gens[k].c for k in col])
        gd = np.array([gens[k].d for k in col])
        a, b, c, d = a * ga + b * gc, a * gb + b * gd, c * ga + d * gc, c * gb + d * gd
    tr = np.abs(a + d)
    return words, 2 * np.arccosh(tr / 2)


def primitive_lengths(f, n):
    """Primitive cyclically reduced words of length ``n`` (one per rotation class) and their lengths."""
    return _primitive_lengths_cached(_factor_key(f), n)


@dataclass(frozen=True)
class ZetaResult:
    value: complex
    log: complex
    tail_estimate: float
    classes: int


def euler_zeta(f, s, word_cutoff=12, k_cutoff=30):
    """Truncated Euler product ``prod_p prod_{k<=K} (1 - exp(-(s+k) l(p)))``."""
    s = complex(s)
    total = 0j
    level = []
    classes = 0
    k = np.arange(k_cutoff + 1)
    for n in range(1, word_cutoff + 1):
        _, lengths = primitive_lengths(f, n)
        classes += len(lengths)
        terms = np.log1p(-np.exp(-(s + k[None, :]) * lengths[:, None]))
        part = terms.sum()
        level.append(abs(part))
        total += part
    tail = 0.0
    if len(level) >= 2 and level[-2] > 0:
        r = level[-1] / level[-2]
        tail = level[-1] * r / (1 - r) if r < 1 else math.inf
    return ZetaResult(complex(np.exp(total)), complex(total), float(tail), classes)


def rotation_classes(words):
    """Primitive rotation classes among ``words``, as least rotations in sorted order.

    Repeated rotations collapse to one class; proper powers are dropped.
    """
    out = set()
    for w in words:
        w = tuple(w)
        rots = [w[i:] + w[:i] for i in range(len(w))]
        if any(r == w for r in rots[1:]):
            continue
        out.add(min(rots))
    return sorted(out, key=lambda w: (len(w), w))


def euler_zeta_words(f, s, words, k_cutoff=30):
    """Euler product over an explicit list of cyclic words, one factor per rotation class."""
    s = complex(s)
    total = 0j
    for w in rotation_classes(words):
        length = closed_geodesic(f, w).length
        k = np.arange(k_cutoff + 1)
        total += np.log1p(-np.exp(-(s + k) * length)).sum()
    return complex(np.exp(total))


# --------------------------------------------------------------- zero scans


def winding_number(func, window, max_refine=12):
    """Winding number of ``func`` around the boundary of a complex rectangle.

    Boundary segments are bisected until the phase increment of each is
    below ``pi / 4``.
    """
    corners = [complex(window.re_min, window.im_min), complex(window.re_max, window.im_min),
               complex(window.re_max, window.im_max), complex(window.re_min, window.im_max)]
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        ts = np.linspace(0, 1, window.resolution + 1)
        pts = [a + (b - a) * t for t in ts]
        vals = [func(z) for z in pts]
        stack = list(zip(pts[:-1], pts[1:], vals[:-1], vals[1:], [0] * (len(pts) - 1)))
        while stack:
            z0, z1, v0, v1, depth = stack.pop()
            if v0 == 0 or v1 == 0:
                raise ConvergenceError("determinant vanishes on the window boundary")
            dphi = np.angle(v1 / v0)
            if abs(dphi) > np.pi / 4 and depth < max_refine:
                zm = 0.5 * (z0 + z1)
                vm = func(zm)
                stack.append((z0, zm, v0, vm, depth + 1))
                stack.append((zm, z1, vm, v1, depth + 1))
            else:
                total += dphi
    return int(round(total / (2 * np.pi)))


def _newton(func, z, window, tol=1e-13, maxiter=60, h=1e-6):
    """Newton iteration confined to ``window`` (plus half its size); ``None`` on escape."""
    mr = 0.5 * (window.re_max - window.re_min)
    mi = 0.5 * (window.im_max - window.im_min)
    for it in range(1, maxiter + 1):
        v = func(z)
        dv = (func(z + h) - func(z - h)) / (2 * h)
        if dv == 0:
            return None, it
        step = v / dv
        z = z - step
        if not (window.re_min - mr <= z.real <= window.re_max + mr
                and window.im_min - mi <= z.imag <= window.im_max + mi):
            return None, it
        if abs(step) < tol * max(1.0, abs(z)):
            return z, it
    return z, maxiter


def _complex_zeros(func, window, degree, residual_tol, min_size=1e-3, depth=0):
    n = winding_number(func, window)
    if n <= 0:
        return []
    w = window.re_max - window.re_min
    hgt = window.im_max - window.im_min
    if n == 1 or max(w, hgt) < min_size or depth > 12:
        center = complex(0.5 * (window.re_min + window.re_max), 0.5 * (window.im_min + window.im_max))
        z, its = _newton(func, center, window)
        if z is not None:
            inside = window.re_min <= z.real <= window.re_max and window.im_min <= z.imag <= window.im_max
            res = abs(func(z))
            if inside and res <= residual_tol:
                return [ZeroRecord(z, float(res), degree, its)]
        if n > 1 or max(w, hgt) < min_size or depth > 12:
            log.warning("zero refinement failed in window %s", window)
            return []
    rm = 0.5 * (window.re_min + window.re_max)
    im = 0.5 * (window.im_min + window.im_max)
    out = []
    for r0, r1, i0, i1 in ((window.re_min, rm, window.im_min, im), (rm, window.re_max, window.im_min, im),
                           (window.re_min, rm, im, window.im_max), (rm, window.re_max, im, window.im_max)):
        sub = ComplexWindow(r0, r1, i0, i1, window.resolution)
        out.extend(_complex_zeros(func, sub, degree, residual_tol, min_size, depth + 1))
    return out


def zero_scan(f, window, basis, residual_tol=1e-8):
    """Zeros of ``s -> det(I - M_s)`` in a real grid or a complex rectangle."""
    func = lambda s: _det_at(f, s, basis)  # noqa: E731
    if isinstance(window, ComplexWindow):
        zeros = _complex_zeros(func, window, basis.degree, residual_tol)
        return sorted(zeros, key=lambda r: (r.location.real, r.location.imag))
    grid = window.points()
    vals = np.array([func(s).real for s in grid])
    # an eigenvalue exactly 1 at a grid point leaves only roundoff; take it as a zero
    on_grid = np.abs(vals) <= GRID_ZERO_TOL
    out = []
    for i, s0 in enumerate(grid):
        if on_grid[i]:
            out.append(ZeroRecord(complex(s0), float(abs(vals[i])), basis.degree, 0))
        if i + 1 == len(grid) or on_grid[i] or on_grid[i + 1]:
            continue
        s1 = grid[i + 1]
        if vals[i] * vals[i + 1] < 0:
            root, info = scipy.optimize.brentq(lambda s: func(s).real, s0, s1, xtol=1e-15,
                                               full_output=True)
            res = abs(func(root))
            if res <= residual_tol:
                out.append(ZeroRecord(complex(root), float(res), basis.degree, info.iterations))
            else:
                log.warning("dropping zero near %g: residual %g", root, res)
    return out


# ------------------------------------------------------------ product scans


@dataclass(frozen=True)
class ProductScanRow:
    s: tuple
    det: complex
    leading_eigenvalue: float


@dataclass(frozen=True)
class ProductScan:
    rows: tuple
    dense_checks: tuple  # (s, det_eig, det_dense, relative difference)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


def _grid_points(grids, diagonal):
    if diagonal:
        pts = grids[0].points()
        return [tuple(float(p) for _ in grids) for p in pts]
    mesh = np.meshgrid(*[g.points() for g in grids], indexing="ij")
    return [tuple(float(v) for v in col) for col in np.stack([m.ravel() for m in mesh], axis=1)]


def product_det_scan(G, grids, bases, diagonal=False, dense_checks=3, max_points=200_000,
                     max_dense_dim=4096):
    """Determinant and leading eigenvalue of the product operator over a real grid.

    ``grids`` holds one ``ScanGrid`` per factor; with ``diagonal`` every axis
    follows the first one.  Determinants come from the Kronecker spectral
    identity ``det(I - (x)M_j) = prod (1 - lambda_1 ... lambda_r)``; at
    ``dense_checks`` grid points they are recomputed from the assembled
    matrix, and the relative difference (floored at 1) must stay below 1e-9.
    """
    if not isinstance(G, ProductGroup) or G.rank < 2:
        raise ValueError("product scans need a group of rank >= 2")
    if len(grids) != G.rank or len(bases) != G.rank:
        raise ValueError("need one grid and one basis per factor")
    n_points = grids[0].count if diagonal else int(np.prod([g.count for g in grids]))
    if n_points > max_points:
        raise GridTooLarge(f"{n_points} grid points exceed the limit {max_points}")
    dense_dim = int(np.prod([b.dim for b in bases]))
    if dense_checks and dense_dim > max_dense_dim:
        raise GridTooLarge(f"dense cross-check dimension {dense_dim} exceeds {max_dense_dim}")

    cache = {}

    def spectrum(j, sj):
        key = (j, sj)
        if key not in cache:
            M = assemble_factor_operator(G.factors[j], sj, bases[j]).matrix
            cache[key] = np.linalg.eigvals(M)
        return cache[key]

    rows = []
    for s in _grid_points(grids, diagonal):
        prod = np.ones(1, dtype=complex)
        lead = 1.0
        for j, sj in enumerate(s):
            ev = spectrum(j, sj)
            prod = np.outer(prod, ev).ravel()
            lead *= float(np.max(np.abs(ev)))
        # real parameters: the spectrum is closed under conjugation, so det is real
        det = complex(np.prod(1 - prod).real, 0.0)
        rows.append(ProductScanRow(s, det, lead))

    checks = []
    if dense_checks:
        picks = sorted(set(np.linspace(0, len(rows) - 1, min(dense_checks, len(rows))).round().astype(int)))
        for i in picks:
            row = rows[i]
            dense = fredholm_det(assemble_product_operator(G, row.s, bases)).value
            rel = abs(dense - row.det) / max(1.0, abs(dense))
            if rel > 1e-9:
                raise ConvergenceError(f"dense and spectral determinants disagree at {row.s}: {rel:g}")
            checks.append((row.s, row.det, dense, rel))
    return ProductScan(tuple(rows), tuple(checks))
