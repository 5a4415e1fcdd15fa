"""Collocation discretisation of the transfer operators of the boundary map.

On each disk diameter a function is represented by its values at ``N + 1``
Chebyshev points (first kind).  For a factor, block ``(k, l)`` with
``l != -k`` of the operator matrix sends node values on diameter ``l`` to

    x -> |(g_l^{-1})'(x)|^s  phi_l(g_l^{-1}(x))      (x a node of block k),

where ``phi_l`` is the barycentric interpolant.  The product operator uses the
weight ``prod_j |(g_{j,n_j}^{-1})'(x_j)|^{s_j}`` on the tensor grid and vanishes
on blocks ``(m, n)`` with ``n_j = -m_j`` for some ``j``.

Complex powers are taken of the positive base: ``|u|^s = exp(s log |u|)``.
"""
from dataclasses import dataclass, field
import hashlib
from itertools import product
import math

import numpy as np
import scipy.linalg

from .coding import preimages
from .moebius import boundary_derivative, classify_and_axis, compose
from .schottky import ProductGroup, reduced_word_array

__all__ = [
    "CollocationBasis",
    "OperatorMatrix",
    "DetResult",
    "TransferError",
    "BranchEscapesError",
    "ConvergenceError",
    "chebyshev_basis",
    "assemble_factor_operator",
    "assemble_product_operator",
    "apply_operator_pointwise",
    "evaluate_factor_rows",
    "evaluate_product_row",
    "periodic_trace",
    "fredholm_det",
    "leading_eigenvalue",
    "group_fingerprint",
]


class TransferError(RuntimeError):
    pass


class BranchEscapesError(TransferError):
    pass


class ConvergenceError(TransferError):
    pass


def _cheb_nodes(n):
    """First-kind Chebyshev points on [-1, 1] in ascending order, with barycentric weights."""
    i = np.arange(n + 1)
    theta = (2 * i + 1) * np.pi / (2 * n + 2)
    x = np.cos(theta)[::-1].copy()
    w = ((-1.0) ** i * np.sin(theta))[::-1].copy()
    return x, w


@dataclass(frozen=True)
class CollocationBasis:
    """Chebyshev nodes on the (possibly shrunk) diameter of every disk of a factor."""

    degree: int
    rho: float
    letters: tuple
    intervals: dict
    nodes: dict = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def block_size(self):
        return self.degree + 1

    @property
    def dim(self):
        return len(self.letters) * self.block_size

    def position(self, k):
        return self.letters.index(k)

    def all_nodes(self):
        return np.concatenate([self.nodes[k] for k in self.letters])

    def interpolation_matrix(self, k, y):
        """Rows evaluating the interpolant on block ``k`` at the points ``y``."""
        x = self.nodes[k]
        y = np.atleast_1d(np.asarray(y, dtype=float))
        diff = y[:, None] - x[None, :]
        exact = diff == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            tmp = self.weights[None, :] / diff
            out = tmp / tmp.sum(axis=1, keepdims=True)
        hit = exact.any(axis=1)
        if hit.any():
            out[hit] = exact[hit].astype(float)
        return out


def chebyshev_basis(f, degree, rho=1.0):
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if not 0 < rho <= 1:
        raise ValueError("shrink factor must lie in (0, 1]")
    ref, w = _cheb_nodes(degree)
    nodes, intervals = {}, {}
    for k in f.letters:
        d = f.disks[k]
        half = rho * d.radius
        intervals[k] = (d.center - half, d.center + half)
        nodes[k] = d.center + half * ref
    return CollocationBasis(degree, rho, f.letters, intervals, nodes, w)


def group_fingerprint(G):
    factors = G.factors if isinstance(G, ProductGroup) else (G,)
    text = repr([[(k, d.center, d.radius, f.generators[k].as_tuple()) for k, d in sorted(f.disks.items())]
                 for f in factors])
    return hashlib.sha1(text.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense collocation matrix with its block labelling.

    Rank one: blocks are letters and the matrix is letter-major.  Product:
    rows are ordered as ``(m_1, i_1, m_2, i_2, ...)`` with the last factor
    varying fastest, i.e. the ordering of ``numpy.kron`` of factor matrices.
    ``block(m, n)`` extracts the block of a pair of labels in either case.
    """

    matrix: np.ndarray = field(repr=False)
    labels: tuple
    s: tuple
    degree: tuple
    fingerprint: str
    _index: dict = field(repr=False, default=None)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def indices(self, label):
        return self._index[label]

    def block(self, m, n):
        return self.matrix[np.ix_(self._index[m], self._index[n])]


def _branch_block(f, basis, s, k, l, x):
    """Weights times interpolation rows for branch ``l`` evaluated at points ``x`` of block ``k``."""
    h = f.branch(l)
    den = h.c * x + h.d
    y = (h.a * x + h.b) / den
    lo, hi = basis.intervals[l]
    span = hi - lo
    if np.any(y < lo - 1e-13 * span) or np.any(y > hi + 1e-13 * span):
        raise BranchEscapesError(
            f"image of block {k} under branch {l} leaves the interpolation interval; "
            "increase the shrink factor"
        )
    deriv = 1.0 / den ** 2
    assert np.all(deriv > 0)
    weight = np.exp(s * np.log(deriv))
    return weight[:, None] * basis.interpolation_matrix(l, y)


def evaluate_factor_rows(f, basis, s, x, k=None):
    """Rows of the discretised operator at points ``x`` of block ``k`` (full width)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if k is None:
        k = f.locate_letter(x[0])
        if k is None:
            raise ValueError(f"point {x[0]} lies in no disk")
    n1 = basis.block_size
    rows = np.zeros((len(x), basis.dim), dtype=complex)
    for l in basis.letters:
        if l == -k:
            continue
        p = basis.position(l)
        rows[:, p * n1:(p + 1) * n1] = _branch_block(f, basis, s, k, l, x)
    return rows


def assemble_factor_operator(f, s, basis):
    n1 = basis.block_size
    M = np.zeros((basis.dim, basis.dim), dtype=complex)
    for k in basis.letters:
        p = basis.position(k)
        M[p * n1:(p + 1) * n1, :] = evaluate_factor_rows(f, basis, s, basis.nodes[k], k)
    index = {k: np.arange(basis.position(k) * n1, (basis.position(k) + 1) * n1) for k in basis.letters}
    return OperatorMatrix(M, basis.letters, (s,), (basis.degree,), group_fingerprint(f), index)


def _product_index(bases, m):
    """Global indices of the tensor-grid nodes of multi-index ``m`` (kron ordering)."""
    idx = np.zeros(1, dtype=np.int64)
    for basis, k in zip(bases, m):
        local = basis.position(k) * basis.block_size + np.arange(basis.block_size)
        idx = (idx[:, None] * basis.dim + local[None, :]).ravel()
    return idx


def assemble_product_operator(G, s, bases):
    """Multi-parameter operator on the tensor grid, built block by block from ``B(m)``."""
    s = tuple(s)
    if len(s) != G.rank or len(bases) != G.rank:
        raise ValueError("need one parameter and one basis per factor")
    dim = int(np.prod([b.dim for b in bases]))
    M = np.zeros((dim, dim), dtype=complex)
    labels = G.alphabet()
    index = {m: _product_index(bases, m) for m in labels}
    for m in labels:
        for n in labels:
            if any(a == -b for a, b in zip(n, m)):
                continue
            blk = np.ones((1, 1), dtype=complex)
            for f, basis, sj, mj, nj in zip(G.factors, bases, s, m, n):
                part = _branch_block(f, basis, sj, mj, nj, basis.nodes[mj])
                blk = np.einsum("ab,cd->acbd", blk, part).reshape(blk.shape[0] * part.shape[0], -1)
            M[np.ix_(index[m], index[n])] = blk
    return OperatorMatrix(M, tuple(labels), s, tuple(b.degree for b in bases), group_fingerprint(G), index)


def evaluate_product_row(G, s, bases, x):
    """Row of the discretised product operator at a boundary vector ``x``."""
    row = np.ones(1, dtype=complex)
    for f, basis, sj, xj in zip(G.factors, bases, s, x):
        row = np.kron(row, evaluate_factor_rows(f, basis, sj, [xj])[0])
    return row


def apply_operator_pointwise(G, s, func, x, depth=0):
    """Matrix-free operator: sum over preimages ``y`` of ``prod |g'(y_j)|^{-s_j} func(y)``."""
    total = 0j
    for n, y in preimages(G, x, depth):
        w = 1.0 + 0j
        for f, k, sj, yj in zip(G.factors, n, s, y):
            w *= np.exp(-sj * math.log(boundary_derivative(f.generators[k], yj)))
        total += w * func(y)
    return total


def periodic_trace(f, s, n):
    """Sum over cyclically admissible letter cycles of ``mu^s / (1 - mu)``.

    ``mu`` is the derivative of the composite inverse branch at its attracting
    fixed point.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    total = 0j
    for row in reduced_word_array(f.q, n, cyclic=True).tolist():
        phi = f.branch(row[0])
        for l in row[1:]:
            phi = compose(phi, f.branch(l))
        x = classify_and_axis(phi).attracting
        mu = boundary_derivative(phi, x)
        total += np.exp(s * math.log(mu)) / (1 - mu)
    return total


@dataclass(frozen=True)
class DetResult:
    value: complex
    log: complex
    log_abs: float
    phase: float


def fredholm_det(M):
    """``det(I - M)`` by pivoted LU, with a logarithmic form that cannot overflow."""
    A = M.matrix if isinstance(M, OperatorMatrix) else np.asarray(M)
    if not np.all(np.isfinite(A)):
        raise ValueError("operator matrix has non-finite entries")
    n = A.shape[0]
    lu, piv = scipy.linalg.lu_factor(np.eye(n) - A)
    diag = np.diag(lu).astype(complex)
    swaps = int(np.sum(piv != np.arange(n)))
    lg = np.sum(np.log(diag)) + (1j * np.pi if swaps % 2 else 0)
    log_abs = float(lg.real)
    phase = float(np.angle(np.exp(1j * lg.imag)))
    value = np.exp(lg) if log_abs < 700 else complex(math.inf, 0)
    if np.all(np.isreal(A)):
        value = complex(value.real, 0.0)
    return DetResult(complex(value), complex(lg), log_abs, phase)


def leading_eigenvalue(f, s, basis, tol=1e-14, maxiter=5000):
    """Perron eigenvalue of the discretised operator at real ``s`` by power iteration."""
    M = assemble_factor_operator(f, float(s), basis).matrix.real
    v = np.ones(M.shape[0])
    lam = 0.0
    for _ in range(maxiter):
        w = M @ v
        new = float(np.linalg.norm(w))
        v = w / new
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    else:
        raise ConvergenceError(f"power iteration did not converge at s={s}")
    res = np.linalg.norm(M @ v - lam * v)
    if res > 1e-8 * lam:
        raise ConvergenceError(f"power iteration residual {res:g} at s={s}")
    return lam
