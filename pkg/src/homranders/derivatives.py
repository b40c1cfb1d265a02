"""Derivative engine used by the numeric oracle.

Two tools:

* central differences with one Richardson step (the 5-point stencil) for
  derivatives in the position x, where the metric is only available as a
  black-box function;
* truncated multivariate Taylor polynomials ("jets") for exact derivatives in
  the direction y.  A jet of order K in ``nvars`` variables is stored as its
  coefficient array along the last axis; leading axes are batch axes.
"""
from __future__ import annotations

import itertools
import warnings
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import NumericalAccuracyWarning

DEFAULT_STEP = 1e-4
RICHARDSON_TOL = 1e-5

# offsets and weights of the Richardson-extrapolated central difference
STENCIL_OFFSETS = (1.0, -1.0, 2.0, -2.0)
STENCIL_WEIGHTS = np.array([8.0, -8.0, -1.0, 1.0]) / 12.0
PLAIN_WEIGHTS = np.array([0.5, -0.5, 0.0, 0.0])


def central_diff(f, x, h: float = DEFAULT_STEP, check: bool = False):
    """Gradient of an array-valued function, shape ``(len(x),) + f(x).shape``.

    With ``check=True`` a :class:`NumericalAccuracyWarning` is issued when the
    extrapolated and the plain central difference differ by more than
    ``RICHARDSON_TOL``.
    """
    x = np.asarray(x, dtype=float)
    rows, plain = [], []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        vals = [np.asarray(f(x + s * e), dtype=float) for s in STENCIL_OFFSETS]
        rows.append(sum(w * v for w, v in zip(STENCIL_WEIGHTS, vals)) / h)
        if check:
            plain.append(sum(w * v for w, v in zip(PLAIN_WEIGHTS, vals)) / h)
    out = np.array(rows)
    if check:
        gap = float(np.max(np.abs(out - np.array(plain)))) if out.size else 0.0
        if gap > RICHARDSON_TOL:
            warnings.warn(f"Richardson disagreement {gap:.2e}", NumericalAccuracyWarning, stacklevel=2)
    return out


def stencil_points(x, h: float) -> np.ndarray:
    """The 4n stencil points around x, ordered (k, offset)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    pts = np.empty((n, len(STENCIL_OFFSETS), n))
    for k in range(n):
        for s, off in enumerate(STENCIL_OFFSETS):
            pts[k, s] = x
            pts[k, s, k] += off * h
    return pts.reshape(-1, n)


def apply_stencil(values, n: int, h: float, axis: int = 0, weights=STENCIL_WEIGHTS) -> np.ndarray:
    """Contract values sampled at :func:`stencil_points` into partial derivatives.

    ``values`` has a stencil axis of length ``4n`` at ``axis``; it is replaced by
    a derivative axis of length ``n``.
    """
    v = np.moveaxis(np.asarray(values), axis, 0)
    v = v.reshape((n, len(STENCIL_OFFSETS)) + v.shape[1:])
    d = np.tensordot(weights, v, axes=([0], [1])) / h
    return np.moveaxis(d, 0, axis)


@lru_cache(maxsize=None)
def jet_space(nvars: int, order: int) -> "JetSpace":
    return JetSpace(nvars, order)


class JetSpace:
    """Arithmetic on truncated Taylor polynomials in ``nvars`` variables."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        monos = []
        for d in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(nvars), d):
                e = [0] * nvars
                for v in combo:
                    e[v] += 1
                monos.append(tuple(e))
        self.monomials = monos
        self.size = len(monos)
        self.index = {e: i for i, e in enumerate(monos)}
        self.degree = np.array([sum(e) for e in monos])
        left, right, target = [], [], []
        for i, a in enumerate(monos):
            for j, b in enumerate(monos):
                if sum(a) + sum(b) <= order:
                    left.append(i)
                    right.append(j)
                    target.append(self.index[tuple(p + q for p, q in zip(a, b))])
        self._left = np.array(left)
        self._right = np.array(right)
        scatter = np.zeros((len(target), self.size))
        scatter[np.arange(len(target)), target] = 1.0
        self._scatter = scatter
        # derivative tables: d/dη_v maps coefficient of α + e_v (times α_v + 1) to α
        src = np.zeros((nvars, self.size), dtype=int)
        fac = np.zeros((nvars, self.size))
        for v in range(nvars):
            for t, e in enumerate(monos):
                up = list(e)
                up[v] += 1
                up = tuple(up)
                if up in self.index:
                    src[v, t] = self.index[up]
                    fac[v, t] = up[v]
        self._dsrc = src
        self._dfac = fac
        if order >= 1:
            self.linear = np.array([self.index[tuple(int(v == w) for w in range(nvars))] for v in range(nvars)], dtype=int)
        else:
            self.linear = np.zeros(0, dtype=int)
        quad = np.zeros((nvars, nvars), dtype=int)
        qfac = np.zeros((nvars, nvars))
        if order >= 2:
            for v in range(nvars):
                for w in range(nvars):
                    e = [0] * nvars
                    e[v] += 1
                    e[w] += 1
                    quad[v, w] = self.index[tuple(e)]
                    qfac[v, w] = 2.0 if v == w else 1.0
        self._quad = quad
        self._qfac = qfac

    # construction
    def constant(self, value) -> np.ndarray:
        value = np.asarray(value, dtype=float)
        out = np.zeros(value.shape + (self.size,))
        out[..., 0] = value
        return out

    def affine(self, point) -> np.ndarray:
        """Jets of the coordinate functions ``point + η``, shape ``point.shape + (size,)``.

        The last axis of ``point`` must have length ``nvars``.
        """
        point = np.asarray(point, dtype=float)
        out = self.constant(point)
        for v in range(len(self.linear)):
            out[..., v, self.linear[v]] = 1.0
        return out

    def polynomial(self, coeffs: dict) -> np.ndarray:
        """Jet of a polynomial given as {exponent tuple: coefficient}."""
        out = np.zeros(self.size)
        for e, c in coeffs.items():
            if sum(e) <= self.order:
                out[self.index[tuple(e)]] += c
        return out

    # arithmetic
    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        prod = a[..., self._left] * b[..., self._right]
        return prod @ self._scatter

    def scale(self, a, s) -> np.ndarray:
        return np.asarray(a) * np.asarray(s)[..., None]

    def power_series(self, a, coeffs) -> np.ndarray:
        """sum_k coeffs[k] (a - a0)^k; coeffs may carry batch shape (k, ...)."""
        a = np.asarray(a, dtype=float)
        rest = a.copy()
        rest[..., 0] = 0.0
        term = self.constant(np.ones(a.shape[:-1]))
        out = self.scale(term, coeffs[0])
        for k in range(1, self.order + 1):
            term = self.mul(term, rest)
            out = out + self.scale(term, coeffs[k])
        return out

    def sqrt(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        a0 = a[..., 0]
        if np.any(a0 <= 0):
            raise ValueError("square root of a jet with non-positive constant term")
        coeffs = [comb_half(k) * a0 ** (0.5 - k) for k in range(self.order + 1)]
        return self.power_series(a, coeffs)

    def reciprocal(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        a0 = a[..., 0]
        coeffs = [(-1.0) ** k * a0 ** (-1.0 - k) for k in range(self.order + 1)]
        return self.power_series(a, coeffs)

    def deriv(self, a, v: int) -> np.ndarray:
        """Partial derivative in variable v (the top-degree part is lost)."""
        a = np.asarray(a)
        return a[..., self._dsrc[v]] * self._dfac[v]

    def grad(self, a) -> np.ndarray:
        """Jets of all partials, new axis of length nvars inserted before the coefficient axis."""
        a = np.asarray(a)
        return a[..., self._dsrc] * self._dfac

    # evaluation at η = 0
    def value(self, a) -> np.ndarray:
        return np.asarray(a)[..., 0]

    def gradient(self, a) -> np.ndarray:
        return np.asarray(a)[..., self.linear]

    def hessian(self, a) -> np.ndarray:
        return np.asarray(a)[..., self._quad] * self._qfac

    def derivative(self, a, exponent) -> np.ndarray:
        """Mixed partial ∂^α at η = 0 for a multi-index α."""
        e = tuple(exponent)
        return np.asarray(a)[..., self.index[e]] * float(np.prod([factorial(k) for k in e]))

    # matrices of jets: shape (..., p, q, size)
    def matmul(self, A, B) -> np.ndarray:
        A = np.asarray(A)
        B = np.asarray(B)
        prod = np.einsum("...pqk,...qrk->...prk", A[..., self._left], B[..., self._right])
        return prod @ self._scatter

    def matvec(self, A, x) -> np.ndarray:
        return self.matmul(A, np.asarray(x)[..., :, None, :])[..., 0, :]

    def inv(self, A) -> np.ndarray:
        """Inverse of a matrix of jets by the Neumann series around its constant part."""
        A = np.asarray(A, dtype=float)
        A0inv = np.linalg.inv(A[..., 0])
        rest = A.copy()
        rest[..., 0] = 0.0
        X0 = self.constant(A0inv)
        step = -self.matmul(X0, rest)
        out = X0
        term = X0
        for _ in range(self.order):
            term = self.matmul(step, term)
            out = out + term
        return out


def comb_half(k: int) -> float:
    """Binomial coefficient (1/2 choose k)."""
    out = 1.0
    for j in range(k):
        out *= (0.5 - j) / (j + 1)
    return out


def richardson_check(precise, plain, tol: float = RICHARDSON_TOL, what: str = "derivative"):
    gap = float(np.max(np.abs(np.asarray(precise) - np.asarray(plain))))
    if gap > tol:
        warnings.warn(f"{what}: Richardson disagreement {gap:.2e}", NumericalAccuracyWarning, stacklevel=3)
    return gap


__all__ = [
    "DEFAULT_STEP",
    "JetSpace",
    "apply_stencil",
    "central_diff",
    "jet_space",
    "richardson_check",
    "stencil_points",
]
