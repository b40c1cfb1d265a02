"""Lie algebras, reductive decompositions and invariant Randers vectors.

Conventions used throughout the package:

* ``C[a, b, c]`` is the structure constant ``C_ab^c`` of ``[u_a, u_b] = C_ab^c u_c``.
* Array indices are 0-based.  Index tuples that end up in reports
  (violations, witnesses) are 1-based, matching the usual notation.
* The first ``n`` basis vectors span ``m``, the remaining ``m - n`` span ``h``.
* The inner product on ``m`` is the identity in the stored basis; use
  :func:`orthonormalize` to bring a basis with a general Gram matrix into
  that form.
* ``H`` is assumed connected, so Ad(H)-invariance is checked through the
  infinitesimal ad(h) conditions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DimensionError, PreconditionError, ShapeError

JACOBI_TOL = 1e-12
NORM_MARGIN = 1e-12


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Violation:
    invariant: str
    index: tuple[int, ...]
    residual: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def merged(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(self.violations + other.violations)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "violations": [
                {"invariant": v.invariant, "index": list(v.index), "residual": v.residual}
                for v in self.violations
            ],
        }


@dataclass(frozen=True)
class LieAlgebra:
    """Real Lie algebra given by dense structure constants."""

    C: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        if C.ndim != 3 or len(set(C.shape)) != 1 or C.shape[0] < 1:
            raise ShapeError(f"structure constants must be a cubic m x m x m array, got shape {C.shape}")
        object.__setattr__(self, "C", _frozen(C))

    @property
    def dim(self) -> int:
        return self.C.shape[0]

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, float]]) -> "LieAlgebra":
        """Build from a sparse bracket table with 1-based indices and ``a < b``.

        ``brackets[(a, b)] = {c: coeff, ...}`` means ``[u_a, u_b] = sum coeff u_c``;
        ``[u_b, u_a]`` is filled in by antisymmetry.
        """
        C = np.zeros((dim, dim, dim))
        for (a, b), coeffs in brackets.items():
            if not a < b:
                raise ValueError(f"bracket ({a},{b}) must satisfy a < b")
            for c, v in coeffs.items():
                for idx in (a, b, c):
                    if not 1 <= idx <= dim:
                        raise DimensionError(f"index {idx} outside 1..{dim}")
                C[a - 1, b - 1, c - 1] = v
                C[b - 1, a - 1, c - 1] = -v
        return cls(C)

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("a,b,abc->c", x, y, self.C)

    def brackets(self, tol: float = 0.0) -> dict[tuple[int, int], dict[int, float]]:
        """Sparse 1-based bracket table (inverse of :meth:`from_brackets`)."""
        out = {}
        m = self.dim
        for a in range(m):
            for b in range(a + 1, m):
                coeffs = {c + 1: float(self.C[a, b, c]) for c in range(m) if abs(self.C[a, b, c]) > tol}
                if coeffs:
                    out[(a + 1, b + 1)] = coeffs
        return out


@dataclass(frozen=True)
class ReductiveSpace:
    """Lie algebra with adapted basis: ``u_1..u_n`` span m, the rest span h."""

    algebra: LieAlgebra
    dim_m: int

    def __post_init__(self):
        if not 1 <= self.dim_m:
            raise DimensionError("dim_m must be at least 1")
        if self.dim_m > self.algebra.dim:
            raise DimensionError(f"dim_m = {self.dim_m} exceeds dim_g = {self.algebra.dim}")

    @property
    def n(self) -> int:
        return self.dim_m

    @property
    def m(self) -> int:
        return self.algebra.dim

    @property
    def C(self) -> np.ndarray:
        return self.algebra.C

    @property
    def isotropy_dim(self) -> int:
        return self.m - self.n

    def isotropy_action(self) -> np.ndarray:
        """Matrices of ad(u_lambda) restricted to m, shape (m-n, n, n), entry [λ, j, i] = C_λi^j."""
        n = self.n
        return np.transpose(self.C[n:, :n, :n], (0, 2, 1))

    def fixed_subspace(self, tol: float = 1e-10) -> np.ndarray:
        """Orthonormal basis (columns) of the vectors of m annihilated by ad(h)."""
        n = self.n
        if self.isotropy_dim == 0:
            return np.eye(n)
        A = self.isotropy_action().reshape(-1, n)
        _, s, vt = np.linalg.svd(A)
        rank = int(np.sum(s > tol))
        return vt[rank:].T.copy()


@dataclass(frozen=True)
class RandersDatum:
    """Reductive space plus an Ad(H)-fixed vector ``u`` of m with ``|u| < 1``."""

    space: ReductiveSpace
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).reshape(-1)
        if u.shape != (self.space.n,):
            raise ShapeError(f"u must have {self.space.n} components, got {u.shape[0]}")
        object.__setattr__(self, "u", _frozen(u))

    @property
    def c(self) -> float:
        return float(np.linalg.norm(self.u))

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def C(self) -> np.ndarray:
        return self.space.C

    @property
    def is_riemannian(self) -> bool:
        return self.c == 0.0

    def is_aligned(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.u[:-1]) <= tol) and self.u[-1] >= 0.0)

    def require_aligned(self):
        if not self.is_aligned():
            raise PreconditionError("datum must be aligned (u = c e_n); call align_basis first")


def validate_algebra(C, tol: float = JACOBI_TOL) -> ValidationReport:
    C = np.asarray(C, dtype=float)
    if C.ndim != 3 or len(set(C.shape)) != 1 or C.shape[0] < 1:
        raise ShapeError(f"structure constants must be a cubic m x m x m array, got shape {C.shape}")
    m = C.shape[0]
    out = []
    sym = C + np.transpose(C, (1, 0, 2))
    for a, b, c in itertools.product(range(m), repeat=3):
        if a <= b and abs(sym[a, b, c]) > tol:
            out.append(Violation("antisymmetry", (a + 1, b + 1, c + 1), float(abs(sym[a, b, c]))))
    J = (
        np.einsum("abd,dce->abce", C, C)
        + np.einsum("bcd,dae->abce", C, C)
        + np.einsum("cad,dbe->abce", C, C)
    )
    for idx in zip(*np.nonzero(np.abs(J) > tol)):
        out.append(Violation("jacobi", tuple(int(i) + 1 for i in idx), float(abs(J[idx]))))
    return ValidationReport(tuple(out))


def validate_reductive(space: ReductiveSpace, tol: float = JACOBI_TOL) -> ValidationReport:
    if space.n > space.m:
        raise DimensionError(f"dim_m = {space.n} exceeds dim_g = {space.m}")
    C, n, m = space.C, space.n, space.m
    out = []
    h = range(n, m)
    mm = range(n)
    for lam, mu, i in itertools.product(h, h, mm):
        r = abs(C[lam, mu, i])
        if r > tol:
            out.append(Violation("subalgebra", (lam + 1, mu + 1, i + 1), float(r)))
    for lam, i, mu in itertools.product(h, mm, h):
        r = abs(C[lam, i, mu])
        if r > tol:
            out.append(Violation("reductivity", (lam + 1, i + 1, mu + 1), float(r)))
    for lam, i, j in itertools.product(h, mm, mm):
        r = abs(C[lam, i, j] + C[lam, j, i])
        if i <= j and r > tol:
            out.append(Violation("isotropy_skew", (lam + 1, i + 1, j + 1), float(r)))
    return ValidationReport(tuple(out))


def validate_randers_vector(datum: RandersDatum, tol: float = JACOBI_TOL) -> ValidationReport:
    out = []
    c = datum.c
    if not c < 1.0 - NORM_MARGIN:
        out.append(Violation("norm_bound", (), float(c)))
    sp = datum.space
    n = sp.n
    # sum_i u^i C_λi^j
    fix = np.einsum("i,lij->lj", datum.u, sp.C[n:, :n, :n])
    for lam, j in itertools.product(range(sp.isotropy_dim), range(n)):
        r = abs(fix[lam, j])
        if r > tol:
            out.append(Violation("isotropy_fixed", (n + lam + 1, j + 1), float(r)))
    return ValidationReport(tuple(out))


def validate_datum(datum: RandersDatum, tol: float = JACOBI_TOL) -> ValidationReport:
    """All three validations in sequence."""
    return (
        validate_algebra(datum.C, tol)
        .merged(validate_reductive(datum.space, tol))
        .merged(validate_randers_vector(datum, tol))
    )


def change_basis(C, P) -> np.ndarray:
    """Structure constants in the basis ``u'_a = sum_d P[d, a] u_d``."""
    P = np.asarray(P, dtype=float)
    Pinv = np.linalg.inv(P)
    return np.einsum("da,eb,def,cf->abc", P, P, C, Pinv)


def orthonormalize(C, dim_m: int, gram) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt the m-part of a basis whose m-Gram matrix is ``gram``.

    Returns the transformed structure constants and the n x n matrix ``L``
    with ``u'_p = sum_q L[q, p] u_q``; coordinates transform as ``x' = L^{-1} x``.
    h basis vectors are left untouched.
    """
    gram = np.asarray(gram, dtype=float)
    if gram.shape != (dim_m, dim_m):
        raise ShapeError(f"gram matrix must be {dim_m}x{dim_m}")
    # gram = R^T R  ->  L = R^{-1} gives L^T gram L = I
    R = np.linalg.cholesky(gram).T
    L = np.linalg.inv(R)
    m = np.asarray(C).shape[0]
    P = np.eye(m)
    P[:dim_m, :dim_m] = L
    return change_basis(C, P), L


def alignment_matrix(datum: RandersDatum) -> np.ndarray:
    """Orthogonal n x n matrix whose last column is u / c (Householder reflection)."""
    n, c = datum.n, datum.c
    if c == 0.0:
        return np.eye(n)
    target = np.asarray(datum.u) / c
    en = np.zeros(n)
    en[-1] = 1.0
    v = en - target
    vv = float(v @ v)
    if vv < 1e-30:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(v, v) / vv


def align_basis(datum: RandersDatum) -> RandersDatum:
    """Rotate the m-basis so that ``u = c e_n``.  A datum with c = 0 is returned as is."""
    if datum.c == 0.0 or datum.is_aligned(tol=0.0):
        return datum
    Q = alignment_matrix(datum)
    sp = datum.space
    P = np.eye(sp.m)
    P[: sp.n, : sp.n] = Q
    C_new = change_basis(sp.C, P)
    u_new = np.zeros(sp.n)
    u_new[-1] = datum.c
    return RandersDatum(ReductiveSpace(LieAlgebra(C_new), sp.n), u_new)
