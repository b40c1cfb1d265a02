"""Levi-Civita connection of the invariant metric at the origin, from structure constants.

Index ranges: ``a`` runs over all of g, ``i, j, k, l, s, t`` over m (the first
``n`` basis vectors).  Sums over ``s, t`` therefore realise the projection
``[., .]_m``.  All arrays are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexRangeError
from .liealg import ReductiveSpace


def f_flag(k: int, i: int) -> int:
    """1 if k < i else 0."""
    return 1 if k < i else 0


def f_matrix(n: int) -> np.ndarray:
    """Matrix form of f: ``F[k, i] = f(k, i)``."""
    return np.triu(np.ones((n, n)), 1)


def killing_nabla(space: ReductiveSpace, a: int, b: int, l: int) -> float:
    """<nabla_{û_a} û_b, û_l> at o for a, b in g and l in m."""
    n, m, C = space.n, space.m, space.C
    for idx in (a, b):
        if not 0 <= idx < m:
            raise IndexRangeError(f"index {idx} outside 0..{m - 1}")
    if not 0 <= l < n:
        raise IndexRangeError(f"l = {l} must lie in the m-range 0..{n - 1}")
    if a < n and b < n:
        return -0.5 * (C[a, b, l] + C[a, l, b] + C[b, l, a])
    if a < n:
        # b in h; equals -1/2 (C_ab^l + C_bl^a) by isotropy skew-symmetry
        return float(C[l, b, a])
    # a in h: -1/2 (C_ab^l + C_al^b) vanishes for b in m; for b in h it is -1/2 C_ab^l = 0
    if b < n:
        return -0.5 * (C[a, b, l] + C[a, l, b])
    return -0.5 * C[a, b, l]


def killing_nabla_table(space: ReductiveSpace) -> np.ndarray:
    """All values of :func:`killing_nabla`, shape (m, m, n)."""
    n, m, C = space.n, space.m, space.C
    N = np.empty((m, m, n))
    # m x m block, vectorised
    Cm = C[:n, :n, :n]
    N[:n, :n, :] = -0.5 * (Cm + np.transpose(Cm, (0, 2, 1)) + np.transpose(Cm, (2, 0, 1)))
    for a in range(m):
        for b in range(m):
            if a < n and b < n:
                continue
            for l in range(n):
                N[a, b, l] = killing_nabla(space, a, b, l)
    return N


def christoffel_origin(space: ReductiveSpace) -> np.ndarray:
    """Γ_ij^l(o) as array ``G[i, j, l]``."""
    n = space.n
    N = killing_nabla_table(space)
    return f_matrix(n)[:, :, None] * space.C[:n, :n, :n] + N[:n, :n, :]


def uk_nabla_derivative(space: ReductiveSpace, k: int, i: int, j: int, l: int) -> float:
    """û_k <nabla_{û_i} û_j, û_l> at o."""
    n, C = space.n, space.C
    for idx in (k, i, j, l):
        if not 0 <= idx < n:
            raise IndexRangeError(f"index {idx} must lie in the m-range 0..{n - 1}")
    Cm = C[:, :, :n]
    return 0.5 * float(
        C[k, :, l] @ C[i, j, :]
        + C[k, :, j] @ C[i, l, :]
        + C[k, :, i] @ C[j, l, :]
        + Cm[i, j] @ Cm[k, l]
        + Cm[i, l] @ Cm[k, j]
        + Cm[j, l] @ Cm[k, i]
    )


def uk_nabla_table(space: ReductiveSpace) -> np.ndarray:
    """All values of :func:`uk_nabla_derivative`, shape (n, n, n, n), order [k, i, j, l]."""
    n, C = space.n, space.C
    Cg = C[:n, :, :n]  # C_ka^l with k, l in m
    Cij = C[:n, :n, :]  # C_ij^a
    Cs = C[:n, :n, :n]
    T = (
        np.einsum("kal,ija->kijl", Cg, Cij)
        + np.einsum("kaj,ila->kijl", Cg, Cij)
        + np.einsum("kai,jla->kijl", Cg, Cij)
        + np.einsum("ijs,kls->kijl", Cs, Cs)
        + np.einsum("ils,kjs->kijl", Cs, Cs)
        + np.einsum("jls,kis->kijl", Cs, Cs)
    )
    return 0.5 * T


def christoffel_derivative_origin(space: ReductiveSpace) -> np.ndarray:
    """∂Γ_ij^l/∂x^k at o as ``dG[k, i, j, l]``.

    The closed formula holds for i >= j; entries with i < j are copied from
    the symmetric partner since Γ_ij = Γ_ji identically.
    """
    n, C = space.n, space.C
    N = killing_nabla_table(space)
    G = f_matrix(n)[:, :, None] * C[:n, :n, :n] + N[:n, :n, :]
    U = uk_nabla_table(space)
    F = f_matrix(n)
    term1 = -np.einsum("ijs,ksl->kijl", G, G + np.transpose(N[:n, :n, :], (0, 2, 1)))
    # f(k,j) C_kj^a <∇_{û_i} û_a, û_l>, a over all of g
    term2 = np.einsum("kj,kja,ial->kijl", F, C[:n, :n, :], N[:n, :, :])
    # f(k,i) C_ki^s <∇_{û_s} û_j, û_l>, s over m
    term3 = np.einsum("ki,kis,sjl->kijl", F, C[:n, :n, :n], N[:n, :n, :])
    dG = term1 + term2 + term3 + U
    lower = np.tril(np.ones((n, n), dtype=bool))  # i >= j
    sym = np.transpose(dG, (0, 2, 1, 3))
    return np.where(lower[None, :, :, None], dG, sym)


@dataclass(frozen=True)
class ConnectionOrigin:
    gamma: np.ndarray
    dgamma: np.ndarray
    nabla: np.ndarray
    uk_nabla: np.ndarray
    f_flag: np.ndarray


def connection_origin(space: ReductiveSpace) -> ConnectionOrigin:
    out = ConnectionOrigin(
        gamma=christoffel_origin(space),
        dgamma=christoffel_derivative_origin(space),
        nabla=killing_nabla_table(space),
        uk_nabla=uk_nabla_table(space),
        f_flag=f_matrix(space.n),
    )
    for arr in (out.gamma, out.dgamma, out.nabla, out.uk_nabla, out.f_flag):
        arr.setflags(write=False)
    return out
