"""Built-in homogeneous spaces with known Berwald classification.

All structure constants are small integers.  ``expected`` maps an
admissible u (in the entry's own basis) to the known Berwald verdict.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .liealg import LieAlgebra, RandersDatum, ReductiveSpace

BALL_RADIUS = 0.9
EXACT_TOL = 1e-12


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    space: ReductiveSpace
    expected: Callable[[np.ndarray], bool]
    rule: str
    description: str

    def datum(self, u) -> RandersDatum:
        return RandersDatum(self.space, np.asarray(u, dtype=float))

    def admissible_basis(self) -> np.ndarray:
        """Orthonormal basis (columns) of the Ad(H)-fixed subspace of m."""
        return self.space.fixed_subspace()


def _vanish(*idx: int) -> Callable[[np.ndarray], bool]:
    return lambda u: bool(all(abs(u[i]) <= EXACT_TOL for i in idx))


def _space(dim: int, n: int, brackets) -> ReductiveSpace:
    return ReductiveSpace(LieAlgebra.from_brackets(dim, brackets), n)


def catalog_entries() -> list[CatalogEntry]:
    return [
        CatalogEntry(
            name="abelian",
            space=_space(3, 3, {}),
            expected=lambda u: True,
            rule="always",
            description="abelian R^3, flat: every invariant Randers metric is Minkowskian",
        ),
        CatalogEntry(
            name="e2",
            space=_space(3, 3, {(1, 3): {2: -1.0}, (2, 3): {1: 1.0}}),
            expected=_vanish(0, 1),
            rule="u1 = u2 = 0",
            description="Euclidean motion algebra e(2); e3 rotates the translations e1, e2",
        ),
        CatalogEntry(
            name="h3r",
            space=_space(4, 4, {(1, 2): {3: 1.0}}),
            expected=_vanish(0, 1, 2),
            rule="u1 = u2 = u3 = 0",
            description="Heisenberg algebra plus a central line, u along the abelian factor is Berwald",
        ),
        CatalogEntry(
            name="heisenberg3",
            space=_space(3, 3, {(1, 2): {3: 1.0}}),
            expected=_vanish(0, 1, 2),
            rule="u = 0",
            description="Heisenberg algebra [e1, e2] = e3",
        ),
        CatalogEntry(
            name="hopf_s3",
            space=_space(
                4,
                3,
                {(1, 2): {3: -1.0, 4: 1.0}, (1, 4): {2: -1.0}, (2, 4): {1: 1.0}},
            ),
            expected=_vanish(2),
            rule="u3 = 0",
            description="u(2) / u(1) with h = span(e4) rotating the (e1, e2)-plane; fixed direction e3",
        ),
        CatalogEntry(
            name="su2",
            space=_space(3, 3, {(1, 2): {3: 1.0}, (2, 3): {1: 1.0}, (1, 3): {2: -1.0}}),
            expected=_vanish(0, 1, 2),
            rule="u = 0",
            description="su(2) with cyclic constants, the round S^3 with left-invariant β",
        ),
    ]


def catalog_entry(name: str) -> CatalogEntry:
    for entry in catalog_entries():
        if entry.name == name:
            return entry
    raise KeyError(f"unknown catalog entry {name!r}; known: {[e.name for e in catalog_entries()]}")


def random_admissible_u(entry: CatalogEntry, seed: int, count: int) -> list[np.ndarray]:
    """``count`` vectors uniform in the 0.9-ball of the fixed subspace, deterministic per seed."""
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return []
    V = entry.admissible_basis()
    n = entry.space.n
    d = V.shape[1]
    if d == 0:
        warnings.warn(f"{entry.name}: Ad(H)-fixed set is {{0}}; only u = 0 is admissible", UserWarning, stacklevel=2)
        return [np.zeros(n)]
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = rng.standard_normal(d)
        r = BALL_RADIUS * rng.random() ** (1.0 / d)
        out.append(V @ (r * g / np.linalg.norm(g)))
    return out
