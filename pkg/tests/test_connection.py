import itertools

import numpy as np
import pytest

from homranders import chart
from homranders.chart import metric_field
from homranders.connection import (
    christoffel_derivative_origin,
    christoffel_origin,
    connection_origin,
    f_flag,
    f_matrix,
    killing_nabla,
    killing_nabla_table,
    uk_nabla_derivative,
    uk_nabla_table,
)
from homranders.errors import IndexRangeError


def test_f_flag():
    assert f_flag(0, 1) == 1 and f_flag(1, 1) == 0 and f_flag(2, 1) == 0
    F = f_matrix(3)
    assert all(F[k, i] == f_flag(k, i) for k in range(3) for i in range(3))


def test_abelian_zero(entries):
    e = [x for x in entries if x.name == "abelian"][0]
    conn = connection_origin(e.space)
    assert not conn.gamma.any() and not conn.dgamma.any() and not conn.nabla.any()
    assert uk_nabla_derivative(e.space, 0, 1, 2, 0) == 0.0


def test_killing_nabla_reference(reference, h3, su2):
    spaces = {"heisenberg3": h3.space, "su2": su2.space}
    for item in reference["killing_nabla"]:
        a, b, l = (i - 1 for i in item["index"])
        assert abs(killing_nabla(spaces[item["entry"]], a, b, l) - item["value"]) <= 1e-6
    assert killing_nabla(h3.space, 0, 1, 2) == -0.5
    assert killing_nabla(su2.space, 0, 1, 2) == -0.5


def test_killing_nabla_all_branches_fd(entries):
    # every (a, b, l), including the h-index branches, against the chart
    for e in entries:
        sp = e.space
        for a, b, l in itertools.product(range(sp.m), range(sp.m), range(sp.n)):
            assert abs(killing_nabla(sp, a, b, l) - chart.killing_nabla_fd(sp, a, b, l)) <= 1e-8, (e.name, a, b, l)


def test_killing_nabla_table_matches_scalar(hopf):
    T = killing_nabla_table(hopf.space)
    for a, b, l in itertools.product(range(4), range(4), range(3)):
        assert T[a, b, l] == killing_nabla(hopf.space, a, b, l)


def test_killing_nabla_antisymmetric_in_a_l(entries):
    # Killing equation: <∇_Z X, W> = -<∇_W X, Z> for the Killing field X = û_b
    for e in entries:
        n = e.space.n
        N = killing_nabla_table(e.space)[:n, :n, :]
        assert np.allclose(N, -np.transpose(N, (2, 1, 0)), atol=1e-15)


def test_killing_nabla_symmetric_part_in_b_l(entries):
    # metric compatibility: the (b, l)-symmetric part is û_a <û_b, û_l> = -(C_ab^l + C_al^b) at o
    for e in entries:
        n = e.space.n
        N = killing_nabla_table(e.space)[:n, :n, :]
        Cm = e.space.C[:n, :n, :n]
        assert np.allclose(N + np.transpose(N, (0, 2, 1)), -(Cm + np.transpose(Cm, (0, 2, 1))), atol=1e-15)


def test_killing_nabla_index_errors(h3, hopf):
    with pytest.raises(IndexRangeError):
        killing_nabla(hopf.space, 0, 1, 3)
    with pytest.raises(IndexRangeError):
        killing_nabla(h3.space, 5, 0, 0)
    with pytest.raises(IndexRangeError):
        uk_nabla_derivative(hopf.space, 3, 0, 0, 0)


def test_heisenberg_christoffel(h3, reference):
    G = christoffel_origin(h3.space)
    assert G[0, 1, 2] == 0.5 and G[1, 0, 2] == 0.5
    assert G[0, 2, 1] == -0.5 and G[2, 0, 1] == -0.5
    assert np.allclose(G, reference["heisenberg3_christoffel"], atol=1e-6)


def test_su2_christoffel(su2):
    G = christoffel_origin(su2.space)
    assert G[0, 1, 2] == 0.5 and G[1, 0, 2] == 0.5


def test_torsion_free(entries):
    for e in entries:
        G = christoffel_origin(e.space)
        assert np.array_equal(G, np.transpose(G, (1, 0, 2)))


def test_gamma_n_identity(entries):
    for e in entries:
        n = e.space.n
        G = christoffel_origin(e.space)
        C = e.space.C
        lhs = G[n - 1] - G[n - 1].T  # [i, j] = Γ_ni^j - Γ_nj^i
        assert np.allclose(lhs, C[:n, :n, n - 1].T, atol=1e-12)


def test_uk_nabla_reference(reference, h3, su2):
    spaces = {"heisenberg3": h3.space, "su2": su2.space}
    for item in reference["uk_nabla"]:
        k, i, j, l = (x - 1 for x in item["index"])
        assert abs(uk_nabla_derivative(spaces[item["entry"]], k, i, j, l) - item["value"]) <= 1e-6


def test_uk_nabla_table_fd(entries):
    for e in entries:
        sp = e.space
        T = uk_nabla_table(sp)
        for k, i, j, l in itertools.product(range(sp.n), repeat=4):
            assert T[k, i, j, l] == pytest.approx(uk_nabla_derivative(sp, k, i, j, l), abs=1e-15)
        # spot check against the chart for a few index tuples
        for k, i, j, l in [(0, 0, 1, 2), (2, 1, 0, 2), (1, 2, 2, 0)]:
            assert abs(T[k, i, j, l] - chart.uk_nabla_fd(sp, k, i, j, l)) <= 1e-6


def test_heisenberg_dgamma_reference(h3, reference):
    dG = christoffel_derivative_origin(h3.space)
    assert abs(dG[2, 0, 0, 0]) <= 1e-15
    assert np.allclose(dG, reference["heisenberg3_dgamma"], atol=1e-5)


def test_dgamma_symmetric(entries):
    for e in entries:
        dG = christoffel_derivative_origin(e.space)
        assert np.array_equal(dG, np.transpose(dG, (0, 2, 1, 3)))


def test_connection_origin_readonly(h3):
    conn = connection_origin(h3.space)
    with pytest.raises(ValueError):
        conn.gamma[0, 0, 0] = 1.0


def test_fd_christoffel_at_nonorigin_matches_a(h3):
    # invariance: the chart connection is smooth, compatibility holds away from o too
    fld = metric_field(h3.datum([0, 0, 0]))
    x = np.array([0.1, -0.2, 0.05])
    G = chart.christoffel(fld, x)
    a = fld.a(x)
    low = np.einsum("ijl,lm->ijm", G, a)
    da = chart.central_diff(fld.a, x)
    assert np.allclose(low + np.transpose(low, (0, 2, 1)), da, atol=1e-9)
