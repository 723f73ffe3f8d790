"""Weighted walks, second eigenvalues, and local spectral reports.

Eigenvalues of the fixture walks are known in closed form (complete
graphs, cycles, the Petersen graph), so they are pinned exactly and also
cross-checked against an independent dense eigensolver in oracles.py
that never touches the package's WalkMatrix plumbing.
"""

import math

import numpy as np
import pytest

from cosetx import fixtures as fx
from cosetx.complexes import SimplicialComplex, weights
from cosetx.errors import (
    InputError,
    NumericalError,
    ParameterError,
    StructureError,
)
from cosetx.spectral import (
    ko_link_report,
    ko_vertex_links,
    local_spectral_report,
    second_eigenvalue,
    walk_matrix,
)

import oracles

TOL = 1e-9


def bowtie():
    # two triangles sharing one vertex; the shared vertex has a
    # disconnected link
    return SimplicialComplex(2, 5, [[0, 1, 2], [0, 3, 4]])


# ---------------------------------------------------------------------------
# walk matrices


def test_transition_is_stochastic_and_reversible():
    for X in (fx.octahedron(), fx.torus_7(), fx.petersen_graph()):
        M = walk_matrix(X)
        P = M.transition()
        assert np.allclose(P.sum(axis=1), 1.0)
        pi = M.stationary()
        assert pi.sum() == pytest.approx(1.0)
        assert np.allclose(pi @ P, pi)
        # detailed balance: diag(pi) P is symmetric
        B = pi[:, None] * P
        assert np.allclose(B, B.T)
        exact = M.stationary_exact()
        assert sum(exact) == 1
        assert np.allclose([float(f) for f in exact], pi)


def test_symmetric_form_has_same_spectrum():
    X = fx.torus_7()
    M = walk_matrix(X)
    vals_p = np.sort(np.linalg.eigvals(M.transition()).real)
    vals_s = np.sort(np.linalg.eigvalsh(M.symmetric().toarray()))
    assert np.allclose(vals_p, vals_s)


def test_walk_matrix_validation():
    with pytest.raises(StructureError):
        walk_matrix(fx.two_triangles_disjoint())
    with pytest.raises(ParameterError):
        walk_matrix(SimplicialComplex(0, 2, [[0], [1]]))
    with pytest.raises(InputError):
        walk_matrix(fx.torus_7(), w=weights(fx.octahedron()))
    # interface symmetry: the matching table is accepted
    X = fx.torus_7()
    walk_matrix(X, w=weights(X))


# ---------------------------------------------------------------------------
# second eigenvalues


CLOSED_FORM = [
    (fx.single_triangle, -0.5),             # K_3
    (fx.complete_graph(4), -1 / 3),         # K_m: -1/(m-1)
    (fx.complete_graph(7), -1 / 6),
    (fx.cycle_complex(6), 0.5),             # cos(2 pi / 6)
    (fx.petersen_graph(), 1 / 3),
    (fx.octahedron, 0.0),
    (fx.torus_7, -1 / 6),                   # skeleton is K_7
    (fx.complete_bipartite(2, 3), 0.0),
]


@pytest.mark.parametrize("X,expect", CLOSED_FORM)
def test_second_eigenvalue_closed_forms(X, expect):
    if callable(X):
        X = X()
    lam = second_eigenvalue(walk_matrix(X))
    assert lam == pytest.approx(expect, abs=TOL)


def test_second_eigenvalue_matches_oracle():
    for X, _ in CLOSED_FORM:
        if callable(X):
            X = X()
        got = second_eigenvalue(walk_matrix(X))
        assert got == pytest.approx(oracles.walk_second_eigenvalue(X),
                                    abs=TOL)


def test_power_agrees_with_dense():
    for X in (fx.petersen_graph(), fx.torus_7(), fx.cycle_complex(9)):
        M = walk_matrix(X)
        dense = second_eigenvalue(M, method="dense")
        power = second_eigenvalue(M, method="power", tol=1e-10)
        assert power == pytest.approx(dense, abs=1e-8)
        again = second_eigenvalue(M, method="power", tol=1e-10)
        assert again == power                      # fixed seed


def test_power_iteration_reports_stall():
    M = walk_matrix(fx.torus_7())
    with pytest.raises(NumericalError) as exc:
        second_eigenvalue(M, method="power", tol=1e-30, max_iter=3)
    assert exc.value.residual > 0


def test_second_eigenvalue_validation():
    M = walk_matrix(fx.torus_7())
    with pytest.raises(ParameterError):
        second_eigenvalue(M, method="qr")
    tiny = walk_matrix(SimplicialComplex(1, 2, [[0, 1]]))
    assert second_eigenvalue(tiny) == pytest.approx(-1.0, abs=TOL)
    one = SimplicialComplex(1, 2, [[0, 1]])
    M1 = walk_matrix(one)
    M1 = M1.__class__(1, M1.edges[:0], M1.edge_counts[:0], M1.strength[:1])
    with pytest.raises(ParameterError):
        second_eigenvalue(M1)


# ---------------------------------------------------------------------------
# local spectral reports


def test_report_single_triangle():
    rep = local_spectral_report(fx.single_triangle(), 0.9)
    assert len(rep.entries) == 4                   # empty face + 3 vertices
    assert rep.entries[0].face == ()
    assert rep.max_second == pytest.approx(-0.5, abs=TOL)
    assert rep.connected_ok and rep.passed
    assert rep.summary().startswith("PASS")


def test_report_octahedron_dedup_verified():
    rep = local_spectral_report(fx.octahedron(), 0.9)
    assert len(rep.entries) == 7
    assert rep.max_second == pytest.approx(0.0, abs=TOL)
    reused = [e for e in rep.entries if e.solver == "reused"]
    # one representative per color class is solved, its partner reused
    assert sorted(e.reused_from for e in reused) == [(0,), (2,), (4,)]
    assert all(e.colors is not None for e in rep.entries[1:])
    flat = local_spectral_report(fx.octahedron(), 0.9, dedup=False)
    assert all(e.solver != "reused" for e in flat.entries)
    assert flat.max_second == pytest.approx(rep.max_second, abs=TOL)


def test_report_torus_threshold():
    rep = local_spectral_report(fx.torus_7(), 0.4)
    assert len(rep.entries) == 8                   # ambient + 7 vertex links
    assert rep.max_second == pytest.approx(0.5, abs=TOL)   # links are C_6
    assert not rep.passed and rep.summary().startswith("FAIL")
    assert sum(e.solver == "reused" for e in rep.entries) == 6
    assert local_spectral_report(fx.torus_7(), 0.5 + 1e-9).passed


def test_report_flags_disconnected_link():
    rep = local_spectral_report(bowtie(), 0.99)
    assert not rep.connected_ok and not rep.passed
    bad = [e for e in rep.entries if not e.connected]
    assert [e.face for e in bad] == [(0,)]
    assert bad[0].second is None and bad[0].solver == "none"


def test_report_to_dict_shape():
    rep = local_spectral_report(fx.single_triangle(), 0.9)
    d = rep.to_dict()
    assert set(d) == {"threshold", "max_second_eigenvalue",
                      "all_links_connected", "passed", "links"}
    assert len(d["links"]) == 4
    assert set(d["links"][0]) == {"face", "colors", "vertices", "connected",
                                  "second_eigenvalue", "solver",
                                  "reused_from"}


# ---------------------------------------------------------------------------
# KO vertex links


def test_ko_links_small_instance():
    links = ko_vertex_links(2, 2, 2, 1)
    assert len(links) == 3
    for lnk in links:
        assert lnk.vertex_count == 32              # |K_i| / |K_i n K_j|
        assert lnk.f_vector() == (32, 64)
        assert lnk.is_connected()


def test_ko_link_report_p2():
    # sqrt(2) < 2, so the theorem bound is unavailable and the observed
    # bipartite-flavored value 1/sqrt(2) is checked explicitly
    with pytest.raises(ParameterError):
        ko_link_report(2, 2, 2, 1)
    rep = ko_link_report(2, 2, 2, 1, threshold=1 / math.sqrt(2) + 1e-9)
    assert rep.passed and len(rep.entries) == 3
    assert rep.max_second == pytest.approx(1 / math.sqrt(2), abs=TOL)
    rep3 = ko_link_report(2, 2, 3, 1, threshold=1 / math.sqrt(2) + 1e-9)
    assert rep3.passed
    assert rep3.max_second == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_ko_links_validation():
    with pytest.raises(ParameterError):
        ko_vertex_links(1, 3, 2, 1)
