"""Random-walk spectra of weighted 1-skeletons and local expansion reports.

The walk moves from a vertex along an incident edge with probability
proportional to the edge weight.  Because every edge weight is its
maximal-face containment count over a fixed denominator, integer counts
drive all matrix assembly and the stationary distribution is exactly the
normalized vertex weight vector.  Floating point enters only in the
eigensolvers; every reported eigenvalue carries a stated tolerance.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .complexes import (SimplicialComplex, WeightTable, coset_complex,
                        is_isomorphic_partite, link)
from .errors import (InputError, NumericalError, ParameterError,
                     ResourceLimitError, StructureError)

# above this many vertices the dense symmetric eigensolver gives way to
# deflated power iteration
DENSE_LIMIT = 3000

DENSE_TOL = 1e-9
POWER_TOL = 1e-7  # residual bound; eigenvalue error is at most this
POWER_MAX_ITER = 200_000


# ---------------------------------------------------------------------------
# walk matrices


@dataclasses.dataclass(frozen=True)
class WalkMatrix:
    """Reversible walk on a weighted 1-skeleton.

    ``edge_counts[e]`` is the number of maximal faces containing edge e and
    ``strength[v]`` the sum over edges at v, so the transition probability
    u -> v is edge_counts(uv)/strength(u).  Detailed balance holds with
    stationary mass proportional to strength, which equals dim(X) times the
    vertex containment count.
    """

    vertex_count: int
    edges: np.ndarray
    edge_counts: np.ndarray
    strength: np.ndarray

    def transition(self) -> np.ndarray:
        """Dense row-stochastic transition matrix (small complexes only)."""
        V = self.vertex_count
        P = np.zeros((V, V))
        u, v = self.edges[:, 0], self.edges[:, 1]
        P[u, v] = self.edge_counts / self.strength[u]
        P[v, u] = self.edge_counts / self.strength[v]
        return P

    def symmetric(self):
        """Sparse D^{1/2} P D^{-1/2}; same spectrum, symmetric."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        root = np.sqrt(self.strength.astype(np.float64))
        val = self.edge_counts / (root[u] * root[v])
        V = self.vertex_count
        return coo_matrix(
            (np.concatenate([val, val]),
             (np.concatenate([u, v]), np.concatenate([v, u]))),
            shape=(V, V)).tocsr()

    def stationary(self) -> np.ndarray:
        return self.strength / self.strength.sum()

    def stationary_exact(self) -> list[Fraction]:
        tot = int(self.strength.sum())
        return [Fraction(int(s), tot) for s in self.strength]


def walk_matrix(X: SimplicialComplex, w: WeightTable | None = None
                ) -> WalkMatrix:
    """The weighted walk on the 1-skeleton of X.

    ``w`` may be passed for interface symmetry; it must belong to X.  The
    walk only ever depends on the containment counts, so the table itself
    is not consulted.
    """
    if X.n < 1:
        raise ParameterError("a 0-dimensional complex has no 1-skeleton walk")
    if w is not None and w.X is not X:
        raise InputError("weight table was built from a different complex")
    ncomp = int(connected_components(X.adjacency(), directed=False,
                                     return_labels=False))
    if ncomp != 1:
        raise StructureError(
            f"1-skeleton is disconnected ({ncomp} components)")
    edges = X.faces(1)
    ec = X.containment_counts(1).astype(np.int64)
    strength = np.zeros(X.vertex_count, dtype=np.int64)
    np.add.at(strength, edges[:, 0], ec)
    np.add.at(strength, edges[:, 1], ec)
    return WalkMatrix(X.vertex_count, edges, ec, strength)


# ---------------------------------------------------------------------------
# second eigenvalue


def _second_dense(M: WalkMatrix) -> float:
    S = M.symmetric().toarray()
    vals = scipy.linalg.eigh(S, eigvals_only=True)
    return float(vals[-2])


def _second_power(M: WalkMatrix, tol: float, max_iter: int, seed: int
                  ) -> tuple[float, float, int]:
    """Deflated power iteration on B = (S+1)/2.

    Shifting maps the spectrum into [0, 1] so the magnitude order agrees
    with the signed order; the top eigenpair (sqrt of the stationary
    distribution, eigenvalue 1) is known exactly and projected out every
    step.  For symmetric operators |Rayleigh - eigenvalue| is bounded by
    the residual norm, which is the stopping criterion.
    """
    S = M.symmetric()
    q = np.sqrt(M.strength.astype(np.float64))
    q /= np.linalg.norm(q)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(M.vertex_count)
    x -= (q @ x) * q
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise NumericalError("start vector degenerate; reseed")
    x /= nx
    res = math.inf
    for it in range(1, max_iter + 1):
        y = 0.5 * (S @ x + x)
        y -= (q @ y) * q
        mu = float(x @ y)
        res = float(np.linalg.norm(y - mu * x))
        if res <= tol:
            return 2.0 * mu - 1.0, res, it
        ny = np.linalg.norm(y)
        if ny == 0.0:
            # x is an exact kernel vector of the shifted operator
            return -1.0, 0.0, it
        x = y / ny
    raise NumericalError(
        f"power iteration stalled at residual {res:.3e} after {max_iter} "
        f"iterations (tolerance {tol:.1e})", residual=res)


def second_eigenvalue(M: WalkMatrix, method: str = "auto",
                      tol: float | None = None,
                      max_iter: int = POWER_MAX_ITER, seed: int = 0) -> float:
    """Second-largest eigenvalue of the walk.

    ``auto`` solves densely up to DENSE_LIMIT vertices (absolute accuracy
    ~1e-9) and by deflated power iteration above (residual-certified to
    ``tol``, default 1e-7).
    """
    if M.vertex_count < 2:
        raise ParameterError("the walk needs at least two vertices")
    if method == "auto":
        method = "dense" if M.vertex_count <= DENSE_LIMIT else "power"
    if method == "dense":
        return _second_dense(M)
    if method == "power":
        val, _, _ = _second_power(M, POWER_TOL if tol is None else tol,
                                  max_iter, seed)
        return val
    raise ParameterError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# local spectral reports


@dataclasses.dataclass
class LinkEntry:
    """One link's walk spectrum inside a report.

    ``face`` is the face of the ambient complex (empty tuple for the
    complex itself) or None when the link was built directly from group
    data and no ambient face is materialized.
    """

    face: tuple[int, ...] | None
    colors: tuple[int, ...] | None
    vertices: int
    connected: bool
    second: float | None
    solver: str
    reused_from: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "face": None if self.face is None else list(self.face),
            "colors": None if self.colors is None else list(self.colors),
            "vertices": self.vertices,
            "connected": self.connected,
            "second_eigenvalue": self.second,
            "solver": self.solver,
            "reused_from": (None if self.reused_from is None
                            else list(self.reused_from)),
        }


@dataclasses.dataclass
class LocalSpectralReport:
    threshold: float
    entries: list[LinkEntry]
    max_second: float | None
    connected_ok: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "max_second_eigenvalue": self.max_second,
            "all_links_connected": self.connected_ok,
            "passed": self.passed,
            "links": [e.to_dict() for e in self.entries],
        }

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        top = "n/a" if self.max_second is None else f"{self.max_second:.9f}"
        return (f"{verdict}: {len(self.entries)} links, max second "
                f"eigenvalue {top}, threshold {self.threshold:.9f}")


def _finish_report(entries: list[LinkEntry], threshold: float
                   ) -> LocalSpectralReport:
    seconds = [e.second for e in entries if e.second is not None]
    max_second = max(seconds) if seconds else None
    connected_ok = all(e.connected for e in entries)
    passed = (connected_ok and max_second is not None
              and max_second <= threshold)
    return LocalSpectralReport(threshold, entries, max_second,
                               connected_ok, passed)


def _solve_entry(lnk: SimplicialComplex, face, colors) -> LinkEntry:
    if not lnk.is_connected():
        return LinkEntry(face, colors, lnk.vertex_count, False, None, "none")
    M = walk_matrix(lnk)
    solver = "dense" if lnk.vertex_count <= DENSE_LIMIT else "power"
    return LinkEntry(face, colors, lnk.vertex_count, True,
                     second_eigenvalue(M), solver)


def local_spectral_report(X: SimplicialComplex, lam_threshold: float,
                          dedup: bool = True, iso_node_cap: int = 200_000
                          ) -> LocalSpectralReport:
    """Walk spectra of X and of every link of dimension >= 1.

    Iterates tau over the faces of dimension -1..n-2 (the empty face gives
    X itself).  Within a color class, links isomorphic to an already-solved
    representative reuse its eigenvalue; isomorphism is verified, never
    assumed, so the report is also correct on complexes that are not
    vertex-transitive.  Disconnected links appear as failure entries.
    """
    entries: list[LinkEntry] = []
    cache: dict = {}
    for k in range(-1, X.n - 1):
        for row in X.faces(k):
            tau = tuple(int(v) for v in row)
            colors = (tuple(int(c) for c in X.colors[list(tau)])
                      if X.colors is not None and tau else None)
            lnk = X if not tau else link(X, tau)
            entry = None
            if dedup:
                key = (k, colors)
                sig = (tuple(lnk.f_vector()),
                       tuple(np.sort(lnk.containment_counts(0)).tolist()))
                for rep_lnk, rep_sig, rep_entry in cache.get(key, []):
                    if sig != rep_sig or not rep_entry.connected:
                        continue
                    try:
                        same = is_isomorphic_partite(
                            lnk, rep_lnk, node_cap=iso_node_cap) is not None
                    except ResourceLimitError:
                        same = False
                    if same:
                        entry = LinkEntry(tau, colors, lnk.vertex_count, True,
                                          rep_entry.second, "reused",
                                          reused_from=rep_entry.face)
                        break
            if entry is None:
                entry = _solve_entry(lnk, tau, colors)
                if dedup:
                    cache.setdefault((k, colors), []).append(
                        (lnk, (tuple(lnk.f_vector()),
                               tuple(np.sort(lnk.containment_counts(0))
                                     .tolist())), entry))
            entries.append(entry)
    return _finish_report(entries, lam_threshold)


# ---------------------------------------------------------------------------
# KO links, built in the small groups


def _intersection_indices(ambient, other) -> np.ndarray:
    """Indices (into ambient) of ambient's elements lying in ``other``."""
    return np.flatnonzero(other.contains_flat_rows(ambient.elems))


def ko_vertex_links(n: int, p: int, s: int, d: int,
                    cap: int = 1 << 24) -> list[SimplicialComplex]:
    """The vertex links of X^{(s)}_{n,p}, one per color, as coset complexes.

    The link of a color-i vertex is CC(K_i, {K_i n K_j : j != i}), so only
    the K_i themselves are ever enumerated; the ambient group, which is
    astronomically larger, never is.  That identification is exercised
    against literal links of small instances in the test suite.
    """
    from .groups import RingTable, subgroup_K

    if n < 2:
        raise ParameterError("vertex links of a graph carry no walk; "
                             "need n >= 2")
    ring = RingTable(p, s)
    Ks = [subgroup_K(n, p, s, d, i, cap=cap, ring=ring) for i in range(n + 1)]
    out = []
    for i in range(n + 1):
        subs = [_intersection_indices(Ks[i], Ks[j])
                for j in range(n + 1) if j != i]
        out.append(coset_complex(Ks[i], subs))
    return out


def ko_link_report(n: int, p: int, s: int, d: int,
                   threshold: float | None = None,
                   cap: int = 1 << 24) -> LocalSpectralReport:
    """Spectral check of the KO vertex links against 1/(sqrt(p) - n).

    The ambient walk is deliberately absent: for interesting parameters the
    full group is out of reach, and the local criterion quantifies over
    links.  ``threshold`` defaults to the theorem bound, which requires
    sqrt(p) > n.
    """
    if threshold is None:
        if math.sqrt(p) <= n:
            raise ParameterError(
                f"default bound 1/(sqrt(p)-n) needs sqrt(p) > n; "
                f"pass an explicit threshold for p={p}, n={n}")
        threshold = 1.0 / (math.sqrt(p) - n)
    entries = []
    for i, lnk in enumerate(ko_vertex_links(n, p, s, d, cap=cap)):
        entry = _solve_entry(lnk, None, (i,))
        entries.append(entry)
    return _finish_report(entries, threshold)
