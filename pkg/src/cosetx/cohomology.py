"""Non-Abelian cochain calculus in degrees -1, 0, 1 and expansion constants.

Coefficients live in a finite group Lambda given by a multiplication table.
A 0-cochain is an array of Lambda indices over the vertices; a 1-cochain
stores one value per unordered edge, oriented low-to-high, with the reverse
orientation read off as the inverse.  Coboundaries follow

    d0 psi((u, v))    = psi(u) psi(v)^-1
    d1 phi((u, v, w)) = phi((u, v)) phi((v, w)) phi((w, u))

and C^0 acts on cocycles by psi.phi((u, v)) = psi(u) phi((u, v)) psi(v)^-1.

H^1 triviality is decided by spanning-tree gauge fixing: the C^0-stabilizer
of "identity on every tree edge" consists of the constant cochains alone
(a gauge psi fixing a tree edge value e forces psi(u) = psi(v) across it,
hence constancy on a connected complex), so tree-trivial cocycles meet
every cohomology class and two of them are equivalent iff conjugate by a
constant.  Triviality therefore reduces to "the all-identity assignment is
the unique tree-trivial cocycle", searched by backtracking over non-tree
edge values with triangle-equation propagation.  This reduction is not
taken on faith: the brute mode re-decides everything by enumerating all of
C^1 and C^0, and the test suite cross-validates the two mode answers.

Norms are exact rationals; the distance between cochains is the weighted
measure of their disagreement set, which is orientation-independent since
phi and psi agree at (u, v) iff they agree at (v, u).
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import random
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .complexes import SimplicialComplex, WeightTable
from .errors import (InputError, ParameterError, ResourceLimitError,
                     StructureError)
from .groups import FiniteGroup, TableGroup

DEFAULT_CAP = 1 << 24
MAX_COEFF_ORDER = 4096


# ---------------------------------------------------------------------------
# coefficient groups


class CoefficientGroup:
    """Finite coefficient group Lambda with dense lookup tables."""

    def __init__(self, group: FiniteGroup, name: str | None = None):
        if group.size > MAX_COEFF_ORDER:
            raise ResourceLimitError(
                f"coefficient group order {group.size} exceeds "
                f"{MAX_COEFF_ORDER}")
        self.group = group
        self.size = group.size
        self.identity = group.identity
        self.table = np.vstack([group.left_mult_table(a)
                                for a in range(group.size)])
        self.inv = np.array([group.inverse(a) for a in range(group.size)],
                            dtype=np.int64)
        self.name = name if name is not None else f"table:{group.size}"

    def mult(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def label(self, a: int) -> str:
        return self.group.label(a)

    def __repr__(self):
        return f"CoefficientGroup({self.name}, order={self.size})"


def zmod(m: int) -> CoefficientGroup:
    """Cyclic group Z/m, identity 0."""
    if m < 1:
        raise ParameterError(f"modulus must be positive, got {m}")
    idx = np.arange(m)
    table = (idx[:, None] + idx[None, :]) % m
    return CoefficientGroup(TableGroup(table, labels=[str(i) for i in idx]),
                            name=f"zmod:{m}")


def sym(k: int) -> CoefficientGroup:
    """Symmetric group on k letters in lexicographic permutation order."""
    if k < 1 or k > 7:
        raise ParameterError(f"sym(k) supports 1 <= k <= 7, got {k}")
    perms = list(itertools.permutations(range(k)))
    index = {q: i for i, q in enumerate(perms)}
    table = np.array([[index[tuple(a[b[i]] for i in range(k))]
                       for b in perms] for a in perms])
    labels = ["".join(map(str, q)) for q in perms]
    return CoefficientGroup(TableGroup(table, labels=labels, validate=False),
                            name=f"sym:{k}")


def coefficients_from_table(text: str, name: str = "table"
                            ) -> CoefficientGroup:
    """Parse the CLI table format: first line the order m, then m rows."""
    toks = text.split()
    if not toks:
        raise InputError("empty coefficient table")
    try:
        m = int(toks[0])
        vals = [int(x) for x in toks[1:]]
    except ValueError as exc:
        raise InputError(f"bad coefficient table: {exc}") from exc
    if m < 1 or len(vals) != m * m:
        raise InputError(
            f"coefficient table needs {m}*{m} entries, got {len(vals)}")
    table = np.array(vals, dtype=np.int64).reshape(m, m)
    if (table < 0).any() or (table >= m).any():
        raise InputError("coefficient table entries out of range")
    return CoefficientGroup(TableGroup(table), name=name)


def parse_coefficients(spec: str) -> CoefficientGroup:
    """zmod:m | sym:k | table:FILE"""
    kind, _, arg = spec.partition(":")
    if kind == "zmod" and arg:
        return zmod(int(arg))
    if kind == "sym" and arg:
        return sym(int(arg))
    if kind == "table" and arg:
        with open(arg) as fh:
            return coefficients_from_table(fh.read(), name=f"table:{arg}")
    raise InputError(f"cannot parse coefficient spec {spec!r}")


# ---------------------------------------------------------------------------
# cochains


@dataclasses.dataclass(frozen=True)
class Cochain0:
    """Vertex labeling by Lambda indices, total on X(0)."""

    lam: CoefficientGroup
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.asarray(self.values, dtype=np.int64))
        if self.values.ndim != 1:
            raise InputError("0-cochain needs a flat value array")
        if (self.values < 0).any() or (self.values >= self.lam.size).any():
            raise InputError("0-cochain value out of range")

    def __call__(self, v: int) -> int:
        return int(self.values[int(v)])


@dataclasses.dataclass(frozen=True)
class Cochain1:
    """Edge labeling by Lambda indices, one value per unordered edge.

    values[i] is phi((u, v)) for the i-th row (u, v), u < v, of X.faces(1);
    the reverse orientation is the inverse, so antisymmetry holds by
    construction.
    """

    lam: CoefficientGroup
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.asarray(self.values, dtype=np.int64))
        if self.values.ndim != 1:
            raise InputError("1-cochain needs a flat value array")
        if (self.values < 0).any() or (self.values >= self.lam.size).any():
            raise InputError("1-cochain value out of range")

    def value(self, X: SimplicialComplex, u: int, v: int) -> int:
        """phi((u, v)) for an oriented edge, inverting when u > v."""
        a, b = (u, v) if u < v else (v, u)
        pos = X.face_position((a, b))
        if pos < 0:
            raise InputError(f"({u}, {v}) is not an edge")
        val = int(self.values[pos])
        return val if u < v else int(self.lam.inv[val])

    @classmethod
    def from_edge_map(cls, X: SimplicialComplex, lam: CoefficientGroup,
                      mapping: Mapping) -> "Cochain1":
        """Build from oriented-edge values, verifying antisymmetry.

        Values may be given for either or both orientations; supplying
        phi((u,v)) and phi((v,u)) that are not mutually inverse is an
        error, as is omitting an edge of X.
        """
        E = X.face_count(1)
        vals = np.full(E, -1, dtype=np.int64)
        for (u, v), raw in mapping.items():
            val = int(raw)
            if not 0 <= val < lam.size:
                raise InputError(f"value {val} out of range for {lam.name}")
            a, b = (u, v) if u < v else (v, u)
            pos = X.face_position((a, b))
            if pos < 0:
                raise InputError(f"({u}, {v}) is not an edge")
            canon = val if u < v else int(lam.inv[val])
            if vals[pos] >= 0 and vals[pos] != canon:
                raise InputError(
                    f"antisymmetry violated on edge ({a}, {b})")
            vals[pos] = canon
        if (vals < 0).any():
            missing = int(np.flatnonzero(vals < 0)[0])
            raise InputError(
                f"no value for edge {tuple(X.faces(1)[missing])}")
        return cls(lam, vals)

    def identity_support_free(self) -> bool:
        return bool((self.values == self.lam.identity).all())


def identity_cochain1(X: SimplicialComplex, lam: CoefficientGroup
                      ) -> Cochain1:
    return Cochain1(lam, np.full(X.face_count(1), lam.identity,
                                 dtype=np.int64))


# ---------------------------------------------------------------------------
# skeleton bookkeeping (cached per complex)


@dataclasses.dataclass
class _Skeleton:
    edges: np.ndarray          # (E, 2) canonical rows of faces(1)
    tri_edges: np.ndarray      # (T, 3) edge indices: (ab, bc, ac)
    edge_cnt: np.ndarray       # maximal-face counts per edge
    vert_cnt: np.ndarray
    tri_cnt: np.ndarray
    parent: np.ndarray         # BFS forest, -1 at roots
    parent_edge: np.ndarray    # edge index to parent, -1 at roots
    bfs_order: np.ndarray
    tree_mask: np.ndarray      # (E,) tree-edge flags
    n_components: int


def _skeleton(X: SimplicialComplex) -> _Skeleton:
    sk = getattr(X, "_coho_skeleton", None)
    if sk is not None:
        return sk
    edges = X.faces(1)
    V = X.vertex_count
    tris = X.faces(2)
    if len(tris):
        ab = X.face_index_array(tris[:, [0, 1]])
        bc = X.face_index_array(tris[:, [1, 2]])
        ac = X.face_index_array(tris[:, [0, 2]])
        tri_edges = np.stack([ab, bc, ac], axis=1)
    else:
        tri_edges = np.empty((0, 3), dtype=np.int64)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(V)]
    for ei, (u, v) in enumerate(edges):
        adj[int(u)].append((int(v), ei))
        adj[int(v)].append((int(u), ei))
    for lst in adj:
        lst.sort()
    parent = np.full(V, -1, dtype=np.int64)
    parent_edge = np.full(V, -1, dtype=np.int64)
    seen = np.zeros(V, dtype=bool)
    order = []
    comps = 0
    for root in range(V):
        if seen[root]:
            continue
        comps += 1
        seen[root] = True
        order.append(root)
        queue = [root]
        while queue:
            nxt = []
            for u in queue:
                for v, ei in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        parent[v] = u
                        parent_edge[v] = ei
                        order.append(v)
                        nxt.append(v)
            queue = nxt
    tree_mask = np.zeros(len(edges), dtype=bool)
    tree_mask[parent_edge[parent_edge >= 0]] = True
    sk = _Skeleton(edges=edges, tri_edges=tri_edges,
                   edge_cnt=X.containment_counts(1),
                   vert_cnt=X.containment_counts(0),
                   tri_cnt=X.containment_counts(2) if X.n >= 2 else
                   np.empty(0, dtype=np.int64),
                   parent=parent, parent_edge=parent_edge,
                   bfs_order=np.array(order), tree_mask=tree_mask,
                   n_components=comps)
    X._coho_skeleton = sk
    return sk


def _require_connected(X: SimplicialComplex):
    sk = _skeleton(X)
    if sk.n_components != 1:
        raise InputError(
            f"1-skeleton is disconnected ({sk.n_components} components)")
    return sk


# ---------------------------------------------------------------------------
# coboundary maps and the gauge action


def d0(X: SimplicialComplex, psi: Cochain0) -> Cochain1:
    """d0 psi((u, v)) = psi(u) psi(v)^-1 per canonical edge."""
    if len(psi.values) != X.vertex_count:
        raise InputError("0-cochain size does not match the complex")
    lam = psi.lam
    e = _skeleton(X).edges
    vals = lam.table[psi.values[e[:, 0]], lam.inv[psi.values[e[:, 1]]]]
    return Cochain1(lam, vals)


def d1(X: SimplicialComplex, phi: Cochain1) -> np.ndarray:
    """Triangle values phi(ab) phi(bc) phi(ca), aligned with X.faces(2)."""
    if len(phi.values) != X.face_count(1):
        raise InputError("1-cochain size does not match the complex")
    lam = phi.lam
    te = _skeleton(X).tri_edges
    v = phi.values
    return lam.table[lam.table[v[te[:, 0]], v[te[:, 1]]],
                     lam.inv[v[te[:, 2]]]]


def is_cocycle(X: SimplicialComplex, phi: Cochain1) -> bool:
    return bool((d1(X, phi) == phi.lam.identity).all())


def _apply_gauge(X: SimplicialComplex, psi_vals: np.ndarray, phi: Cochain1
                 ) -> Cochain1:
    lam = phi.lam
    e = _skeleton(X).edges
    left = lam.table[psi_vals[e[:, 0]], phi.values]
    return Cochain1(lam, lam.table[left, lam.inv[psi_vals[e[:, 1]]]])


def gauge_act(X: SimplicialComplex, psi: Cochain0, phi: Cochain1
              ) -> Cochain1:
    """psi.phi((u, v)) = psi(u) phi((u, v)) psi(v)^-1 on a cocycle."""
    if len(psi.values) != X.vertex_count:
        raise InputError("0-cochain size does not match the complex")
    if psi.lam is not phi.lam and psi.lam.name != phi.lam.name:
        raise InputError("cochains use different coefficient groups")
    if not is_cocycle(X, phi):
        raise InputError("gauge action is defined on cocycles only")
    return _apply_gauge(X, psi.values, phi)


def tree_gauge_fix(X: SimplicialComplex, phi: Cochain1) -> Cochain1:
    """Gauge phi to the identity on a fixed BFS spanning tree.

    The tree is rooted at vertex 0 with neighbors scanned in increasing
    order, so the result is deterministic.  Requires a connected complex
    and a cocycle.
    """
    sk = _require_connected(X)
    if not is_cocycle(X, phi):
        raise InputError("tree gauge fixing is defined on cocycles only")
    lam = phi.lam
    psi = np.full(X.vertex_count, lam.identity, dtype=np.int64)
    edges = sk.edges
    for v in sk.bfs_order:
        u = sk.parent[v]
        if u < 0:
            continue
        ei = sk.parent_edge[v]
        val = int(phi.values[ei])
        if edges[ei, 0] != u:          # canonical row is (v, u)
            val = int(lam.inv[val])
        # psi(u) phi((u,v)) psi(v)^-1 = e  =>  psi(v) = psi(u) phi((u,v))
        psi[v] = lam.table[psi[u], val]
    return _apply_gauge(X, psi, phi)


def is_coboundary(X: SimplicialComplex, phi: Cochain1) -> Cochain0 | None:
    """A psi with d0 psi = phi, or None.  Works per component."""
    if len(phi.values) != X.face_count(1):
        raise InputError("1-cochain size does not match the complex")
    sk = _skeleton(X)
    lam = phi.lam
    psi = np.full(X.vertex_count, lam.identity, dtype=np.int64)
    edges = sk.edges
    for v in sk.bfs_order:
        u = sk.parent[v]
        if u < 0:
            continue
        ei = sk.parent_edge[v]
        val = int(phi.values[ei])
        if edges[ei, 0] != u:
            val = int(lam.inv[val])
        # d0 psi((u,v)) = phi((u,v))  =>  psi(v) = phi((u,v))^-1 psi(u)
        psi[v] = lam.table[lam.inv[val], psi[u]]
    cand = Cochain0(lam, psi)
    if np.array_equal(d0(X, cand).values, phi.values):
        return cand
    return None


# ---------------------------------------------------------------------------
# norms and distances


def _weight_counts(w: WeightTable, k: int) -> tuple[np.ndarray, int]:
    return w.X.containment_counts(k), w.denominator(k)


def norm(phi, w: WeightTable) -> Fraction:
    """Sum of weights over the support of a 0- or 1-cochain."""
    if isinstance(phi, Cochain0):
        cnt, den = _weight_counts(w, 0)
    elif isinstance(phi, Cochain1):
        cnt, den = _weight_counts(w, 1)
    else:
        raise InputError(f"cannot take the norm of {type(phi).__name__}")
    if len(phi.values) != len(cnt):
        raise InputError("cochain does not match the weight table")
    supp = phi.values != phi.lam.identity
    return Fraction(int(cnt[supp].sum()), den)


def norm_d1(X: SimplicialComplex, tri_vals: np.ndarray, w: WeightTable,
            identity: int) -> Fraction:
    """||d1 phi|| from the triangle-value array."""
    cnt, den = _weight_counts(w, 2)
    supp = np.asarray(tri_vals) != identity
    return Fraction(int(cnt[supp].sum()), den)


def distance(a, b, w: WeightTable) -> Fraction:
    """Weighted disagreement ||a b^-1||; orientation-independent."""
    if type(a) is not type(b):
        raise InputError("cochain degree mismatch")
    k = 0 if isinstance(a, Cochain0) else 1
    cnt, den = _weight_counts(w, k)
    if len(a.values) != len(cnt) or len(b.values) != len(cnt):
        raise InputError("cochain does not match the weight table")
    diff = a.values != b.values
    return Fraction(int(cnt[diff].sum()), den)


# ---------------------------------------------------------------------------
# tree-gauge H^1 decision


@dataclasses.dataclass
class H1Result:
    trivial: bool
    witness: Cochain1 | None
    mode: str
    classes: int | None = None

    def summary(self) -> str:
        out = f"H1 {'trivial' if self.trivial else 'NON-trivial'} " \
              f"({self.mode} mode"
        if self.classes is not None:
            out += f", {self.classes} classes"
        return out + ")"


def _gauge_solutions(X: SimplicialComplex, lam: CoefficientGroup,
                     cap: int, stop_after: int | None = None
                     ) -> list[tuple[int, ...]]:
    """All tree-trivial cocycles, in lexicographic order of value tuples.

    Iterative DFS over non-tree edge values with unit propagation through
    the triangle equations.  Branching always picks the lowest-index
    unassigned edge and tries values in increasing order; propagation is
    deterministic, so two solutions first differ exactly at some branch
    edge and the emission order is the lex order.  The all-identity
    assignment is therefore always emitted first.
    """
    sk = _require_connected(X)
    E = len(sk.edges)
    m, e0 = lam.size, lam.identity
    t, inv = lam.table, lam.inv
    tri = sk.tri_edges
    inc: list[list[int]] = [[] for _ in range(E)]
    for ti in range(len(tri)):
        for ei in tri[ti]:
            inc[int(ei)].append(ti)
    assign = np.full(E, -1, dtype=np.int64)
    trail: list[int] = []

    def set_edge(epos: int, val: int, pending: list[int]) -> bool:
        cur = assign[epos]
        if cur >= 0:
            return cur == val
        assign[epos] = val
        trail.append(epos)
        pending.extend(inc[epos])
        return True

    def propagate(pending: list[int]) -> bool:
        while pending:
            ti = pending.pop()
            ea, eb, ec = tri[ti]
            a, b, c = int(assign[ea]), int(assign[eb]), int(assign[ec])
            # plain ints: numpy bools would OR here instead of adding
            nun = (a < 0) + (b < 0) + (c < 0)
            if nun >= 2:
                continue
            if nun == 0:
                if t[t[a, b], inv[c]] != e0:
                    return False
                continue
            # product a.b.c^-1 = e with one unknown slot
            if a < 0:
                ok = set_edge(int(ea), int(t[c, inv[b]]), pending)
            elif b < 0:
                ok = set_edge(int(eb), int(t[inv[a], c]), pending)
            else:
                ok = set_edge(int(ec), int(t[a, b]), pending)
            if not ok:
                return False
        return True

    def undo_to(mark: int):
        while len(trail) > mark:
            assign[trail.pop()] = -1

    pending: list[int] = []
    ok = True
    for epos in np.flatnonzero(sk.tree_mask):
        ok = ok and set_edge(int(epos), e0, pending)
    ok = ok and propagate(pending)
    if not ok:
        return []

    def next_unassigned(start: int) -> int:
        while start < E and assign[start] >= 0:
            start += 1
        return start

    sols: list[tuple[int, ...]] = []

    def record() -> bool:
        sols.append(tuple(int(x) for x in assign))
        return stop_after is not None and len(sols) >= stop_after

    pos = next_unassigned(0)
    if pos == E:
        record()
        return sols
    nodes = 0
    stack = [[pos, 0, len(trail)]]
    while stack:
        frame = stack[-1]
        epos, val, mark = frame
        undo_to(mark)
        if val == m:
            stack.pop()
            continue
        frame[1] += 1
        nodes += 1
        if nodes > cap:
            raise ResourceLimitError(
                f"gauge search exceeded {cap} nodes", partial_count=nodes)
        pending = []
        if set_edge(epos, val, pending) and propagate(pending):
            nxt = next_unassigned(epos + 1)
            if nxt == E:
                if record():
                    return sols
            else:
                stack.append([nxt, 0, len(trail)])
    return sols


def _conjugation_classes(sols: Iterable[tuple[int, ...]],
                         lam: CoefficientGroup) -> int:
    """Orbits of tree-trivial cocycles under constant conjugation."""
    t, inv = lam.table, lam.inv
    seen: set[tuple[int, ...]] = set()
    classes = 0
    for s in sols:
        if s in seen:
            continue
        classes += 1
        for c in range(lam.size):
            seen.add(tuple(int(t[t[c, v], inv[c]]) for v in s))
    return classes


def h1_trivial(X: SimplicialComplex, lam: CoefficientGroup,
               mode: str = "gauge", cap: int = DEFAULT_CAP) -> H1Result:
    """Decide whether H^1(X, Lambda) is trivial.

    gauge mode backtracks over tree-trivial cocycles (see module notes);
    the witness is the lexicographically least nontrivial one.  brute mode
    independently enumerates C^1, filters Z^1 by checking every triangle,
    computes B^1 from all of C^0, and counts gauge orbits; it is the
    oracle the gauge mode is validated against and requires
    |Lambda|^|X(1)| and |Lambda|^|X(0)| within cap.
    """
    if X.n < 1:
        raise InputError("H^1 needs a complex with edges")
    if mode == "gauge":
        sols = _gauge_solutions(X, lam, cap, stop_after=2)
        if not sols:
            raise StructureError("tree propagation failed; the identity "
                                 "cochain must always survive")
        if len(sols) == 1:
            return H1Result(True, None, "gauge")
        return H1Result(False, Cochain1(lam, np.array(sols[1])), "gauge")
    if mode == "brute":
        return _h1_brute(X, lam, cap)
    raise InputError(f"unknown mode {mode!r}")


def h1_class_census(X: SimplicialComplex, lam: CoefficientGroup,
                    cap: int = DEFAULT_CAP) -> H1Result:
    """Gauge-mode census: count every cohomology class.

    Classes biject with constant-conjugation orbits of tree-trivial
    cocycles; cross-checked against the brute census in the tests.
    """
    sols = _gauge_solutions(X, lam, cap)
    classes = _conjugation_classes(sols, lam)
    witness = None
    for s in sols[1:]:
        witness = Cochain1(lam, np.array(s))
        break
    return H1Result(classes == 1, witness, "gauge", classes=classes)


# ---------------------------------------------------------------------------
# brute-force H^1 (the oracle mode)


def _enumerate_coboundaries(X: SimplicialComplex, lam: CoefficientGroup,
                            cap: int) -> set[tuple[int, ...]]:
    V = X.vertex_count
    m = lam.size
    if m ** V > cap:
        raise ResourceLimitError(
            f"|Lambda|^|X(0)| = {m}**{V} exceeds cap {cap}")
    out: set[tuple[int, ...]] = set()
    for psi in itertools.product(range(m), repeat=V):
        c = d0(X, Cochain0(lam, np.array(psi, dtype=np.int64)))
        out.add(tuple(int(x) for x in c.values))
    return out


def _enumerate_cocycles(X: SimplicialComplex, lam: CoefficientGroup,
                        cap: int) -> list[tuple[int, ...]]:
    """Every cocycle, by checking all triangles on all of C^1.

    Cochains are decoded from mixed-radix indices with edge 0 as the most
    significant digit, so the output comes back in lexicographic order.
    """
    sk = _skeleton(X)
    E = len(sk.edges)
    m = lam.size
    total = m ** E
    if total > cap:
        raise ResourceLimitError(
            f"|Lambda|^|X(1)| = {m}**{E} exceeds cap {cap}")
    t, inv = lam.table, lam.inv
    te = sk.tri_edges
    e0 = lam.identity
    powers = np.array([m ** (E - 1 - j) for j in range(E)], dtype=np.int64)
    out: list[tuple[int, ...]] = []
    chunk = 1 << 16
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        vals = (idx[:, None] // powers[None, :]) % m
        ok = np.ones(len(idx), dtype=bool)
        for ea, eb, ec in te:
            prod = t[t[vals[:, ea], vals[:, eb]], inv[vals[:, ec]]]
            ok &= prod == e0
        for row in vals[ok]:
            out.append(tuple(int(x) for x in row))
    return out


def _h1_brute(X: SimplicialComplex, lam: CoefficientGroup, cap: int
              ) -> H1Result:
    _require_connected(X)
    b1 = _enumerate_coboundaries(X, lam, cap)
    cocycles = _enumerate_cocycles(X, lam, cap)
    witness = None
    for phi in cocycles:
        if phi not in b1:
            witness = Cochain1(lam, np.array(phi))
            break
    abelian = bool(np.array_equal(lam.table, lam.table.T))
    if abelian:
        # orbits are cosets phi.B^1, so the census is a division
        if len(cocycles) % len(b1):
            raise StructureError("B^1 does not partition Z^1 evenly")
        classes = len(cocycles) // len(b1)
    else:
        V = X.vertex_count
        m = lam.size
        psis = [np.array(p, dtype=np.int64)
                for p in itertools.product(range(m), repeat=V)]
        zset = set(cocycles)
        seen: set[tuple[int, ...]] = set()
        classes = 0
        for phi in cocycles:
            if phi in seen:
                continue
            classes += 1
            base = Cochain1(lam, np.array(phi))
            for psi in psis:
                img = tuple(int(x)
                            for x in _apply_gauge(X, psi, base).values)
                if img not in zset:
                    raise StructureError("gauge action left Z^1")
                seen.add(img)
    return H1Result(classes == 1, witness, "brute", classes=classes)


# ---------------------------------------------------------------------------
# expansion constants


def _stirling2_total(V: int, bmax: int) -> int:
    """Number of partitions of V labeled items into 2..bmax blocks."""
    row = [1] + [0] * V            # S(0, j)
    prev = row
    for i in range(1, V + 1):
        cur = [0] * (V + 1)
        for j in range(1, i + 1):
            cur[j] = prev[j - 1] + j * prev[j]
        prev = cur
    return sum(prev[2:bmax + 1])


def _partitions_upto(V: int, bmax: int):
    """Restricted growth strings with at most bmax blocks."""
    a = [0] * V
    mx = [0] * V                  # running max of a[:i+1]
    i = V - 1
    yield a
    while i > 0:
        limit = min(mx[i - 1] + 1, bmax - 1)
        if a[i] < limit:
            a[i] += 1
            mx[i] = max(mx[i - 1], a[i])
            for j in range(i + 1, V):
                a[j] = 0
                mx[j] = mx[i]
            yield a
            i = V - 1
        else:
            i -= 1


def expansion_h0(X: SimplicialComplex, lam: CoefficientGroup,
                 cap: int = DEFAULT_CAP) -> Fraction:
    """h^0_cobound: min ||d0 phi|| / dist(phi, constants), exact.

    The ratio depends only on the partition of the vertices into level
    sets of phi, so the search runs over partitions with at most |Lambda|
    blocks instead of all |Lambda|^|X(0)| cochains; |Lambda| = 2 gets a
    vectorized subset scan.
    """
    if lam.size < 2:
        raise ParameterError("expansion needs a non-trivial group")
    if X.n < 1:
        raise InputError("expansion_h0 needs a 1-skeleton")
    sk = _skeleton(X)
    V = X.vertex_count
    ecnt = sk.edge_cnt
    vcnt = sk.vert_cnt
    d_edge = math.comb(X.n + 1, 2) * len(X.max_faces)
    d_vert = (X.n + 1) * len(X.max_faces)
    total_v = int(vcnt.sum())
    if lam.size == 2:
        if V - 1 > 24 or 2 ** (V - 1) > cap:
            raise ResourceLimitError(
                f"2**{V - 1} vertex subsets exceed cap {cap}")
        # vertex V-1 pinned outside; {S, S^c} pairs then appear once
        subs = np.arange(1, 2 ** (V - 1), dtype=np.uint64)
        u, w = sk.edges[:, 0], sk.edges[:, 1]
        num = np.zeros(len(subs), dtype=np.int64)
        for ei in range(len(sk.edges)):
            cross = ((subs >> np.uint64(u[ei])) ^
                     (subs >> np.uint64(w[ei]))) & np.uint64(1)
            num += cross.astype(np.int64) * int(ecnt[ei])
        side = np.zeros(len(subs), dtype=np.int64)
        for v in range(V):
            inside = (subs >> np.uint64(v)) & np.uint64(1)
            side += inside.astype(np.int64) * int(vcnt[v])
        den = np.minimum(side, total_v - side)
        ratio = num.astype(float) / den.astype(float)
        lo = ratio.min()
        cand = np.flatnonzero(ratio <= lo * (1 + 1e-9) + 1e-300)
        best = min(Fraction(int(num[i]) * d_vert, int(den[i]) * d_edge)
                   for i in cand)
        return best
    bmax = min(lam.size, V)
    if _stirling2_total(V, bmax) > cap:
        raise ResourceLimitError(
            f"partition count exceeds cap {cap}")
    eu, ev = sk.edges[:, 0], sk.edges[:, 1]
    best = None
    for lab in _partitions_upto(V, bmax):
        arr = lab  # list of ints, block ids 0..bmax-1
        if max(arr) == 0:
            continue                       # constant phi, in B^0
        num = 0
        for ei in range(len(eu)):
            if arr[eu[ei]] != arr[ev[ei]]:
                num += int(ecnt[ei])
        blocks: dict[int, int] = {}
        for v in range(V):
            blocks[arr[v]] = blocks.get(arr[v], 0) + int(vcnt[v])
        den = total_v - max(blocks.values())
        r = Fraction(num * d_vert, den * d_edge)
        if best is None or r < best:
            best = r
    if best is None:
        raise InputError("no non-constant cochain exists")
    return best


@dataclasses.dataclass
class ExpansionH1Report:
    h1_cobound: Fraction | None
    h1_cosys: Fraction | None
    min_systole: Fraction | None
    mode: str
    exact: bool

    def summary(self) -> str:
        tag = "exact" if self.exact else "upper bounds (search)"
        return (f"h1_cobound={self.h1_cobound}  h1_cosys={self.h1_cosys}  "
                f"min_systole={self.min_systole}  [{tag}]")


def _z1_b1_sets_gf2(X: SimplicialComplex) -> tuple[np.ndarray, np.ndarray]:
    """Z^1 and B^1 over Z/2 as sorted uint64 edge-bitmask arrays.

    Bit j of a mask is the value on edge j.  Computed by GF(2) linear
    algebra: B^1 is spanned by the vertex coboundaries, Z^1 by B^1 plus a
    nullspace complement of the triangle parity system.
    """
    sk = _skeleton(X)
    E = len(sk.edges)
    if E > 62:
        raise ResourceLimitError("GF(2) bitmask path supports <= 62 edges")
    V = X.vertex_count
    # B^1 span
    vert_masks = np.zeros(V, dtype=np.uint64)
    for ei, (u, v) in enumerate(sk.edges):
        bit = np.uint64(1) << np.uint64(ei)
        vert_masks[int(u)] ^= bit
        vert_masks[int(v)] ^= bit
    b_basis = _gf2_reduce(vert_masks)
    b1 = _gf2_span(b_basis)
    # Z^1 = nullspace of the triangle parity matrix (rows over edges)
    rows = []
    for ea, eb, ec in sk.tri_edges:
        rows.append((np.uint64(1) << np.uint64(int(ea)))
                    ^ (np.uint64(1) << np.uint64(int(eb)))
                    ^ (np.uint64(1) << np.uint64(int(ec))))
    null_basis = _gf2_nullspace(rows, E)
    z1 = _gf2_span(np.array(null_basis, dtype=np.uint64))
    return np.sort(z1), np.sort(b1)


def _gf2_reduce(vecs) -> list[np.uint64]:
    basis: list[np.uint64] = []
    for v in vecs:
        v = np.uint64(v)
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def _gf2_span(basis) -> np.ndarray:
    out = np.zeros(1, dtype=np.uint64)
    for b in basis:
        out = np.concatenate([out, out ^ np.uint64(b)])
    return np.unique(out)


def _gf2_nullspace(rows: Sequence[np.uint64], nbits: int
                   ) -> list[np.uint64]:
    """Basis of {x : popcount(x & row) even for all rows}.

    Keeps the row system in reduced echelon form (each pivot bit appears
    in exactly one row), so one pass of pivot flips solves each free
    column's vector.
    """
    mat: list[int] = []
    for r in rows:
        r = int(r)
        for row in mat:
            if (r >> (row.bit_length() - 1)) & 1:
                r ^= row
        if not r:
            continue
        pb = r.bit_length() - 1
        mat = [row ^ r if (row >> pb) & 1 else row for row in mat]
        mat.append(r)
    pivot_cols = {row.bit_length() - 1 for row in mat}
    basis = []
    for j in range(nbits):
        if j in pivot_cols:
            continue
        x = 1 << j
        for row in mat:
            if bin(x & row).count("1") % 2:
                x ^= 1 << (row.bit_length() - 1)
        basis.append(np.uint64(x))
    return basis


def _exact_min_ratio(num: np.ndarray, den: np.ndarray, valid: np.ndarray,
                     d_num: int, d_den: int) -> Fraction | None:
    """min over valid of (num/d_num) / (den/d_den), exact."""
    idx = np.flatnonzero(valid)
    if len(idx) == 0:
        return None
    nf = num[idx].astype(float)
    df = den[idx].astype(float)
    r = nf / df
    lo = r.min()
    cand = idx[r <= lo * (1 + 1e-9) + 1e-300]
    return min(Fraction(int(num[i]) * d_den, int(den[i]) * d_num)
               for i in cand)


def _expansion_h1_gf2(X: SimplicialComplex, cap: int) -> ExpansionH1Report:
    sk = _skeleton(X)
    E = len(sk.edges)
    if 2 ** E > cap:
        raise ResourceLimitError(f"2**{E} edge cochains exceed cap {cap}")
    z1, b1 = _z1_b1_sets_gf2(X)
    ecnt = sk.edge_cnt.astype(np.int64)
    tcnt = sk.tri_cnt.astype(np.int64)
    d_edge = math.comb(X.n + 1, 2) * len(X.max_faces)
    d_tri = math.comb(X.n + 1, 3) * len(X.max_faces)
    uniform_e = int(ecnt[0]) if len(np.unique(ecnt)) == 1 else None
    tri_masks = np.zeros(len(sk.tri_edges), dtype=np.uint64)
    for ti, (ea, eb, ec) in enumerate(sk.tri_edges):
        tri_masks[ti] = ((np.uint64(1) << np.uint64(int(ea)))
                         ^ (np.uint64(1) << np.uint64(int(eb)))
                         ^ (np.uint64(1) << np.uint64(int(ec))))
    # systole among Z^1 \ B^1
    in_b1 = np.isin(z1, b1, assume_unique=True)
    systole = None
    if not in_b1.all():
        nz = z1[~in_b1]
        wts = _weighted_pop(nz, ecnt, uniform_e)
        systole = Fraction(int(wts.min()), d_edge)
    h1_cobound: Fraction | None
    total = 1 << E
    chunk = 1 << 18
    if len(z1) != len(b1):
        h1_cobound = Fraction(0)      # H^1 nontrivial forces the min to 0
    else:
        h1_cobound = None
        best_nd: tuple[int, int] | None = None
        for lo in range(0, total, chunk):
            arr = np.arange(lo, min(lo + chunk, total), dtype=np.uint64)
            num = _tri_weight(arr, tri_masks, tcnt)
            dist = _min_dist(arr, b1, ecnt, uniform_e)
            r = _exact_min_ratio(num, dist, dist > 0, d_tri, d_edge)
            if r is not None and (h1_cobound is None or r < h1_cobound):
                h1_cobound = r
    best_cosys: Fraction | None = None
    for lo in range(0, total, chunk):
        arr = np.arange(lo, min(lo + chunk, total), dtype=np.uint64)
        num = _tri_weight(arr, tri_masks, tcnt)
        dist = _min_dist(arr, z1, ecnt, uniform_e)
        r = _exact_min_ratio(num, dist, dist > 0, d_tri, d_edge)
        if r is not None and (best_cosys is None or r < best_cosys):
            best_cosys = r
    return ExpansionH1Report(h1_cobound, best_cosys, systole,
                             mode="exact", exact=True)


def _weighted_pop(masks: np.ndarray, ecnt: np.ndarray,
                  uniform: int | None) -> np.ndarray:
    if uniform is not None:
        return np.bitwise_count(masks).astype(np.int64) * uniform
    E = len(ecnt)
    bits = ((masks[:, None] >> np.arange(E, dtype=np.uint64)[None, :])
            & np.uint64(1)).astype(np.int64)
    return bits @ ecnt


def _tri_weight(arr: np.ndarray, tri_masks: np.ndarray,
                tcnt: np.ndarray) -> np.ndarray:
    if len(tri_masks) == 0:
        return np.zeros(len(arr), dtype=np.int64)
    par = (np.bitwise_count(arr[:, None] & tri_masks[None, :])
           & np.uint64(1)).astype(np.int64)
    return par @ tcnt


def _min_dist(arr: np.ndarray, ref: np.ndarray, ecnt: np.ndarray,
              uniform: int | None) -> np.ndarray:
    best = None
    for z in ref:
        w = _weighted_pop(arr ^ z, ecnt, uniform)
        best = w if best is None else np.minimum(best, w)
    return best


def _expansion_h1_generic(X: SimplicialComplex, lam: CoefficientGroup,
                          cap: int) -> ExpansionH1Report:
    sk = _skeleton(X)
    E = len(sk.edges)
    m = lam.size
    if m ** E > cap:
        raise ResourceLimitError(
            f"|Lambda|^|X(1)| = {m}**{E} exceeds cap {cap}")
    b1 = sorted(_enumerate_coboundaries(X, lam, cap))
    t, inv = lam.table, lam.inv
    e0 = lam.identity
    te = sk.tri_edges
    ecnt = sk.edge_cnt
    tcnt = sk.tri_cnt
    d_edge = math.comb(X.n + 1, 2) * len(X.max_faces)
    d_tri = math.comb(X.n + 1, 3) * len(X.max_faces)

    def tri_w(vals) -> int:
        out = 0
        for ti, (ea, eb, ec) in enumerate(te):
            if t[t[vals[ea], vals[eb]], inv[vals[ec]]] != e0:
                out += int(tcnt[ti])
        return out

    def dist_w(vals, ref) -> int:
        best = None
        for other in ref:
            d = 0
            for ei in range(E):
                if vals[ei] != other[ei]:
                    d += int(ecnt[ei])
            if best is None or d < best:
                best = d
                if best == 0:
                    break
        return best

    z1 = _enumerate_cocycles(X, lam, cap)
    b1set = set(b1)
    nontriv = [v for v in z1 if v not in b1set]
    systole = None
    if nontriv:
        systole = Fraction(
            min(sum(int(ecnt[ei]) for ei in range(E) if v[ei] != e0)
                for v in nontriv), d_edge)
    if nontriv:
        h1_cobound: Fraction | None = Fraction(0)
    else:
        h1_cobound = None
        for vals in itertools.product(range(m), repeat=E):
            dv = dist_w(vals, b1)
            if dv == 0:
                continue
            r = Fraction(tri_w(vals) * d_edge, dv * d_tri)
            if h1_cobound is None or r < h1_cobound:
                h1_cobound = r
    h1_cosys: Fraction | None = None
    for vals in itertools.product(range(m), repeat=E):
        dv = dist_w(vals, z1)
        if dv == 0:
            continue
        r = Fraction(tri_w(vals) * d_edge, dv * d_tri)
        if h1_cosys is None or r < h1_cosys:
            h1_cosys = r
    return ExpansionH1Report(h1_cobound, h1_cosys, systole,
                             mode="exact", exact=True)


def _expansion_h1_search(X: SimplicialComplex, lam: CoefficientGroup,
                         cap: int, seed: int, iters: int
                         ) -> ExpansionH1Report:
    """Randomized upper bound on h^1_cobound: best ratio over proposals.

    Distances to B^1 are exact (full coboundary enumeration, so the
    reported value is a true upper bound); the minimization over C^1 is
    heuristic.  h^1_cosys and the systole are not estimated.
    """
    sk = _skeleton(X)
    E = len(sk.edges)
    m = lam.size
    b1 = sorted(_enumerate_coboundaries(X, lam, cap))
    t, inv = lam.table, lam.inv
    e0 = lam.identity
    te = sk.tri_edges
    ecnt = sk.edge_cnt
    tcnt = sk.tri_cnt
    d_edge = math.comb(X.n + 1, 2) * len(X.max_faces)
    d_tri = math.comb(X.n + 1, 3) * len(X.max_faces)
    rng = random.Random(seed)

    def ratio(vals) -> Fraction | None:
        dv = None
        for other in b1:
            d = sum(int(ecnt[ei]) for ei in range(E)
                    if vals[ei] != other[ei])
            if dv is None or d < dv:
                dv = d
                if dv == 0:
                    return None
        num = 0
        for ti, (ea, eb, ec) in enumerate(te):
            if t[t[vals[ea], vals[eb]], inv[vals[ec]]] != e0:
                num += int(tcnt[ti])
        return Fraction(num * d_edge, dv * d_tri)

    best: Fraction | None = None
    for _ in range(max(1, iters)):
        vals = [rng.randrange(m) for _ in range(E)]
        r = ratio(vals)
        improved = True
        while improved:
            improved = False
            for ei in range(E):
                old = vals[ei]
                for nv in range(m):
                    if nv == old:
                        continue
                    vals[ei] = nv
                    r2 = ratio(vals)
                    if r2 is not None and (r is None or r2 < r):
                        r = r2
                        old = nv
                        improved = True
                vals[ei] = old
        if r is not None and (best is None or r < best):
            best = r
    return ExpansionH1Report(best, None, None, mode="search", exact=False)


def expansion_h1(X: SimplicialComplex, lam: CoefficientGroup,
                 mode: str = "exact", cap: int = DEFAULT_CAP,
                 seed: int = 0, iters: int = 32) -> ExpansionH1Report:
    """Coboundary/cosystolic expansion in degree 1.

    exact mode enumerates all of C^1 (within cap) and returns
    (h1_cobound, h1_cosys, min systole norm) as exact rationals; when
    Z^1 != B^1 the coboundary constant is 0 without a scan.  search mode
    returns the best ratio found by randomized local descent, a true
    upper bound on h1_cobound, with the other fields unset.
    """
    if lam.size < 2:
        raise ParameterError("expansion needs a non-trivial group")
    if X.n < 2:
        raise InputError("expansion_h1 needs a 2-dimensional complex")
    _require_connected(X)
    if mode == "exact":
        # any order-2 table with identity at 0 is Z/2, i.e. xor
        if (lam.size == 2 and lam.identity == 0
                and len(_skeleton(X).edges) <= 62):
            return _expansion_h1_gf2(X, cap)
        return _expansion_h1_generic(X, lam, cap)
    if mode == "search":
        return _expansion_h1_search(X, lam, cap, seed, iters)
    raise InputError(f"unknown mode {mode!r}")


def dd_bound(lam_2: float, beta: float) -> float:
    """(1 - lambda) beta / 24 - e lambda, at double precision.

    The trickling-down style guarantee for 1-cosystolic expansion given a
    links-spectral bound lambda and a local constant beta; negative
    output means the bound is vacuous at these parameters.
    """
    lam_2 = float(lam_2)
    beta = float(beta)
    if not 0 <= lam_2 < 1:
        raise ParameterError(f"need 0 <= lambda < 1, got {lam_2}")
    if beta <= 0:
        raise ParameterError(f"need beta > 0, got {beta}")
    return (1.0 - lam_2) * beta / 24.0 - math.e * lam_2
