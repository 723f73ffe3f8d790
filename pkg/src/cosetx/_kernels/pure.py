"""Numpy fallback kernel.

Same contract as the compiled core: table-driven batched matrix products
and deterministic BFS closure.  Everything is vectorized per layer; the
compiled core only wins on the per-element inner loop.
"""

from __future__ import annotations

import numpy as np

from ..errors import ResourceLimitError
from .common import fits_uint64, identity_flat, key_powers, pack_key_big, pack_keys

NAME = "pure"


def matmul_batch(A: np.ndarray, B: np.ndarray, mul: np.ndarray, add: np.ndarray,
                 m: int) -> np.ndarray:
    """Row-flattened matrix products over a tabled ring.

    A and B are uint32 arrays of shape (k, m*m) or (m*m,); one side may be
    a single matrix, broadcast against the other.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.uint32))
    B = np.atleast_2d(np.asarray(B, dtype=np.uint32))
    k = max(A.shape[0], B.shape[0])
    A3 = np.broadcast_to(A.reshape(A.shape[0], m, m), (k, m, m))
    B3 = np.broadcast_to(B.reshape(B.shape[0], m, m), (k, m, m))
    C = np.empty((k, m, m), dtype=np.uint32)
    for i in range(m):
        for l in range(m):
            acc = mul[A3[:, i, 0], B3[:, 0, l]]
            for j in range(1, m):
                acc = add[acc, mul[A3[:, i, j], B3[:, j, l]]]
            C[:, i, l] = acc
    return C.reshape(k, m * m)


def _merge_sorted(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.concatenate([a, b])
    out.sort()
    return out


def _isin_sorted(sorted_keys: np.ndarray, keys: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(len(keys), dtype=bool)
    pos = np.searchsorted(sorted_keys, keys)
    pos = np.minimum(pos, len(sorted_keys) - 1)
    return sorted_keys[pos] == keys


def closure_bfs(gens: np.ndarray, mul: np.ndarray, add: np.ndarray, m: int,
                q: int, cap: int) -> np.ndarray:
    """Enumerate the subgroup generated by ``gens``.

    Returns flat matrices in the canonical order: BFS layers from the
    identity, ascending canonical key within each layer.  The result does
    not depend on the order or multiplicity of the generators.
    """
    gens = np.atleast_2d(np.asarray(gens, dtype=np.uint32))
    mm = m * m
    if not fits_uint64(q, mm):
        return _closure_bfs_big(gens, mul, add, m, q, cap)
    pows = key_powers(q, mm)

    def keys_of(mats):
        return (mats.astype(np.uint64) * pows[None, :]).sum(axis=1, dtype=np.uint64)

    ident = identity_flat(m)[None, :]
    visited = keys_of(ident)
    layers = [ident]
    frontier = ident
    total = 1
    while len(frontier):
        cands = np.concatenate(
            [matmul_batch(frontier, g, mul, add, m) for g in gens], axis=0
        )
        keys = keys_of(cands)
        order = np.argsort(keys, kind="stable")
        keys, cands = keys[order], cands[order]
        first = np.ones(len(keys), dtype=bool)
        first[1:] = keys[1:] != keys[:-1]
        keys, cands = keys[first], cands[first]
        new = ~_isin_sorted(visited, keys)
        keys, cands = keys[new], cands[new]
        if total + len(keys) > cap:
            raise ResourceLimitError(
                f"closure exceeded cap {cap}", partial_count=total + len(keys)
            )
        if len(keys):
            visited = _merge_sorted(visited, keys)
            layers.append(cands)
            total += len(keys)
        frontier = cands if len(keys) else cands[:0]
    return np.concatenate(layers, axis=0)


def _closure_bfs_big(gens, mul, add, m, q, cap):
    # arbitrary-precision keys; only exercised when q**(m*m) > 2**64
    seen = {pack_key_big(identity_flat(m), q)}
    layers = [identity_flat(m)[None, :]]
    frontier = layers[0]
    total = 1
    while len(frontier):
        cands = np.concatenate(
            [matmul_batch(frontier, g, mul, add, m) for g in gens], axis=0
        )
        fresh = {}
        for row in cands:
            k = pack_key_big(row, q)
            if k not in seen:
                seen.add(k)
                fresh[k] = row
        if total + len(fresh) > cap:
            raise ResourceLimitError(
                f"closure exceeded cap {cap}", partial_count=total + len(fresh)
            )
        if not fresh:
            break
        layer = np.array([fresh[k] for k in sorted(fresh)], dtype=np.uint32)
        layers.append(layer)
        frontier = layer
        total += len(layer)
    return np.concatenate(layers, axis=0)
