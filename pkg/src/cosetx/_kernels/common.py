"""Shared helpers for both kernel backends.

Matrices are flat uint32 rows of length m*m holding packed ring indices in
row-major entry order.  The canonical key of a matrix packs those entries
base q with entry 0 least significant; all deterministic orderings in the
package are ascending-key orderings, so both backends must produce keys the
same way.
"""

from __future__ import annotations

import numpy as np


def fits_uint64(q: int, mm: int) -> bool:
    return q**mm <= 1 << 64


def key_powers(q: int, mm: int) -> np.ndarray:
    out = np.empty(mm, dtype=np.uint64)
    acc = 1
    for i in range(mm):
        out[i] = acc
        acc *= q
    return out


def pack_keys(mats: np.ndarray, q: int) -> np.ndarray:
    """uint64 canonical keys of flat matrices; requires q**mm <= 2**64."""
    mats = np.atleast_2d(mats)
    pows = key_powers(q, mats.shape[1])
    return (mats.astype(np.uint64) * pows[None, :]).sum(axis=1, dtype=np.uint64)


def pack_key_big(row, q: int) -> int:
    """Arbitrary-precision canonical key, same ordering as pack_keys."""
    k = 0
    for e in reversed(row):
        k = k * q + int(e)
    return k


def pack_keys_any(mats: np.ndarray, q: int) -> np.ndarray:
    """pack_keys when uint64 suffices, else an object array of Python ints.

    Both give the same ascending order, so KeyIndex works over either.
    """
    mats = np.atleast_2d(mats)
    if fits_uint64(q, mats.shape[1]):
        return pack_keys(mats, q)
    return np.array([pack_key_big(row, q) for row in mats], dtype=object)


def identity_flat(m: int, one_index: int = 1) -> np.ndarray:
    out = np.zeros(m * m, dtype=np.uint32)
    out[:: m + 1] = one_index
    return out


class KeyIndex:
    """Lookup from canonical uint64 key to element position.

    Positions refer to the original key array order (the group's element
    numbering), not the sorted order.
    """

    def __init__(self, keys: np.ndarray):
        keys = np.asarray(keys)
        if keys.dtype != object:
            keys = keys.astype(np.uint64)
        self._order = np.argsort(keys, kind="stable")
        self._sorted = keys[self._order]
        self.n = len(keys)

    def lookup(self, keys: np.ndarray) -> np.ndarray:
        """Positions of keys, -1 where absent."""
        keys = np.asarray(keys)
        if keys.dtype != object and self._sorted.dtype != object:
            keys = keys.astype(np.uint64)
        pos = np.searchsorted(self._sorted, keys)
        pos = np.minimum(pos, self.n - 1) if self.n else pos
        out = np.full(keys.shape, -1, dtype=np.int64)
        if self.n:
            hit = self._sorted[pos] == keys
            out[hit] = self._order[pos[hit]]
        return out

    def contains(self, keys: np.ndarray) -> np.ndarray:
        return self.lookup(keys) >= 0
