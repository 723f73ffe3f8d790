# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernel: tabled matrix products and BFS subgroup closure.

Mirrors cosetx._kernels.pure exactly; every public function must return
bit-identical arrays to the fallback, including element order.
"""

from libc.stdint cimport int64_t, uint8_t, uint32_t, uint64_t
from libc.stdlib cimport calloc, free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

from ..errors import ParameterError, ResourceLimitError
from .common import fits_uint64, identity_flat, key_powers

NAME = "compiled"

DEF MAX_DIM = 8


cdef inline uint64_t _mix(uint64_t x) nogil:
    # murmur3 finalizer; keys are dense low integers so mixing matters
    x ^= x >> 33
    x *= <uint64_t>0xFF51AFD7ED558CCDu
    x ^= x >> 33
    x *= <uint64_t>0xC4CEB9FE1A85EC53u
    x ^= x >> 33
    return x


cdef class U64Set:
    """Open-addressing presence set for canonical matrix keys."""

    cdef uint64_t* keys
    cdef uint8_t* used
    cdef uint64_t mask
    cdef int64_t size
    cdef int64_t cap

    def __cinit__(self, int64_t hint=1024):
        cdef int64_t cap = 1024
        while cap < hint * 2:
            cap <<= 1
        self._alloc(cap)

    cdef void _alloc(self, int64_t cap):
        self.cap = cap
        self.mask = <uint64_t>(cap - 1)
        self.size = 0
        self.keys = <uint64_t*>malloc(cap * sizeof(uint64_t))
        self.used = <uint8_t*>calloc(cap, 1)
        if self.keys == NULL or self.used == NULL:
            raise MemoryError()

    def __dealloc__(self):
        if self.keys != NULL:
            free(self.keys)
        if self.used != NULL:
            free(self.used)

    cdef inline bint _insert_new(self, uint64_t key) nogil:
        cdef uint64_t h = _mix(key) & self.mask
        while self.used[h]:
            if self.keys[h] == key:
                return False
            h = (h + 1) & self.mask
        self.keys[h] = key
        self.used[h] = 1
        self.size += 1
        return True

    def ensure(self, int64_t need):
        """Grow so that ``need`` entries keep load factor under 1/2."""
        cdef int64_t newcap = self.cap
        while newcap < need * 2:
            newcap <<= 1
        if newcap == self.cap:
            return
        cdef uint64_t* old_keys = self.keys
        cdef uint8_t* old_used = self.used
        cdef int64_t old_cap = self.cap
        self._alloc(newcap)
        cdef int64_t i
        with nogil:
            for i in range(old_cap):
                if old_used[i]:
                    self._insert_new(old_keys[i])
        free(old_keys)
        free(old_used)

    def add_key(self, key) -> bool:
        self.ensure(self.size + 1)
        return bool(self._insert_new(<uint64_t>key))

    def __len__(self):
        return self.size


cdef inline void _mm_one(const uint32_t* a, const uint32_t* b, uint32_t* o,
                         const uint32_t* mul, const uint32_t* add,
                         int m, int64_t q) nogil:
    cdef int i, j, l
    cdef uint32_t acc
    for i in range(m):
        for l in range(m):
            acc = mul[<int64_t>a[i * m] * q + b[l]]
            for j in range(1, m):
                acc = add[<int64_t>acc * q
                          + mul[<int64_t>a[i * m + j] * q + b[j * m + l]]]
            o[i * m + l] = acc


def matmul_batch(A, B, mul, add, int m):
    """Same contract as pure.matmul_batch."""
    if m * m > MAX_DIM * MAX_DIM:
        raise ParameterError(f"matrix dimension {m} exceeds compiled limit {MAX_DIM}")
    cdef cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] A2 = \
        np.ascontiguousarray(np.atleast_2d(np.asarray(A, dtype=np.uint32)))
    cdef cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] B2 = \
        np.ascontiguousarray(np.atleast_2d(np.asarray(B, dtype=np.uint32)))
    cdef cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] mul2 = \
        np.ascontiguousarray(mul, dtype=np.uint32)
    cdef cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] add2 = \
        np.ascontiguousarray(add, dtype=np.uint32)
    cdef int64_t ka = A2.shape[0], kb = B2.shape[0]
    cdef int64_t k = ka if ka > kb else kb
    if (ka != k and ka != 1) or (kb != k and kb != 1):
        raise ParameterError(f"batch shapes do not broadcast: {ka} vs {kb}")
    cdef cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] out = \
        np.empty((k, m * m), dtype=np.uint32)
    cdef int64_t q = mul2.shape[0]
    cdef int64_t sa = 0 if ka == 1 else 1
    cdef int64_t sb = 0 if kb == 1 else 1
    cdef uint32_t* pa = <uint32_t*>A2.data
    cdef uint32_t* pb = <uint32_t*>B2.data
    cdef uint32_t* po = <uint32_t*>out.data
    cdef uint32_t* pm = <uint32_t*>mul2.data
    cdef uint32_t* pd = <uint32_t*>add2.data
    cdef int64_t i, mm = m * m
    with nogil:
        for i in range(k):
            _mm_one(pa + i * sa * mm, pb + i * sb * mm, po + i * mm, pm, pd, m, q)
    return out


def expand_gen(cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] frontier,
               cnp.ndarray[cnp.uint32_t, ndim=1, mode="c"] gen,
               cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] mul,
               cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] add,
               int m,
               cnp.ndarray[cnp.uint64_t, ndim=1, mode="c"] powers,
               U64Set seen):
    """Multiply every frontier matrix by one generator, keep unseen results.

    Inserts new keys into ``seen`` and returns (mats, keys) of the fresh
    elements in frontier order (caller sorts the assembled layer).
    """
    cdef int64_t n = frontier.shape[0]
    cdef int mm = m * m
    cdef cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] out_m = \
        np.empty((n, mm), dtype=np.uint32)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1, mode="c"] out_k = \
        np.empty(n, dtype=np.uint64)
    seen.ensure(seen.size + n)
    cdef uint32_t* pf = <uint32_t*>frontier.data
    cdef uint32_t* pg = <uint32_t*>gen.data
    cdef uint32_t* pm = <uint32_t*>mul.data
    cdef uint32_t* pd = <uint32_t*>add.data
    cdef uint32_t* pom = <uint32_t*>out_m.data
    cdef uint64_t* pok = <uint64_t*>out_k.data
    cdef uint64_t* pw = <uint64_t*>powers.data
    cdef int64_t q = mul.shape[0]
    cdef int64_t i, cnt = 0
    cdef int a
    cdef uint32_t tmp[MAX_DIM * MAX_DIM]
    cdef uint64_t key
    with nogil:
        for i in range(n):
            _mm_one(pf + i * mm, pg, tmp, pm, pd, m, q)
            key = 0
            for a in range(mm):
                key += <uint64_t>tmp[a] * pw[a]
            if seen._insert_new(key):
                for a in range(mm):
                    pom[cnt * mm + a] = tmp[a]
                pok[cnt] = key
                cnt += 1
    return out_m[:cnt], out_k[:cnt]


def closure_bfs(gens, mul, add, int m, q, cap):
    """Same contract and element order as pure.closure_bfs."""
    if m * m > MAX_DIM * MAX_DIM:
        raise ParameterError(f"matrix dimension {m} exceeds compiled limit {MAX_DIM}")
    gens_arr = np.ascontiguousarray(np.atleast_2d(np.asarray(gens, dtype=np.uint32)))
    mm = m * m
    if not fits_uint64(q, mm):
        from . import pure
        return pure.closure_bfs(gens_arr, mul, add, m, q, cap)
    mul_c = np.ascontiguousarray(mul, dtype=np.uint32)
    add_c = np.ascontiguousarray(add, dtype=np.uint32)
    powers = key_powers(q, mm)
    ident = identity_flat(m)[None, :]
    seen = U64Set(1024)
    seen.add_key(int((ident[0].astype(np.uint64) * powers).sum(dtype=np.uint64)))
    layers = [ident]
    frontier = ident
    total = 1
    while frontier.shape[0]:
        parts_m, parts_k = [], []
        for g in gens_arr:
            mats, keys = expand_gen(frontier, np.ascontiguousarray(g), mul_c,
                                    add_c, m, powers, seen)
            if keys.shape[0]:
                parts_m.append(mats)
                parts_k.append(keys)
        if not parts_m:
            break
        keys = np.concatenate(parts_k)
        mats = np.concatenate(parts_m)
        if total + keys.shape[0] > cap:
            raise ResourceLimitError(
                f"closure exceeded cap {cap}",
                partial_count=total + int(keys.shape[0]),
            )
        order = np.argsort(keys, kind="stable")
        mats = mats[order]
        layers.append(mats)
        frontier = mats
        total += keys.shape[0]
    return np.concatenate(layers, axis=0)
