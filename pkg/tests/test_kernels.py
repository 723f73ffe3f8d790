"""Backend contract: the compiled core and the numpy fallback must be
bit-identical on every operation, including element order in closures."""

import numpy as np
import pytest

from cosetx import _kernels
from cosetx._kernels import common, pure
from cosetx.groups import elementary, sl_group
from cosetx.ring import RingTable, TruncPoly

compiled = pytest.importorskip(
    "cosetx._kernels._core", reason="compiled core not built")


def _rand_mats(rng, k, m, q):
    return rng.integers(0, q, size=(k, m * m)).astype(np.uint32)


@pytest.mark.parametrize("p,s,m", [(2, 2, 2), (3, 1, 3), (2, 3, 3), (5, 2, 2)])
def test_matmul_batch_backends_agree(p, s, m):
    rt = RingTable(p, s)
    rng = np.random.default_rng(7)
    A = _rand_mats(rng, 64, m, rt.q)
    B = _rand_mats(rng, 64, m, rt.q)
    got_c = compiled.matmul_batch(A, B, rt.mul, rt.add, m)
    got_p = pure.matmul_batch(A, B, rt.mul, rt.add, m)
    assert np.array_equal(got_c, got_p)


def test_matmul_broadcast_single():
    rt = RingTable(2, 2)
    rng = np.random.default_rng(3)
    A = _rand_mats(rng, 10, 2, rt.q)
    b = _rand_mats(rng, 1, 2, rt.q)[0]
    got_c = compiled.matmul_batch(A, b, rt.mul, rt.add, 2)
    got_p = pure.matmul_batch(A, b, rt.mul, rt.add, 2)
    assert np.array_equal(got_c, got_p)


def test_matmul_matches_matelement():
    rt = RingTable(3, 2)
    x = elementary(1, 1, 2, TruncPoly.make(3, 2, (2, 1)))
    y = elementary(1, 2, 1, TruncPoly.make(3, 2, (1, 2)))
    via_kernel = _kernels.matmul_batch(
        x.flat(), y.flat(), rt.mul, rt.add, 2)[0]
    assert np.array_equal(via_kernel, (x @ y).flat())


@pytest.mark.parametrize("p,s", [(2, 2), (3, 2), (2, 3)])
def test_closure_backends_identical_order(p, s):
    gens = []
    for i, j in ((1, 2), (2, 1)):
        for k in range(s):
            gens.append(elementary(1, i, j, TruncPoly.t_power(p, s, k)).flat())
    gens = np.vstack(gens).astype(np.uint32)
    rt = RingTable(p, s)
    got_c = compiled.closure_bfs(gens, rt.mul, rt.add, 2, rt.q, 1 << 20)
    got_p = pure.closure_bfs(gens, rt.mul, rt.add, 2, rt.q, 1 << 20)
    # not just the same set: the same deterministic enumeration order
    assert np.array_equal(got_c, got_p)


def test_closure_matches_group_order():
    G = sl_group(1, 3, 2)
    assert G.size == 216 * 3  # |SL_2(F_3)| * 3^((2-1)*3)


def test_identity_flat():
    np.testing.assert_array_equal(common.identity_flat(3),
                                  [1, 0, 0, 0, 1, 0, 0, 0, 1])


def test_key_packing_roundtrip():
    q = 8
    rng = np.random.default_rng(11)
    mats = rng.integers(0, q, size=(20, 9)).astype(np.uint32)
    keys = common.pack_keys(mats, q)
    assert len(set(map(int, keys))) == len(
        {tuple(r) for r in mats.tolist()})
    big = [common.pack_key_big(r, q) for r in mats]
    assert [int(k) for k in keys] == [int(k) for k in big]


def test_fits_uint64_boundary():
    assert common.fits_uint64(8, 9)       # 8^9 = 2^27
    assert not common.fits_uint64(625, 9)  # 625^9 >> 2^64
