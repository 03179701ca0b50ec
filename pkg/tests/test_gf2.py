import numpy as np
import pytest

from cycsig import gf2


def dense_rank(rows, n_cols):
    """Reference rank via numpy row reduction mod 2."""
    a = np.array([gf2.int_to_bits(r, n_cols) for r in rows], dtype=np.uint8)
    rank = 0
    for col in range(n_cols):
        piv = None
        for r in range(rank, len(a)):
            if a[r, col]:
                piv = r
                break
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        for r in range(len(a)):
            if r != rank and a[r, col]:
                a[r] ^= a[rank]
        rank += 1
    return rank


def test_rref_identity():
    m = gf2.Gf2Matrix.from_dense(np.eye(5, dtype=int).tolist())
    red, rank = gf2.rref(m)
    assert rank == 5
    assert red == m


def test_rref_duplicate_rows():
    m = gf2.Gf2Matrix.from_dense([[1, 1], [1, 1]])
    red, rank = gf2.rref(m)
    assert rank == 1
    assert red.to_dense() == [[1, 1], [0, 0]]


def test_rref_zero_matrix():
    m = gf2.Gf2Matrix(3, 4, (0, 0, 0))
    red, rank = gf2.rref(m)
    assert rank == 0
    assert red.rows == (0, 0, 0)


def test_rref_idempotent_and_rowspace_preserved():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n_rows = int(rng.integers(1, 65))
        n_cols = int(rng.integers(1, 65))
        dense = rng.integers(0, 2, size=(n_rows, n_cols))
        m = gf2.Gf2Matrix.from_dense(dense.tolist())
        red, rank = gf2.rref(m)
        red2, rank2 = gf2.rref(red)
        assert red2 == red and rank2 == rank
        assert rank == dense_rank(m.rows, n_cols)
        # every original row reduces to zero against the RREF basis and vice versa
        basis = [r for r in red.rows if r]
        piv = [min(j for j in range(n_cols) if r >> j & 1) for r in basis]
        for row in m.rows:
            assert gf2._reduce_vector(row, basis, piv) == 0
        orig_sub = gf2.span_ints(m.rows, n_cols)
        for row in basis:
            assert gf2.contains_vector(orig_sub, row)


def test_span_examples():
    zero = gf2.span([], ambient=3)
    assert zero.rank == 0 and zero.ambient == 3
    assert gf2.span([(1, 0), (1, 0)]).rank == 1
    assert gf2.span([(1, 0), (0, 1), (1, 1)]).rank == 2


def test_span_length_mismatch():
    with pytest.raises(ValueError):
        gf2.span([(1, 0), (1, 0, 1)])


def test_contains_examples():
    full = gf2.span([(1, 0), (0, 1)])
    e1 = gf2.span([(1, 0)])
    e2 = gf2.span([(0, 1)])
    zero = gf2.span([], ambient=2)
    assert gf2.contains(full, e1)
    assert not gf2.contains(e1, e2)
    assert gf2.contains(e1, zero) and gf2.contains(zero, zero)
    with pytest.raises(ValueError):
        gf2.contains(e1, gf2.span([(1, 0, 0)]))


def test_contains_partial_order():
    rng = np.random.default_rng(7)
    n = 6
    subs = []
    for _ in range(30):
        k = int(rng.integers(0, 4))
        vecs = rng.integers(0, 2, size=(k, n)).tolist()
        subs.append(gf2.span(vecs, ambient=n))
    for u in subs:
        assert gf2.contains(u, u)
    for _ in range(200):
        u, w, v = (subs[int(i)] for i in rng.integers(0, len(subs), 3))
        if gf2.contains(u, w) and gf2.contains(w, u):
            assert u == w
        if gf2.contains(u, w) and gf2.contains(w, v):
            assert gf2.contains(u, v)


def test_sum_and_intersection_dims():
    e1 = gf2.span([(1, 0)])
    e2 = gf2.span([(0, 1)])
    full = gf2.span([(1, 0), (0, 1)])
    diag = gf2.span([(1, 1)])
    assert gf2.sum_dim(e1, e2) == 2
    assert gf2.intersect_dim(e1, e2) == 0
    assert gf2.sum_dim(e1, e1) == 1 and gf2.intersect_dim(e1, e1) == 1
    assert gf2.sum_dim(full, diag) == 2
    assert gf2.intersect_dim(full, diag) == 1


def test_intersection_bounds_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(1, 10))
        u = gf2.span(rng.integers(0, 2, size=(int(rng.integers(0, n + 1)), n)).tolist(), ambient=n)
        w = gf2.span(rng.integers(0, 2, size=(int(rng.integers(0, n + 1)), n)).tolist(), ambient=n)
        inter = gf2.intersect_dim(u, w)
        assert 0 <= inter <= min(u.rank, w.rank)
        assert gf2.sum_dim(u, w) <= n


def test_canonical_key_roundtrip():
    sub = gf2.span([(1, 0, 1), (0, 1, 1)])
    again = gf2.Gf2Subspace.from_key(sub.key())
    assert again == sub
    assert gf2.Gf2Subspace.from_json(sub.to_json()) == sub
    # canonical: different generating sets, same key
    other = gf2.span([(1, 1, 0), (0, 1, 1)])
    assert other.key() == sub.key()


def test_subspace_rejects_non_rref_basis():
    with pytest.raises(ValueError):
        gf2.Gf2Subspace(2, (0b11, 0b01))  # pivot column not cleared above
