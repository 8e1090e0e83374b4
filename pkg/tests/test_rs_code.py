from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpt.errors import InsufficientPackets, ParamsInvalid, ShapeMismatch
from cpt.galois import DEFAULT_POLYS, FieldSpec
from cpt.rs_code import Codec, CodeParams, PacketSet, build_generator, decode, encode

from oracles import gf_matvec, gf_rank, vandermonde


def params(n, k, q):
    return CodeParams(n, k, FieldSpec.default(q))


def test_generator_gf4():
    G = build_generator(params(3, 2, 2))
    assert G.points.tolist() == [1, 2, 3]
    assert G.rows.tolist() == [[1, 1], [1, 2], [1, 3]]


def test_generator_full_length_gf256():
    G = build_generator(params(255, 204, 8))
    assert len(set(G.points.tolist())) == 255
    assert 0 not in G.points


def test_too_long_for_field():
    with pytest.raises(ParamsInvalid):
        params(4, 2, 2)


@pytest.mark.parametrize("n,k", [(2, 2), (3, 0), (3, 5)])
def test_bad_rate_rejected(n, k):
    with pytest.raises(ParamsInvalid):
        params(n, k, 8)


@pytest.mark.parametrize("q", [3, 5, 8])
def test_generator_matches_independent_vandermonde(q):
    n, k = min(12, (1 << q) - 1), 4
    G = build_generator(params(n, k, q))
    assert G.rows.tolist() == vandermonde(n, k, DEFAULT_POLYS[q], q)


def test_encode_zero_and_identity():
    p = params(3, 2, 2)
    G = build_generator(p)
    assert not encode(G, PacketSet(np.zeros((2, 5)))).rows.any()
    assert encode(G, PacketSet(np.eye(2))).rows.tolist() == [[1, 1], [1, 2], [1, 3]]


def test_k1_is_repetition():
    p = params(5, 1, 8)
    X = PacketSet(np.array([[9, 8, 7]]))
    Y = encode(build_generator(p), X).rows
    assert (Y == X.rows[0]).all()


def test_encode_matches_oracle_matvec():
    q, n, k = 8, 10, 4
    p = params(n, k, q)
    rng = np.random.default_rng(2)
    X = rng.integers(0, 256, (k, 6), dtype=np.uint8)
    Y = encode(build_generator(p), PacketSet(X)).rows
    V = vandermonde(n, k, DEFAULT_POLYS[q], q)
    for j in range(6):
        assert Y[:, j].tolist() == gf_matvec(V, X[:, j].tolist(), DEFAULT_POLYS[q], q)


def test_shape_mismatch():
    G = build_generator(params(6, 3, 8))
    with pytest.raises(ShapeMismatch):
        encode(G, PacketSet(np.zeros((2, 4))))


def test_decode_all_rows():
    p = params(8, 5, 8)
    G = build_generator(p)
    X = PacketSet(np.arange(20).reshape(5, 4))
    Y = encode(G, X)
    assert decode(p, G, Y.received()) == X


def test_decode_too_few():
    p = params(8, 5, 8)
    G = build_generator(p)
    Y = encode(G, PacketSet(np.ones((5, 2))))
    with pytest.raises(InsufficientPackets):
        decode(p, G, Y.received([1, 3, 5, 7]))


def test_decode_rejects_bad_indices():
    p = params(8, 2, 8)
    G = build_generator(p)
    Y = encode(G, PacketSet(np.ones((2, 2))))
    with pytest.raises(ShapeMismatch):
        decode(p, G, [(0, Y.rows[0]), (1, Y.rows[0])])
    with pytest.raises(ShapeMismatch):
        decode(p, G, [(2, Y.rows[1]), (2, Y.rows[1])])


@pytest.mark.parametrize("n,k", [(6, 3), (8, 2), (7, 6)])
def test_mds_against_independent_rank_oracle(n, k):
    q = 4
    V = vandermonde(n, k, DEFAULT_POLYS[q], q)
    for rows in combinations(range(n), k):
        assert gf_rank([V[i] for i in rows], DEFAULT_POLYS[q], q) == k


def test_non_systematic():
    p = params(12, 6, 8)
    G = build_generator(p)
    assert not np.array_equal(G.rows[:6], np.eye(6, dtype=np.uint8))
    rng = np.random.default_rng(5)
    X = rng.integers(0, 256, (6, 32), dtype=np.uint8)
    Y = encode(G, PacketSet(X)).rows
    assert not np.array_equal(Y[:6], X)


@settings(max_examples=60, deadline=None)
@given(
    q=st.sampled_from([4, 8]),
    data=st.data(),
)
def test_roundtrip_under_random_erasures(q, data):
    n = data.draw(st.integers(2, min(40, (1 << q) - 1)))
    k = data.draw(st.integers(1, n - 1))
    L = data.draw(st.integers(1, 5))
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    p = params(n, k, q)
    G = build_generator(p)
    X = PacketSet(rng.integers(0, 1 << q, (k, L), dtype=np.uint8))
    Y = encode(G, X)
    keep = sorted(rng.choice(n, size=data.draw(st.integers(k, n)), replace=False) + 1)
    assert decode(p, G, Y.received(keep)) == X


def test_decode_independent_of_subset():
    p = params(12, 4, 8)
    G = build_generator(p)
    rng = np.random.default_rng(9)
    X = PacketSet(rng.integers(0, 256, (4, 7), dtype=np.uint8))
    Y = encode(G, X)
    results = {decode(p, G, Y.received(rows)).rows.tobytes() for rows in combinations(range(1, 13), 4)}
    assert results == {X.rows.tobytes()}


def test_codec_cache_agrees_with_plain_decode():
    p = params(20, 8, 8)
    codec = Codec(p, cache_size=2)
    rng = np.random.default_rng(1)
    X = PacketSet(rng.integers(0, 256, (8, 3), dtype=np.uint8))
    Y = codec.encode(X)
    for _ in range(5):
        keep = sorted(rng.choice(20, 8, replace=False) + 1)
        assert codec.decode(Y.received(keep)) == X
        assert codec.decode(Y.received(keep)) == X
    assert len(codec._inverses) <= 2
