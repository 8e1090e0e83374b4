import os
import struct
import zlib
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpt.errors import (
    BadPathCount,
    ChecksumFailure,
    EmptyPayload,
    HeaderMismatch,
    InsufficientPackets,
    TooManyPaths,
    UnknownRow,
)
from cpt.transport import (
    CptConfig,
    StripeFile,
    bytes_to_symbols,
    drop_path,
    drop_rows,
    encode_and_stripe,
    ingest,
    plan_stripes,
    read_stripes,
    reassemble,
    symbols_to_bytes,
    write_stripes,
)

from oracles import bits_to_symbols


@pytest.mark.parametrize(
    "n,l,sizes",
    [(12, 3, [4, 4, 4]), (31, 6, [6, 5, 5, 5, 5, 5]), (5, 5, [1] * 5), (127, 3, [43, 42, 42])],
)
def test_plan_sizes(n, l, sizes):
    assert list(plan_stripes(n, l).sizes) == sizes


def test_plan_ranges_contiguous():
    plan = plan_stripes(31, 6)
    assert [(r.start, r.stop) for r in plan.ranges] == [(1, 7), (7, 12), (12, 17), (17, 22), (22, 27), (27, 32)]
    assert plan.path_of(7) == 2


def test_plan_errors():
    with pytest.raises(TooManyPaths):
        plan_stripes(4, 5)
    with pytest.raises(BadPathCount):
        plan_stripes(4, 1)


@given(st.integers(1, 300), st.integers(2, 300))
def test_stripe_balance(n, l):
    if l > n:
        return
    sizes = plan_stripes(n, l).sizes
    assert sum(sizes) == n
    assert max(sizes) - min(sizes) <= 1
    assert max(sizes) == -(-n // l)
    assert list(sizes) == sorted(sizes, reverse=True)


def test_config_derived_values():
    cfg = CptConfig(48, 96, 3, 8)
    assert cfg.r == 48 and cfg.overhead == 1 and cfg.m == 16 and cfg.m_prime_max == 32


def test_ingest_exact_fit_and_padding():
    cfg = CptConfig(3, 6, 2, 8)
    X = ingest(b"abcdef", cfg)
    assert X.L == 2 and X.rows.tobytes() == b"abcdef"
    X = ingest(b"abcde", cfg)
    assert X.L == 2 and X.rows.ravel()[-1] == 0


def test_ingest_q5_bitstream():
    cfg = CptConfig(2, 4, 2, 5)
    X = ingest(b"\xab\xcd", cfg)
    assert X.L == 2
    assert X.rows.ravel().tolist() == bits_to_symbols(b"\xab\xcd", 5)


def test_ingest_empty():
    with pytest.raises(EmptyPayload):
        ingest(b"", CptConfig(2, 4, 2))


@pytest.mark.parametrize("q", range(2, 9))
def test_symbol_packing_roundtrip(q):
    data = os.urandom(257)
    sym = bytes_to_symbols(data, q)
    assert sym.tolist() == bits_to_symbols(data, q)
    assert symbols_to_bytes(sym, q, len(data)) == data


def test_n12_k6_stripes():
    stripes = encode_and_stripe(os.urandom(100), CptConfig(6, 12, 3, 8))
    assert [len(s.row_indices) for s in stripes] == [4, 4, 4]


def test_n96_k48_stripes():
    stripes = encode_and_stripe(os.urandom(1000), CptConfig(48, 96, 3, 8))
    assert [len(s.row_indices) for s in stripes] == [32, 32, 32]


def test_k1_stripes_repeat_data():
    stripes = encode_and_stripe(b"xyz", CptConfig(1, 2, 2, 8))
    assert [s.payload.tobytes() for s in stripes] == [b"xyz", b"xyz"]


def test_encode_deterministic():
    cfg = CptConfig(5, 9, 3, 6)
    a = [s.to_bytes() for s in encode_and_stripe(b"same input", cfg)]
    b = [s.to_bytes() for s in encode_and_stripe(b"same input", cfg)]
    assert a == b


def test_stripe_file_layout():
    s = encode_and_stripe(b"\x01\x02\x03\x04", CptConfig(2, 4, 2, 8))[1]
    raw = s.to_bytes()
    assert raw[:4] == b"CPT1"
    assert struct.unpack_from(">BBHHBBIQH", raw, 4) == (1, 8, 2, 4, 2, 2, 2, 4, 2)
    assert struct.unpack_from(">2H", raw, 26) == (3, 4)
    assert raw[30:34] == s.payload.tobytes()
    assert struct.unpack(">I", raw[-4:])[0] == zlib.crc32(raw[:-4])
    assert len(raw) == 26 + 4 + 4 + 4


@settings(max_examples=40, deadline=None)
@given(st.binary(min_size=1, max_size=300), st.sampled_from([(4, 8, 2, 4), (6, 12, 3, 8), (3, 7, 3, 5)]))
def test_serialization_roundtrip(data, cfg):
    for s in encode_and_stripe(data, CptConfig(*cfg)):
        assert StripeFile.from_bytes(s.to_bytes()) == s


def test_checksum_detects_corruption():
    raw = bytearray(encode_and_stripe(b"hello", CptConfig(2, 4, 2))[0].to_bytes())
    raw[30] ^= 1
    with pytest.raises(ChecksumFailure):
        StripeFile.from_bytes(bytes(raw))


def test_bad_magic():
    raw = bytearray(encode_and_stripe(b"hello", CptConfig(2, 4, 2))[0].to_bytes())
    raw[:4] = b"XXXX"
    raw[-4:] = struct.pack(">I", zlib.crc32(bytes(raw[:-4])))
    with pytest.raises(HeaderMismatch):
        StripeFile.from_bytes(bytes(raw))


def test_reassemble_all_and_one_path_missing():
    data = os.urandom(999)
    cfg = CptConfig(6, 12, 3, 8)
    stripes = encode_and_stripe(data, cfg)
    assert reassemble(stripes, cfg) == data
    for path in (1, 2, 3):
        assert reassemble(drop_path(stripes, path), cfg) == data
        assert reassemble([s for s in stripes if s.stripe_index != path]) == data


def test_two_paths_missing_n12_k6():
    cfg = CptConfig(6, 12, 3, 8)
    stripes = encode_and_stripe(b"secret", cfg)
    with pytest.raises(InsufficientPackets):
        reassemble(stripes[:1], cfg)


def test_header_mismatch():
    a = encode_and_stripe(b"one", CptConfig(2, 4, 2))
    b = encode_and_stripe(b"another", CptConfig(2, 4, 2))
    with pytest.raises(HeaderMismatch):
        reassemble([a[0], b[1]])
    with pytest.raises(HeaderMismatch):
        reassemble(a, CptConfig(2, 5, 2))


def test_drop_rows_patterns():
    cfg = CptConfig(4, 9, 3, 8)
    stripes = encode_and_stripe(b"0123456789", cfg)
    assert all(x == y for x, y in zip(drop_rows(stripes, []), stripes))
    gone = drop_rows(stripes, [(2, r) for r in (4, 5, 6)])
    assert gone[1].row_indices == () and gone[1].payload.shape == (0, stripes[0].L)
    some = drop_rows(stripes, [(1, 2), (3, 9)])
    assert some[0].row_indices == (1, 3) and some[2].row_indices == (7, 8)
    assert np.array_equal(some[0].payload, stripes[0].payload[[0, 2]])
    with pytest.raises(UnknownRow):
        drop_rows(stripes, [(1, 4)])


@pytest.mark.parametrize("cfg", [(4, 8, 2, 4), (6, 12, 3, 8), (5, 11, 4, 5), (3, 5, 5, 8)])
def test_exhaustive_loss_patterns(cfg):
    cfg = CptConfig(*cfg)
    data = os.urandom(40)
    stripes = encode_and_stripe(data, cfg)
    everything = [(cfg.plan.path_of(r), r) for r in range(1, cfg.n + 1)]
    for e in range(cfg.r + 1):
        for pattern in combinations(everything, e):
            assert reassemble(drop_rows(stripes, pattern), cfg) == data


def test_write_and_read(tmp_path):
    stripes = encode_and_stripe(b"disk", CptConfig(2, 5, 2, 8))
    write_stripes(tmp_path, stripes)
    back = read_stripes(tmp_path)
    assert all(a == b for a, b in zip(back, stripes))
