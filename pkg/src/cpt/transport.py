"""Striping coded packets over disjoint paths, and the per-path stripe file.

Stripe file layout (all integers big-endian)::

    magic "CPT1" | version u8 | q u8 | k u16 | n u16 | l u8 | stripe_index u8
    | L u32 | original_byte_length u64 | row_count u16
    | row indices (row_count x u16, 1-based)
    | payload (row_count x L bytes, one symbol per byte)
    | crc32 u32 over everything before it
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadPathCount,
    ChecksumFailure,
    EmptyPayload,
    HeaderMismatch,
    InsufficientPackets,
    TooManyPaths,
    UnknownRow,
)
from .galois import FieldSpec
from .rs_code import Codec, CodeParams, PacketSet

MAGIC = b"CPT1"
VERSION = 1
_HEADER = struct.Struct(">4sBBHHBBIQH")
_CRC = struct.Struct(">I")


@dataclass(frozen=True)
class StripePlan:
    n: int
    l: int
    sizes: tuple[int, ...]

    @property
    def ranges(self) -> list[range]:
        """1-based row index range carried by each path."""
        out, start = [], 1
        for size in self.sizes:
            out.append(range(start, start + size))
            start += size
        return out

    @property
    def max_size(self) -> int:
        return max(self.sizes)

    def path_of(self, row: int) -> int:
        for path, rows in enumerate(self.ranges, start=1):
            if row in rows:
                return path
        raise UnknownRow(row)


def plan_stripes(n: int, l: int) -> StripePlan:
    """Contiguous, balanced split of rows 1..n; the larger stripes go first."""
    if l < 2:
        raise BadPathCount(f"need at least 2 paths, got {l}")
    if l > n:
        raise TooManyPaths(f"{l} paths cannot each carry one of {n} packets")
    base, extra = divmod(n, l)
    sizes = tuple(base + 1 if i < extra else base for i in range(l))
    return StripePlan(n, l, sizes)


@dataclass(frozen=True)
class CptConfig:
    k: int
    n: int
    l: int
    q: int = 8

    def __post_init__(self):
        # constructing these validates field, code and path parameters
        self.params
        self.plan

    @cached_property
    def field_spec(self) -> FieldSpec:
        return FieldSpec.default(self.q)

    @cached_property
    def params(self) -> CodeParams:
        return CodeParams(self.n, self.k, self.field_spec)

    @cached_property
    def plan(self) -> StripePlan:
        return plan_stripes(self.n, self.l)

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def overhead(self) -> Fraction:
        return Fraction(self.r, self.k)

    @property
    def m(self) -> int:
        # data packets per path; floor for uneven splits
        return self.k // self.l

    @property
    def stripe_sizes(self) -> tuple[int, ...]:
        return self.plan.sizes

    @property
    def m_prime_max(self) -> int:
        return self.plan.max_size


@dataclass(eq=False)
class StripeFile:
    q: int
    k: int
    n: int
    l: int
    stripe_index: int
    L: int
    original_byte_length: int
    row_indices: tuple[int, ...]
    payload: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.row_indices = tuple(int(i) for i in self.row_indices)
        self.payload = np.asarray(self.payload, dtype=np.uint8).reshape(len(self.row_indices), self.L)

    @property
    def header(self) -> tuple:
        return (self.q, self.k, self.n, self.l, self.L, self.original_byte_length)

    def rows(self) -> list[tuple[int, np.ndarray]]:
        return list(zip(self.row_indices, self.payload))

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(
            MAGIC, VERSION, self.q, self.k, self.n, self.l, self.stripe_index,
            self.L, self.original_byte_length, len(self.row_indices),
        )
        idx = struct.pack(f">{len(self.row_indices)}H", *self.row_indices)
        body = head + idx + self.payload.tobytes()
        return body + _CRC.pack(zlib.crc32(body))

    @classmethod
    def from_bytes(cls, data: bytes) -> "StripeFile":
        if len(data) < _HEADER.size + _CRC.size:
            raise HeaderMismatch(f"stripe file too short ({len(data)} bytes)")
        body, (crc,) = data[:-_CRC.size], _CRC.unpack(data[-_CRC.size:])
        if zlib.crc32(body) != crc:
            raise ChecksumFailure("stripe file CRC-32 mismatch")
        magic, version, q, k, n, l, stripe_index, L, orig, count = _HEADER.unpack_from(body)
        if magic != MAGIC:
            raise HeaderMismatch(f"bad magic {magic!r}")
        if version != VERSION:
            raise HeaderMismatch(f"unsupported version {version}")
        off = _HEADER.size
        idx = struct.unpack_from(f">{count}H", body, off)
        off += 2 * count
        if len(body) - off != count * L:
            raise HeaderMismatch(f"payload is {len(body) - off} bytes, header implies {count * L}")
        payload = np.frombuffer(body, dtype=np.uint8, offset=off).reshape(count, L).copy()
        return cls(q, k, n, l, stripe_index, L, orig, idx, payload)

    def __eq__(self, other):
        if not isinstance(other, StripeFile):
            return NotImplemented
        return (
            self.header == other.header
            and self.stripe_index == other.stripe_index
            and self.row_indices == other.row_indices
            and np.array_equal(self.payload, other.payload)
        )


def bytes_to_symbols(data: bytes, q: int) -> np.ndarray:
    """Chunk a big-endian bitstream into q-bit symbols, zero-padding the tail."""
    buf = np.frombuffer(data, dtype=np.uint8)
    if q == 8:
        return buf.copy()
    bits = np.unpackbits(buf)
    pad = -len(bits) % q
    bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)]).reshape(-1, q)
    weights = 1 << np.arange(q - 1, -1, -1)
    return (bits @ weights).astype(np.uint8)


def symbols_to_bytes(symbols: np.ndarray, q: int, byte_length: int) -> bytes:
    symbols = np.asarray(symbols, dtype=np.uint8).ravel()
    if q == 8:
        return symbols[:byte_length].tobytes()
    bits = ((symbols[:, None] >> np.arange(q - 1, -1, -1)) & 1).astype(np.uint8).ravel()
    return np.packbits(bits[: 8 * byte_length]).tobytes()


def ingest(payload: bytes, config: CptConfig) -> PacketSet:
    """Lay a payload out as k equal-length data packets of L symbols."""
    if not payload:
        raise EmptyPayload("payload is empty")
    symbols = bytes_to_symbols(payload, config.q)
    L = math.ceil(len(symbols) / config.k)
    padded = np.zeros(config.k * L, dtype=np.uint8)
    padded[: len(symbols)] = symbols
    return PacketSet(padded.reshape(config.k, L))


def encode_and_stripe(payload: bytes, config: CptConfig, codec: Codec | None = None) -> list[StripeFile]:
    codec = codec or Codec(config.params)
    X = ingest(payload, config)
    Y = codec.encode(X).rows
    stripes = []
    for path, rows in enumerate(config.plan.ranges, start=1):
        stripes.append(
            StripeFile(
                config.q, config.k, config.n, config.l, path, X.L, len(payload),
                tuple(rows), Y[rows.start - 1 : rows.stop - 1],
            )
        )
    return stripes


def reassemble(
    stripes: Sequence[StripeFile],
    config: CptConfig | None = None,
    codec: Codec | None = None,
) -> bytes:
    """Decode the original payload from whatever stripes and rows arrived."""
    if not stripes:
        needed = config.k if config else 1
        raise InsufficientPackets(0, needed)
    header = stripes[0].header
    for s in stripes[1:]:
        if s.header != header:
            raise HeaderMismatch(f"stripe {s.stripe_index} header {s.header} != {header}")
    q, k, n, l, L, orig = header
    if config is not None and (config.q, config.k, config.n, config.l) != (q, k, n, l):
        raise HeaderMismatch(
            f"stripes carry (q={q}, k={k}, n={n}, l={l}), expected "
            f"(q={config.q}, k={config.k}, n={config.n}, l={config.l})"
        )
    config = config or CptConfig(k, n, l, q)
    seen = set()
    received = []
    for s in stripes:
        if s.stripe_index in seen:
            raise HeaderMismatch(f"stripe {s.stripe_index} supplied twice")
        seen.add(s.stripe_index)
        received.extend(s.rows())
    codec = codec or Codec(config.params)
    X = codec.decode(received)
    return symbols_to_bytes(X.rows, q, orig)


def drop_rows(stripes: Sequence[StripeFile], loss_pattern: Iterable[tuple[int, int]]) -> list[StripeFile]:
    """Remove the given ``(path_index, row_index)`` entries.

    Stripes that lose every row stay in the list with ``row_count == 0``.
    """
    by_path = {s.stripe_index: s for s in stripes}
    doomed: dict[int, set[int]] = {}
    for path, row in loss_pattern:
        s = by_path.get(path)
        if s is None or row not in s.row_indices:
            raise UnknownRow((path, row))
        doomed.setdefault(path, set()).add(row)
    out = []
    for s in stripes:
        gone = doomed.get(s.stripe_index)
        if not gone:
            out.append(s)
            continue
        keep = [i for i, r in enumerate(s.row_indices) if r not in gone]
        out.append(
            StripeFile(
                s.q, s.k, s.n, s.l, s.stripe_index, s.L, s.original_byte_length,
                tuple(s.row_indices[i] for i in keep), s.payload[keep],
            )
        )
    return out


def drop_path(stripes: Sequence[StripeFile], path: int) -> list[StripeFile]:
    s = next((s for s in stripes if s.stripe_index == path), None)
    if s is None:
        raise UnknownRow((path, None))
    return drop_rows(stripes, [(path, r) for r in s.row_indices])


def stripe_filename(index: int) -> str:
    return f"stripe_{index:03d}.cpt"


def write_stripes(directory: str | Path, stripes: Sequence[StripeFile]) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for s in stripes:
        p = directory / stripe_filename(s.stripe_index)
        p.write_bytes(s.to_bytes())
        paths.append(p)
    return paths


def read_stripes(directory: str | Path) -> list[StripeFile]:
    return [StripeFile.from_bytes(p.read_bytes()) for p in sorted(Path(directory).glob("stripe_*.cpt"))]
