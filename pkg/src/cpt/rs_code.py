"""Non-systematic Reed-Solomon erasure codec built on a Vandermonde generator.

Row ``i`` (1-based) of the ``n x k`` generator is ``[1, a_i, a_i^2, ...,
a_i^(k-1)]`` with evaluation point ``a_i = g^(i-1)``.  Any ``k`` distinct
rows form an invertible Vandermonde block, so any ``k`` of the ``n`` coded
packets recover the data.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientPackets, ParamsInvalid, ShapeMismatch
from .galois import GF, FieldSpec, build_field


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    field: FieldSpec

    def __post_init__(self):
        top = self.field.order - 1
        if not 1 <= self.k < self.n:
            raise ParamsInvalid(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        if self.n > top:
            raise ParamsInvalid(
                f"n={self.n} exceeds the {top} nonzero points of GF(2^{self.field.q})"
            )

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def gf(self) -> GF:
        return build_field(self.field)


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    rows: np.ndarray  # (n, k) uint8
    points: np.ndarray  # (n,) evaluation points
    params: CodeParams

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def k(self) -> int:
        return self.rows.shape[1]


@dataclass(eq=False)
class PacketSet:
    """The k x L data matrix; one row per data packet."""

    rows: np.ndarray

    def __post_init__(self):
        self.rows = np.ascontiguousarray(self.rows, dtype=np.uint8)
        if self.rows.ndim != 2 or self.rows.shape[1] < 1:
            raise ShapeMismatch(f"packet set must be (k, L) with L >= 1, got {self.rows.shape}")

    @property
    def L(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other):
        if not isinstance(other, PacketSet):
            return NotImplemented
        return np.array_equal(self.rows, other.rows)


@dataclass(eq=False)
class CodedSet:
    """The n x L coded matrix; row ``i`` here is coded packet ``i + 1``."""

    rows: np.ndarray

    @property
    def L(self) -> int:
        return self.rows.shape[1]

    def received(self, indices: Iterable[int] | None = None) -> list[tuple[int, np.ndarray]]:
        """(1-based index, row) pairs, optionally restricted to ``indices``."""
        if indices is None:
            indices = range(1, self.rows.shape[0] + 1)
        return [(i, self.rows[i - 1]) for i in indices]


def build_generator(params: CodeParams) -> GeneratorMatrix:
    gf = params.gf
    points = gf.exp[: params.n].astype(np.intp)
    logs = gf.log[points]
    powers = np.arange(params.k)
    rows = gf.exp[(logs[:, None] * powers[None, :]) % gf.nonzero].astype(np.uint8)
    rows.flags.writeable = False
    return GeneratorMatrix(rows, points.astype(np.uint8), params)


def encode(G: GeneratorMatrix, X: PacketSet) -> CodedSet:
    if X.rows.shape[0] != G.k:
        raise ShapeMismatch(f"generator expects {G.k} data packets, got {X.rows.shape[0]}")
    return CodedSet(G.params.gf.matmul(G.rows, X.rows))


def _select(params: CodeParams, received) -> tuple[list[int], np.ndarray]:
    k, n = params.k, params.n
    seen = set()
    for idx, _ in received:
        if not 1 <= idx <= n:
            raise ShapeMismatch(f"row index {idx} outside 1..{n}")
        if idx in seen:
            raise ShapeMismatch(f"duplicate row index {idx}")
        seen.add(idx)
    if len(received) < k:
        raise InsufficientPackets(len(received), k)
    chosen = sorted(received, key=lambda pair: pair[0])[:k]
    y = np.stack([np.asarray(row, dtype=np.uint8) for _, row in chosen])
    return [i for i, _ in chosen], y


def decode(
    params: CodeParams,
    G: GeneratorMatrix,
    received: Sequence[tuple[int, np.ndarray]],
) -> PacketSet:
    """Recover the data matrix from any ``k`` received coded rows.

    ``received`` holds ``(row_index, row)`` pairs with 1-based, distinct
    indices.  Only the ``k`` lowest-indexed rows are used.
    """
    idx, y = _select(params, received)
    return PacketSet(params.gf.solve(G.rows[[i - 1 for i in idx]], y))


class Codec:
    """Generator plus a small cache of inverted submatrices.

    Handy when the same loss pattern repeats, e.g. decoding many packet
    sets after the same path went down.
    """

    def __init__(self, params: CodeParams, cache_size: int = 64):
        self.params = params
        self.G = build_generator(params)
        self._inverses: OrderedDict[tuple[int, ...], np.ndarray] = OrderedDict()
        self._cache_size = cache_size

    def encode(self, X: PacketSet) -> CodedSet:
        return encode(self.G, X)

    def _inverse(self, key: tuple[int, ...]) -> np.ndarray:
        inv = self._inverses.get(key)
        if inv is None:
            inv = self.params.gf.inverse(self.G.rows[[i - 1 for i in key]])
            self._inverses[key] = inv
            if len(self._inverses) > self._cache_size:
                self._inverses.popitem(last=False)
        else:
            self._inverses.move_to_end(key)
        return inv

    def decode(self, received: Sequence[tuple[int, np.ndarray]]) -> PacketSet:
        if self._cache_size == 0:
            return decode(self.params, self.G, received)
        idx, y = _select(self.params, received)
        return PacketSet(self.params.gf.matmul(self._inverse(tuple(idx)), y))
