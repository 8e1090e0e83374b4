"""Arithmetic in GF(2^q), 2 <= q <= 8, backed by log/antilog tables.

Scalars are plain ``int`` values in ``[0, 2**q)``; vectors and matrices are
``numpy.uint8`` arrays.  Elementwise array products go through a full
``2**q x 2**q`` multiplication table, which is at most 64 KiB.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadPolynomial, DivideByZero, NotPrimitive, SingularSubmatrix

MAX_Q = 8

# Primitive polynomials, generator 2 for each.
DEFAULT_POLYS = {2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x89, 8: 0x11D}


@dataclass(frozen=True)
class FieldSpec:
    q: int
    reduction_poly: int
    generator: int = 2

    @classmethod
    def default(cls, q: int) -> "FieldSpec":
        if q not in DEFAULT_POLYS:
            raise BadPolynomial(f"no default polynomial for q={q}; need 2 <= q <= {MAX_Q}")
        return cls(q, DEFAULT_POLYS[q], 2)

    @property
    def order(self) -> int:
        return 1 << self.q


def clmul_reduce(a: int, b: int, poly: int, q: int) -> int:
    """Carry-less multiply then reduce modulo ``poly``; slow, table-free."""
    prod = 0
    while b:
        if b & 1:
            prod ^= a
        a <<= 1
        b >>= 1
    for bit in range(prod.bit_length() - 1, q - 1, -1):
        if prod >> bit & 1:
            prod ^= poly << (bit - q)
    return prod


class GF:
    """Tables and operations for one GF(2^q) instance.

    Instances are immutable after construction; use :func:`build_field` to
    get a cached, shared instance.
    """

    def __init__(self, spec: FieldSpec):
        q, poly, g = spec.q, spec.reduction_poly, spec.generator
        if not 2 <= q <= MAX_Q:
            raise BadPolynomial(f"q must be in 2..{MAX_Q}, got {q}")
        if poly.bit_length() - 1 != q:
            raise BadPolynomial(f"polynomial {poly:#x} does not have degree {q}")
        if not poly & 1:
            # divisible by x, hence reducible
            raise BadPolynomial(f"polynomial {poly:#x} is reducible (no constant term)")
        size = 1 << q
        if not 0 < g < size:
            raise NotPrimitive(f"generator {g} is not a nonzero element of GF(2^{q})")

        self.spec = spec
        self.q = q
        self.size = size
        self.nonzero = size - 1

        exp = np.zeros(2 * self.nonzero, dtype=np.int64)
        log = np.full(size, -1, dtype=np.int64)
        x = 1
        for i in range(self.nonzero):
            if log[x] != -1:
                raise NotPrimitive(
                    f"generator {g} has order {i} under {poly:#x}, expected {self.nonzero}"
                )
            exp[i] = x
            log[x] = i
            x = clmul_reduce(x, g, poly, q)
        if x != 1:
            raise NotPrimitive(f"generator {g} does not cycle back to 1 under {poly:#x}")
        exp[self.nonzero:] = exp[: self.nonzero]

        self.exp = exp
        self.log = log

        mt = np.zeros((size, size), dtype=np.uint8)
        nz = np.arange(1, size)
        mt[1:, 1:] = exp[log[nz][:, None] + log[nz][None, :]]
        self.mul_table = mt
        self._mul_flat = mt.ravel()
        inv = np.zeros(size, dtype=np.uint8)
        inv[nz] = exp[(self.nonzero - log[nz]) % self.nonzero]
        self.inv_table = inv

        for t in (exp, log, mt, inv):
            t.flags.writeable = False

    def __repr__(self):
        s = self.spec
        return f"GF(2^{s.q}, poly={s.reduction_poly:#x}, g={s.generator})"

    # scalar ops

    def check(self, a: int) -> int:
        if not 0 <= a < self.size:
            raise ValueError(f"{a} is not an element of GF(2^{self.q})")
        return a

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivideByZero("0 has no multiplicative inverse")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("exponent must be non-negative")
        if e == 0:
            return 1
        if a == 0:
            return 0
        return int(self.exp[(self.log[a] * e) % self.nonzero])

    def alpha(self, i: int) -> int:
        """The generator raised to the ``i``-th power."""
        return int(self.exp[i % self.nonzero])

    # array ops

    def mul_arrays(self, a, b) -> np.ndarray:
        """Elementwise product with numpy broadcasting."""
        a = np.asarray(a, dtype=np.intp)
        b = np.asarray(b, dtype=np.intp)
        return self._mul_flat[(a << self.q) | b]

    def scale(self, c: int, v: np.ndarray) -> np.ndarray:
        return self.mul_table[c][v]

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product over the field; ``a`` is (r, k), ``b`` is (k, L)."""
        a = np.asarray(a, dtype=np.uint8)
        b = np.asarray(b, dtype=np.uint8)
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ValueError(f"cannot multiply shapes {a.shape} and {b.shape}")
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
        mt = self.mul_table
        for t in range(a.shape[1]):
            col = a[:, t]
            out ^= np.take(mt[col], b[t], axis=1)
        return out

    def _reduce(self, m: np.ndarray, ncols: int) -> tuple[np.ndarray, list[int]]:
        """In-place Gauss-Jordan reduction of ``m`` over its first ``ncols`` columns.

        Returns the matrix and the pivot columns found.
        """
        mt = self.mul_table
        rows = m.shape[0]
        pivots = []
        r = 0
        for c in range(ncols):
            if r == rows:
                break
            nz = np.flatnonzero(m[r:, c])
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                m[[r, p]] = m[[p, r]]
            pivot_inv = self.inv_table[m[r, c]]
            if pivot_inv != 1:
                m[r, c:] = mt[pivot_inv][m[r, c:]]
            factors = m[:, c].copy()
            factors[r] = 0
            hit = np.flatnonzero(factors)
            if hit.size:
                m[hit, c:] ^= np.take(mt[factors[hit]], m[r, c:], axis=1)
            pivots.append(c)
            r += 1
        return m, pivots

    def rref(self, a: np.ndarray, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns.

        Only the first ``ncols`` columns are eliminated; the rest ride along
        as right-hand sides.
        """
        m = np.array(a, dtype=np.uint8, copy=True)
        return self._reduce(m, m.shape[1] if ncols is None else ncols)

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Solve ``a @ x = b`` for square nonsingular ``a``.

        Forward elimination with first-nonzero pivoting over the augmented
        matrix, then back substitution touching only the right-hand side.
        """
        a = np.asarray(a, dtype=np.uint8)
        b = np.asarray(b, dtype=np.uint8)
        k = a.shape[0]
        if a.shape != (k, k):
            raise ValueError(f"matrix of shape {a.shape} is not square")
        if b.shape[0] != k:
            raise ValueError(f"right-hand side has {b.shape[0]} rows, expected {k}")
        mt = self.mul_table
        m = np.concatenate([a, b.reshape(k, -1)], axis=1)
        for c in range(k):
            nz = np.flatnonzero(m[c:, c])
            if nz.size == 0:
                raise SingularSubmatrix(f"no pivot in column {c}")
            p = c + int(nz[0])
            if p != c:
                m[[c, p]] = m[[p, c]]
            row = m[c, c:]
            pivot_inv = self.inv_table[row[0]]
            if pivot_inv != 1:
                row = mt[pivot_inv][row]
                m[c, c:] = row
            below = m[c + 1:, c]
            if below.any():
                m[c + 1:, c:] ^= np.take(mt[below], row, axis=1)
        x = m[:, k:]
        for c in range(k - 1, 0, -1):
            above = m[:c, c]
            if above.any():
                x[:c] ^= np.take(mt[above], x[c], axis=1)
        return x.reshape(b.shape).copy()

    def inverse(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.uint8)
        return self.solve(a, np.eye(a.shape[0], dtype=np.uint8))


@lru_cache(maxsize=None)
def build_field(spec: FieldSpec) -> GF:
    return GF(spec)


def default_field(q: int) -> GF:
    return build_field(FieldSpec.default(q))
