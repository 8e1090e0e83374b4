"""Single-path eavesdropper: known-format brute force against tapped coded rows.

Tapping ``c < k`` coded rows of column ``j`` pins the data column
``X[:, j]`` to an affine subspace of dimension ``k - c`` over GF(2^q).
The attack enumerates that coset and keeps the points that agree with the
symbols the eavesdropper knows or guesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .analysis import SECURITY_BITS
from .errors import BadParams, PredicateUnsatisfiable
from .rs_code import CodeParams, build_generator
from .transport import CptConfig, StripeFile

DEFAULT_BUDGET_BITS = 24


@dataclass(eq=False)
class Intercept:
    params: CodeParams
    row_indices: tuple[int, ...]
    rows: np.ndarray  # (len(row_indices), L)

    def __post_init__(self):
        self.row_indices = tuple(int(i) for i in self.row_indices)
        self.rows = np.asarray(self.rows, dtype=np.uint8).reshape(len(self.row_indices), -1)
        bad = [i for i in self.row_indices if not 1 <= i <= self.params.n]
        if bad:
            raise BadParams(f"row indices {bad} outside 1..{self.params.n}")
        if len(set(self.row_indices)) != len(self.row_indices):
            raise BadParams("duplicate intercepted row indices")

    @classmethod
    def from_stripe(cls, stripe: StripeFile) -> "Intercept":
        cfg = CptConfig(stripe.k, stripe.n, stripe.l, stripe.q)
        return cls(cfg.params, stripe.row_indices, stripe.payload)

    @property
    def count(self) -> int:
        return len(self.row_indices)


@dataclass(frozen=True)
class FormatPredicate:
    """Known data symbols as ``(row, column, value)``, 0-based into X."""

    known: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "known", tuple((int(r), int(c), int(v)) for r, c, v in self.known))

    @classmethod
    def prefix(cls, X: np.ndarray, count: int, packet: int = 0) -> "FormatPredicate":
        """The first ``count`` symbols of one data packet, read from the true X."""
        return cls(tuple((packet, j, int(X[packet, j])) for j in range(count)))

    @property
    def columns(self) -> list[int]:
        return sorted({c for _, c, _ in self.known})

    def for_column(self, col: int) -> list[tuple[int, int]]:
        return [(r, v) for r, c, v in self.known if c == col]


@dataclass
class AttackResult:
    bits: int
    budget_bits: int
    feasible: bool
    enumerated_per_column: int = 0
    candidates: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def candidate_counts(self) -> dict[int, int]:
        return {c: len(v) for c, v in self.candidates.items()}

    def contains(self, X: np.ndarray) -> bool:
        """True if, for every attacked column, the true column is a candidate."""
        X = np.asarray(X)
        return all((cand == X[:, col]).all(axis=1).any() for col, cand in self.candidates.items())

    def recovered(self) -> dict[int, np.ndarray]:
        """Columns pinned down to a single candidate."""
        return {c: v[0] for c, v in self.candidates.items() if len(v) == 1}


def search_space_bits(k: int, intercepted_count: int, q: int) -> int:
    """log2 of the number of candidates per column left after tapping."""
    if intercepted_count >= k:
        return 0
    return q * (k - intercepted_count)


def _coset(gf, R: np.ndarray, pivots: list[int], rhs: np.ndarray, k: int):
    """Particular solution and nullspace basis from an RREF system."""
    rank = len(pivots)
    if rhs[rank:].any():
        return None, None
    free = [c for c in range(k) if c not in pivots]
    particular = np.zeros(k, dtype=np.uint8)
    particular[pivots] = rhs[:rank]
    basis = np.zeros((len(free), k), dtype=np.uint8)
    for b, f in enumerate(free):
        basis[b, f] = 1
        basis[b, pivots] = R[:rank, f]  # char 2: -x == x
    return particular, basis


def brute_force(
    intercept: Intercept,
    predicate: FormatPredicate,
    budget_bits: int = DEFAULT_BUDGET_BITS,
) -> AttackResult:
    if not predicate.known:
        raise BadParams("predicate must fix at least one symbol")
    params = intercept.params
    k, q = params.k, params.field.q
    L = intercept.rows.shape[1]
    for r, c, v in predicate.known:
        if not (0 <= r < k and 0 <= c < L and 0 <= v < params.field.order):
            raise BadParams(f"known symbol {(r, c, v)} outside X of shape ({k}, {L})")

    bits = search_space_bits(k, intercept.count, q)
    if bits > budget_bits:
        return AttackResult(bits, budget_bits, feasible=False)

    gf = params.gf
    G = build_generator(params).rows[[i - 1 for i in intercept.row_indices]]
    cols = predicate.columns
    aug = np.concatenate([G, intercept.rows[:, cols]], axis=1)
    reduced, pivots = gf.rref(aug, ncols=k)
    R, rhs_all = reduced[:, :k], reduced[:, k:]

    d = k - len(pivots)
    coeffs = np.array(list(itertools.product(range(gf.size), repeat=d)), dtype=np.uint8).reshape(gf.size**d, d)
    result = AttackResult(bits, budget_bits, feasible=True, enumerated_per_column=len(coeffs))
    for j, col in enumerate(cols):
        particular, basis = _coset(gf, R, pivots, rhs_all[:, j], k)
        if particular is None:
            raise PredicateUnsatisfiable(f"intercepted rows are inconsistent in column {col}")
        cand = np.broadcast_to(particular, (len(coeffs), k)).copy()
        for b in range(d):
            cand ^= gf.mul_arrays(coeffs[:, b, None], basis[b][None, :])
        keep = np.ones(len(cand), dtype=bool)
        for row, val in predicate.for_column(col):
            keep &= cand[:, row] == val
        if not keep.any():
            raise PredicateUnsatisfiable(f"no candidate in column {col} fits the known format")
        result.candidates[col] = cand[keep]
    return result


@dataclass(frozen=True)
class SecrecyMargin:
    bits: int
    meets_128: bool
    meets_eq4: bool
    security_bits: int = SECURITY_BITS


def secrecy_margin(config: CptConfig, security_bits: int = SECURITY_BITS) -> SecrecyMargin:
    """Brute-force work left to an eavesdropper on the largest stripe."""
    m = config.m_prime_max
    tier1 = config.k >= m
    bits = (config.k - m) * config.q if tier1 else 0
    return SecrecyMargin(bits, bits >= security_bits, tier1, security_bits)


def tap(config: CptConfig, coded_rows: np.ndarray, path: int) -> Intercept:
    """Intercept everything one path carries, given the full coded matrix."""
    rows = config.plan.ranges[path - 1]
    return Intercept(config.params, tuple(rows), coded_rows[rows.start - 1 : rows.stop - 1])


def parse_known(spec: str) -> list[tuple[int, int, int | None]]:
    """Parse ``row:col[:val],...`` (1-based row/col) into 0-based triples."""
    out = []
    for item in filter(None, (s.strip() for s in spec.split(","))):
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise BadParams(f"bad known-symbol spec {item!r}; expected row:col[:val]")
        r, c = int(parts[0]) - 1, int(parts[1]) - 1
        v = int(parts[2], 0) if len(parts) == 3 else None
        out.append((r, c, v))
    return out


def known_from(entries: Iterable[tuple[int, int, int | None]], X: np.ndarray | None) -> FormatPredicate:
    known = []
    for r, c, v in entries:
        if v is None:
            if X is None:
                raise BadParams("value required for known symbol when no reference payload exists")
            v = int(X[r, c])
        known.append((r, c, v))
    return FormatPredicate(tuple(known))
