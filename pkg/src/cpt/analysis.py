"""Closed-form model of CPT: overhead bounds, decoding failure, delay.

Overhead bounds are returned as :class:`fractions.Fraction` so boundary
comparisons are exact.  Binomial tails are summed in log space with
``math.fsum``; :func:`p_fail_exact` gives the same quantity as an exact
rational for cross-checking.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BadParams, BadPathCount, BadProbability, Infeasible, SecrecyViolated
from .transport import plan_stripes

SECURITY_BITS = 128
MIN_PATHS, MAX_PATHS = 2, 6

# (q, k, l) for the n = 2^q - 1 example configurations
REFERENCE_CONFIGS = {
    "q5": (5, 25, 6),
    "q6": (6, 42, 3),
    "q7": (7, 84, 3),
    "q8": (8, 204, 5),
}


def _check_paths(l: int) -> None:
    if l < 2:
        raise BadPathCount(f"need at least 2 disjoint paths, got {l}")


def _check_p(p: float) -> None:
    if not 0 <= p < 1:
        raise BadProbability(f"loss probability must be in [0, 1), got {p}")


# overhead bounds

def survivability_min_overhead(l: int) -> Fraction:
    """Smallest r/k that survives losing one whole path."""
    _check_paths(l)
    return Fraction(1, l - 1)


def secrecy_max_overhead(l: int) -> Fraction:
    """Largest r/k for which one path carries no more than k packets."""
    _check_paths(l)
    return Fraction(l - 1)


def strong_secrecy_max_overhead(l: int, q: int, m: int, security_bits: int = SECURITY_BITS) -> Fraction:
    """Largest r/k leaving a single-path eavesdropper ``security_bits`` of search."""
    _check_paths(l)
    if q <= 0 or m <= 0:
        raise BadParams(f"q*m must be positive, got q={q}, m={m}")
    if security_bits < 0:
        raise BadParams("security_bits must be non-negative")
    return Fraction(l - 1) - Fraction(security_bits, q * m)


def secrecy_bits(k: int, m_prime_max: int, q: int) -> int:
    if k < m_prime_max:
        raise SecrecyViolated(f"one path carries {m_prime_max} > k={k} packets")
    return (k - m_prime_max) * q


# loss performance

def avg_redundancy(k: int, p: float) -> float:
    _check_p(p)
    return k * p / (1 - p)


def _check_tail(n: int, k: int, p: float) -> None:
    _check_p(p)
    if n < 0 or not 0 <= k <= n:
        raise BadParams(f"need 0 <= k <= n, got n={n}, k={k}")


def log_p_fail(n: int, k: int, p: float) -> float:
    """Natural log of :func:`p_fail`; ``-inf`` when decoding cannot fail."""
    _check_tail(n, k, p)
    lo = n - k + 1
    if p == 0 or lo > n:
        return -math.inf
    logp, logq = math.log(p), math.log1p(-p)
    terms = [math.log(math.comb(n, i)) + i * logp + (n - i) * logq for i in range(lo, n + 1)]
    top = max(terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def p_fail(n: int, k: int, p: float) -> float:
    """Probability that more than n - k of n packets are lost (i.i.d. loss ``p``)."""
    return math.exp(log_p_fail(n, k, p))


def p_fail_exact(n: int, k: int, p) -> Fraction:
    """Exact rational value of the same tail; ``p`` is taken at its exact binary value."""
    _check_tail(n, k, float(p))
    p = Fraction(p)
    q = 1 - p
    return sum(
        (math.comb(n, i) * p**i * q ** (n - i) for i in range(n - k + 1, n + 1)),
        Fraction(0),
    )


def p_fail_after_failure(n: int, m_prime_max: int, k: int, p: float) -> float:
    """Failure probability once the largest stripe is gone."""
    _check_p(p)
    survivors = n - m_prime_max
    if survivors < k:
        return 1.0
    return p_fail(survivors, k, p)


def min_redundancy(
    k: int,
    p: float,
    p_thres: float,
    l: int | None = None,
    cap: int | None = None,
) -> int:
    """Smallest r with failure probability <= ``p_thres``.

    With ``l=None`` all n = k + r packets are exposed to loss.  With an
    integer ``l`` one path (the largest stripe, ceil(n/l) rows) has already
    failed and the tail is evaluated over the n - ceil(n/l) survivors.
    """
    _check_p(p)
    if k < 1:
        raise BadParams(f"k must be positive, got {k}")
    if p_thres <= 0:
        raise BadParams(f"p_thres must be positive, got {p_thres}")
    if l is not None:
        _check_paths(l)
    cap = 16 * k if cap is None else cap
    log_thres = math.log(p_thres)
    for r in range(cap + 1):
        n = k + r
        if l is None:
            survivors = n
        else:
            if l > n:
                continue
            survivors = n - math.ceil(n / l)
        if survivors < k:
            continue
        if log_p_fail(survivors, k, p) <= log_thres:
            return r
    raise Infeasible(f"no r <= {cap} brings failure probability under {p_thres} (k={k}, p={p})")


# processing delay

def _check_code(n: int, k: int) -> None:
    if not 0 < k < n:
        raise BadParams(f"need 0 < k < n, got n={n}, k={k}")


def delay_systematic(n: int, k: int) -> int:
    _check_code(n, k)
    r = n - k
    return r * r + 6 * r + 4


def delay_nonsystematic(n: int, k: int) -> int:
    _check_code(n, k)
    r = n - k
    return -(-n // r) * (r * r + 6 * r + 4)


def needs_buffering(n: int, k: int, mode: str = "nonsystematic") -> bool:
    if mode == "systematic":
        return delay_systematic(n, k) > n
    if mode == "nonsystematic":
        return delay_nonsystematic(n, k) > n
    raise BadParams(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class DelayReport:
    n: int
    k: int
    d_systematic: int
    d_nonsystematic: int
    buffer_systematic: bool
    buffer_nonsystematic: bool


def delay_report(n: int, k: int) -> DelayReport:
    ds, dn = delay_systematic(n, k), delay_nonsystematic(n, k)
    return DelayReport(n, k, ds, dn, ds > n, dn > n)


# operating region

@dataclass(frozen=True)
class LossModel:
    p: float
    p_thres: float = 1e-12
    failed_paths: int = 0

    def __post_init__(self):
        _check_p(self.p)
        if self.p_thres <= 0:
            raise BadParams(f"p_thres must be positive, got {self.p_thres}")
        if self.failed_paths not in (0, 1):
            raise BadParams("only 0 or 1 failed paths are modeled")


@dataclass(frozen=True)
class ConstraintReport:
    l: int
    o: Fraction
    survivability_min: Fraction
    secrecy_max: Fraction
    strong_secrecy_max: Fraction
    violated: tuple[str, ...]

    @property
    def in_operational_range(self) -> bool:
        return not self.violated


def check_constraints(
    l: int, o, q: int = 8, m: int = 32, security_bits: int = SECURITY_BITS
) -> ConstraintReport:
    o = Fraction(o)
    lo = survivability_min_overhead(l)
    hi = secrecy_max_overhead(l)
    strong = strong_secrecy_max_overhead(l, q, m, security_bits)
    violated = []
    if o < lo:
        violated.append("survivability")
    if o > hi:
        violated.append("secrecy")
    if o > strong:
        violated.append("strong_secrecy")
    return ConstraintReport(l, o, lo, hi, strong, tuple(violated))


@dataclass(frozen=True)
class RangeBounds:
    l: int
    lower: Fraction
    upper: Fraction
    survivability_min: Fraction
    loss_min: Fraction | None = None

    @property
    def empty(self) -> bool:
        return self.lower > self.upper

    def contains(self, o) -> bool:
        return self.lower <= Fraction(o) <= self.upper


def operational_range(
    l_values: Iterable[int] = range(MIN_PATHS, MAX_PATHS + 1),
    m: int = 32,
    q: int = 8,
    security_bits: int = SECURITY_BITS,
    loss: LossModel | None = None,
) -> list[RangeBounds]:
    """Admissible overhead interval per path count.

    The lower edge is the survivability bound, raised to the overhead needed
    to meet ``loss.p_thres`` after a path failure when ``loss`` is given
    (a path failure is always assumed there, whatever ``loss.failed_paths``).
    The upper edge is the strong-secrecy bound.  Empty intervals are
    reported, not raised.
    """
    out = []
    for l in l_values:
        if not MIN_PATHS <= l <= MAX_PATHS:
            raise BadPathCount(f"path count {l} outside {MIN_PATHS}..{MAX_PATHS}")
        surv = survivability_min_overhead(l)
        lower, loss_min = surv, None
        if loss is not None:
            k = m * l
            r = min_redundancy(k, loss.p, loss.p_thres, l=l)
            loss_min = Fraction(r, k)
            lower = max(lower, loss_min)
        upper = strong_secrecy_max_overhead(l, q, m, security_bits)
        out.append(RangeBounds(l, lower, upper, surv, loss_min))
    return out


@dataclass(frozen=True)
class ConfigReport:
    q: int
    k: int
    n: int
    l: int
    r: int
    o: Fraction
    stripe_sizes: tuple[int, ...]
    secrecy_bits: int | None
    survivable: bool  # n - max stripe >= k
    meets_survivability: bool  # o >= 1/(l-1)
    meets_secrecy: bool  # o <= l-1
    meets_strong_secrecy: bool  # secrecy bits >= 128
    security_bits: int = SECURITY_BITS

    @property
    def m_prime_values(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.stripe_sizes)))


def evaluate_config(q: int, k: int, l: int, n: int | None = None, security_bits: int = SECURITY_BITS) -> ConfigReport:
    """Report for a code of length ``n`` (default 2^q - 1) striped over ``l`` paths."""
    top = (1 << q) - 1
    n = top if n is None else n
    if not 2 <= q <= 8:
        raise BadParams(f"q must be in 2..8, got {q}")
    if not 0 < k < n <= top:
        raise BadParams(f"need 0 < k < n <= {top}, got k={k}, n={n}")
    plan = plan_stripes(n, l)
    r = n - k
    o = Fraction(r, k)
    try:
        bits = secrecy_bits(k, plan.max_size, q)
    except SecrecyViolated:
        bits = None
    return ConfigReport(
        q=q, k=k, n=n, l=l, r=r, o=o,
        stripe_sizes=plan.sizes,
        secrecy_bits=bits,
        survivable=n - plan.max_size >= k,
        meets_survivability=o >= survivability_min_overhead(l),
        meets_secrecy=o <= secrecy_max_overhead(l),
        meets_strong_secrecy=bits is not None and bits >= security_bits,
        security_bits=security_bits,
    )


# CSV emitters

def fmt_overhead(o) -> str:
    s = f"{float(o):.3f}".rstrip("0").rstrip(".")
    return s or "0"


def fmt_num(x) -> str:
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt_num(v) for v in row])
    return buf.getvalue()


TABLE_HEADER = ("q", "k", "r", "o", "m_prime", "l", "secrecy_bits")


def table_rows(keys: Iterable[str] = REFERENCE_CONFIGS) -> list[tuple]:
    rows = []
    for key in keys:
        if key not in REFERENCE_CONFIGS:
            raise BadParams(f"unknown table row {key!r}; choose from {sorted(REFERENCE_CONFIGS)}")
        rep = evaluate_config(*REFERENCE_CONFIGS[key])
        m_prime = " and ".join(str(v) for v in rep.m_prime_values)
        rows.append((rep.q, rep.k, rep.r, fmt_overhead(rep.o), m_prime, rep.l, rep.secrecy_bits))
    return rows


RANGE_HEADER = ("l", "lower", "upper", "lower_exact", "upper_exact", "empty")


def range_rows(bounds: Iterable[RangeBounds]) -> list[tuple]:
    return [
        (b.l, b.lower, b.upper, str(b.lower), str(b.upper), str(b.empty).lower())
        for b in bounds
    ]


OVERHEAD_HEADER = ("k", "p", "p_thres", "mode", "r", "o", "p_fail")


def default_p_grid() -> list[float]:
    return [10 ** (e / 4) for e in range(-24, -3)]


def overhead_rows(
    ks: Iterable[int], p_grid: Iterable[float], p_thres: float = 1e-12, l: int | None = None
) -> list[tuple]:
    """Required redundancy per (k, p); ``l`` switches to the one-path-failed tail."""
    p_grid = list(p_grid)
    rows = []
    for k in ks:
        for p in p_grid:
            r = min_redundancy(k, p, p_thres, l=l)
            n = k + r
            if l is None:
                mode, pf = "no_failure", p_fail(n, k, p)
            else:
                mode, pf = f"one_path_failed(l={l})", p_fail_after_failure(n, -(-n // l), k, p)
            rows.append((k, p, p_thres, mode, r, Fraction(r, k), pf))
    return rows


DELAY_HEADER = (
    "k", "r", "n", "d_systematic", "d_nonsystematic", "buffer_systematic", "buffer_nonsystematic",
)


def delay_rows(ks: Iterable[int], r_grid: Iterable[int]) -> list[tuple]:
    r_grid = list(r_grid)
    rows = []
    for k in ks:
        for r in r_grid:
            rep = delay_report(k + r, k)
            rows.append((
                k, r, rep.n, rep.d_systematic, rep.d_nonsystematic,
                str(rep.buffer_systematic).lower(), str(rep.buffer_nonsystematic).lower(),
            ))
    return rows


CONFIG_HEADER = (
    "q", "k", "n", "l", "r", "o", "stripe_sizes", "secrecy_bits",
    "survivable", "meets_survivability", "meets_secrecy", "meets_strong_secrecy",
)


def config_rows(rep: ConfigReport) -> list[tuple]:
    return [(
        rep.q, rep.k, rep.n, rep.l, rep.r, fmt_overhead(rep.o),
        " ".join(map(str, rep.stripe_sizes)),
        "" if rep.secrecy_bits is None else rep.secrecy_bits,
        *(str(v).lower() for v in (
            rep.survivable, rep.meets_survivability, rep.meets_secrecy, rep.meets_strong_secrecy,
        )),
    )]
