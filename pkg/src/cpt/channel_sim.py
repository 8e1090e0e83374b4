"""Monte Carlo estimate of decoding failure over a striped CPT configuration.

Every trial draws its randomness from SHAKE-128 keyed by ``(master_seed,
trial_index)``, so a trial's outcome does not depend on which other trials
ran, in what order, or in which process.  Loss draws come first in each
trial's stream; the integration-mode payload comes from a separate stream,
so counting and integration modes see identical loss patterns.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .analysis import LossModel, p_fail, p_fail_after_failure
from .errors import BadSpec, InsufficientPackets
from .rs_code import Codec, PacketSet
from .transport import CptConfig

CHUNK = 4096
_U53 = 2.0 ** -53

SIM_HEADER = (
    "n", "k", "l", "q", "p", "failed_path", "trials", "failures",
    "estimate", "stderr", "analytic", "z_score",
)


@dataclass(frozen=True)
class SimSpec:
    config: CptConfig
    loss: LossModel
    trials: int
    master_seed: int = 0
    mode: str = "counting"
    # None, a 1-based path index, or "worst" (the largest stripe)
    failed_path: int | str | None = None
    payload_bytes: int = 64

    def __post_init__(self):
        if self.trials < 1:
            raise BadSpec(f"trials must be >= 1, got {self.trials}")
        if self.mode not in ("counting", "integration"):
            raise BadSpec(f"unknown mode {self.mode!r}")
        if not 0 <= self.master_seed < 2**64:
            raise BadSpec("master_seed must fit in 64 bits")
        fp = self.failed_path
        if fp is not None and fp != "worst":
            if not isinstance(fp, int) or not 1 <= fp <= self.config.l:
                raise BadSpec(f"failed_path must be 1..{self.config.l}, 'worst' or None")
        if self.payload_bytes < 1:
            raise BadSpec("payload_bytes must be positive")

    @property
    def failed_path_index(self) -> int | None:
        if self.failed_path == "worst":
            return 1  # larger stripes come first
        if self.failed_path is None and self.loss.failed_paths == 1:
            return 1
        return self.failed_path


@dataclass(frozen=True)
class DecodeFailureEstimate:
    failures: int
    trials: int
    analytic: float
    mismatches: int = 0

    @property
    def estimate(self) -> float:
        return self.failures / self.trials

    @property
    def stderr(self) -> float:
        e = self.estimate
        return math.sqrt(e * (1 - e) / self.trials)

    @property
    def z_score(self) -> float:
        # scaled by the spread the analytic rate predicts, so a run with no
        # observed failures still gets a finite score
        diff = self.estimate - self.analytic
        a = self.analytic
        spread = math.sqrt(a * (1 - a) / self.trials)
        if spread == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / spread


def _stream(master_seed: int, trial: int, label: bytes, nbytes: int) -> bytes:
    h = hashlib.shake_128(label)
    h.update(master_seed.to_bytes(8, "big"))
    h.update(trial.to_bytes(8, "big"))
    return h.digest(nbytes)


def loss_uniforms(master_seed: int, trials: range, n: int) -> np.ndarray:
    """(len(trials), n) array of uniforms in [0, 1) for the given trial indices."""
    raw = b"".join(_stream(master_seed, t, b"loss", 8 * n) for t in trials)
    words = np.frombuffer(raw, dtype=">u8").reshape(len(trials), n)
    return (words >> np.uint64(11)).astype(np.float64) * _U53


def analytic_failure(spec: SimSpec) -> float:
    cfg, p = spec.config, spec.loss.p
    path = spec.failed_path_index
    if path is None:
        return p_fail(cfg.n, cfg.k, p)
    return p_fail_after_failure(cfg.n, cfg.stripe_sizes[path - 1], cfg.k, p)


def count_failures(spec: SimSpec, trials: range, codec: Codec | None = None) -> tuple[int, int]:
    """Failures and payload mismatches over a block of trial indices."""
    cfg = spec.config
    n, k = cfg.n, cfg.k
    lost_rows = np.zeros(n, dtype=bool)
    path = spec.failed_path_index
    if path is not None:
        rows = cfg.plan.ranges[path - 1]
        lost_rows[rows.start - 1 : rows.stop - 1] = True
    if spec.mode == "integration" and codec is None:
        codec = Codec(cfg.params)

    failures = mismatches = 0
    for start in range(trials.start, trials.stop, CHUNK):
        block = range(start, min(start + CHUNK, trials.stop))
        lost = (loss_uniforms(spec.master_seed, block, n) < spec.loss.p) | lost_rows
        survived = n - lost.sum(axis=1)
        failed = survived < k
        failures += int(failed.sum())
        if spec.mode == "integration":
            for j, t in enumerate(block):
                mismatches += _integration_trial(spec, codec, t, lost[j], bool(failed[j]))
    return failures, mismatches


def _integration_trial(spec: SimSpec, codec: Codec, trial: int, lost: np.ndarray, failed: bool) -> int:
    cfg = spec.config
    L = math.ceil(spec.payload_bytes / cfg.k)
    raw = np.frombuffer(_stream(spec.master_seed, trial, b"payload", cfg.k * L), dtype=np.uint8)
    X = PacketSet((raw & (cfg.params.field.order - 1)).reshape(cfg.k, L))
    Y = codec.encode(X).rows
    received = [(i + 1, Y[i]) for i in np.flatnonzero(~lost)]
    try:
        got = codec.decode(received)
    except InsufficientPackets:
        return 0 if failed else 1
    return 0 if (not failed and got == X) else 1


def run(spec: SimSpec) -> DecodeFailureEstimate:
    failures, mismatches = count_failures(spec, range(spec.trials))
    return DecodeFailureEstimate(failures, spec.trials, analytic_failure(spec), mismatches)


def result_row(spec: SimSpec, est: DecodeFailureEstimate) -> tuple:
    cfg = spec.config
    fp = spec.failed_path_index
    return (
        cfg.n, cfg.k, cfg.l, cfg.q, spec.loss.p, "" if fp is None else fp,
        est.trials, est.failures, est.estimate, est.stderr, est.analytic, est.z_score,
    )


def sweep(
    configs: Sequence[CptConfig],
    p_values: Iterable[float],
    trials: int,
    master_seed: int = 0,
    failed_path: int | str | None = None,
    mode: str = "counting",
) -> list[tuple]:
    """One CSV row per (config, p) grid point, columns as :data:`SIM_HEADER`."""
    p_values = list(p_values)
    rows = []
    for cfg in configs:
        for p in p_values:
            spec = SimSpec(cfg, LossModel(p), trials, master_seed, mode, failed_path)
            rows.append(result_row(spec, run(spec)))
    return rows
