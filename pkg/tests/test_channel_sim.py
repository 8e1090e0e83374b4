import math

import pytest

from cpt.analysis import LossModel, p_fail
from cpt.channel_sim import SIM_HEADER, SimSpec, count_failures, run, sweep
from cpt.errors import BadSpec
from cpt.transport import CptConfig

EX1 = CptConfig(6, 12, 3, 8)


def test_no_loss_no_failure():
    est = run(SimSpec(EX1, LossModel(0.0), 500, 1))
    assert est.failures == 0 and est.estimate == 0 and est.z_score == 0


def test_failed_worst_path_on_fragile_config():
    cfg = CptConfig(9, 12, 3, 8)  # 12 - 4 < 9
    est = run(SimSpec(cfg, LossModel(0.0), 300, 1, failed_path="worst"))
    assert est.estimate == 1 and est.analytic == 1


def test_bad_specs():
    with pytest.raises(BadSpec):
        SimSpec(EX1, LossModel(0.1), 0)
    with pytest.raises(BadSpec):
        SimSpec(EX1, LossModel(0.1), 10, failed_path=4)
    with pytest.raises(BadSpec):
        SimSpec(EX1, LossModel(0.1), 10, mode="fast")


def test_deterministic():
    spec = SimSpec(EX1, LossModel(0.3), 5000, 42)
    assert run(spec) == run(spec)
    assert run(spec).failures != run(SimSpec(EX1, LossModel(0.3), 5000, 43)).failures


def test_trials_are_order_free():
    spec = SimSpec(EX1, LossModel(0.3), 9000, 7)
    whole = count_failures(spec, range(9000))
    parts = [count_failures(spec, range(a, b)) for a, b in [(6000, 9000), (0, 2500), (2500, 6000)]]
    assert whole[0] == sum(p[0] for p in parts)


@pytest.mark.parametrize("failed", [None, "worst", 2])
def test_integration_matches_counting(failed):
    cfg = CptConfig(4, 9, 3, 4)
    counting = run(SimSpec(cfg, LossModel(0.25), 800, 11, "counting", failed))
    integ = run(SimSpec(cfg, LossModel(0.25), 800, 11, "integration", failed, payload_bytes=12))
    assert counting.failures == integ.failures
    assert integ.mismatches == 0


def test_statistical_agreement_moderate_size():
    cfg = CptConfig(10, 16, 4, 8)
    est = run(SimSpec(cfg, LossModel(0.2), 100_000, 3))
    assert est.analytic == pytest.approx(p_fail(16, 10, 0.2))
    assert abs(est.z_score) <= 4


def test_stderr_formula():
    est = run(SimSpec(EX1, LossModel(0.4), 2000, 5))
    e = est.estimate
    assert est.stderr == pytest.approx(math.sqrt(e * (1 - e) / 2000))


def test_sweep_shapes():
    assert sweep([], [0.1], 10) == []
    rows = sweep([EX1], [0.2], 1000, master_seed=9)
    single = run(SimSpec(EX1, LossModel(0.2), 1000, 9))
    assert len(rows) == 1 and rows[0][7] == single.failures
    grid = sweep([EX1, CptConfig(4, 8, 2, 8), CptConfig(5, 10, 5, 8)], [0.05, 0.1, 0.2], 200)
    assert len(grid) == 9 and all(len(r) == len(SIM_HEADER) for r in grid)
    for i in range(0, 9, 3):
        analytic = [grid[i + j][10] for j in range(3)]
        assert analytic == sorted(analytic)


def test_z_score_finite_without_failures():
    est = run(SimSpec(EX1, LossModel(0.05), 1000, 2))
    assert est.failures == 0 and est.analytic > 0
    assert math.isfinite(est.z_score) and est.z_score < 0
