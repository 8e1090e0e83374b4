"""
Monte Carlo against the binomial tail
=====================================

Draw i.i.d. packet losses for the (12, 6) code over three paths and compare
the failure rate with the closed form, first with every path up, then with
the largest stripe gone.
"""

from cpt import CptConfig, LossModel
from cpt.channel_sim import SIM_HEADER, SimSpec, result_row, run, sweep
from cpt.analysis import to_csv

cfg = CptConfig(k=6, n=12, l=3)
for failed in (None, "worst"):
    est = run(SimSpec(cfg, LossModel(0.1), trials=200_000, master_seed=7, failed_path=failed))
    print(f"failed path {failed}: {est.estimate:.3e} vs {est.analytic:.3e} (z = {est.z_score:+.2f})")

# integration mode actually decodes every surviving trial
est = run(SimSpec(cfg, LossModel(0.3), trials=2_000, master_seed=7, mode="integration"))
print("decode mismatches:", est.mismatches, "failures:", est.failures)

# same seed, same CSV, byte for byte
rows = sweep([cfg, CptConfig(48, 96, 3)], [0.05, 0.2], trials=20_000, master_seed=1)
print(to_csv(SIM_HEADER, rows))
