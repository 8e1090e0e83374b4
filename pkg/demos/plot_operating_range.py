"""
Where the overhead may sit
==========================

Survivability puts a floor under the overhead and secrecy puts a ceiling on
it. This prints both edges for m = 32 packets per path, with and without a
loss budget, then the delay cost of a non-systematic decoder.
"""

from cpt import analysis as an

print(an.to_csv(an.TABLE_HEADER, an.table_rows()))

print(an.to_csv(an.RANGE_HEADER, an.range_rows(an.operational_range(m=32, q=8))))

# contention loss raises the floor: the failed path's survivors still need k
loss = an.LossModel(p=0.01, p_thres=1e-12)
print(an.to_csv(an.RANGE_HEADER, an.range_rows(an.operational_range(m=32, q=8, loss=loss))))

for k in (32, 64):
    for p in (1e-4, 1e-2):
        print(f"k={k} p={p}: r={an.min_redundancy(k, p, 1e-12)}, with a dead path r={an.min_redundancy(k, p, 1e-12, l=3)}")

print(an.to_csv(an.DELAY_HEADER, an.delay_rows([32], [4, 16, 32, 64])))
