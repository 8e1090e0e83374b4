"""
What one tapped path gives away
===============================

An eavesdropper on one path holds fewer than k coded rows, so every data
column is only pinned to a coset. At toy sizes the coset can be enumerated;
at real sizes it cannot.
"""

import numpy as np

from cpt import Codec, CptConfig, PacketSet
from cpt.adversary import FormatPredicate, brute_force, search_space_bits, secrecy_margin, tap

print("(12, 6) over 3 paths: 2 ^", search_space_bits(6, 4, 8), "per column")
big = CptConfig(48, 96, 3, 8)
print("(96, 48) over 3 paths:", secrecy_margin(big))

cfg = CptConfig(k=4, n=8, l=4, q=4)
rng = np.random.default_rng(3)
X = rng.integers(0, 16, size=(4, 6), dtype=np.uint8)
Y = Codec(cfg.params).encode(PacketSet(X)).rows

seen = tap(cfg, Y, path=2)
print("tapped rows:", seen.row_indices)

# a known 2-symbol header at the start of packet 1
res = brute_force(seen, FormatPredicate.prefix(X, 2))
print("enumerated per column:", res.enumerated_per_column)
print("kept:", res.candidate_counts, "truth among them:", res.contains(X))

# the same attack against the (96, 48) tap does not even start
Yb = Codec(big.params).encode(PacketSet(np.zeros((48, 2), dtype=np.uint8))).rows
print(brute_force(tap(big, Yb, 1), FormatPredicate(((0, 0, 0),))))
