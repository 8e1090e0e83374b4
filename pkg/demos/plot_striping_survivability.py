"""
Striping over three paths and losing one
========================================

Split a payload's coded packets across three disjoint paths. Any single path
can go down and the rest still carry k packets.
"""

import os

from cpt import CptConfig, encode_and_stripe, reassemble
from cpt.transport import drop_path

cfg = CptConfig(k=48, n=96, l=3, q=8)
print("stripe sizes:", cfg.stripe_sizes, "overhead:", cfg.overhead)

payload = os.urandom(10_000)
stripes = encode_and_stripe(payload, cfg)
for s in stripes:
    print(f"path {s.stripe_index}: rows {s.row_indices[0]}..{s.row_indices[-1]}, {len(s.to_bytes())} bytes on the wire")

for path in (1, 2, 3):
    ok = reassemble(drop_path(stripes, path), cfg) == payload
    print(f"path {path} down -> recovered: {ok}")

# with two paths down only 32 rows remain
try:
    reassemble(drop_path(drop_path(stripes, 1), 2), cfg)
except Exception as err:
    print(type(err).__name__, err)
