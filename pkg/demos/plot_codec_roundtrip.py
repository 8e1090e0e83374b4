"""
Any k of n: erasure decoding over GF(2^8)
=========================================

Encode six data packets into twelve coded ones, throw six away at random,
and get the data back from whatever is left.
"""

import numpy as np

from cpt import Codec, CodeParams, FieldSpec, PacketSet

rng = np.random.default_rng(0)
params = CodeParams(n=12, k=6, field=FieldSpec.default(8))
codec = Codec(params)

X = PacketSet(rng.integers(0, 256, size=(6, 16), dtype=np.uint8))
Y = codec.encode(X).rows
print("generator row 3:", codec.G.rows[2])

# no coded row equals a data row: the code is non-systematic
print("any coded row equal to a data row?", any((Y == x).all(axis=1).any() for x in X.rows))

lost = sorted(rng.choice(12, size=6, replace=False))
print("lost rows (1-based):", [int(i) + 1 for i in lost])
received = [(i + 1, Y[i]) for i in range(12) if i not in lost]
print("recovered:", codec.decode(received) == X)

# one more loss and there is nothing to solve
try:
    codec.decode(received[1:])
except Exception as err:
    print(type(err).__name__, err)
