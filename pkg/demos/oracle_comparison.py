"""
Two constructions of the same hom complexes: the twisted product, and the
tensor product of bar complexes. We compare them pair by pair.
"""
from dgtwist.baroracle import compare_all
from dgtwist.dgcat import collapse_fixture, random_directed_category
from dgtwist.twist import TwistedTensor

for name, C in [("collapse", collapse_fixture()[0]), ("random[3]", random_directed_category(3))]:
    W = TwistedTensor(2, C)
    rows = compare_all(W)
    bad = [r for r in rows if not r.ok]
    print(f"{name}: {len(rows)} pairs, {len(bad)} disagreements")
    r = max(rows, key=lambda r: sum(r.dims.values()))
    print("  largest pair", (r.a, r.b, r.x, r.y), "dims", r.dims, "H", r.h_dims)
