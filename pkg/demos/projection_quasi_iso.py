"""
The projection from the twisted product to the classical one, on a category
with an acyclic summand in hom(0, 1).
"""
from dgtwist.dgcat import collapse_fixture, is_quasi_equivalence_on_homs, object_label
from dgtwist.twist import TwistedTensor, projection

C, F = collapse_fixture()
for n in range(3):
    cert = is_quasi_equivalence_on_homs(projection(TwistedTensor(n, C)))
    print(f"n={n}: quasi-iso on all {len(cert.pairs)} hom pairs: {cert.ok}")

cert = is_quasi_equivalence_on_homs(projection(TwistedTensor(1, C)))
for (x, y), v in sorted(cert.pairs.items(), key=str):
    print(" ", object_label(x), "->", object_label(y), v["source_H"], v["target_H"])
