"""
The smallest nontrivial component O(1,1): a two-term complex k -> k^2
whose cohomology is k in degree 0.
"""
from dgtwist.exactlinalg import cohomology
from dgtwist.operad import Ordinal2, augmentation, check_contractible, operad_complex

oc = operad_complex(Ordinal2((1, 1)))
for deg, names in oc.labels().items():
    print(deg, names)

d = oc.complex.differential(-1)
print("d =", [int(r[0]) for r in d.to_dense()])

H = cohomology(oc.complex)
print("H dims:", {k: g.dim for k, g in H.items()})

# the augmentation sends both degree-0 words to 1
print({oc.category.label(w): v for w, v in augmentation(oc).items()})
print(check_contractible(Ordinal2((1, 1))).to_json()["verdict"])
