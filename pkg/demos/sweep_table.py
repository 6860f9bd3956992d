"""Contractibility of every small component, over Q and over F_32003."""
import sys

from dgtwist.exactlinalg import GF
from dgtwist.operad import sweep

k, total = (int(a) for a in sys.argv[1:3]) if len(sys.argv) > 2 else (3, 4)
q = sweep(k, total)
p = sweep(k, total, field=GF(32003))

print(f"{'ordinal':<10}{'basis':>6}  {'chi':>3}  H(Q)      H(F_p)")
for a, b in zip(q, p):
    ca, cb = a.certificate, b.certificate
    print(f"{str(a.ordinal):<10}{ca.basis_size:>6}  {ca.euler_characteristic:>3}  {str(ca.H):<10}{cb.H}")
print(sum(e.passed for e in q), "of", len(q), "contractible")
