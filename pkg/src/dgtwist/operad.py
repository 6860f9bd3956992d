"""
The complexes O(n_1, ..., n_k) built from iterated twisted tensor products
of intervals, their augmentation to the ground field, and contractibility
certificates.
"""

from __future__ import annotations

import itertools
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

from .dgcat import FiniteDgCategory, check_witness, directedness_witness, interval, validate
from .exactlinalg import QQ, ChainComplex, cohomology, field_from_name, format_scalar, rank
from .twist import TwistedTensor

FORMAT_VERSION = 1


class OperadError(Exception):
    pass


class BasisGuardExceeded(OperadError):
    def __init__(self, ordinal, size, guard, where):
        super().__init__(f"{ordinal}: basis of size {size} at {where} exceeds guard {guard}")
        self.ordinal, self.size, self.guard, self.where = ordinal, size, guard, where


@dataclass(frozen=True)
class Ordinal2:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts:
            raise OperadError("a 2-ordinal needs at least one level")
        if any(p < 0 for p in parts):
            raise OperadError(f"negative entry in {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Ordinal2":
        try:
            return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t != ""))
        except ValueError as e:
            raise OperadError(f"cannot parse ordinal {text!r}") from e

    @property
    def k(self):
        return len(self.parts)

    @property
    def total(self):
        return sum(self.parts)

    def __str__(self):
        return ",".join(map(str, self.parts))


def ordinals(max_k: int, max_sum: int) -> list:
    """All 2-ordinals with 1 <= k <= max_k and entry sum <= max_sum (zeros allowed)."""
    out = []
    for k in range(1, max_k + 1):
        for p in itertools.product(range(max_sum + 1), repeat=k):
            if sum(p) <= max_sum:
                out.append(Ordinal2(p))
    return out


def flat_object(x):
    """(n_k, (n_{k-1}, ... "n_1")) -> (n_k, ..., n_1)."""
    out = []
    while isinstance(x, tuple):
        out.append(x[0])
        x = x[1]
    out.append(int(x))
    return tuple(out)


@dataclass
class OperadComplex:
    ordinal: Ordinal2
    category: FiniteDgCategory      # D_k
    levels: list                    # D_1, ..., D_k
    source: object
    target: object
    basis: dict                     # degree -> word keys, in complex order
    complex: ChainComplex

    def dims(self):
        return {d: len(ws) for d, ws in sorted(self.basis.items())}

    def labels(self):
        return {d: [self.category.label(w) for w in ws] for d, ws in sorted(self.basis.items())}


def operad_complex(o: Ordinal2, field=QQ, check=True, guard=None) -> OperadComplex:
    """
    D_1 = interval(n_1), D_j = I_{n_j} ⊗̃ D_{j-1}; the complex is
    hom_{D_k}(min, max). With check=True every intermediate D_j (j < k) is
    revalidated exhaustively and its directedness recomputed.
    """
    if not isinstance(o, Ordinal2):
        o = Ordinal2(tuple(o))
    D = interval(o.parts[0])
    levels = [D]
    lo, hi = "0", str(o.parts[0])
    for nj in o.parts[1:]:
        if check:
            _recheck(D, o, guard)
        D = TwistedTensor(nj, D)
        levels.append(D)
        lo, hi = (0, lo), (nj, hi)
    by_deg = D.hom_basis_by_degree(lo, hi)
    size = sum(len(v) for v in by_deg.values())
    if guard is not None and size > guard:
        raise BasisGuardExceeded(str(o), size, guard, "hom(min, max)")
    c = D.hom_complex(lo, hi, field)
    if check and c.check_d_squared() is not None:
        raise OperadError(f"{o}: d^2 != 0 on hom(min, max)")
    return OperadComplex(o, D, levels, lo, hi, {d: list(ws) for d, ws in sorted(by_deg.items())}, c)


def _recheck(D, o, guard):
    if guard is not None:
        size = sum(len(D.hom(x, y)) for x in D.objects for y in D.objects)
        if size > guard:
            raise BasisGuardExceeded(str(o), size, guard, f"intermediate {D.name or type(D).__name__}")
    rep = validate(D)
    if not rep.ok:
        raise OperadError(f"{o}: intermediate category fails {rep.summary()}")
    problem = check_witness(D, directedness_witness(D))
    if problem:
        raise OperadError(f"{o}: recomputed directedness witness rejected: {problem}")


def augmentation_value(D: FiniteDgCategory, key):
    """
    Value of the iterated projection to the classical tensor product of
    intervals, where every hom is at most one-dimensional. A word with an
    ε-block maps to zero; otherwise its slots are composed and the
    projection is applied again one level down.
    """
    if isinstance(D, TwistedTensor):
        if key.has_epsilon():
            return 0
        combo = {key.slots[0]: 1}
        for g in key.slots[1:]:
            nxt = {}
            for f, c in combo.items():
                for h, c2 in D.base.compose(g, f).items():
                    nxt[h] = nxt.get(h, 0) + c * c2
            combo = {h: c for h, c in nxt.items() if c}
        return sum(c * augmentation_value(D.base, h) for h, c in combo.items())
    # interval: the unique basis element of hom(i, j), i <= j
    return 1


def augmentation(oc: OperadComplex) -> dict:
    """word -> value on the degree-0 part."""
    return {w: augmentation_value(oc.category, w) for w in oc.basis.get(0, [])}


def augmentation_is_chain_map(oc: OperadComplex) -> bool:
    """The functional vanishes on d(degree -1)."""
    aug = augmentation(oc)
    for w in oc.basis.get(-1, []):
        if sum(c * aug.get(k, 0) for k, c in oc.category.d(w).items()):
            return False
    return True


@dataclass
class ContractibilityCertificate:
    ordinal: Ordinal2
    field: str
    dims: dict
    ranks: dict
    H: dict
    euler_characteristic: int
    augmentation: object
    augmentation_chain_map: bool
    verdict: bool
    basis_size: int
    timings: dict | None = None
    versions: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "ordinal": list(self.ordinal.parts),
            "field": self.field,
            "dims": {str(d): v for d, v in sorted(self.dims.items())},
            "ranks": {str(d): v for d, v in sorted(self.ranks.items())},
            "H": {str(d): v for d, v in sorted(self.H.items())},
            "euler_characteristic": self.euler_characteristic,
            "augmentation": {"value_on_H0_representative": format_scalar(self.augmentation),
                             "chain_map": self.augmentation_chain_map},
            "verdict": self.verdict,
            "basis_size": self.basis_size,
            "versions": self.versions,
        }
        if self.timings is not None:
            out["timings"] = self.timings
        return out


def versions() -> dict:
    from . import __version__
    return {"artifact": __version__, "format": FORMAT_VERSION,
            "python": ".".join(platform.python_version_tuple()[:2])}


def check_contractible(o: Ordinal2, field=QQ, check=True, guard=None, timings=False) -> ContractibilityCertificate:
    t0 = time.perf_counter()
    oc = operad_complex(o, field, check, guard)
    t1 = time.perf_counter()
    c = oc.complex
    H = cohomology(c)
    hd = {d: g.dim for d, g in H.items() if g.dim}
    ranks = {d: rank(m) for d, m in sorted(c.differentials.items())}
    aug = augmentation(oc)
    value = 0
    if 0 in H and H[0].dim:
        rep = H[0].representatives[0]
        words = oc.basis[0]
        value = sum((v * aug[words[i]] for i, v in rep.items()), field.zero)
    chain = augmentation_is_chain_map(oc)
    verdict = hd == {0: 1} and bool(value) and chain
    t2 = time.perf_counter()
    tm = {"construction_s": round(t1 - t0, 6), "cohomology_s": round(t2 - t1, 6)} if timings else None
    return ContractibilityCertificate(o, field.name, oc.dims(), ranks, dict(sorted(hd.items())),
                                      c.euler_characteristic(), value, chain, verdict,
                                      sum(oc.dims().values()), tm, versions())


def nesting_check(o: Ordinal2, field=QQ) -> bool:
    """O(n_1, ..., n_k, 0) matches O(n_1, ..., n_k) word for word."""
    big = operad_complex(Ordinal2(o.parts + (0,)), field, check=False)
    small = operad_complex(o, field, check=False)
    W = big.category
    if big.dims() != small.dims():
        return False
    for d, ws in big.basis.items():
        if any(w.chains for w in ws) or sorted(map(repr, (w.slots[0] for w in ws))) != sorted(map(repr, small.basis[d])):
            return False
        for w in ws:
            lhs = {k.slots[0]: c for k, c in W.d(w).items()}
            if lhs != small.category.d(w.slots[0]):
                return False
    return True


# ---------------------------------------------------------------------------
# sweeps

@dataclass
class SweepEntry:
    ordinal: Ordinal2
    certificate: ContractibilityCertificate | None
    aborted: str | None = None

    @property
    def passed(self):
        return self.certificate is not None and self.certificate.verdict


def _sweep_one(args):
    parts, field_name, guard, timings = args
    o = Ordinal2(parts)
    try:
        return SweepEntry(o, check_contractible(o, field_from_name(field_name), True, guard, timings))
    except BasisGuardExceeded as e:
        return SweepEntry(o, None, str(e))


def sweep(max_k=3, max_sum=5, field=QQ, guard=None, jobs=1, timings=False) -> list:
    """Certificates for every ordinal in the bounds, in a fixed order."""
    tasks = [(o.parts, field.name, guard, timings) for o in ordinals(max_k, max_sum)]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sweep_one, tasks))
    return [_sweep_one(t) for t in tasks]


def sweep_summary(entries) -> dict:
    rows = []
    for e in entries:
        row = {"ordinal": list(e.ordinal.parts)}
        if e.certificate is None:
            row.update(verdict=None, aborted=e.aborted)
        else:
            c = e.certificate
            row.update(verdict=c.verdict, basis_size=c.basis_size,
                       H={str(d): v for d, v in c.H.items()}, euler_characteristic=c.euler_characteristic)
        rows.append(row)
    return {
        "ordinals": len(entries),
        "passed": sum(e.passed for e in entries),
        "failed": sum(e.certificate is not None and not e.passed for e in entries),
        "aborted": sum(e.certificate is None for e in entries),
        "rows": rows,
    }
