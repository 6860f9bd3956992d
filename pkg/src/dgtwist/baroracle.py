"""
Independent reconstruction of the hom complexes of I_n ⊗̃ C from bar
complexes.

Bar^(t)(C) is the two-sided bar construction of C placed on the
generator f_t. Elements are written in composition order as

    m [a_1 | ... | a_l] n

(n applied first, m last; a_1 is the last chain entry applied), with the
standard Koszul-signed bar differential. The hom complex from (a, x) to
(b, y) is rebuilt as the total complex

    K = Bar^(b) ⊗_C Bar^(b-1) ⊗_C ... ⊗_C Bar^(a+1)

with d(X ⊗ Y) = dX ⊗ Y + (-1)^|X| X ⊗ dY. Nothing here uses the ε-block
formulas of the twist module; the two constructions meet only through the
basis bijection in `word_to_bar` / `bar_to_word`.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

from .dgcat import FiniteDgCategory, ensure_directed
from .exactlinalg import QQ, ChainComplex, Matrix, cohomology_dims, rank


class BarElement(NamedTuple):
    left: object     # m
    entries: tuple   # (a_1, ..., a_l), composition order
    right: object    # n


class KElement(NamedTuple):
    # factors from Bar^(b) down to Bar^(a+1); all but the first have left = identity
    start: int
    factors: tuple


def _sign(k):
    return -1 if k % 2 else 1


def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class _Base:
    """Cached views of the directed category C."""

    def __init__(self, C: FiniteDgCategory):
        ensure_directed(C)
        self.C = C
        objs = C.objects
        self.hom = {(x, y): C.hom(x, y) for x in objs for y in objs}
        self.proper = {k: tuple(e for e in v if not C.is_identity(e)) for k, v in self.hom.items()}
        # bar words [a_1 | ... | a_l] from x to y (a_l applied first)
        words = {(x, x): [()] for x in objs}
        for length in range(1, len(objs)):
            grew = False
            for (p, q), ws in list(words.items()):
                for w in [w for w in ws if len(w) == length - 1]:
                    for r in objs:
                        for e in self.proper.get((q, r), ()):
                            words.setdefault((p, r), []).append((e,) + w)
                            grew = True
            if not grew:
                break
        self.words = {k: sorted(set(v)) for k, v in words.items()}

    def deg(self, e):
        return self.C.degree(e)

    def bar_degree_part(self, entries):
        # |[a_1|...|a_l]| = sum (|a_i| - 1)
        return sum(self.deg(a) - 1 for a in entries)


@dataclass
class BarComplex:
    """Bar^(t)(C): basis triples m[a_1|...|a_l]n and the bar differential."""

    generator: int
    base: _Base
    basis: list = dc_field(default_factory=list)

    def degree(self, e: BarElement):
        return self.base.deg(e.left) + self.base.bar_degree_part(e.entries) + self.base.deg(e.right)

    def d(self, e: BarElement) -> dict:
        return bar_differential(self.base, e)

    def source(self, e: BarElement):
        return self.base.C.source(e.right)

    def target(self, e: BarElement):
        return self.base.C.target(e.left)

    def dims(self, x, y) -> dict:
        out = {}
        for e in self.basis:
            if self.source(e) == x and self.target(e) == y:
                d = self.degree(e)
                out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def max_chain_length(self) -> int:
        return max((len(e.entries) for e in self.basis), default=0)


def bar_complex(C: FiniteDgCategory, t: int = 1) -> BarComplex:
    """All basis triples of Bar^(t)(C), over every pair of objects."""
    B = _Base(C)
    basis = []
    objs = C.objects
    # triples n: x -> p, chain p -> q, m: q -> y
    for x in objs:
        for p in objs:
            ns = B.hom[(x, p)]
            if not ns:
                continue
            for q in objs:
                for w in B.words.get((p, q), ()):
                    for y in objs:
                        for m_ in B.hom[(q, y)]:
                            for n_ in ns:
                                basis.append(BarElement(m_, w, n_))
    basis.sort(key=repr)
    return BarComplex(t, B, basis)


def bar_differential(B: _Base, e: BarElement) -> dict:
    """
    d(m[a_1|...|a_l]n) with e_i = sum_{j<=i} (|a_j| + 1):

        dm[...]n + sum_i (-1)^{|m| + e_{i-1} + 1} m[...|da_i|...]n + (-1)^{|m| + e_l} m[...]dn
        + (-1)^{|m|} m a_1 [a_2|...]n
        + sum_{i<l} (-1)^{|m| + e_i} m[...|a_i a_{i+1}|...]n
        - (-1)^{|m| + e_{l-1}} m[...|a_{l-1}] a_l n
    """
    internal, merge = _bar_terms(B, e)
    for k, c in merge.items():
        _acc(internal, k, c)
    return internal


def _bar_terms(B: _Base, e: BarElement):
    # (terms keeping the bar degree, terms lowering it by one)
    C = B.C
    m, a, n = e.left, e.entries, e.right
    l = len(a)
    eps = [0]
    for x in a:
        eps.append(eps[-1] + B.deg(x) + 1)
    dm = B.deg(m)
    internal, merge = {}, {}
    for h, c in C.d(m).items():
        _acc(internal, BarElement(h, a, n), c)
    for i in range(1, l + 1):
        s = _sign(dm + eps[i - 1] + 1)
        for h, c in C.d(a[i - 1]).items():
            if C.is_identity(h):
                continue
            _acc(internal, BarElement(m, a[:i - 1] + (h,) + a[i:], n), s * c)
    s = _sign(dm + eps[l])
    for h, c in C.d(n).items():
        _acc(internal, BarElement(m, a, h), s * c)
    if l:
        s = _sign(dm)
        for h, c in C.compose(m, a[0]).items():
            _acc(merge, BarElement(h, a[1:], n), s * c)
        for i in range(1, l):
            s = _sign(dm + eps[i])
            for h, c in C.compose(a[i - 1], a[i]).items():
                if C.is_identity(h):
                    continue
                _acc(merge, BarElement(m, a[:i - 1] + (h,) + a[i + 1:], n), s * c)
        s = -_sign(dm + eps[l - 1])
        for h, c in C.compose(a[l - 1], n).items():
            _acc(merge, BarElement(m, a[:l - 1], h), s * c)
    return internal, merge


# ---------------------------------------------------------------------------
# K complexes

@dataclass
class KComplex:
    a: int
    b: int
    x: object
    y: object
    basis: list
    degrees: dict        # element -> total degree
    bar_degrees: dict    # element -> total number of bar entries
    differential: dict   # element -> {element: coeff}
    field: object = QQ
    bar_part: dict = dc_field(default_factory=dict)   # the summand of d lowering bar degree

    def dims(self) -> dict:
        out = {}
        for e in self.basis:
            d = self.degrees[e]
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def chain_complex(self, field=None) -> ChainComplex:
        return _assemble(self.basis, self.degrees, self.differential, field or self.field)

    def bar_filtration_pieces(self, field=None) -> dict:
        """
        (K, d_bar) split by internal weight w = total degree + bar degree.

        d_bar is the part of d that lowers the bar degree; it preserves w.
        Returns w -> ChainComplex graded by total degree, so bar degree
        in a piece is w minus the complex degree.
        """
        field = field or self.field
        pieces = {}
        for e in self.basis:
            pieces.setdefault(self.degrees[e] + self.bar_degrees[e], []).append(e)
        return {w: _assemble(es, self.degrees, self.bar_part, field) for w, es in sorted(pieces.items())}


def _assemble(elements, degrees, diff, field) -> ChainComplex:
    by_deg = {}
    for e in elements:
        by_deg.setdefault(degrees[e], []).append(e)
    index = {d: {e: i for i, e in enumerate(es)} for d, es in by_deg.items()}
    diffs = {}
    for d, es in by_deg.items():
        tgt = index.get(d + 1)
        if tgt is None:
            continue
        entries = []
        for i, e in enumerate(es):
            for k, c in diff[e].items():
                if k not in tgt:
                    raise AssertionError(f"differential leaves the piece at {e!r}")
                entries.append(((tgt[k], i), c))
        diffs[d] = Matrix(len(tgt), len(es), entries, field)
    return ChainComplex({d: len(es) for d, es in by_deg.items()}, diffs, {}, field)


def _k_degree(B: _Base, factors):
    return sum(B.deg(f.left) + B.bar_degree_part(f.entries) + B.deg(f.right) for f in factors)


def _normalise(B: _Base, factors, coeff, out):
    """
    Push every non-identity left end of an inner factor into the right
    end of the factor before it (m ⊗_C a n = m a ⊗_C n), expanding in the
    basis of C.
    """
    C = B.C
    states = [(list(factors), coeff)]
    for i in range(1, len(factors)):
        nxt = []
        for fs, c in states:
            left = fs[i].left
            if C.is_identity(left):
                nxt.append((fs, c))
                continue
            prev = fs[i - 1]
            for h, c2 in C.compose(prev.right, left).items():
                g = list(fs)
                g[i - 1] = BarElement(prev.left, prev.entries, h)
                g[i] = BarElement(C.identity(C.source(left)), fs[i].entries, fs[i].right)
                nxt.append((g, c * c2))
        states = nxt
    for fs, c in states:
        _acc(out, tuple(fs), c)


def k_complex(C: FiniteDgCategory, a: int, b: int, x, y, field=QQ, _base=None) -> KComplex:
    """Total complex of Bar^(b) ⊗_C ... ⊗_C Bar^(a+1) at ((a, x), (b, y))."""
    B = _base or _Base(C)
    if a > b:
        return KComplex(a, b, x, y, [], {}, {}, {}, field)
    if a == b:
        basis = [KElement(a, (g,)) for g in B.hom[(x, y)]]
        degs = {e: B.deg(e.factors[0]) for e in basis}
        diff = {e: {KElement(a, (h,)): c for h, c in C.d(e.factors[0]).items()} for e in basis}
        return KComplex(a, b, x, y, basis, degs, {e: 0 for e in basis}, diff, field,
                        {e: {} for e in basis})

    m = b - a
    objs = C.objects
    basis = []

    def build(i, end_obj, acc):
        # choose factor for generator (b - i): it ends at end_obj, the right end
        # n starts at some object; for the innermost factor n starts at x.
        last = i == m - 1
        for start in ([x] if last else objs):
            for (p, q), ws in B.words.items():
                # chain runs p -> q; left end m: q -> end_obj; right end n: start -> p
                if i > 0 and q != end_obj:
                    continue
                lefts = B.hom[(q, end_obj)] if i == 0 else (C.identity(end_obj),)
                if not lefts:
                    continue
                rights = B.hom[(start, p)]
                if not rights:
                    continue
                for ww in ws:
                    for m_ in lefts:
                        for n_ in rights:
                            f = BarElement(m_, ww, n_)
                            if last:
                                basis.append(KElement(a, acc + (f,)))
                            else:
                                # next factor must end at `start`; its left end is an identity
                                build(i + 1, start, acc + (f,))

    build(0, y, ())
    basis = sorted(set(basis), key=lambda e: (_k_degree(B, e.factors), repr(e.factors)))
    degs = {e: _k_degree(B, e.factors) for e in basis}
    bars = {e: sum(len(f.entries) for f in e.factors) for e in basis}
    diff, barp = {}, {}
    for e in basis:
        out, out_bar = {}, {}
        prefix = 0
        for i, f in enumerate(e.factors):
            s = _sign(prefix)
            internal, merge = _bar_terms(B, f)
            for g, c in internal.items():
                _normalise(B, e.factors[:i] + (g,) + e.factors[i + 1:], s * c, out)
            for g, c in merge.items():
                fs = e.factors[:i] + (g,) + e.factors[i + 1:]
                _normalise(B, fs, s * c, out)
                _normalise(B, fs, s * c, out_bar)
            prefix += B.deg(f.left) + B.bar_degree_part(f.entries) + B.deg(f.right)
        diff[e] = {KElement(a, fs): c for fs, c in out.items()}
        barp[e] = {KElement(a, fs): c for fs, c in out_bar.items()}
    return KComplex(a, b, x, y, basis, degs, bars, diff, field, barp)


# ---------------------------------------------------------------------------
# acyclicity

@dataclass
class AcyclicityReport:
    a: int
    b: int
    x: object
    y: object
    h_dims: dict          # total cohomology of K
    predicted: dict       # dims of I_n(a, b) ⊗ H(C(x, y))
    bar_h_dims: dict      # (bar degree, total degree) -> dim H(K, d_bar)
    deviations: list      # human-readable reasons the prediction failed

    @property
    def ok(self):
        return not self.deviations


def acyclicity_report(K: KComplex, C: FiniteDgCategory, field=None) -> AcyclicityReport:
    """
    Check that H(K, d_bar) vanishes off bar degree 0 and equals
    I_n(a, b) ⊗ C(x, y) there, and that H(K) = I_n(a, b) ⊗ H(C(x, y)).
    """
    field = field or K.field
    dev = []
    h = cohomology_dims(K.chain_complex(field)) if K.basis else {}
    h = {d: v for d, v in h.items() if v}
    if K.a > K.b:
        return AcyclicityReport(K.a, K.b, K.x, K.y, h, {}, {}, [] if not h else ["nonzero on empty pair"])
    predicted = {d: v for d, v in cohomology_dims(C.hom_complex(K.x, K.y, field)).items() if v}
    if h != predicted:
        dev.append(f"H(K) = {h}, expected {predicted}")
    bar_h = {}
    for w, piece in K.bar_filtration_pieces(field).items():
        for d, v in cohomology_dims(piece).items():
            if v:
                bar_h[(w - d, d)] = v
    off = {k: v for k, v in bar_h.items() if k[0] != 0}
    if off:
        dev.append(f"d_bar cohomology off bar degree 0: {off}")
    c_dims = {}
    for g in C.hom(K.x, K.y):
        c_dims[C.degree(g)] = c_dims.get(C.degree(g), 0) + 1
    at_zero = {d: v for (l, d), v in bar_h.items() if l == 0}
    if at_zero != c_dims:
        dev.append(f"d_bar cohomology at bar degree 0 is {at_zero}, expected {c_dims}")
    return AcyclicityReport(K.a, K.b, K.x, K.y, dict(sorted(h.items())), dict(sorted(predicted.items())),
                            dict(sorted(bar_h.items())), dev)


# ---------------------------------------------------------------------------
# comparison with twist words

def word_to_bar(C: FiniteDgCategory, w) -> KElement:
    """
    Send a twist word (slots g_0..g_m, chains in application order) to
    the K basis element with factors for f_b, ..., f_{a+1}.
    """
    m = len(w.chains)
    if m == 0:
        return KElement(w.start, (w.slots[0],))
    fs = []
    for i in range(m):
        t = m - i
        left = w.slots[m] if i == 0 else C.identity(C.source(w.slots[t]))
        fs.append(BarElement(left, tuple(reversed(w.chains[t - 1])), w.slots[t - 1]))
    return KElement(w.start, tuple(fs))


def bar_to_word(e: KElement):
    from .twist import TwistWord
    if len(e.factors) == 1 and not isinstance(e.factors[0], BarElement):
        return TwistWord(e.start, (e.factors[0],), ())
    fs = list(reversed(e.factors))
    slots = [fs[0].right] + [f.right for f in fs[1:]] + [fs[-1].left]
    chains = tuple(tuple(reversed(f.entries)) for f in fs)
    return TwistWord(e.start, tuple(slots), chains)


def bijection_sign(w) -> int:
    """phi(w) = sign * word_to_bar(w); reverses each chain with its shifts."""
    return _sign(sum(len(ch) * (len(ch) + 1) // 2 for ch in w.chains))


@dataclass
class OracleComparison:
    a: int
    b: int
    x: object
    y: object
    dims: dict
    h_dims: dict
    bijective: bool
    degree_preserving: bool
    intertwining: bool
    dims_agree: bool
    h_agree: bool
    acyclicity: AcyclicityReport
    counterexample: object = None

    @property
    def ok(self):
        return (self.bijective and self.degree_preserving and self.intertwining
                and self.dims_agree and self.h_agree and self.acyclicity.ok)


def compare_pair(W, a, b, x, y, field=QQ, _base=None) -> OracleComparison:
    """Compare the oracle K complex with hom((a, x), (b, y)) of the twisted product W."""
    C = W.base
    K = k_complex(C, a, b, x, y, field, _base)
    words = W.hom((a, x), (b, y)) if a <= b else ()
    phi = {w: word_to_bar(C, w) for w in words}
    bij = len(set(phi.values())) == len(words) and set(phi.values()) == set(K.basis)
    degp = bij and all(W.degree(w) == K.degrees[phi[w]] for w in words)
    inter, bad = bij, None
    if bij:
        for w in words:
            lhs = {}
            for k, c in W.d(w).items():
                _acc(lhs, phi[k], c * bijection_sign(k))
            rhs = {k: c * bijection_sign(w) for k, c in K.differential[phi[w]].items()}
            if lhs != rhs:
                inter, bad = False, w
                break
    tw = W.hom_complex((a, x), (b, y), field) if a <= b else ChainComplex({}, {}, {}, field)
    h_tw = {d: v for d, v in cohomology_dims(tw).items() if v} if words else {}
    rep = acyclicity_report(K, C, field)
    dims_tw = {d: v for d, v in tw.dims.items() if v}
    return OracleComparison(a, b, x, y, K.dims(), rep.h_dims, bij, degp, inter,
                            dims_tw == K.dims(), h_tw == rep.h_dims, rep, bad)


def compare_all(W, field=QQ) -> list:
    """Oracle comparison for every object pair of W (pairs with a > b are vacuous)."""
    B = _Base(W.base)
    out = []
    for a in range(W.n + 1):
        for b in range(W.n + 1):
            for x in W.base.objects:
                for y in W.base.objects:
                    out.append(compare_pair(W, a, b, x, y, field, B))
    return out
