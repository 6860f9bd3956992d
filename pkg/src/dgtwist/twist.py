"""
The twisted tensor product I_n ⊗̃ C for a directed finite dg category C.

Basis (normal form). A morphism (a, x) -> (b, y), a <= b, is a word

    g_m ⋆ ε(f_b; chain_m) ⋆ g_{m-1} ⋆ ... ⋆ ε(f_{a+1}; chain_1) ⋆ g_0,    m = b - a,

where f_t : t-1 -> t are the generators of I_n, the g's ("slots") are
arbitrary basis morphisms of C and every chain is a composable sequence
of non-identity basis morphisms of C. ε(f_t; ) is f_t ⊗ id. A word is
stored in application order: ``slots = (g_0, ..., g_m)`` and
``chains = (chain_1, ..., chain_m)``, each chain as (g_1, ..., g_l).

Word labels follow the grammar

    word   := "id_" a "⊗" atom                     (a = b)
            | atom (" | " block " | " atom)+        (a < b)
    block  := "eps(f" t ";" (" " atom ("," " " atom)*)? ")"
    atom   := C-label, wrapped in {...} if it contains one of | ; , { }
"""

from __future__ import annotations

from typing import NamedTuple

from .dgcat import (DgCategoryError, DgFunctor, FiniteDgCategory, Morphism, ensure_directed,
                    interval, interval_morphism, object_label, tensor, validate)
from .exactlinalg import vec_iadd


class TwistError(DgCategoryError):
    pass


class EpsilonBlock(NamedTuple):
    generator: int  # t, for f_t : t-1 -> t
    chain: tuple


class TwistWord(NamedTuple):
    start: int
    slots: tuple
    chains: tuple

    @property
    def end(self):
        return self.start + len(self.chains)

    def blocks(self):
        return [EpsilonBlock(self.start + t + 1, ch) for t, ch in enumerate(self.chains)]

    def has_epsilon(self):
        return any(self.chains)


def _sign(k):
    return -1 if k % 2 else 1


def canonical(combo: dict) -> dict:
    """Drop zeros and order terms by key."""
    return {k: combo[k] for k in sorted(combo) if combo[k]}


# The terms with d applied inside an ε-chain enter with the sign opposite to
# the one obtained by solving the defining identities literally: with the
# literal sign, d∘d != 0 as soon as C has a nonzero differential (e.g. on
# ε(f; v) with dv = w, d∘d = 2(f⋆w - w⋆f)); with this sign d∘d = 0 on every
# graded test category. No other term changes.
INTERNAL_TERM_SIGN = -1


def _atom(label: str) -> str:
    if any(ch in label for ch in "|;,{}"):
        return "{" + label + "}"
    return label


# ---------------------------------------------------------------------------
# differential of a single ε-block

def epsilon_differential_terms(C: FiniteDgCategory, chain, f_deg=0):
    """
    d ε(f; g_1, ..., g_n) for a closed f of degree ``f_deg``, as a list of
    (coeff, left, chain', right) meaning coeff * (id⊗left) ⋆ ε(f; chain') ⋆ (id⊗right)
    with ``left``/``right`` None when absent. ε(f; ) stands for f⊗id.

    n = 1 solves

        (f⊗id)⋆(id⊗g) - (-1)^{|f||g|}(id⊗g)⋆(f⊗id) = dε(f;g) - ε(df;g) + (-1)^{|f|+1} ε(f;dg)

    for dε(f;g); n >= 2 solves the companion identity for ε(df; g_1..g_n).
    Both ε(df; ...) terms vanish as df = 0. The ε(f; ..., dg_j, ...) terms
    are multiplied by INTERNAL_TERM_SIGN. Chain entries are expanded in
    the basis of C and terms with an identity inside a chain are dropped.
    """
    n = len(chain)
    if n == 0:
        # d(f⊗id) = df⊗id = 0
        return []
    g = list(chain)
    deg = [C.degree(x) for x in g]
    f = f_deg
    terms = []

    def with_entry(pos, combo, coeff):
        for h, c in combo.items():
            if C.is_identity(h):
                continue
            terms.append((coeff * c, None, tuple(g[:pos]) + (h,) + tuple(g[pos + 1:]), None))

    if n == 1:
        terms.append((1, None, (), g[0]))
        terms.append((-_sign(f * deg[0]), g[0], (), None))
        with_entry(0, C.d(g[0]), INTERNAL_TERM_SIGN * -_sign(f + 1))
        return terms

    # sum_j (-1)^{|f| + |g_n| + ... + |g_{j+1}| + n - j} ε(f; g_1, ..., dg_j, ..., g_n)
    for j in range(1, n + 1):
        s = _sign(f + sum(deg[j:]) + n - j)
        with_entry(j - 1, C.d(g[j - 1]), INTERNAL_TERM_SIGN * s)

    outer = -_sign(f + n - 1)
    # (-1)^{|f||g_n| + |f|} (id⊗g_n) ⋆ ε(f; g_1, ..., g_{n-1})
    terms.append((outer * _sign(f * deg[n - 1] + f), g[n - 1], tuple(g[:n - 1]), None))
    # (-1)^{|f| + sum_{i=2}^n (|g_i|+1) + 1} ε(f; g_2, ..., g_n) ⋆ (id⊗g_1)
    s = _sign(f + sum(d + 1 for d in deg[1:]) + 1)
    terms.append((outer * s, None, tuple(g[1:]), g[0]))
    # sum_{i=1}^{n-1} (-1)^{|f| + sum_{j=i+1}^n (|g_j|+1)} ε(f; g_1, ..., g_{i+1}∘g_i, ..., g_n)
    for i in range(1, n):
        s = _sign(f + sum(d + 1 for d in deg[i:]))
        merged = C.compose(g[i], g[i - 1])
        for h, c in merged.items():
            if C.is_identity(h):
                continue
            terms.append((outer * s * c, None, tuple(g[:i - 1]) + (h,) + tuple(g[i + 1:]), None))
    return terms


# ---------------------------------------------------------------------------
# the category

class TwistedTensor(FiniteDgCategory):
    """
    I_n ⊗̃ C with the word basis. Hom bases, differentials and
    compositions are computed on demand and cached.
    """

    def __init__(self, n: int, C: FiniteDgCategory, name=None):
        if n < 0:
            raise TwistError("n must be >= 0")
        ensure_directed(C)
        self.n = n
        self.base = C
        self.name = name or f"(I_{n}⊗̃{C.name})"
        self._objects = [(i, x) for i in range(n + 1) for x in C.objects]
        self.order = [(i, x) for i in range(n + 1) for x in C.order]
        self._hom_cache = {}
        self._d_cache = {}
        self._morph_cache = {}
        self._all_keys = None
        self._prepare_base()

    def _prepare_base(self):
        C = self.base
        objs = C.objects
        self._base_hom = {(x, y): C.hom(x, y) for x in objs for y in objs}
        self._base_nonid = {}
        for (x, y), ks in self._base_hom.items():
            nonid = tuple(k for k in ks if not C.is_identity(k))
            if nonid:
                self._base_nonid[(x, y)] = nonid
        rank = {x: i for i, x in enumerate(C.order)}
        # transitive closure of "hom(x, y) != 0"
        reach = {x: {x} for x in objs}
        for x in sorted(objs, key=lambda o: -rank[o]):
            for y in objs:
                if (x, y) in self._base_nonid:
                    reach[x] |= reach[y]
        self._reach = reach
        # all chains of non-identity basis morphisms, grouped by endpoints
        chains = {(x, x): [()] for x in objs}
        for x in sorted(objs, key=lambda o: -rank[o]):
            for (u, v), ks in self._base_nonid.items():
                if u != x:
                    continue
                for (p, q), tails in list(chains.items()):
                    if p != v:
                        continue
                    for tail in tails:
                        for k in ks:
                            chains.setdefault((x, q), []).append((k,) + tail)
        self._chains = {k: sorted(v) for k, v in chains.items()}

    # -- words ------------------------------------------------------------

    def word_degree(self, w: TwistWord) -> int:
        C = self.base
        d = sum(C.degree(g) for g in w.slots)
        for ch in w.chains:
            d += -len(ch) + sum(C.degree(g) for g in ch)
        return d

    def word_source(self, w):
        return (w.start, self.base.source(w.slots[0]))

    def word_target(self, w):
        return (w.end, self.base.target(w.slots[-1]))

    def word_label(self, w) -> str:
        C = self.base
        if not w.chains:
            return f"id_{w.start}⊗{_atom(C.label(w.slots[0]))}"
        parts = [_atom(C.label(w.slots[0]))]
        for t, ch in enumerate(w.chains):
            inner = ", ".join(_atom(C.label(g)) for g in ch)
            gen = w.start + t + 1
            parts.append(f"eps(f{gen}; {inner})" if ch else f"eps(f{gen};)")
            parts.append(_atom(C.label(w.slots[t + 1])))
        return " | ".join(parts)

    def morphism(self, e) -> Morphism:
        m = self._morph_cache.get(e)
        if m is None:
            m = Morphism(self.word_source(e), self.word_target(e), self.word_degree(e), self.word_label(e))
            self._morph_cache[e] = m
        return m

    def has_basis_element(self, e) -> bool:
        if not isinstance(e, TwistWord):
            return False
        return e in self.hom(self.word_source(e), self.word_target(e))

    def _enumerate(self, a, x, b, y):
        C = self.base
        m = b - a
        reach = self._reach
        out = []

        def rec(pos, t, slots, chains):
            if t == m:
                for g in self._base_hom.get((pos, y), ()):
                    out.append(TwistWord(a, slots + (g,), chains))
                return
            for p in C.objects:
                if p not in reach[pos] or y not in reach[p]:
                    continue
                slot_choices = self._base_hom.get((pos, p), ())
                if not slot_choices:
                    continue
                for q in C.objects:
                    if q not in reach[p] or y not in reach[q]:
                        continue
                    chs = self._chains.get((p, q))
                    if not chs:
                        continue
                    for g in slot_choices:
                        for ch in chs:
                            rec(q, t + 1, slots + (g,), chains + (ch,))

        rec(x, 0, (), ())
        return out

    def hom(self, x, y) -> tuple:
        key = (x, y)
        res = self._hom_cache.get(key)
        if res is None:
            (a, xx), (b, yy) = x, y
            if a > b or yy not in self._reach.get(xx, ()):
                res = ()
            else:
                words = self._enumerate(a, xx, b, yy)
                words.sort(key=lambda w: (self.word_degree(w), w.chains, w.slots))
                res = tuple(words)
            self._hom_cache[key] = res
        return res

    def basis_keys(self):
        if self._all_keys is None:
            keys = []
            for x in self._objects:
                for y in self._objects:
                    keys.extend(self.hom(x, y))
            self._all_keys = keys
        return list(self._all_keys)

    def identity(self, obj):
        i, x = obj
        return TwistWord(i, (self.base.identity(x),), ())

    def is_identity(self, e) -> bool:
        return not e.chains and self.base.is_identity(e.slots[0])

    def source(self, e):
        return self.word_source(e)

    def target(self, e):
        return self.word_target(e)

    def degree(self, e):
        return self.word_degree(e)

    def label(self, e):
        return self.morphism(e).label

    # -- structure maps ---------------------------------------------------

    def d(self, e) -> dict:
        r = self._d_cache.get(e)
        if r is None:
            r = word_differential(self, e)
            self._d_cache[e] = r
        return r

    def compose(self, g, f) -> dict:
        return word_compose(self, g, f)

    def __repr__(self):
        return f"<TwistedTensor {self.name} objects={len(self._objects)}>"

    def to_explicit(self, name=None) -> FiniteDgCategory:
        """Materialise all structure constants in a plain FiniteDgCategory."""
        keys = self.basis_keys()
        basis = {k: self.morphism(k) for k in keys}
        diff = {k: self.d(k) for k in keys if self.d(k)}
        by_source = {}
        for k in keys:
            by_source.setdefault(self.source(k), []).append(k)
        comp = {}
        for f in keys:
            for g in by_source.get(self.target(f), ()):
                c = self.compose(g, f)
                if c:
                    comp[(g, f)] = c
        ids = {x: self.identity(x) for x in self._objects}
        return FiniteDgCategory(self._objects, basis, diff, comp, ids, order=self.order,
                                name=name or self.name)


def twisted_tensor(n: int, C: FiniteDgCategory, check=False) -> TwistedTensor:
    """Build I_n ⊗̃ C; with ``check`` run the full axiom validation."""
    W = TwistedTensor(n, C)
    if check:
        rep = validate(W)
        if not rep.ok:
            raise TwistError("internal inconsistency, twisted tensor failed validation:\n" + rep.summary())
    return W


# ---------------------------------------------------------------------------
# word operations

def word_differential(W: TwistedTensor, w: TwistWord) -> dict:
    """
    d of a basis word: graded Leibniz over the factors
    g_m, ε_m, ..., ε_1, g_0 (composition order), d(u⋆v) = du⋆v + (-1)^|u| u⋆dv,
    with d(id⊗g) = id⊗dg and dε from `epsilon_differential_terms`.
    """
    C = W.base
    out = {}
    slots, chains = list(w.slots), w.chains
    m = len(chains)
    prefix = 0
    for t in range(m, -1, -1):
        s = _sign(prefix)
        for h, c in C.d(slots[t]).items():
            new = slots[:]
            new[t] = h
            key = TwistWord(w.start, tuple(new), chains)
            out[key] = out.get(key, 0) + s * c
        prefix += C.degree(slots[t])
        if t == 0:
            break
        ch = chains[t - 1]
        s = _sign(prefix)
        for coeff, left, newchain, right in epsilon_differential_terms(C, ch):
            after = C.compose(slots[t], left) if left is not None else {slots[t]: 1}
            before = C.compose(right, slots[t - 1]) if right is not None else {slots[t - 1]: 1}
            newchains = chains[:t - 1] + (newchain,) + chains[t:]
            for ga, ca in after.items():
                for gb, cb in before.items():
                    new = slots[:]
                    new[t] = ga
                    new[t - 1] = gb
                    key = TwistWord(w.start, tuple(new), newchains)
                    out[key] = out.get(key, 0) + s * coeff * ca * cb
        prefix += -len(ch) + sum(C.degree(g) for g in ch)
    return canonical(out)


def word_compose(W: TwistedTensor, w2: TwistWord, w1: TwistWord) -> dict:
    """w2 ⋆ w1 (w1 first): concatenate, composing the junction slots in C."""
    if w1.end != w2.start or W.base.target(w1.slots[-1]) != W.base.source(w2.slots[0]):
        raise TwistError("words are not composable")
    junction = W.base.compose(w2.slots[0], w1.slots[-1])
    head = w1.slots[:-1]
    tail = w2.slots[1:]
    chains = w1.chains + w2.chains
    return canonical({TwistWord(w1.start, head + (g,) + tail, chains): c for g, c in junction.items()})


def combo_differential(W, v: dict) -> dict:
    out = {}
    for k, c in v.items():
        vec_iadd(out, W.d(k), c)
    return canonical(out)


def combo_compose(W, u: dict, v: dict) -> dict:
    out = {}
    for g, a in u.items():
        for f, b in v.items():
            vec_iadd(out, W.compose(g, f), a * b)
    return canonical(out)


def expand_composite_epsilon(W: TwistedTensor, a: int, b: int, chain, obj=None,
                             left=None, right=None) -> dict:
    """
    ε(f_b ∘ ... ∘ f_{a+1}; g_1, ..., g_N) in the word basis, by iterating

        ε(f_2 f_1; g_1..g_N) = sum_m (-1)^{|f_1|(|g_{m+1}|+...+|g_N| + N - m) + m(N - m)} ε(f_2; g_{m+1}..g_N) ⋆ ε(f_1; g_1..g_m)

    with f_1 = f_{a+1} and f_2 = f_b ∘ ... ∘ f_{a+2}. The m(N - m) term
    is forced by compatibility with d (see composite_epsilon_differential);
    without it the expansion already disagrees with d for N = 2. ``obj`` is the
    C-object for an empty chain; ``left``/``right`` are optional C-basis
    elements composed after/before (id⊗left ⋆ ... ⋆ id⊗right).
    """
    C = W.base
    chain = tuple(chain)
    if a >= b:
        raise TwistError("composite ε needs a < b")
    for g in chain:
        if C.is_identity(g):
            raise TwistError("identity inside an ε-chain")
    for g1, g2 in zip(chain, chain[1:]):
        if C.target(g1) != C.source(g2):
            raise TwistError("chain is not composable")
    if chain:
        x, y = C.source(chain[0]), C.target(chain[-1])
    else:
        if obj is None:
            raise TwistError("empty chain needs an object")
        x = y = obj

    f1_deg = 0  # generators of I_n sit in degree 0

    def rec(a_, chain_):
        # list of (coeff, chains tuple) for generators f_{a_+1}..f_b
        if b - a_ == 1:
            return [(1, (chain_,))]
        out = []
        N = len(chain_)
        for mm in range(N + 1):
            s = _sign(f1_deg * (sum(C.degree(g) for g in chain_[mm:]) + N - mm) + mm * (N - mm))
            for c, rest in rec(a_ + 1, chain_[mm:]):
                out.append((s * c, (chain_[:mm],) + rest))
        return out

    result = {}
    for c, chains in rec(a, chain):
        # intermediate slots are identities at the junction objects
        slots = []
        pos = x
        for ch in chains:
            slots.append(C.identity(pos))
            if ch:
                pos = C.target(ch[-1])
        slots.append(C.identity(pos))
        befores = {slots[0]: 1} if right is None else C.compose(slots[0], right)
        afters = {slots[-1]: 1} if left is None else C.compose(left, slots[-1])
        for gb, cb in befores.items():
            for ga, ca in afters.items():
                s2 = list(slots)
                s2[0] = gb
                s2[-1] = ga
                key = TwistWord(a, tuple(s2), chains)
                result[key] = result.get(key, 0) + c * cb * ca
    return canonical(result)


def composite_epsilon_differential(W: TwistedTensor, a: int, b: int, chain, obj=None) -> dict:
    """
    d ε(f; chain) for the composite f = f_b ∘ ... ∘ f_{a+1} computed from the
    block formula with f composite, each resulting ε expanded by
    `expand_composite_epsilon`. Must equal d(expand_composite_epsilon(...)).
    """
    C = W.base
    out = {}
    for coeff, left, newchain, right in epsilon_differential_terms(C, chain):
        o = None
        if not newchain:
            o = C.target(right) if right is not None else C.source(left)
        vec_iadd(out, expand_composite_epsilon(W, a, b, newchain, obj=o, left=left, right=right), coeff)
    return canonical(out)


def check_composite_epsilon(W: TwistedTensor, max_checks=None):
    """
    Compare d(expansion) with the expanded block formula for every
    composite f_b ∘ ... ∘ f_{a+1} (b - a >= 2) and every chain of C.
    Returns (number checked, first failing (a, b, chain) or None).
    """
    C = W.base
    checked = 0
    for a in range(W.n + 1):
        for b in range(a + 2, W.n + 1):
            for (x, y), chains in sorted(W._chains.items(), key=repr):
                for ch in chains:
                    obj = x if not ch else None
                    lhs = combo_differential(W, expand_composite_epsilon(W, a, b, ch, obj=obj))
                    rhs = composite_epsilon_differential(W, a, b, ch, obj=obj)
                    checked += 1
                    if lhs != rhs:
                        return checked, (a, b, ch)
                    if max_checks is not None and checked >= max_checks:
                        return checked, None
    return checked, None


# ---------------------------------------------------------------------------
# projection and functoriality

def projection(W: TwistedTensor, target: FiniteDgCategory | None = None, check=True) -> DgFunctor:
    """
    p : I_n ⊗̃ C -> I_n ⊗ C, identity on objects, killing every word with a
    nonempty ε-chain and sending g_m ⋆ (f_b⊗id) ⋆ ... ⋆ (f_{a+1}⊗id) ⋆ g_0
    to f_{ab} ⊗ (g_m ∘ ... ∘ g_0).
    """
    C = W.base
    if target is None:
        target = tensor(interval(W.n), C)
    images = {}
    for w in W.basis_keys():
        if w.has_epsilon():
            continue
        h = {w.slots[0]: 1}
        for g in w.slots[1:]:
            h = C.compose_combo({g: 1}, h)
        fk = interval_morphism(W.n, w.start, w.end)
        images[w] = {(fk, k): c for k, c in h.items()}
    F = DgFunctor(W, target, {(i, x): (str(i), x) for (i, x) in W.objects}, images,
                  name=f"p[{W.name}]")
    if check:
        problem = F.check()
        if problem:
            raise TwistError(f"internal inconsistency, projection is not a dg functor: {problem}")
    return F


def map_word(F: DgFunctor, w: TwistWord) -> dict:
    """Image of a basis word under Id ⊗̃ F, as a combination of words."""
    D = F.target
    states = [((g,), (), c) for g, c in F.image(w.slots[0]).items()]
    for t, ch in enumerate(w.chains):
        # chain entries, multilinear, identities dropped
        chain_states = [((), 1)]
        for g in ch:
            nxt = []
            for prefix, c in chain_states:
                for h, c2 in F.image(g).items():
                    if D.is_identity(h):
                        continue
                    nxt.append((prefix + (h,), c * c2))
            chain_states = nxt
        slot_img = F.image(w.slots[t + 1])
        new_states = []
        for slots, chains, c in states:
            for chn, c2 in chain_states:
                for h, c3 in slot_img.items():
                    new_states.append((slots + (h,), chains + (chn,), c * c2 * c3))
        states = new_states
    out = {}
    for slots, chains, c in states:
        key = TwistWord(w.start, slots, chains)
        out[key] = out.get(key, 0) + c
    return canonical(out)


def twisted_map_on_second_factor(n: int, F: DgFunctor, WC: TwistedTensor | None = None,
                                 WD: TwistedTensor | None = None, check=True) -> DgFunctor:
    """Id ⊗̃ F : I_n ⊗̃ C -> I_n ⊗̃ D."""
    WC = WC or TwistedTensor(n, F.source)
    WD = WD or TwistedTensor(n, F.target)
    images = {w: map_word(F, w) for w in WC.basis_keys()}
    G = DgFunctor(WC, WD, {(i, x): (i, F.object_map[x]) for (i, x) in WC.objects}, images,
                  name=f"Id⊗̃{F.name}")
    if check:
        problem = G.check()
        if problem:
            raise TwistError(f"Id⊗̃F is not a dg functor: {problem}")
    return G


def tensor_map_on_second_factor(n: int, F: DgFunctor, IC=None, ID=None) -> DgFunctor:
    """Id ⊗ F : I_n ⊗ C -> I_n ⊗ D."""
    In = interval(n)
    IC = IC or tensor(In, F.source)
    ID = ID or tensor(In, F.target)
    images = {}
    for (f, g) in IC.basis_keys():
        images[(f, g)] = {(f, h): c for h, c in F.image(g).items()}
    return DgFunctor(IC, ID, {(i, x): (i, F.object_map[x]) for (i, x) in IC.objects}, images,
                     name=f"Id⊗{F.name}")


def check_square(pC: DgFunctor, pD: DgFunctor, twistedF: DgFunctor, classicalF: DgFunctor):
    """
    First basis word where p_D ∘ (Id ⊗̃ F) != (Id ⊗ F) ∘ p_C, or None.
    """
    for w in pC.source.basis_keys():
        lhs = {}
        for k, c in twistedF.image(w).items():
            vec_iadd(lhs, pD.image(k), c)
        rhs = {}
        for k, c in pC.image(w).items():
            vec_iadd(rhs, classicalF.image(k), c)
        if lhs != rhs:
            return w
    return None


def hom_dims(W: FiniteDgCategory, x, y) -> dict:
    out = {}
    for k in W.hom(x, y):
        d = W.degree(k)
        out[d] = out.get(d, 0) + 1
    return dict(sorted(out.items()))


def min_max(W: TwistedTensor):
    """((0, min C), (n, max C)) for iterated products of intervals."""
    C = W.base
    return (0, C.order[0]), (W.n, C.order[-1])
