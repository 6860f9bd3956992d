"""
Finite dg categories given by explicit structure constants.

Morphisms are formal linear combinations of basis elements, stored as
dicts ``key -> coefficient``. Keys are hashable and mutually orderable
inside one category (strings for hand-made categories, tuples for the
derived constructions), which gives every hom basis a canonical order.

Sign conventions:
    d raises degree by one,
    d(g∘f) = dg∘f + (-1)^|g| g∘df,
    (f⊗g)∘(f'⊗g') = (-1)^(|g||f'|) (f∘f')⊗(g∘g').
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable

from .exactlinalg import (QQ, ChainComplex, ChainMap, Matrix, induced_on_cohomology,
                          parse_scalar, vec_iadd)


class DgCategoryError(ValueError):
    pass


class MalformedCategoryError(DgCategoryError):
    """Structure constants that refer to missing or mismatched basis elements."""


class NotDirectedError(DgCategoryError):
    pass


class FunctorError(DgCategoryError):
    pass


@dataclass(frozen=True)
class Morphism:
    source: Hashable
    target: Hashable
    degree: int
    label: str


def object_label(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(object_label(y) for y in x) + ")"
    return str(x)


def _clean(combo: dict) -> dict:
    return {k: v for k, v in combo.items() if v}


def _num(x):
    # keep integers as int: much cheaper than Fraction in the hot loops
    x = parse_scalar(x)
    return x.numerator if x.denominator == 1 else x


class FiniteDgCategory:
    """
    A finite dg category: finitely many objects, finite graded hom bases,
    differential and composition given on basis elements.

    ``composition[(g, f)]`` is g∘f (f applied first). Missing entries for
    composable pairs mean zero, except that compositions with a designated
    identity default to the unit law.
    """

    def __init__(self, objects, basis, differential=None, composition=None,
                 identities=None, order=None, name=None):
        self.name = name
        self._objects = list(objects)
        if len(set(self._objects)) != len(self._objects):
            raise MalformedCategoryError("repeated object")
        self._basis: dict = dict(basis)
        self._identities = dict(identities or {})
        self._diff = {k: _clean({j: _num(c) for j, c in v.items()})
                      for k, v in (differential or {}).items()}
        self._comp = {k: _clean({j: _num(c) for j, c in v.items()})
                      for k, v in (composition or {}).items()}
        self.order = list(order) if order is not None else None
        self._homs = None
        self._check_structure()
        for x, e in self._identities.items():
            for f in self.basis_keys():
                if self._basis[f].target == x and (e, f) not in self._comp:
                    self._comp[(e, f)] = {f: 1}
                if self._basis[f].source == x and (f, e) not in self._comp:
                    self._comp[(f, e)] = {f: 1}

    # -- structure --------------------------------------------------------

    def _check_structure(self):
        objs = set(self._objects)
        for k, m in self._basis.items():
            if m.source not in objs or m.target not in objs:
                raise MalformedCategoryError(f"basis element {m.label!r} has an unknown endpoint")
        for x in self._objects:
            e = self._identities.get(x)
            if e is None:
                raise MalformedCategoryError(f"object {object_label(x)!r} has no identity designation")
            m = self._basis.get(e)
            if m is None:
                raise MalformedCategoryError(f"identity of {object_label(x)!r} is not a basis element")
            if m.source != x or m.target != x or m.degree != 0:
                raise MalformedCategoryError(f"identity of {object_label(x)!r} is not a degree-0 endomorphism")
        for k, img in self._diff.items():
            if k not in self._basis:
                raise MalformedCategoryError(f"differential of unknown element {k!r}")
            m = self._basis[k]
            for j in img:
                t = self._basis.get(j)
                if t is None:
                    raise MalformedCategoryError(f"differential of {m.label!r} mentions unknown {j!r}")
                if (t.source, t.target, t.degree) != (m.source, m.target, m.degree + 1):
                    raise MalformedCategoryError(f"differential {m.label!r} -> {t.label!r} is not of degree +1 in the same hom")
        for (g, f), img in self._comp.items():
            mg, mf = self._basis.get(g), self._basis.get(f)
            if mg is None or mf is None:
                raise MalformedCategoryError(f"composition of unknown elements {g!r}, {f!r}")
            if mf.target != mg.source:
                raise MalformedCategoryError(f"composition {mg.label!r}∘{mf.label!r} of non-composable pair")
            for j in img:
                t = self._basis.get(j)
                if t is None:
                    raise MalformedCategoryError(f"composition {mg.label!r}∘{mf.label!r} mentions unknown {j!r}")
                if (t.source, t.target, t.degree) != (mf.source, mg.target, mf.degree + mg.degree):
                    raise MalformedCategoryError(f"composition {mg.label!r}∘{mf.label!r} lands outside its hom/degree")

    # -- accessors --------------------------------------------------------

    @property
    def objects(self):
        return list(self._objects)

    def basis_keys(self):
        return list(self._basis)

    def morphism(self, e) -> Morphism:
        return self._basis[e]

    def source(self, e):
        return self._basis[e].source

    def target(self, e):
        return self._basis[e].target

    def degree(self, e) -> int:
        return self._basis[e].degree

    def label(self, e) -> str:
        return self._basis[e].label

    def identity(self, x):
        return self._identities[x]

    def has_basis_element(self, e) -> bool:
        return e in self._basis

    def is_identity(self, e) -> bool:
        m = self._basis[e]
        return m.source == m.target and self._identities.get(m.source) == e

    def _build_homs(self):
        homs = {}
        for k, m in self._basis.items():
            homs.setdefault((m.source, m.target), []).append(k)
        for v in homs.values():
            v.sort(key=lambda k: (self._basis[k].degree, k))
        self._homs = {k: tuple(v) for k, v in homs.items()}

    def hom(self, x, y) -> tuple:
        """Basis of hom(x, y), ordered by (degree, key)."""
        if self._homs is None:
            self._build_homs()
        return self._homs.get((x, y), ())

    def nonzero_pairs(self):
        return [(x, y) for x in self.objects for y in self.objects if self.hom(x, y)]

    def d(self, e) -> dict:
        return self._diff.get(e, {})

    def compose(self, g, f) -> dict:
        """g∘f on basis elements."""
        if self.target(f) != self.source(g):
            raise DgCategoryError(f"{self.label(g)!r}∘{self.label(f)!r} is not composable")
        return self._comp.get((g, f), {})

    # -- linear extensions ------------------------------------------------

    def d_combo(self, v: dict) -> dict:
        out = {}
        for k, c in v.items():
            vec_iadd(out, self.d(k), c)
        return out

    def compose_combo(self, u: dict, v: dict) -> dict:
        out = {}
        for g, a in u.items():
            for f, b in v.items():
                vec_iadd(out, self.compose(g, f), a * b)
        return out

    def combo_degree(self, v: dict):
        degs = {self.degree(k) for k in v}
        if len(degs) > 1:
            raise DgCategoryError("inhomogeneous combination")
        return degs.pop() if degs else None

    # -- hom complexes ----------------------------------------------------

    def hom_basis_by_degree(self, x, y) -> dict:
        out = {}
        for k in self.hom(x, y):
            out.setdefault(self.degree(k), []).append(k)
        return out

    def hom_complex(self, x, y, field=QQ) -> ChainComplex:
        by_deg = self.hom_basis_by_degree(x, y)
        index = {d: {k: i for i, k in enumerate(ks)} for d, ks in by_deg.items()}
        diffs = {}
        for d, ks in by_deg.items():
            if d + 1 not in index:
                continue
            tgt = index[d + 1]
            entries = [((tgt[j], i), c) for i, k in enumerate(ks) for j, c in self.d(k).items()]
            if entries:
                diffs[d] = Matrix(len(tgt), len(ks), entries, field)
        labels = {d: [self.label(k) for k in ks] for d, ks in by_deg.items()}
        return ChainComplex({d: len(ks) for d, ks in by_deg.items()}, diffs, labels, field)

    def __repr__(self):
        n = len(self._basis)
        return f"<{type(self).__name__} {self.name or ''} objects={len(self._objects)} basis={n}>"


# ---------------------------------------------------------------------------
# validation

@dataclass
class CheckResult:
    name: str
    passed: bool = True
    checked: int = 0
    counterexample: tuple | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self):
        return [c for c in self.checks.values() if not c.passed]

    def summary(self) -> str:
        lines = []
        for c in self.checks.values():
            s = f"{c.name}: {'pass' if c.passed else 'FAIL'} ({c.checked} checked)"
            if not c.passed:
                s += f" first counterexample {c.counterexample} {c.detail}"
            lines.append(s)
        return "\n".join(lines)


def _fail(res: CheckResult, example, detail=""):
    if res.passed:
        res.passed = False
        res.counterexample = example
        res.detail = detail


def validate(C: FiniteDgCategory, checks=("d2", "leibniz", "associativity", "units")) -> ValidationReport:
    """
    Exhaustively check the dg-category axioms on basis elements.

    Counterexamples are reported by basis labels.
    """
    rep = ValidationReport()
    keys = C.basis_keys()
    lab = C.label

    if "d2" in checks:
        r = rep.checks["d2"] = CheckResult("d2")
        for e in keys:
            r.checked += 1
            if C.d_combo(C.d(e)):
                _fail(r, (lab(e),), "d(d(e)) != 0")
                break

    by_source = {}
    for e in keys:
        by_source.setdefault(C.source(e), []).append(e)

    if "leibniz" in checks:
        r = rep.checks["leibniz"] = CheckResult("leibniz")
        for f in keys:
            for g in by_source.get(C.target(f), ()):
                r.checked += 1
                lhs = C.d_combo(C.compose(g, f))
                rhs = C.compose_combo(C.d(g), {f: 1})
                vec_iadd(rhs, C.compose_combo({g: 1}, C.d(f)), (-1) ** (C.degree(g) % 2))
                if lhs != rhs:
                    _fail(r, (lab(g), lab(f)), "d(g∘f) != dg∘f + (-1)^|g| g∘df")
                    break
            if not r.passed:
                break

    if "associativity" in checks:
        r = rep.checks["associativity"] = CheckResult("associativity")
        for f in keys:
            for g in by_source.get(C.target(f), ()):
                gf = C.compose(g, f)
                for h in by_source.get(C.target(g), ()):
                    r.checked += 1
                    lhs = C.compose_combo(C.compose(h, g), {f: 1})
                    rhs = C.compose_combo({h: 1}, gf)
                    if lhs != rhs:
                        _fail(r, (lab(h), lab(g), lab(f)), "(h∘g)∘f != h∘(g∘f)")
                        break
                if not r.passed:
                    break
            if not r.passed:
                break

    if "units" in checks:
        r = rep.checks["units"] = CheckResult("units")
        for x in C.objects:
            e = C.identity(x)
            r.checked += 1
            if C.d(e):
                _fail(r, (lab(e),), "d(identity) != 0")
        for f in keys:
            r.checked += 1
            if C.compose(C.identity(C.target(f)), f) != {f: 1}:
                _fail(r, (lab(C.identity(C.target(f))), lab(f)), "id∘f != f")
            if C.compose(f, C.identity(C.source(f))) != {f: 1}:
                _fail(r, (lab(f), lab(C.identity(C.source(f)))), "f∘id != f")
    return rep


# ---------------------------------------------------------------------------
# directedness

def directedness_witness(C: FiniteDgCategory) -> list:
    """
    A linear order of the objects strictly increased by every
    non-identity basis morphism; raises NotDirectedError otherwise.
    """
    for x in C.objects:
        if C.hom(x, x) != (C.identity(x),):
            raise NotDirectedError(
                f"hom({object_label(x)},{object_label(x)}) is not spanned by the identity")
    pos = {x: i for i, x in enumerate(C.objects)}
    succ = {x: set() for x in C.objects}
    indeg = {x: 0 for x in C.objects}
    for x, y in C.nonzero_pairs():
        if x != y and y not in succ[x]:
            succ[x].add(y)
            indeg[y] += 1
    ready = sorted((x for x in C.objects if indeg[x] == 0), key=pos.get)
    out = []
    while ready:
        x = ready.pop(0)
        out.append(x)
        for y in sorted(succ[x], key=pos.get):
            indeg[y] -= 1
            if indeg[y] == 0:
                ready.append(y)
                ready.sort(key=pos.get)
    if len(out) != len(C.objects):
        raise NotDirectedError("non-identity morphisms form a cycle between objects")
    return out


def check_witness(C: FiniteDgCategory, order) -> str | None:
    """Return a description of the first violation of the witness, or None."""
    rank = {x: i for i, x in enumerate(order)}
    if set(rank) != set(C.objects) or len(rank) != len(order):
        return "order is not a permutation of the objects"
    for x in C.objects:
        if C.hom(x, x) != (C.identity(x),):
            return f"hom({object_label(x)},{object_label(x)}) is not spanned by the identity"
    for x, y in C.nonzero_pairs():
        if x != y and rank[x] >= rank[y]:
            return f"a morphism {object_label(x)} -> {object_label(y)} does not increase the order"
    return None


def ensure_directed(C: FiniteDgCategory) -> list:
    """Validate the stored witness (or derive one) and return it."""
    if C.order is not None:
        problem = check_witness(C, C.order)
        if problem:
            raise NotDirectedError(problem)
        return C.order
    C.order = directedness_witness(C)
    return C.order


# ---------------------------------------------------------------------------
# constructions

def interval(n: int) -> FiniteDgCategory:
    """The poset 0 < 1 < ... < n linearised: hom(i, j) = k for i <= j."""
    if n < 0:
        raise ValueError("interval(n) needs n >= 0")
    objects = [str(i) for i in range(n + 1)]

    def key(i, j):
        return f"id_{i}" if i == j else f"{i}->{j}"

    basis = {}
    for i in range(n + 1):
        for j in range(i, n + 1):
            basis[key(i, j)] = Morphism(str(i), str(j), 0, key(i, j))
    comp = {}
    for i in range(n + 1):
        for j in range(i, n + 1):
            for k in range(j, n + 1):
                comp[(key(j, k), key(i, j))] = {key(i, k): 1}
    ids = {str(i): key(i, i) for i in range(n + 1)}
    return FiniteDgCategory(objects, basis, {}, comp, ids, order=objects, name=f"I_{n}")


def interval_morphism(n_or_C, i: int, j: int):
    """Basis key of the unique morphism i -> j of an interval category."""
    return f"id_{i}" if i == j else f"{i}->{j}"


def tensor(C: FiniteDgCategory, D: FiniteDgCategory, check=True) -> FiniteDgCategory:
    """Classical tensor product of dg categories with the Koszul sign rule."""
    objects = [(x, y) for x in C.objects for y in D.objects]
    basis = {}
    for f in C.basis_keys():
        for g in D.basis_keys():
            basis[(f, g)] = Morphism((C.source(f), D.source(g)), (C.target(f), D.target(g)),
                                     C.degree(f) + D.degree(g), f"{C.label(f)}⊗{D.label(g)}")
    diff = {}
    for (f, g) in basis:
        out = {}
        for f2, c in C.d(f).items():
            out[(f2, g)] = out.get((f2, g), 0) + c
        s = (-1) ** (C.degree(f) % 2)
        for g2, c in D.d(g).items():
            out[(f, g2)] = out.get((f, g2), 0) + s * c
        out = _clean(out)
        if out:
            diff[(f, g)] = out
    comp = {}
    for (f, g) in basis:
        for f1 in C.basis_keys():
            if C.source(f) != C.target(f1):
                continue
            ff = C.compose(f, f1)
            if not ff:
                continue
            for g1 in D.basis_keys():
                if D.source(g) != D.target(g1):
                    continue
                gg = D.compose(g, g1)
                if not gg:
                    continue
                s = (-1) ** ((D.degree(g) * C.degree(f1)) % 2)
                comp[((f, g), (f1, g1))] = {(a, b): s * x * y for a, x in ff.items() for b, y in gg.items()}
    ids = {(x, y): (C.identity(x), D.identity(y)) for (x, y) in objects}
    order = None
    if C.order is not None and D.order is not None:
        order = [(x, y) for x in C.order for y in D.order]
    out = FiniteDgCategory(objects, basis, diff, comp, ids, order=order,
                           name=f"({C.name}⊗{D.name})")
    if check:
        rep = validate(out)
        if not rep.ok:
            raise DgCategoryError("tensor product failed validation:\n" + rep.summary())
    return out


# ---------------------------------------------------------------------------
# functors

class DgFunctor:
    """
    A dg functor given on objects and on basis elements.

    ``images[e]`` is F(e) as a combination of target basis elements;
    missing entries mean F(e) = 0.
    """

    def __init__(self, source: FiniteDgCategory, target: FiniteDgCategory, object_map: dict,
                 images: dict, name=None):
        self.source = source
        self.target = target
        self.object_map = dict(object_map)
        self.images = {k: _clean(dict(v)) for k, v in images.items()}
        self.name = name

    def __call__(self, m: dict) -> dict:
        return apply_functor(self, m)

    def image(self, e) -> dict:
        return self.images.get(e, {})

    def check(self) -> str | None:
        """Describe the first violated functor axiom, or None."""
        C, D = self.source, self.target
        for x in C.objects:
            if self.object_map.get(x) not in set(D.objects):
                return f"object {object_label(x)} has no image"
        for e in C.basis_keys():
            img = self.image(e)
            sx, tx = self.object_map[C.source(e)], self.object_map[C.target(e)]
            for k in img:
                if (D.source(k), D.target(k), D.degree(k)) != (sx, tx, C.degree(e)):
                    return f"F({C.label(e)}) leaves its hom or degree"
            if D.d_combo(img) != self.__call__(C.d(e)):
                return f"F does not commute with d on {C.label(e)}"
        for x in C.objects:
            if self.image(C.identity(x)) != {D.identity(self.object_map[x]): 1}:
                return f"F does not preserve the identity of {object_label(x)}"
        for f in C.basis_keys():
            for g in C.basis_keys():
                if C.source(g) != C.target(f):
                    continue
                lhs = self.__call__(C.compose(g, f))
                rhs = D.compose_combo(self.image(g), self.image(f))
                if lhs != rhs:
                    return f"F does not preserve {C.label(g)}∘{C.label(f)}"
        return None

    def hom_chain_map(self, x, y, field=QQ) -> ChainMap:
        C, D = self.source, self.target
        fx, fy = self.object_map[x], self.object_map[y]
        src = C.hom_complex(x, y, field)
        tgt = D.hom_complex(fx, fy, field)
        sb = C.hom_basis_by_degree(x, y)
        tb = D.hom_basis_by_degree(fx, fy)
        comps = {}
        for d, ks in sb.items():
            tindex = {k: i for i, k in enumerate(tb.get(d, ()))}
            entries = []
            for i, k in enumerate(ks):
                for j, c in self.image(k).items():
                    entries.append(((tindex[j], i), c))
            comps[d] = Matrix(len(tindex), len(ks), entries, field)
        return ChainMap(src, tgt, comps)


def identity_functor(C: FiniteDgCategory) -> DgFunctor:
    return DgFunctor(C, C, {x: x for x in C.objects}, {e: {e: 1} for e in C.basis_keys()},
                     name=f"id_{C.name}")


def apply_functor(F: DgFunctor, m: dict) -> dict:
    """Image of a combination of basis elements lying in a single hom."""
    ends = {(F.source.source(k), F.source.target(k)) for k in m}
    if len(ends) > 1:
        raise FunctorError("combination spans several homs")
    degs = {F.source.degree(k) for k in m}
    if len(degs) > 1:
        raise FunctorError("combination is not homogeneous")
    out = {}
    for k, c in m.items():
        if not F.source.has_basis_element(k):
            raise FunctorError(f"{k!r} is not a basis element of the source")
        vec_iadd(out, F.image(k), c)
    return out


@dataclass
class QuasiEquivalenceCertificate:
    ok: bool
    pairs: dict  # (x, y) -> {"source_H": ..., "target_H": ..., "quasi_iso": bool}


def is_quasi_equivalence_on_homs(F: DgFunctor, field=QQ) -> QuasiEquivalenceCertificate:
    """
    For functors bijective on objects: True iff every hom chain map is a
    quasi-isomorphism.
    """
    C, D = F.source, F.target
    images = [F.object_map[x] for x in C.objects]
    if len(set(images)) != len(images) or set(images) != set(D.objects):
        raise FunctorError("functor is not bijective on objects")
    pairs = {}
    ok = True
    for x in C.objects:
        for y in C.objects:
            if not C.hom(x, y) and not D.hom(F.object_map[x], F.object_map[y]):
                continue
            ind = induced_on_cohomology(F.hom_chain_map(x, y, field))
            pairs[(x, y)] = {"source_H": {d: n for d, n in ind.source_dims.items() if n},
                             "target_H": {d: n for d, n in ind.target_dims.items() if n},
                             "quasi_iso": ind.is_quasi_iso}
            ok &= ind.is_quasi_iso
    return QuasiEquivalenceCertificate(ok, pairs)


def relabel_check(C: FiniteDgCategory, D: FiniteDgCategory, object_map: dict, basis_map: dict) -> str | None:
    """
    Check that a bijection of objects and basis elements is an isomorphism
    of dg categories (commutes with d and composition exactly).
    """
    if sorted(map(repr, basis_map)) != sorted(map(repr, C.basis_keys())):
        return "basis map is not defined on every basis element"
    if len(set(basis_map.values())) != len(basis_map) or set(basis_map.values()) != set(D.basis_keys()):
        return "basis map is not a bijection"
    F = DgFunctor(C, D, object_map, {k: {v: 1} for k, v in basis_map.items()})
    return F.check()


# ---------------------------------------------------------------------------
# fixtures

def collapse_fixture():
    """
    Two objects, hom(0,1) spanned by u (closed, degree 0), v (degree -1)
    and w (degree 0) with dv = w; no non-unit compositions.
    Returns the category and the functor onto interval(1) sending u to
    the generator and v, w to zero.
    """
    basis = {
        "id_0": Morphism("0", "0", 0, "id_0"),
        "id_1": Morphism("1", "1", 0, "id_1"),
        "u": Morphism("0", "1", 0, "u"),
        "v": Morphism("0", "1", -1, "v"),
        "w": Morphism("0", "1", 0, "w"),
    }
    C = FiniteDgCategory(["0", "1"], basis, {"v": {"w": 1}}, {}, {"0": "id_0", "1": "id_1"},
                         order=["0", "1"], name="C'")
    I1 = interval(1)
    F = DgFunctor(C, I1, {"0": "0", "1": "1"},
                  {"id_0": {"id_0": 1}, "id_1": {"id_1": 1}, "u": {"0->1": 1}}, name="collapse")
    return C, F


def path_category(objects, generators, differential=None, max_length=None, name=None):
    """
    Semifree dg category on a directed quiver, optionally truncated.

    ``generators``: name -> (source, target, degree). Basis = composable
    paths (tuples of generator names in application order) of length
    < ``max_length``; paths of length >= max_length are set to zero, which
    is a dg ideal. ``differential``: name -> {path: coeff}; it must be
    given on generators only and is extended by the Leibniz rule.
    Raises DgCategoryError if the extension does not square to zero.
    """
    differential = differential or {}
    objects = list(objects)
    out_edges = {x: [] for x in objects}
    for a, (s, t, _) in sorted(generators.items()):
        out_edges[s].append(a)

    frontier = [(x, x, ()) for x in objects]
    allpaths = [(x, x, ()) for x in objects]
    while frontier:
        nxt = []
        for s, e, p in frontier:
            if max_length is not None and len(p) + 1 >= max_length:
                continue
            for a in out_edges[e]:
                q = p + (a,)
                if len(q) > len(objects) * 4:
                    raise NotDirectedError("quiver has cycles")
                nxt.append((s, generators[a][1], q))
        allpaths.extend(nxt)
        frontier = nxt

    def key(s, p):
        return ("id", s) if not p else p

    basis = {}
    for s, e, p in allpaths:
        deg = sum(generators[a][2] for a in p)
        label = f"id_{s}" if not p else "*".join(reversed(p))
        basis[key(s, p)] = Morphism(s, e, deg, label)
    keys_by_path = {p: key(s, p) for s, e, p in allpaths}

    def as_key(s, p):
        if not p:
            return ("id", s)
        return keys_by_path.get(tuple(p))

    def d_path(s, p):
        # Leibniz over the path, written in composition order a_n ... a_1
        out = {}
        for i, a in enumerate(p):
            later = p[i + 1:]
            sign = (-1) ** (sum(generators[b][2] for b in later) % 2)
            for q, c in differential.get(a, {}).items():
                q = tuple(q)
                newp = p[:i] + q + p[i + 1:]
                k = as_key(s, newp)
                if k is not None and (max_length is None or len(newp) < max_length):
                    out[k] = out.get(k, 0) + sign * c
        return _clean(out)

    diff = {}
    for s, e, p in allpaths:
        if p:
            dp = d_path(s, p)
            if dp:
                diff[key(s, p)] = dp
    comp = {}
    for s1, e1, p1 in allpaths:
        for s2, e2, p2 in allpaths:
            if s2 != e1:
                continue
            q = p1 + p2
            k = as_key(s1, q)
            if k is not None and (max_length is None or len(q) < max_length):
                comp[(key(s2, p2), key(s1, p1))] = {k: 1}
    ids = {x: ("id", x) for x in objects}
    C = FiniteDgCategory(objects, basis, diff, comp, ids, name=name)
    rep = validate(C)
    if not rep.ok:
        raise DgCategoryError("path category is not a dg category:\n" + rep.summary())
    return C


def random_directed_category(seed: int, n_objects=3, n_generators=4, max_length=None):
    """
    Random semifree (optionally truncated) directed dg category with at
    least two degrees present and a nonzero differential.

    Generators are added one at a time; each new generator of degree k
    between x < y gets as differential a random integer combination of
    the degree k+1 cocycles of hom(x, y) in the category built so far,
    which keeps d∘d = 0.
    """
    import random

    from .exactlinalg import kernel

    rng = random.Random(seed)
    objects = [str(i) for i in range(n_objects)]
    for attempt in range(200):
        gens = {}
        diff = {}
        C = path_category(objects, gens, diff, max_length=max_length)
        for g in range(n_generators):
            x, y = sorted(rng.sample(range(n_objects), 2))
            deg = rng.choice([-1, 0, 0, 1])
            name = f"a{g}"
            cx = C.hom_complex(str(x), str(y))
            keys = C.hom_basis_by_degree(str(x), str(y)).get(deg + 1, [])
            dpart = {}
            if keys:
                Z = kernel(cx.differential(deg + 1))
                if Z and rng.random() < 0.8:
                    z = {}
                    for v in Z:
                        c = rng.choice([-1, 1, 2])
                        vec_iadd(z, v, c)
                    den = 1
                    for c in z.values():
                        den = den * Fraction(c).denominator
                    for i, c in z.items():
                        dpart[keys[i]] = int(c * den)
            gens[name] = (str(x), str(y), deg)
            if dpart:
                diff[name] = {k: c for k, c in dpart.items() if c}
            try:
                C = path_category(objects, gens, diff, max_length=max_length,
                                  name=f"random[{seed}]")
            except DgCategoryError:
                gens.pop(name)
                diff.pop(name, None)
        degrees = {C.degree(e) for e in C.basis_keys()}
        has_d = any(C.d(e) for e in C.basis_keys())
        if len(degrees) >= 2 and has_d:
            ensure_directed(C)
            return C
    raise DgCategoryError(f"could not draw a random category for seed {seed}")
