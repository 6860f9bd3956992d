"""
JSON reading and writing: category files, certificates and reports.

A category file has the top-level fields

    objects       array of object names
    homs          array of {src, dst, basis: [{label, degree}]}
    differential  array of {src, dst, from_label, to_label, coeff}
    composition   array of {g, f, result: [{label, coeff}]}   (g∘f, f first)
    identities    map object -> label
    order         optional directedness witness
    name          optional
    construction  optional {"twist": n, "base": <category file>}; when the
                  composition table is left out the category is rebuilt
                  from this recipe on load

Basis labels are global keys and must be unique. Coefficients are integers
or strings "p/q". Compositions involving identities may be omitted. Any
field not listed here is rejected.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .dgcat import FiniteDgCategory, DgCategoryError, Morphism, object_label
from .exactlinalg import Matrix, format_scalar, parse_scalar

TOP_FIELDS = {"objects", "homs", "differential", "composition", "identities", "order", "name", "construction"}
REQUIRED = ("objects", "homs", "identities")


class CategoryFormatError(DgCategoryError):
    """A category file that does not follow the schema; the message names the field."""


def _coeff_out(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else format_scalar(c)


def _coeff_in(c, where):
    if isinstance(c, bool) or not isinstance(c, (int, str)):
        raise CategoryFormatError(f"{where}: coefficient must be an integer or a 'p/q' string")
    try:
        x = parse_scalar(c)
    except (ValueError, ZeroDivisionError) as e:
        raise CategoryFormatError(f"{where}: bad coefficient {c!r}") from e
    return x.numerator if x.denominator == 1 else x


# ---------------------------------------------------------------------------
# writing

def dump_category(C: FiniteDgCategory, omit_composition=False) -> dict:
    """Category -> JSON-ready dict. Twisted products record their construction."""
    from .twist import TwistedTensor

    label = {k: C.label(k) for k in C.basis_keys()}
    if len(set(label.values())) != len(label):
        raise CategoryFormatError("basis labels are not unique")
    objs = C.objects
    doc = {}
    if C.name:
        doc["name"] = C.name
    doc["objects"] = [object_label(x) for x in objs]
    homs, diff, comp = [], [], []
    for x in objs:
        for y in objs:
            ks = C.hom(x, y)
            if not ks:
                continue
            homs.append({"src": object_label(x), "dst": object_label(y),
                         "basis": [{"label": label[k], "degree": C.degree(k)} for k in ks]})
            for k in ks:
                for j, c in sorted(C.d(k).items(), key=lambda t: label[t[0]]):
                    diff.append({"src": object_label(x), "dst": object_label(y),
                                 "from_label": label[k], "to_label": label[j], "coeff": _coeff_out(c)})
    doc["homs"] = homs
    doc["differential"] = diff
    if not omit_composition:
        for x, y in _pairs(C):
            for f in C.hom(x, y):
                if C.is_identity(f):
                    continue
                for z in objs:
                    for g in C.hom(y, z):
                        if C.is_identity(g):
                            continue
                        r = C.compose(g, f)
                        if r:
                            comp.append({"g": label[g], "f": label[f],
                                         "result": [{"label": label[h], "coeff": _coeff_out(c)}
                                                    for h, c in sorted(r.items(), key=lambda t: label[t[0]])]})
        doc["composition"] = comp
    doc["identities"] = {object_label(x): label[C.identity(x)] for x in objs}
    if C.order is not None:
        doc["order"] = [object_label(x) for x in C.order]
    if isinstance(C, TwistedTensor):
        base_omit = omit_composition and isinstance(C.base, TwistedTensor)
        doc["construction"] = {"twist": C.n, "base": dump_category(C.base, base_omit)}
    elif omit_composition:
        raise CategoryFormatError("only twisted products can omit their composition table")
    return doc


def _pairs(C):
    return [(x, y) for x in C.objects for y in C.objects if C.hom(x, y)]


def dumps(doc) -> str:
    """Deterministic JSON text (fixed key order as built, two-space indent, trailing newline)."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_json(path, doc):
    Path(path).write_text(dumps(doc), encoding="utf-8")


def save_category(C, path, omit_composition=False):
    write_json(path, dump_category(C, omit_composition))


# ---------------------------------------------------------------------------
# reading

def _expect(cond, msg):
    if not cond:
        raise CategoryFormatError(msg)


def _fields(obj, allowed, required, where):
    _expect(isinstance(obj, dict), f"{where}: expected an object")
    extra = sorted(set(obj) - set(allowed))
    _expect(not extra, f"{where}: unknown field(s) {', '.join(extra)}")
    for r in required:
        _expect(r in obj, f"{where}: missing field '{r}'")


def load_category(src) -> FiniteDgCategory:
    """Parse a category from a path, JSON text or an already-decoded dict."""
    if isinstance(src, dict):
        doc = src
    else:
        p = Path(src) if not (isinstance(src, str) and src.lstrip().startswith("{")) else None
        try:
            text = p.read_text(encoding="utf-8") if p is not None else src
        except OSError as e:
            raise CategoryFormatError(f"cannot read {src}: {e}") from e
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise CategoryFormatError(f"not valid JSON: {e}") from e
    return _parse(doc, "category")


def _parse(doc, where) -> FiniteDgCategory:
    _fields(doc, TOP_FIELDS, REQUIRED, where)
    objects = doc["objects"]
    _expect(isinstance(objects, list) and all(isinstance(o, str) for o in objects),
            f"{where}.objects: expected an array of strings")
    _expect(len(set(objects)) == len(objects), f"{where}.objects: repeated object")
    objset = set(objects)

    basis = {}
    _expect(isinstance(doc["homs"], list), f"{where}.homs: expected an array")
    for i, h in enumerate(doc["homs"]):
        w = f"{where}.homs[{i}]"
        _fields(h, {"src", "dst", "basis"}, ("src", "dst", "basis"), w)
        _expect(h["src"] in objset, f"{w}.src: unknown object {h['src']!r}")
        _expect(h["dst"] in objset, f"{w}.dst: unknown object {h['dst']!r}")
        _expect(isinstance(h["basis"], list), f"{w}.basis: expected an array")
        for j, b in enumerate(h["basis"]):
            wb = f"{w}.basis[{j}]"
            _fields(b, {"label", "degree"}, ("label", "degree"), wb)
            _expect(isinstance(b["label"], str), f"{wb}.label: expected a string")
            _expect(isinstance(b["degree"], int) and not isinstance(b["degree"], bool),
                    f"{wb}.degree: expected an integer")
            _expect(b["label"] not in basis, f"{wb}.label: duplicate label {b['label']!r}")
            basis[b["label"]] = Morphism(h["src"], h["dst"], b["degree"], b["label"])

    diff = {}
    for i, e in enumerate(doc.get("differential", [])):
        w = f"{where}.differential[{i}]"
        _fields(e, {"src", "dst", "from_label", "to_label", "coeff"},
                ("src", "dst", "from_label", "to_label", "coeff"), w)
        for key in ("from_label", "to_label"):
            _expect(e[key] in basis, f"{w}.{key}: unknown label {e[key]!r}")
            m = basis[e[key]]
            _expect((m.source, m.target) == (e["src"], e["dst"]),
                    f"{w}.{key}: {e[key]!r} is not in hom({e['src']},{e['dst']})")
        c = _coeff_in(e["coeff"], f"{w}.coeff")
        row = diff.setdefault(e["from_label"], {})
        row[e["to_label"]] = row.get(e["to_label"], 0) + c

    idents = doc["identities"]
    _fields(idents, objset, (), f"{where}.identities")
    for x in objects:
        _expect(x in idents, f"{where}.identities: missing identity designation for object {x!r}")
        _expect(idents[x] in basis, f"{where}.identities.{x}: unknown label {idents[x]!r}")

    order = doc.get("order")
    if order is not None:
        _expect(isinstance(order, list) and sorted(order) == sorted(objects),
                f"{where}.order: must list every object exactly once")

    if "composition" not in doc:
        _expect("construction" in doc, f"{where}: missing field 'composition' (and no 'construction' to rebuild it)")
        return _rebuild(doc, basis, diff, where)

    comp = {}
    for i, e in enumerate(doc["composition"]):
        w = f"{where}.composition[{i}]"
        _fields(e, {"g", "f", "result"}, ("g", "f", "result"), w)
        for key in ("g", "f"):
            _expect(e[key] in basis, f"{w}.{key}: unknown label {e[key]!r}")
        _expect(basis[e["f"]].target == basis[e["g"]].source, f"{w}: {e['g']!r} and {e['f']!r} are not composable")
        out = {}
        for j, r in enumerate(e["result"]):
            wr = f"{w}.result[{j}]"
            _fields(r, {"label", "coeff"}, ("label", "coeff"), wr)
            _expect(r["label"] in basis, f"{wr}.label: unknown label {r['label']!r}")
            out[r["label"]] = out.get(r["label"], 0) + _coeff_in(r["coeff"], f"{wr}.coeff")
        comp[(e["g"], e["f"])] = out
    if "construction" in doc:
        _check_construction(doc["construction"], where)
    try:
        return FiniteDgCategory(objects, basis, diff, comp, dict(idents), order=order, name=doc.get("name"))
    except DgCategoryError as e:
        raise CategoryFormatError(f"{where}: {e}") from e


def _check_construction(con, where):
    _fields(con, {"twist", "base"}, ("twist", "base"), f"{where}.construction")
    n = con["twist"]
    _expect(isinstance(n, int) and not isinstance(n, bool) and n >= 0,
            f"{where}.construction.twist: expected a nonnegative integer")


def _rebuild(doc, basis, diff, where):
    from .twist import TwistedTensor

    _check_construction(doc["construction"], where)
    con = doc["construction"]
    W = TwistedTensor(con["twist"], _parse(con["base"], f"{where}.construction.base"))
    full = dump_category(W)
    full.pop("construction", None)
    if doc.get("name") is not None:
        full["name"] = doc["name"]
    got = {(h["src"], h["dst"]): {(b["label"], b["degree"]) for b in h["basis"]} for h in doc["homs"]}
    want = {(h["src"], h["dst"]): {(b["label"], b["degree"]) for b in h["basis"]} for h in full["homs"]}
    _expect(got == want and set(doc["objects"]) == set(full["objects"]),
            f"{where}.homs: listed basis does not match the construction")
    C = _parse(full, where)
    for k, row in diff.items():
        _expect({j: c for j, c in row.items() if c} == C.d(k),
                f"{where}.differential: entry for {k!r} disagrees with the construction")
    return C


# ---------------------------------------------------------------------------
# reports

def matrix_triplets(m: Matrix) -> list:
    """[[row, col, numerator, denominator], ...] in row-major order."""
    return [list(t) for t in m.triplets()]


def complex_report(c) -> dict:
    return {
        "field": c.field.name,
        "dims": {str(d): n for d, n in sorted(c.dims.items())},
        "differentials": {str(d): {"shape": list(m.shape), "entries": matrix_triplets(m)}
                          for d, m in sorted(c.differentials.items())},
    }
