"""
Exact linear algebra over Q and over prime fields F_p.

Vectors are sparse dicts ``index -> scalar`` with no stored zeros.
Matrices are sparse as well; all elimination is exact.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache


class ExactLinalgError(ValueError):
    pass


class NotAComplexError(ExactLinalgError):
    pass


class NotAChainMapError(ExactLinalgError):
    def __init__(self, degree, message=""):
        self.degree = degree
        super().__init__(message or f"chain map condition fails in degree {degree}")


# ---------------------------------------------------------------------------
# scalars

def parse_scalar(x) -> Fraction:
    """Read an int, Fraction or a string "p/q" as an exact rational."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact scalar")


def format_scalar(x) -> str:
    if isinstance(x, Fp):
        return str(x.v)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RationalField:
    name = "Q"
    characteristic = 0

    def __call__(self, x) -> Fraction:
        return parse_scalar(x)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


class Fp:
    """Residue modulo a prime; the modulus travels with the value."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ExactLinalgError("mixing residues of different primes")
            return other.v
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.v, self.p)

    def inverse(self):
        if self.v == 0:
            raise ZeroDivisionError("zero has no inverse in F_p")
        return Fp(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        return Fp(self._coerce(other), self.p) / self

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.v == other.v
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.v == o

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"

    def __int__(self):
        return self.v


class PrimeField:
    characteristic: int

    def __init__(self, p: int):
        if not is_prime(p):
            raise ExactLinalgError(f"{p} is not prime")
        self.characteristic = p

    @property
    def name(self):
        return f"F{self.characteristic}"

    def __call__(self, x) -> Fp:
        p = self.characteristic
        if isinstance(x, Fp):
            if x.p != p:
                raise ExactLinalgError("residue of a different prime")
            return x
        x = parse_scalar(x)
        if x.denominator % p == 0:
            raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
        return Fp(x.numerator * pow(x.denominator, -1, p), p)

    @property
    def zero(self):
        return Fp(0, self.characteristic)

    @property
    def one(self):
        return Fp(1, self.characteristic)

    def __repr__(self):
        return f"GF({self.characteristic})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("GF", self.characteristic))


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_name(name: str):
    """``"q"``/``"Q"`` or ``"fp:<p>"``/``"F<p>"`` -> field."""
    s = name.strip().lower()
    if s in ("q", "qq", "rational", "rationals"):
        return QQ
    for prefix in ("fp:", "fp", "f", "gf"):
        if s.startswith(prefix) and s[len(prefix):].isdigit():
            return GF(int(s[len(prefix):]))
    raise ExactLinalgError(f"unknown field {name!r}")


# ---------------------------------------------------------------------------
# sparse vectors

def vec_add(u: dict, v: dict, c=1) -> dict:
    """u + c*v as a new dict."""
    out = dict(u)
    for k, x in v.items():
        y = out.get(k, 0) + c * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def vec_iadd(u: dict, v, c=1) -> None:
    for k, x in (v.items() if isinstance(v, dict) else v):
        y = u.get(k, 0) + c * x
        if y:
            u[k] = y
        else:
            u.pop(k, None)


# ---------------------------------------------------------------------------
# matrices

class Matrix:
    """Sparse ``rows x cols`` matrix; ``entries[(r, c)]`` never stores zero."""

    __slots__ = ("rows", "cols", "field", "_rows")

    def __init__(self, rows: int, cols: int, entries=None, field=QQ):
        if rows < 0 or cols < 0:
            raise ExactLinalgError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        self.field = field
        self._rows: dict[int, dict[int, object]] = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (r, c), x in items:
                self._accumulate(r, c, x)

    def _accumulate(self, r, c, x):
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise ExactLinalgError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
        x = self.field(x)
        row = self._rows.setdefault(r, {})
        y = row.get(c, self.field.zero) + x
        if y:
            row[c] = y
        else:
            row.pop(c, None)
            if not row:
                del self._rows[r]

    @classmethod
    def from_columns(cls, rows, columns, field=QQ):
        entries = []
        for c, col in enumerate(columns):
            entries.extend(((r, c), x) for r, x in col.items())
        return cls(rows, len(columns), entries, field)

    @classmethod
    def from_dense(cls, data, field=QQ):
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = [((r, c), x) for r, row in enumerate(data) for c, x in enumerate(row) if x]
        return cls(rows, cols, entries, field)

    @classmethod
    def identity(cls, n, field=QQ):
        return cls(n, n, [((i, i), 1) for i in range(n)], field)

    @classmethod
    def zero(cls, rows, cols, field=QQ):
        return cls(rows, cols, None, field)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self) -> dict:
        return {(r, c): x for r, row in self._rows.items() for c, x in row.items()}

    def row(self, r) -> dict:
        return dict(self._rows.get(r, {}))

    def columns(self) -> list[dict]:
        cols = [dict() for _ in range(self.cols)]
        for r, row in self._rows.items():
            for c, x in row.items():
                cols[c][r] = x
        return cols

    def __getitem__(self, rc):
        r, c = rc
        return self._rows.get(r, {}).get(c, self.field.zero)

    def nnz(self):
        return sum(len(r) for r in self._rows.values())

    def is_zero(self):
        return not self._rows

    def transpose(self):
        return Matrix(self.cols, self.rows,
                      [((c, r), x) for (r, c), x in self.entries.items()], self.field)

    def over(self, field):
        """Same integer/rational data read in another field."""
        return Matrix(self.rows, self.cols,
                      [((r, c), field(_as_rational(x))) for (r, c), x in self.entries.items()], field)

    def apply(self, v: dict) -> dict:
        out = {}
        cols = self.columns() if len(v) > 8 else None
        if cols is not None:
            for c, x in v.items():
                vec_iadd(out, cols[c], x)
            return out
        for r, row in self._rows.items():
            s = 0
            for c, x in v.items():
                y = row.get(c)
                if y is not None:
                    s = s + y * x
            if s:
                out[r] = s
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ExactLinalgError(f"shape mismatch {self.shape} @ {other.shape}")
        out = Matrix(self.rows, other.cols, None, self.field)
        for r, row in self._rows.items():
            acc = {}
            for k, x in row.items():
                orow = other._rows.get(k)
                if orow:
                    vec_iadd(acc, orow, x)
            if acc:
                out._rows[r] = acc
        return out

    def __add__(self, other):
        if self.shape != other.shape:
            raise ExactLinalgError("shape mismatch in addition")
        return Matrix(self.rows, self.cols,
                      list(self.entries.items()) + list(other.entries.items()), self.field)

    def __neg__(self):
        return Matrix(self.rows, self.cols, [(k, -x) for k, x in self.entries.items()], self.field)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def to_dense(self):
        out = [[self.field.zero] * self.cols for _ in range(self.rows)]
        for (r, c), x in self.entries.items():
            out[r][c] = x
        return out

    def triplets(self):
        """Row-major ``(row, col, numerator, denominator)`` list."""
        out = []
        for r in sorted(self._rows):
            row = self._rows[r]
            for c in sorted(row):
                q = _as_rational(row[c])
                out.append((r, c, q.numerator, q.denominator))
        return out

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz()}, {self.field!r})"


def _as_rational(x) -> Fraction:
    if isinstance(x, Fp):
        return Fraction(x.v)
    return Fraction(x)


# ---------------------------------------------------------------------------
# elimination

class Echelon:
    """
    Incremental echelon basis of a subspace.

    Every stored row has its pivot at its smallest index and the pivot
    entry normalised to one. Generators added with a ``tag`` are tracked:
    each stored row remembers which combination of tagged generators it
    came from, untagged generators contribute nothing to that record.
    """

    def __init__(self, field=QQ):
        self.field = field
        self.rows: dict[int, tuple[dict, dict]] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: dict):
        """Return ``(residual, combo)`` with v = residual + sum(combo[t] * gen_t) mod untagged."""
        v = dict(v)
        combo = {}
        heap = list(v)
        heapq.heapify(heap)
        # eliminating pivot k only creates indices > k, so each index is settled once
        while heap:
            k = heapq.heappop(heap)
            x = v.get(k)
            if x is None:
                continue
            stored = self.rows.get(k)
            if stored is None:
                continue
            row, tags = stored
            for j, y in row.items():
                z = v.get(j, 0) - x * y
                if z:
                    if j not in v:
                        heapq.heappush(heap, j)
                    v[j] = z
                else:
                    v.pop(j, None)
            if tags:
                vec_iadd(combo, tags, x)
        return v, combo

    def add(self, v: dict, tag=None) -> bool:
        """Insert a generator; returns False when it is already in the span."""
        v = {k: self.field(x) for k, x in v.items() if x}
        residual, combo = self.reduce(v)
        if not residual:
            return False
        pivot = min(residual)
        inv = 1 / residual[pivot]
        tags = {t: -c * inv for t, c in combo.items()}
        if tag is not None:
            tags[tag] = tags.get(tag, 0) + inv
            if not tags[tag]:
                del tags[tag]
        row = {j: y * inv for j, y in residual.items()}
        self.rows[pivot] = (row, tags)
        return True

    def contains(self, v: dict) -> bool:
        residual, _ = self.reduce({k: self.field(x) for k, x in v.items()})
        return not residual


def rank(m: Matrix) -> int:
    """Exact rank of a sparse matrix over its own field."""
    ech = Echelon(m.field)
    # sparse rows first keeps fill-in down
    rows = sorted(m._rows.values(), key=len)
    r = 0
    for row in rows:
        if ech.add(row):
            r += 1
    return r


def kernel(m: Matrix) -> list[dict]:
    """
    Basis of the null space as sparse vectors.

    Columns are scanned from last to first; a column dependent on the
    ones already scanned contributes one kernel vector. The order of the
    returned basis is that scanning order, so it is deterministic.
    """
    ech = Echelon(m.field)
    one = m.field.one
    out = []
    for c, col in sorted(enumerate(m.columns()), key=lambda t: -t[0]):
        residual, combo = ech.reduce({k: m.field(x) for k, x in col.items()})
        if residual:
            ech.add(col, tag=c)
        else:
            v = {c: one}
            vec_iadd(v, combo, -1)
            out.append(v)
    return out


def column_space(m: Matrix) -> Echelon:
    ech = Echelon(m.field)
    for col in m.columns():
        if col:
            ech.add(col)
    return ech


def solve(m: Matrix, b: dict):
    """Some x with m x = b, or None if b is not in the column space."""
    ech = Echelon(m.field)
    for c, col in enumerate(m.columns()):
        if col:
            ech.add(col, tag=c)
    residual, combo = ech.reduce({k: m.field(x) for k, x in b.items()})
    if residual:
        return None
    return combo


# ---------------------------------------------------------------------------
# chain complexes

@dataclass
class ChainComplex:
    """
    Finite cochain complex: ``differentials[d]`` maps degree d to d+1 and
    has shape ``dims[d+1] x dims[d]``.
    """

    dims: dict
    differentials: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)
    field: object = QQ

    def __post_init__(self):
        self.dims = {d: n for d, n in self.dims.items() if n}
        for d in list(self.differentials):
            m = self.differentials[d]
            want = (self.dims.get(d + 1, 0), self.dims.get(d, 0))
            if m.shape != want:
                raise NotAComplexError(f"differential at degree {d} has shape {m.shape}, expected {want}")
            if m.field != self.field:
                self.differentials[d] = m.over(self.field)
            if m.is_zero():
                del self.differentials[d]

    def dim(self, d):
        return self.dims.get(d, 0)

    def degrees(self):
        return sorted(self.dims)

    def differential(self, d) -> Matrix:
        m = self.differentials.get(d)
        if m is None:
            return Matrix.zero(self.dim(d + 1), self.dim(d), self.field)
        return m

    def euler_characteristic(self):
        return sum((-1) ** (d % 2) * n for d, n in self.dims.items())

    def check_d_squared(self):
        """Return the first degree where d∘d is nonzero, or None."""
        for d in sorted(self.differentials):
            if d + 1 in self.differentials:
                if not (self.differentials[d + 1] @ self.differentials[d]).is_zero():
                    return d
        return None

    def over(self, field):
        return ChainComplex(dict(self.dims),
                            {d: m.over(field) for d, m in self.differentials.items()},
                            dict(self.labels), field)

    def total_dim(self):
        return sum(self.dims.values())


@dataclass
class CohomologyGroup:
    degree: int
    dim: int
    representatives: list
    # echelon of im(d) + representatives, used for coordinates
    _echelon: Echelon = field(repr=False, default=None)

    def coordinates(self, z: dict) -> list:
        """Coordinates of the class of a cocycle z in the representative basis."""
        residual, combo = self._echelon.reduce({k: self._echelon.field(x) for k, x in z.items()})
        if residual:
            raise ExactLinalgError("vector is not a cocycle of this complex")
        zero = self._echelon.field.zero
        return [combo.get(i, zero) for i in range(self.dim)]


def cohomology(c: ChainComplex) -> dict:
    """
    degree -> CohomologyGroup for every degree where the complex is nonzero.

    dim H^d = dims[d] - rank(d_d) - rank(d_{d-1}); representatives are
    kernel vectors independent modulo the image, in the order `kernel`
    returns them.
    """
    bad = c.check_d_squared()
    if bad is not None:
        raise NotAComplexError(f"d∘d != 0 starting at degree {bad}")
    out = {}
    for d in c.degrees():
        ech = Echelon(c.field)
        for col in c.differential(d - 1).columns():
            if col:
                ech.add(col)
        reps = []
        for z in kernel(c.differential(d)):
            if ech.add(z, tag=len(reps)):
                reps.append(z)
        out[d] = CohomologyGroup(d, len(reps), reps, ech)
    return out


def cohomology_dims(c: ChainComplex) -> dict:
    """Dimensions only, via ranks."""
    bad = c.check_d_squared()
    if bad is not None:
        raise NotAComplexError(f"d∘d != 0 starting at degree {bad}")
    ranks = {d: rank(m) for d, m in c.differentials.items()}
    out = {}
    for d in c.degrees():
        h = c.dim(d) - ranks.get(d, 0) - ranks.get(d - 1, 0)
        out[d] = h
    return out


@dataclass
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    components: dict

    def component(self, d) -> Matrix:
        m = self.components.get(d)
        if m is None:
            return Matrix.zero(self.target.dim(d), self.source.dim(d), self.target.field)
        return m

    def check(self):
        """First degree where f∘d != d∘f, or None."""
        degrees = set(self.source.dims) | set(self.target.dims)
        degrees |= {d - 1 for d in degrees}
        for d in sorted(degrees):
            lhs = self.component(d + 1) @ self.source.differential(d)
            rhs = self.target.differential(d) @ self.component(d)
            if lhs != rhs:
                return d
        return None


@dataclass
class InducedMap:
    matrices: dict
    source_dims: dict
    target_dims: dict
    is_quasi_iso: bool


def induced_on_cohomology(f: ChainMap) -> InducedMap:
    bad = f.check()
    if bad is not None:
        raise NotAChainMapError(bad)
    hs = cohomology(f.source)
    ht = cohomology(f.target)
    field_ = f.target.field
    degrees = sorted(set(hs) | set(ht))
    mats = {}
    ok = True
    for d in degrees:
        src = hs.get(d)
        tgt = ht.get(d)
        ns = src.dim if src else 0
        nt = tgt.dim if tgt else 0
        cols = []
        if src:
            comp = f.component(d)
            for z in src.representatives:
                coords = tgt.coordinates(comp.apply(z)) if tgt else []
                cols.append({i: x for i, x in enumerate(coords) if x})
        m = Matrix.from_columns(nt, cols, field_) if cols else Matrix.zero(nt, ns, field_)
        mats[d] = m
        if ns != nt or rank(m) != ns:
            ok = False
    return InducedMap(mats, {d: g.dim for d, g in hs.items()},
                      {d: g.dim for d, g in ht.items()}, ok)
