"""Group rings Z_n[Lambda] for Lambda = Z^D + Z_{m_1} + ... + Z_{m_s}.

Elements are sparse maps from exponent vectors to residues mod n.  The
first ``rank`` slots of an exponent vector are free (any integer), the
remaining slots are torsion and kept reduced into ``[0, m_j)``.

The ambient presentation replaces a free direction x_i by a pair of
polynomial variables x_i, y_i with x_i * y_i = 1 and keeps u_j with
u_j^{m_j} = 1.  A reduced Laurent exponent maps to the ambient monomial
with ``x_i^max(e,0) * y_i^max(-e,0)``; the monomial order used for
rendering and for Groebner bases is graded lex on that ambient monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

Exponent = Tuple[int, ...]

FREE_NAMES = ("x", "y", "z", "w")


class RingMismatch(ValueError):
    """Raised when combining elements of different rings."""


@dataclass(frozen=True)
class LatticeGroup:
    """Finitely generated abelian group Z^rank + sum of Z_{m_j}."""

    rank: int
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        object.__setattr__(self, "torsion", tuple(int(m) for m in self.torsion))
        for m in self.torsion:
            if m < 2:
                raise ValueError(f"torsion orders must be >= 2, got {m}")

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    def zero(self) -> Exponent:
        return (0,) * self.ngens

    def normalize(self, exp: Sequence[int]) -> Exponent:
        if len(exp) != self.ngens:
            raise ValueError(f"exponent {tuple(exp)} has wrong length for {self}")
        if not self.torsion:
            return tuple(int(e) for e in exp)
        r = self.rank
        return tuple(int(e) for e in exp[:r]) + tuple(
            int(e) % m for e, m in zip(exp[r:], self.torsion)
        )

    def add(self, a: Exponent, b: Exponent) -> Exponent:
        return self.normalize([x + y for x, y in zip(a, b)])

    def neg(self, a: Exponent) -> Exponent:
        return self.normalize([-x for x in a])

    def unit(self, i: int, power: int = 1) -> Exponent:
        e = [0] * self.ngens
        e[i] = power
        return self.normalize(e)

    def variable_names(self) -> Tuple[str, ...]:
        if self.rank <= len(FREE_NAMES):
            free = FREE_NAMES[: self.rank]
        else:
            free = tuple(f"x{i + 1}" for i in range(self.rank))
        return tuple(free) + tuple(f"u{j + 1}" for j in range(len(self.torsion)))

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


@lru_cache(maxsize=None)
def ambient_exponent(exp: Exponent, rank: int) -> Exponent:
    """Ambient monomial (x_1..x_D, y_1..y_D, u_1..u_s) of a reduced exponent."""
    free = exp[:rank]
    return (
        tuple(e if e > 0 else 0 for e in free)
        + tuple(-e if e < 0 else 0 for e in free)
        + tuple(exp[rank:])
    )


@lru_cache(maxsize=None)
def grlex_key(exp: Exponent, rank: int) -> Tuple[int, Exponent]:
    amb = ambient_exponent(exp, rank)
    return (sum(amb), amb)


class LaurentPoly:
    """Immutable element of Z_n[Lambda]."""

    __slots__ = ("group", "modulus", "terms", "_hash")

    def __init__(self, group: LatticeGroup, modulus: int, terms: Mapping[Sequence[int], int] | None = None):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        self.group = group
        self.modulus = int(modulus)
        clean: Dict[Exponent, int] = {}
        if terms:
            for exp, c in terms.items():
                e = group.normalize(exp)
                v = (clean.get(e, 0) + int(c)) % self.modulus
                if v:
                    clean[e] = v
                else:
                    clean.pop(e, None)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, group: LatticeGroup, modulus: int, terms: Dict[Exponent, int]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj.group = group
        obj.modulus = modulus
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def constant(cls, group: LatticeGroup, modulus: int, c: int) -> "LaurentPoly":
        return cls(group, modulus, {group.zero(): c})

    @classmethod
    def monomial(cls, group: LatticeGroup, modulus: int, exp: Sequence[int], c: int = 1) -> "LaurentPoly":
        return cls(group, modulus, {tuple(exp): c})

    @classmethod
    def variable(cls, group: LatticeGroup, modulus: int, i: int, power: int = 1) -> "LaurentPoly":
        return cls(group, modulus, {group.unit(i, power): 1})

    def zero_like(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.group, self.modulus, {})

    def one_like(self) -> "LaurentPoly":
        return LaurentPoly.constant(self.group, self.modulus, 1)

    # structure
    def _check(self, other: "LaurentPoly") -> None:
        if self.modulus != other.modulus or self.group != other.group:
            raise RingMismatch(
                f"cannot combine elements over Z_{self.modulus}[{self.group}] and Z_{other.modulus}[{other.group}]"
            )

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(self.group, self.modulus, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = self.modulus
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % n
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.group, n, out)

    __radd__ = __add__

    def __neg__(self):
        n = self.modulus
        return LaurentPoly._raw(self.group, n, {e: n - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            n = self.modulus
            out = {}
            for e, c in self.terms.items():
                v = c * other % n
                if v:
                    out[e] = v
            return LaurentPoly._raw(self.group, n, out)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = self.modulus
        g = self.group
        out: Dict[Exponent, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = g.add(e1, e2)
                out[e] = (out.get(e, 0) + c1 * c2) % n
        return LaurentPoly._raw(g, n, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials with unit coefficient can be inverted")
            (e, c), = self.terms.items()
            inv = pow(c, -1, self.modulus)
            return LaurentPoly(self.group, self.modulus, {self.group.neg(e): inv}) ** (-k)
        result = self.one_like()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, exp: Exponent) -> "LaurentPoly":
        """Multiply by the monomial x^exp."""
        g = self.group
        return LaurentPoly._raw(g, self.modulus, {g.add(e, exp): c for e, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(self.group, self.modulus, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.modulus == other.modulus and self.group == other.group and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.group, self.modulus, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self) -> Iterator[Tuple[Exponent, int]]:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    # the two basic involutive operations
    def antipode(self) -> "LaurentPoly":
        g = self.group
        return LaurentPoly._raw(g, self.modulus, {g.neg(e): c for e, c in self.terms.items()})

    def scalar_part(self) -> int:
        return self.terms.get(self.group.zero(), 0)

    def coeff(self, exp: Sequence[int]) -> int:
        return self.terms.get(self.group.normalize(exp), 0)

    def augmentation(self) -> int:
        """Sum of all coefficients (evaluation at x = 1)."""
        return sum(self.terms.values()) % self.modulus

    def reduce_modulus(self, m: int) -> "LaurentPoly":
        if self.modulus % m:
            raise ValueError(f"{m} does not divide {self.modulus}")
        return LaurentPoly(self.group, m, self.terms)

    def lift_modulus(self, m: int, scale: int = 1) -> "LaurentPoly":
        """Reinterpret the integer representatives modulo ``m`` after scaling."""
        return LaurentPoly(self.group, m, {e: c * scale for e, c in self.terms.items()})

    def map_exponents(self, group: LatticeGroup, fn) -> "LaurentPoly":
        out: Dict[Exponent, int] = {}
        for e, c in self.terms.items():
            e2 = group.normalize(fn(e))
            out[e2] = (out.get(e2, 0) + c) % self.modulus
        return LaurentPoly(group, self.modulus, out)

    def degree_span(self) -> int:
        """Largest absolute free exponent appearing (0 for constants)."""
        r = self.group.rank
        return max((abs(x) for e in self.terms for x in e[:r]), default=0)

    # ambient presentation
    def to_ambient(self) -> Dict[Exponent, int]:
        r = self.group.rank
        return {ambient_exponent(e, r): c for e, c in self.terms.items()}

    @classmethod
    def from_ambient(cls, group: LatticeGroup, modulus: int, terms: Mapping[Sequence[int], int]) -> "LaurentPoly":
        """Reduce an ambient polynomial modulo x_i y_i - 1 and u_j^{m_j} - 1."""
        r = group.rank
        out: Dict[Exponent, int] = {}
        for amb, c in terms.items():
            amb = tuple(amb)
            exp = [amb[i] - amb[r + i] for i in range(r)] + list(amb[2 * r:])
            e = group.normalize(exp)
            out[e] = (out.get(e, 0) + c) % modulus
        return cls(group, modulus, out)

    # rendering
    def sorted_terms(self) -> list:
        r = self.group.rank
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0], r), reverse=True)

    def render(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = tuple(names) if names is not None else self.group.variable_names()
        pieces = []
        for exp, c in self.sorted_terms():
            factors = []
            for name, e in zip(names, exp):
                if e == 0:
                    continue
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                pieces.append(str(c))
            elif c == 1:
                pieces.append("*".join(factors))
            else:
                pieces.append(f"{c}*" + "*".join(factors))
        return " + ".join(pieces)

    def __repr__(self):
        return f"LaurentPoly({self.render()!r} mod {self.modulus})"

    __str__ = render


def poly_ring(group: LatticeGroup, modulus: int):
    """Convenience: return (one, variables...) for building examples in code."""
    one = LaurentPoly.constant(group, modulus, 1)
    gens = tuple(LaurentPoly.variable(group, modulus, i) for i in range(group.ngens))
    return (one,) + gens


# ---------------------------------------------------------------------------
# matrices of ring elements

Matrix = list  # list of rows, each a list of LaurentPoly


def zeros(group: LatticeGroup, modulus: int, rows: int, cols: int) -> Matrix:
    z = LaurentPoly._raw(group, modulus, {})
    return [[z for _ in range(cols)] for _ in range(rows)]


def identity(group: LatticeGroup, modulus: int, size: int) -> Matrix:
    m = zeros(group, modulus, size, size)
    for i in range(size):
        m[i][i] = LaurentPoly.constant(group, modulus, 1)
    return m


def shape(m: Matrix) -> Tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def columns(m: Matrix) -> list:
    rows, cols = shape(m)
    return [[m[i][j] for i in range(rows)] for j in range(cols)]


def from_columns(cols: Sequence[Sequence[LaurentPoly]], nrows: int | None = None, group=None, modulus=None) -> Matrix:
    if not cols:
        if nrows is None:
            return []
        return [[] for _ in range(nrows)]
    nrows = len(cols[0])
    return [[c[i] for c in cols] for i in range(nrows)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise ValueError(f"shape mismatch {ra}x{ca} times {rb}x{cb}")
    out = []
    for i in range(ra):
        row = []
        for j in range(cb):
            acc = None
            for k in range(ca):
                if a[i][k].terms and b[k][j].terms:
                    term = a[i][k] * b[k][j]
                    acc = term if acc is None else acc + term
            if acc is None:
                acc = (a[i][0] if ca else b[0][j]).zero_like()
            row.append(acc)
        out.append(row)
    return out


def matvec(a: Matrix, v: Sequence[LaurentPoly]) -> list:
    return [row[0] for row in matmul(a, [[x] for x in v])]


def dagger(m: Matrix) -> Matrix:
    """Transpose composed with the antipode."""
    rows, cols = shape(m)
    return [[m[i][j].antipode() for i in range(rows)] for j in range(cols)]


def hstack(*ms: Matrix) -> Matrix:
    ms = [m for m in ms if m is not None]
    rows = max(len(m) for m in ms)
    out = [[] for _ in range(rows)]
    for m in ms:
        if not m:
            continue
        for i in range(rows):
            out[i].extend(m[i])
    return out


def is_zero_matrix(m: Matrix) -> bool:
    return all(not x.terms for row in m for x in row)


def render_matrix(m: Matrix) -> list:
    return [[x.render() for x in row] for row in m]


def vector_render(v: Iterable[LaurentPoly]) -> list:
    return [x.render() for x in v]
