"""Strong Groebner bases for submodules of R^m, R = Z_{p^t}[Lambda].

Vectors are dicts ``{(component, exponent): coefficient}`` where the
exponent is a reduced Laurent exponent.  Reduction modulo the ambient
relations x_i*y_i - 1 and u_j^{m_j} - 1 is built into the representation,
so a basis only stores the module generators; the pairs between a basis
element and an ambient relation become "multiply by an inverse variable"
(or by the complementary power of u_j).

The module order is position over term: a lower component index is
larger, then graded lex on the ambient monomial.  Coefficients are handled
as in a chain ring: the leading coefficient of every basis element is
normalized to a power p^e, and annihilator pairs p^(t-e)*g are added.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import count
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import factorint

from .ring import LatticeGroup, LaurentPoly, ambient_exponent

Term = Tuple[int, Tuple[int, ...]]
Vec = Dict[Term, int]


class CompositeModulus(ValueError):
    """Groebner computations need a prime-power modulus; split composite n first."""


class NoSolution(ValueError):
    """The right-hand side is not in the image of the matrix."""


@lru_cache(maxsize=None)
def prime_power(n: int) -> Tuple[int, int]:
    f = factorint(n)
    if len(f) != 1:
        raise CompositeModulus(
            f"modulus {n} is not a prime power; decompose the code with crt_decompose first"
        )
    (p, t), = f.items()
    return int(p), int(t)


def _valuation(c: int, p: int, t: int) -> int:
    if c == 0:
        return t
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


class Context:
    """Coefficient ring Z_{p^t} over a lattice group, plus order helpers."""

    def __init__(self, group: LatticeGroup, modulus: int):
        self.group = group
        self.modulus = modulus
        self.p, self.t = prime_power(modulus)
        self.rank = group.rank
        self._amb: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
        self._key: Dict[Term, tuple] = {}

    def amb(self, exp):
        a = self._amb.get(exp)
        if a is None:
            a = ambient_exponent(exp, self.rank)
            self._amb[exp] = a
        return a

    def key(self, term: Term):
        k = self._key.get(term)
        if k is None:
            a = self.amb(term[1])
            k = (-term[0], sum(a), a)
            self._key[term] = k
        return k

    def lead(self, v: Vec) -> Term:
        return max(v, key=self.key)

    def val(self, c: int) -> int:
        return _valuation(c, self.p, self.t)

    def shift_from_amb(self, diff: Tuple[int, ...]) -> Tuple[int, ...]:
        r = self.rank
        return tuple(diff[i] - diff[r + i] for i in range(r)) + tuple(diff[2 * r:])

    # vector arithmetic ------------------------------------------------
    def axpy(self, f: Vec, k: int, shift: Tuple[int, ...], g: Vec) -> None:
        """In place: f -= k * x^shift * g."""
        q = self.modulus
        add = self.group.add
        for (comp, e), c in g.items():
            term = (comp, add(e, shift))
            v = (f.get(term, 0) - k * c) % q
            if v:
                f[term] = v
            else:
                f.pop(term, None)

    def scaled(self, g: Vec, k: int, shift: Optional[Tuple[int, ...]] = None) -> Vec:
        q = self.modulus
        out: Vec = {}
        add = self.group.add
        for (comp, e), c in g.items():
            v = c * k % q
            if v:
                term = (comp, add(e, shift) if shift is not None else e)
                out[term] = (out.get(term, 0) + v) % q
                if not out[term]:
                    del out[term]
        return out

    # conversions -----------------------------------------------------
    def vec_from_column(self, col: Sequence[LaurentPoly], offset: int = 0) -> Vec:
        out: Vec = {}
        for i, poly in enumerate(col):
            for e, c in poly.terms.items():
                out[(i + offset, e)] = c
        return out

    def column_from_vec(self, v: Vec, nrows: int, offset: int = 0) -> List[LaurentPoly]:
        buckets: List[Dict] = [dict() for _ in range(nrows)]
        for (comp, e), c in v.items():
            i = comp - offset
            if 0 <= i < nrows:
                buckets[i][e] = c
        return [LaurentPoly._raw(self.group, self.modulus, b) for b in buckets]


@dataclass
class _Elem:
    vec: Vec
    lead: Term
    amb: Tuple[int, ...]
    val: int


def _divides(a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


class StrongGB:
    """A self-reduced strong Groebner basis; immutable after construction."""

    def __init__(self, ctx: Context, elems: List[_Elem], ncomp: int):
        self.ctx = ctx
        self.ncomp = ncomp
        self.elems = elems
        self._by_comp: Dict[int, List[_Elem]] = {}
        for el in elems:
            self._by_comp.setdefault(el.lead[0], []).append(el)

    def __len__(self):
        return len(self.elems)

    @property
    def vectors(self) -> List[Vec]:
        return [el.vec for el in self.elems]

    def leading_terms(self) -> List[Tuple[int, Tuple[int, ...], int]]:
        """(component, ambient monomial, valuation) of every basis element."""
        return [(el.lead[0], el.amb, el.val) for el in self.elems]

    def _best_divisor(self, comp: int, amb) -> Optional[_Elem]:
        best = None
        for el in self._by_comp.get(comp, ()):
            if _divides(el.amb, amb) and (best is None or el.val < best.val):
                best = el
                if best.val == 0:
                    break
        return best

    def normal_form(self, v: Vec) -> Vec:
        """Canonical remainder; zero iff v lies in the module."""
        ctx = self.ctx
        p = ctx.p
        f = dict(v)
        out: Vec = {}
        while f:
            lt = ctx.lead(f)
            c = f[lt]
            amb = ctx.amb(lt[1])
            g = self._best_divisor(lt[0], amb)
            if g is None:
                out[lt] = c
                del f[lt]
                continue
            pe = p ** g.val
            shift = ctx.shift_from_amb(tuple(a - b for a, b in zip(amb, g.amb)))
            k = c // pe
            if k:
                ctx.axpy(f, k, shift, g.vec)
            if lt in f:
                out[lt] = f.pop(lt)
        return out

    def contains(self, v: Vec) -> bool:
        return not self.normal_form(v)

    def standard_valuation(self, comp: int, exp) -> int:
        """Exponent e such that coefficients of this term live in Z_{p^e} modulo the module."""
        g = self._best_divisor(comp, self.ctx.amb(exp))
        return self.ctx.t if g is None else g.val


def _make_elem(ctx: Context, v: Vec) -> _Elem:
    lt = ctx.lead(v)
    c = v[lt]
    e = ctx.val(c)
    unit = c // ctx.p ** e
    if unit != 1:
        inv = pow(unit, -1, ctx.modulus)
        v = ctx.scaled(v, inv)
    return _Elem(v, lt, ctx.amb(lt[1]), e)


def _top_reduce(ctx: Context, f: Vec, by_comp: Dict[int, List[_Elem]]) -> Vec:
    p = ctx.p
    while f:
        lt = ctx.lead(f)
        c = f[lt]
        v = ctx.val(c)
        amb = ctx.amb(lt[1])
        hit = None
        for el in by_comp.get(lt[0], ()):
            if el.val <= v and _divides(el.amb, amb):
                hit = el
                break
        if hit is None:
            return f
        shift = ctx.shift_from_amb(tuple(a - b for a, b in zip(amb, hit.amb)))
        ctx.axpy(f, c // p ** hit.val, shift, hit.vec)
    return f


def _companion_items(ctx: Context, el: _Elem) -> Iterable[Tuple[int, Vec]]:
    """Polynomials coming from pairs with ambient relations and p^t = 0."""
    r = ctx.rank
    group = ctx.group
    deg = sum(el.amb)
    if el.val > 0:
        yield deg, ctx.scaled(el.vec, ctx.p ** (ctx.t - el.val))
    for i in range(r):
        if el.amb[i] > 0:
            yield deg + 1, ctx.scaled(el.vec, 1, group.unit(i, -1))
        elif el.amb[r + i] > 0:
            yield deg + 1, ctx.scaled(el.vec, 1, group.unit(i, 1))
    for j, m in enumerate(group.torsion):
        a = el.amb[2 * r + j]
        if a > 0:
            yield deg + m - a, ctx.scaled(el.vec, 1, group.unit(r + j, m - a))


def strong_groebner(ctx: Context, gens: Iterable[Vec], ncomp: int) -> StrongGB:
    """Buchberger completion with S-pairs, annihilator pairs and relation pairs."""
    elems: List[_Elem] = []
    by_comp: Dict[int, List[_Elem]] = {}
    queue: list = []
    seq = count()
    p = ctx.p

    def push(deg: int, vec_or_pair):
        heapq.heappush(queue, (deg, next(seq), vec_or_pair))

    def insert(v: Vec):
        el = _make_elem(ctx, v)
        comp = el.lead[0]
        for other in by_comp.get(comp, ()):
            lcm = tuple(max(a, b) for a, b in zip(el.amb, other.amb))
            push(sum(lcm), (other, el, lcm))
        elems.append(el)
        by_comp.setdefault(comp, []).append(el)
        for deg, vec in _companion_items(ctx, el):
            if vec:
                push(deg, vec)

    for g in gens:
        g = {k: c % ctx.modulus for k, c in g.items() if c % ctx.modulus}
        if g:
            push(sum(ctx.amb(ctx.lead(g)[1])), g)

    while queue:
        _, _, item = heapq.heappop(queue)
        if isinstance(item, tuple):
            a, b, lcm = item
            e = max(a.val, b.val)
            s = ctx.scaled(a.vec, p ** (e - a.val), ctx.shift_from_amb(tuple(x - y for x, y in zip(lcm, a.amb))))
            ctx.axpy(s, p ** (e - b.val), ctx.shift_from_amb(tuple(x - y for x, y in zip(lcm, b.amb))), b.vec)
        else:
            s = dict(item)
        s = _top_reduce(ctx, s, by_comp)
        if s:
            insert(s)

    return _interreduce(ctx, elems, ncomp)


def _interreduce(ctx: Context, elems: List[_Elem], ncomp: int) -> StrongGB:
    keep: List[_Elem] = []
    for i, el in enumerate(elems):
        redundant = False
        for j, other in enumerate(elems):
            if i == j or other.lead[0] != el.lead[0]:
                continue
            if other.val <= el.val and _divides(other.amb, el.amb):
                same = other.val == el.val and other.amb == el.amb
                if not same or j < i:
                    redundant = True
                    break
        if not redundant:
            keep.append(el)
    keep.sort(key=lambda el: (ctx.key(el.lead), -el.val))
    # tail reduction against the others gives a canonical basis
    result: List[_Elem] = []
    for i, el in enumerate(keep):
        others = StrongGB(ctx, keep[:i] + keep[i + 1:], ncomp)
        lt = el.lead
        head = {lt: el.vec[lt]}
        tail = {k: c for k, c in el.vec.items() if k != lt}
        red = others.normal_form(tail)
        red.update(head)
        result.append(_Elem(red, lt, el.amb, el.val))
    return StrongGB(ctx, result, ncomp)


# ---------------------------------------------------------------------------
# matrix-level operations

_GB_CACHE: Dict[tuple, StrongGB] = {}


def _cache_key(tag, *mats) -> tuple:
    return (tag,) + tuple(tuple(tuple(row) for row in m) if m is not None else None for m in mats)


def _matrix_columns(A) -> List[List[LaurentPoly]]:
    if not A:
        return []
    return [[A[i][j] for i in range(len(A))] for j in range(len(A[0]))]


def context_for(A_or_poly) -> Context:
    poly = A_or_poly
    while isinstance(poly, list):
        poly = poly[0]
    return Context(poly.group, poly.modulus)


def submodule_gb(ctx: Context, cols: Sequence[Sequence[LaurentPoly]], nrows: int) -> StrongGB:
    key = ("sub", ctx.group, ctx.modulus, nrows, tuple(tuple(c) for c in cols))
    hit = _GB_CACHE.get(key)
    if hit is None:
        hit = strong_groebner(ctx, [ctx.vec_from_column(c) for c in cols], nrows)
        _GB_CACHE[key] = hit
    return hit


def _augmented_gb(ctx: Context, A, relations) -> StrongGB:
    m = len(A)
    cols = _matrix_columns(A)
    s = len(cols)
    key = ("aug", ctx.group, ctx.modulus, m, tuple(tuple(c) for c in cols),
           tuple(tuple(c) for c in (relations or [])))
    hit = _GB_CACHE.get(key)
    if hit is not None:
        return hit
    gens = []
    for j, col in enumerate(cols):
        v = ctx.vec_from_column(col)
        v[(m + j, ctx.group.zero())] = 1
        gens.append(v)
    for col in relations or []:
        gens.append(ctx.vec_from_column(col))
    hit = strong_groebner(ctx, gens, m + s)
    _GB_CACHE[key] = hit
    return hit


def syzygies(A, relations: Optional[Sequence[Sequence[LaurentPoly]]] = None, ncols: Optional[int] = None,
             ctx: Optional[Context] = None) -> List[List[LaurentPoly]]:
    """Generators (as columns) of ker(A : R^s -> R^m / <relations>).

    ``A`` is a list of rows.  ``relations`` is a list of columns in R^m.
    The returned generators form a strong Groebner basis of the kernel.
    """
    m = len(A)
    s = len(A[0]) if A else (ncols or 0)
    if ctx is None:
        ctx = context_for(A)
    gb = _augmented_gb(ctx, A, relations)
    out = []
    for el in gb.elems:
        if el.lead[0] >= m:
            out.append(ctx.column_from_vec(el.vec, s, offset=m))
    return out


def lift(A, b: Sequence[LaurentPoly], relations=None, ctx: Optional[Context] = None) -> List[LaurentPoly]:
    """Return x with A x = b modulo ``relations``; raise NoSolution otherwise."""
    m = len(A)
    s = len(A[0])
    if ctx is None:
        ctx = context_for(A)
    gb = _augmented_gb(ctx, A, relations)
    nf = gb.normal_form(ctx.vec_from_column(b))
    if any(comp < m for comp, _ in nf):
        raise NoSolution("vector is not in the image")
    neg = {k: (-c) % ctx.modulus for k, c in nf.items()}
    return ctx.column_from_vec(neg, s, offset=m)


def member(cols: Sequence[Sequence[LaurentPoly]], v: Sequence[LaurentPoly], ctx: Optional[Context] = None) -> bool:
    """Is v in the submodule generated by ``cols``?"""
    if ctx is None:
        ctx = context_for([list(v)])
    if not cols:
        return all(x.is_zero() for x in v)
    gb = submodule_gb(ctx, cols, len(v))
    return gb.contains(ctx.vec_from_column(v))


def normal_form_column(cols, v, ctx: Optional[Context] = None) -> List[LaurentPoly]:
    if ctx is None:
        ctx = context_for([list(v)])
    gb = submodule_gb(ctx, cols, len(v))
    return ctx.column_from_vec(gb.normal_form(ctx.vec_from_column(v)), len(v))


def minimize_generators(cols: List[List[LaurentPoly]], relations=None, ctx: Optional[Context] = None) -> List[List[LaurentPoly]]:
    """Greedily drop generators that lie in the span of the others (plus relations)."""
    cols = [c for c in cols if any(not x.is_zero() for x in c)]
    if not cols:
        return []
    if ctx is None:
        ctx = context_for([cols[0]])
    rel = list(relations or [])

    def weight(c):
        return (sum(len(x) for x in c), max(x.degree_span() for x in c))

    order = sorted(range(len(cols)), key=lambda i: weight(cols[i]), reverse=True)
    alive = set(range(len(cols)))
    for i in order:
        rest = [cols[j] for j in sorted(alive) if j != i] + rel
        if rest and member(rest, cols[i], ctx):
            alive.discard(i)
    return [cols[j] for j in sorted(alive)]


def clear_cache() -> None:
    _GB_CACHE.clear()
