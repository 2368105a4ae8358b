"""Finitely presented modules over R = Z_{p^t}[Lambda] and the tools built on them.

A module is the cokernel of a relation matrix on ``ngens`` generators.
Modules that arise as subquotients N/D of a free module R^r also remember
the generator columns N and the denominator columns D, so that classes
can be moved back into the ambient free module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple

from . import gb
from .intlin import inverse_unimodular, matmul_int, smith_normal_form
from .ring import LatticeGroup, LaurentPoly, Matrix, dagger, identity

Column = List[LaurentPoly]


class NotFinite(ValueError):
    """The module is not finite (its annihilator has positive dimension)."""


def _zero(group, modulus) -> LaurentPoly:
    return LaurentPoly._raw(group, modulus, {})


def _unit_columns(group, modulus, r) -> List[Column]:
    return [list(col) for col in zip(*identity(group, modulus, r))] if r else []


def _rows_from_columns(cols: Sequence[Column], nrows: int, group, modulus) -> Matrix:
    if not cols:
        return [[] for _ in range(nrows)]
    return [[c[i] for c in cols] for i in range(nrows)]


def _columns(A: Matrix) -> List[Column]:
    if not A or not A[0]:
        return []
    return [[A[i][j] for i in range(len(A))] for j in range(len(A[0]))]


@dataclass
class FpModule:
    """coker(R^k --relations--> R^ngens), optionally a subquotient of R^ambient_rank."""

    group: LatticeGroup
    modulus: int
    ngens: int
    relations: List[Column] = field(default_factory=list)
    gens: Optional[List[Column]] = None          # images of generators in R^ambient_rank
    ambient_relations: Optional[List[Column]] = None
    ambient_rank: Optional[int] = None

    def __post_init__(self):
        self._gb = None

    @property
    def ctx(self) -> gb.Context:
        return gb.Context(self.group, self.modulus)

    def relation_gb(self) -> gb.StrongGB:
        if self._gb is None:
            self._gb = gb.submodule_gb(self.ctx, self.relations, self.ngens)
        return self._gb

    def is_zero(self) -> bool:
        if self.ngens == 0:
            return True
        G = self.relation_gb()
        ctx = self.ctx
        zero = self.group.zero()
        return all(G.contains({(j, zero): 1}) for j in range(self.ngens))

    def contains_zero(self, v: Column) -> bool:
        """Is the element with coordinates v zero in the module?"""
        return self.relation_gb().contains(self.ctx.vec_from_column(v))

    def reduce(self, v: Column) -> Column:
        G = self.relation_gb()
        return self.ctx.column_from_vec(G.normal_form(self.ctx.vec_from_column(v)), self.ngens)

    def to_ambient(self, v: Column) -> Column:
        """Map coordinates on the generators to the ambient free module."""
        if self.gens is None:
            return list(v)
        out = [_zero(self.group, self.modulus) for _ in range(self.ambient_rank)]
        for coef, col in zip(v, self.gens):
            if coef.is_zero():
                continue
            out = [a + coef * b for a, b in zip(out, col)]
        return out

    def from_ambient(self, w: Column) -> Column:
        """Coordinates of an ambient vector lying in the numerator submodule."""
        if self.gens is None:
            return list(w)
        A = _rows_from_columns(self.gens + (self.ambient_relations or []), self.ambient_rank,
                               self.group, self.modulus)
        x = gb.lift(A, w)
        return x[: self.ngens]

    def ambient_is_zero(self, w: Column) -> bool:
        """Is the ambient vector w (in the numerator) zero in this subquotient?"""
        rel = self.ambient_relations or []
        if not rel:
            return all(x.is_zero() for x in w)
        return gb.member(rel, w, self.ctx)

    def relation_matrix(self) -> Matrix:
        return _rows_from_columns(self.relations, self.ngens, self.group, self.modulus)


def free_module(group: LatticeGroup, modulus: int, rank: int) -> FpModule:
    return FpModule(group, modulus, rank, [])


def cokernel(A: Matrix, group: LatticeGroup, modulus: int) -> FpModule:
    """coker of a matrix given as rows."""
    return FpModule(group, modulus, len(A), _columns(A))


def subquotient(numer: Sequence[Column], denom: Sequence[Column], rank: int,
                group: LatticeGroup, modulus: int, minimize: bool = True) -> FpModule:
    """Presentation of (im numer + im denom) / im denom."""
    ctx = gb.Context(group, modulus)
    numer = [list(c) for c in numer if any(not x.is_zero() for x in c)]
    denom = [list(c) for c in denom if any(not x.is_zero() for x in c)]
    if minimize and numer:
        numer = _drop_redundant(numer, denom, ctx)
    k = len(numer)
    if k == 0:
        return FpModule(group, modulus, 0, [], [], denom, rank)
    A = _rows_from_columns(numer + denom, rank, group, modulus)
    syz = gb.syzygies(A, ctx=ctx)
    rels = [c[:k] for c in syz if any(not x.is_zero() for x in c[:k])]
    return FpModule(group, modulus, k, rels, numer, denom, rank)


def _drop_redundant(numer, denom, ctx) -> List[Column]:
    kept = list(numer)
    # cheap pass: generators already in the denominator
    if denom:
        kept = [c for c in kept if not gb.member(denom, c, ctx)]
    return gb.minimize_generators(kept, denom, ctx)


# ---------------------------------------------------------------------------
# duals, resolutions, Ext


def dual(M: FpModule) -> FpModule:
    """M^* = Hom(M-bar, R), realized as ker(A^dagger) inside R^ngens."""
    g = M.ngens
    if g == 0:
        return FpModule(M.group, M.modulus, 0, [], [], [], 0)
    if not M.relations:
        return subquotient(_unit_columns(M.group, M.modulus, g), [], g, M.group, M.modulus)
    A = M.relation_matrix()
    K = gb.syzygies(dagger(A), ctx=M.ctx)
    return subquotient(K, [], g, M.group, M.modulus)


@dataclass
class Resolution:
    """Free resolution ... -> R^{r_2} --d_2--> R^{r_1} --d_1--> R^{r_0} -> M."""

    group: LatticeGroup
    modulus: int
    ranks: List[int]
    maps: List[Matrix]      # maps[k] is d_{k+1}, shape r_k x r_{k+1}
    exhausted: bool          # True if the next kernel was zero

    @property
    def length(self) -> int:
        return len(self.maps)

    def extend(self, length: int) -> "Resolution":
        ctx = gb.Context(self.group, self.modulus)
        while not self.exhausted and len(self.maps) < length:
            last = self.maps[-1]
            K = gb.syzygies(last, ctx=ctx, ncols=self.ranks[-1])
            K = gb.minimize_generators(K, None, ctx)
            if not K:
                self.exhausted = True
                break
            r = len(K[0])
            self.maps.append(_rows_from_columns(K, r, self.group, self.modulus))
            self.ranks.append(len(K))
        return self

    def certify(self) -> bool:
        """Check d_k d_{k+1} = 0 and im d_{k+1} = ker d_k for computed maps."""
        from .ring import matmul, is_zero_matrix
        ctx = gb.Context(self.group, self.modulus)
        for k in range(len(self.maps) - 1):
            if not is_zero_matrix(matmul(self.maps[k], self.maps[k + 1])):
                return False
            ker = gb.syzygies(self.maps[k], ctx=ctx)
            img = _columns(self.maps[k + 1])
            if not all(gb.member(img, c, ctx) for c in ker):
                return False
        return True


def free_resolution(M: FpModule, length: int) -> Resolution:
    if length < 1:
        raise ValueError("length must be at least 1")
    ctx = M.ctx
    rels = gb.minimize_generators(list(M.relations), None, ctx) if M.relations else []
    if not rels:
        return Resolution(M.group, M.modulus, [M.ngens], [], True)
    d1 = _rows_from_columns(rels, M.ngens, M.group, M.modulus)
    res = Resolution(M.group, M.modulus, [M.ngens, len(rels)], [d1], False)
    return res.extend(length)


def ext(M: FpModule, i: int, resolution: Optional[Resolution] = None) -> FpModule:
    """Ext^i_R(M-bar, R) as ker(d_{i+1}^dagger) / im(d_i^dagger), a subquotient of R^{r_i}."""
    if i < 0:
        raise ValueError("degree must be non-negative")
    res = resolution if resolution is not None else free_resolution(M, i + 1)
    res.extend(i + 1)
    group, modulus = M.group, M.modulus
    if i >= len(res.ranks):
        return FpModule(group, modulus, 0, [], [], [], 0)
    r_i = res.ranks[i]
    ctx = gb.Context(group, modulus)
    if i < res.length:
        dd = dagger(res.maps[i])          # R^{r_i} -> R^{r_{i+1}}
        kernel = gb.syzygies(dd, ctx=ctx, ncols=r_i)
    else:
        kernel = _unit_columns(group, modulus, r_i)
    image = _columns(dagger(res.maps[i - 1])) if i >= 1 else []
    return subquotient(kernel, image, r_i, group, modulus)


# ---------------------------------------------------------------------------
# torsion, annihilators, dimension zero


def torsion_submodule(M: FpModule) -> Tuple[FpModule, List[Column]]:
    """Kernel of M -> M^**, returned as a subquotient of R^ngens plus the inclusion columns."""
    g = M.ngens
    ctx = M.ctx
    if g == 0:
        return FpModule(M.group, M.modulus, 0, [], [], [], 0), []
    if M.relations:
        K = gb.syzygies(dagger(M.relation_matrix()), ctx=ctx)
    else:
        K = _unit_columns(M.group, M.modulus, g)
    if K:
        Kd = dagger(_rows_from_columns(K, g, M.group, M.modulus))
        N = gb.syzygies(Kd, ctx=ctx, ncols=g)
    else:
        N = _unit_columns(M.group, M.modulus, g)
    T = subquotient(N, M.relations, g, M.group, M.modulus)
    return T, list(T.gens or [])


def annihilator(M: FpModule) -> List[LaurentPoly]:
    """Generators of Ann(M), as the kernel of R -> M^g, r -> (r e_1, ..., r e_g)."""
    group, modulus = M.group, M.modulus
    g = M.ngens
    one = LaurentPoly.constant(group, modulus, 1)
    if g == 0:
        return [one]
    z = _zero(group, modulus)
    diag = [[one if a == b else z] for a in range(g) for b in range(g)]
    rels = []
    for a in range(g):
        for col in M.relations:
            v = [z] * (g * g)
            for b in range(g):
                v[a * g + b] = col[b]
            rels.append(v)
    # the diagonal vector: block a holds e_a
    vec = [[one if (k // g) == (k % g) else z] for k in range(g * g)]
    K = gb.syzygies(vec, rels, ctx=M.ctx)
    return [c[0] for c in K]


def ideal_gb(ideal: Sequence[LaurentPoly], group: LatticeGroup, modulus: int) -> gb.StrongGB:
    ctx = gb.Context(group, modulus)
    return gb.submodule_gb(ctx, [[f] for f in ideal], 1)


def ideal_contains(ideal: Sequence[LaurentPoly], f: LaurentPoly) -> bool:
    return ideal_gb(ideal, f.group, f.modulus).contains(gb.Context(f.group, f.modulus).vec_from_column([f]))


def is_dim_zero(ideal: Sequence[LaurentPoly], group: LatticeGroup, modulus: int) -> bool:
    """Is R/ideal finite?  Staircase test on a strong basis of ideal + (p)."""
    ctx = gb.Context(group, modulus)
    p = ctx.p
    gens = [[f] for f in ideal] + [[LaurentPoly.constant(group, modulus, p)]]
    G = gb.submodule_gb(ctx, gens, 1)
    r = group.rank
    nvars = 2 * r + len(group.torsion)
    units = [amb for _, amb, val in G.leading_terms() if val == 0]
    if any(sum(a) == 0 for a in units):
        return True
    for var in range(2 * r):
        if not any(a[var] > 0 and sum(a) == a[var] for a in units):
            return False
    return True


# ---------------------------------------------------------------------------
# finite modules


@dataclass
class FiniteStructure:
    """Abelian group structure of a finite module, with the lattice action."""

    invariant_factors: Tuple[int, ...]
    generators: List[Column]              # in module coordinates
    translation_matrices: List[List[List[int]]]   # one per lattice generator, column convention
    terms: List[Tuple[int, tuple]]
    _coords_transform: List[List[int]] = field(repr=False, default_factory=list)
    _module: Optional[FpModule] = field(repr=False, default=None)
    _all_factors: List[int] = field(repr=False, default_factory=list)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    def coordinates(self, v: Column) -> Tuple[int, ...]:
        """Coordinates of a module element in the invariant-factor basis."""
        M = self._module
        ctx = M.ctx
        nf = M.relation_gb().normal_form(ctx.vec_from_column(v))
        index = {t: k for k, t in enumerate(self.terms)}
        x = [0] * len(self.terms)
        for term, c in nf.items():
            x[index[term]] = c
        y = [sum(x[a] * row[b] for a, row in enumerate(self._coords_transform)) for b in range(len(self.terms))]
        return tuple(y[k] % d for k, d in self._kept())

    def _kept(self):
        return [(k, d) for k, d in enumerate(self._all_factors) if d != 1]

    def element(self, coords: Sequence[int]) -> Column:
        out = None
        for c, g in zip(coords, self.generators):
            if c % self._module.modulus == 0:
                continue
            term = [x * c for x in g]
            out = term if out is None else [a + b for a, b in zip(out, term)]
        if out is None:
            out = [_zero(self._module.group, self._module.modulus) for _ in range(self._module.ngens)]
        return out


def _enumerate_standard_terms(M: FpModule, limit: int) -> List[Tuple[int, tuple]]:
    G = M.relation_gb()
    group = M.group
    r = group.rank
    found = []
    seen = set()
    frontier = [(j, group.zero()) for j in range(M.ngens)]
    while frontier:
        term = frontier.pop()
        if term in seen:
            continue
        seen.add(term)
        comp, exp = term
        if G.standard_valuation(comp, exp) == 0:
            continue
        found.append(term)
        if len(found) > limit:
            raise NotFinite("module has too many standard terms; it is probably not finite")
        for i in range(r):
            if exp[i] >= 0:
                frontier.append((comp, group.add(exp, group.unit(i, 1))))
            if exp[i] <= 0:
                frontier.append((comp, group.add(exp, group.unit(i, -1))))
        for j, m in enumerate(group.torsion):
            if exp[r + j] + 1 < m:
                frontier.append((comp, group.add(exp, group.unit(r + j, 1))))
    ctx = M.ctx
    found.sort(key=ctx.key, reverse=True)
    return found


def finite_structure(M: FpModule, check_dimension: bool = True, limit: int = 5000) -> FiniteStructure:
    group, modulus = M.group, M.modulus
    if check_dimension and M.ngens and not is_dim_zero(annihilator(M), group, modulus):
        raise NotFinite("annihilator has positive dimension")
    ctx = M.ctx
    G = M.relation_gb()
    terms = _enumerate_standard_terms(M, limit)
    index = {t: k for k, t in enumerate(terms)}
    N = len(terms)
    p = ctx.p

    def coords(vec) -> List[int]:
        nf = G.normal_form(vec)
        x = [0] * N
        for term, c in nf.items():
            x[index[term]] = c
        return x

    rel_rows = []
    for k, term in enumerate(terms):
        e = G.standard_valuation(*term)
        pe = p ** e
        row = coords({term: pe % modulus}) if pe < modulus else [0] * N
        row = [-c for c in row]
        row[k] += pe
        rel_rows.append(row)
    if N == 0:
        return FiniteStructure((), [], [[] for _ in range(group.ngens)], [], [], M)
    diag, U, V = smith_normal_form(rel_rows)
    Vinv = inverse_unimodular(V)
    all_factors = [abs(d) for d in diag]
    kept = [(k, d) for k, d in enumerate(all_factors) if d != 1]

    gens = []
    for k, d in kept:
        col = [_zero(group, modulus) for _ in range(M.ngens)]
        for a, coef in enumerate(Vinv[k]):
            c = coef % modulus
            if c:
                comp, exp = terms[a]
                col[comp] = col[comp] + LaurentPoly._raw(group, modulus, {exp: c})
        gens.append(col)

    mats = []
    for i in range(group.ngens):
        X = []
        for term in terms:
            comp, exp = term
            X.append(coords({(comp, group.add(exp, group.unit(i, 1))): 1}))
        Y = matmul_int(matmul_int(Vinv, X), V)
        T = [[Y[j][k] % d for (j, _) in kept] for (k, d) in kept]
        mats.append(T)
    fs = FiniteStructure(tuple(d for _, d in kept), gens, mats, terms, V, M)
    fs._all_factors = all_factors
    return fs


def matrix_order(T: Sequence[Sequence[int]], factors: Sequence[int], bound: int = 100000) -> int:
    """Multiplicative order of an automorphism of the finite group prod Z/d_k."""
    k = len(factors)
    if k == 0:
        return 1
    ident = [[int(a == b) for b in range(k)] for a in range(k)]

    def mul(A, B):
        return [[sum(A[a][c] * B[c][b] for c in range(k)) % factors[a] for b in range(k)] for a in range(k)]

    P = [row[:] for row in T]
    for order in range(1, bound + 1):
        if P == ident:
            return order
        P = mul(P, T)
    raise ValueError("translation matrix has no finite order within the bound")
