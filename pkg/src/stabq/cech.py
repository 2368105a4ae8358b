"""Cech cochains on t_i = 1 - x_i^ell, residues, braiding and 2D spin.

A degree-p cochain assigns to each sorted p-subset I of the free directions
a fraction numer / prod_{i in I} t_i^{k_i} with a vector numerator.  All
modules that appear (free modules and P/L of a Lagrangian code) have t_i
acting injectively, so fractions are compared by clearing denominators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from math import factorial
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import gb
from .charges import ChargeModule, charge_module, charge_resolution, mobility
from .code import StabilizerCode, code_invariants
from .fpmod import Column
from .ring import LatticeGroup, LaurentPoly, Matrix, dagger, matmul, matvec


class LiftFailed(RuntimeError):
    """A zig-zag lift did not exist within the search bound."""


class NotCocycle(ValueError):
    """The cochain is not closed modulo the stabilizer module."""


class NotLagrangian(ValueError):
    """Cech constructions need a Lagrangian code with uniform qudits."""


Index = Tuple[int, ...]


@dataclass(frozen=True)
class Fraction:
    numer: Tuple[LaurentPoly, ...]
    k: Tuple[int, ...]          # exponent of t_i for every free direction

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.numer)


class TPowers:
    """Cached powers of t_i = 1 - x_i^ell."""

    def __init__(self, group: LatticeGroup, modulus: int, ell: int):
        self.group = group
        self.modulus = modulus
        self.ell = ell
        self._cache: Dict[Tuple[int, int], LaurentPoly] = {}

    def t(self, i: int, power: int = 1) -> LaurentPoly:
        key = (i, power)
        hit = self._cache.get(key)
        if hit is None:
            if power == 0:
                hit = LaurentPoly.constant(self.group, self.modulus, 1)
            else:
                base = 1 - LaurentPoly.variable(self.group, self.modulus, i, self.ell)
                hit = self.t(i, power - 1) * base
            self._cache[key] = hit
        return hit

    def prod(self, k: Sequence[int]) -> LaurentPoly:
        out = LaurentPoly.constant(self.group, self.modulus, 1)
        for i, e in enumerate(k):
            if e:
                out = out * self.t(i, e)
        return out


def _scale(v: Sequence[LaurentPoly], r: LaurentPoly) -> Tuple[LaurentPoly, ...]:
    return tuple(x * r for x in v)


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


class CechCochain:
    def __init__(self, tp: TPowers, degree: int, rank: int, comps: Optional[Dict[Index, Fraction]] = None):
        self.tp = tp
        self.degree = degree
        self.rank = rank
        self.comps: Dict[Index, Fraction] = {}
        for idx, fr in (comps or {}).items():
            if len(idx) != degree:
                raise ValueError("index set has the wrong size")
            if any(fr.k[i] and i not in idx for i in range(self.D)):
                raise ValueError("denominator uses a direction outside the index set")
            if not fr.is_zero():
                self.comps[tuple(idx)] = fr

    @property
    def D(self) -> int:
        return self.tp.group.rank

    def zero_vec(self) -> Tuple[LaurentPoly, ...]:
        z = LaurentPoly._raw(self.tp.group, self.tp.modulus, {})
        return (z,) * self.rank

    def indices(self) -> List[Index]:
        return list(combinations(range(self.D), self.degree))

    def get(self, idx: Index) -> Fraction:
        fr = self.comps.get(tuple(idx))
        if fr is None:
            return Fraction(self.zero_vec(), (0,) * self.D)
        return fr

    @classmethod
    def constant(cls, tp: TPowers, v: Sequence[LaurentPoly]) -> "CechCochain":
        D = tp.group.rank
        return cls(tp, 0, len(v), {(): Fraction(tuple(v), (0,) * D)})

    def _common(self, frs: Sequence[Tuple[int, Fraction]]) -> Fraction:
        """Signed sum of fractions over a common denominator."""
        D = self.D
        K = tuple(max((fr.k[i] for _, fr in frs), default=0) for i in range(D))
        acc = self.zero_vec()
        for sign, fr in frs:
            lift = [K[i] - fr.k[i] for i in range(D)]
            num = _scale(fr.numer, self.tp.prod(lift)) if any(lift) else fr.numer
            if sign < 0:
                num = tuple(-x for x in num)
            acc = _add(acc, num)
        return Fraction(acc, K)

    def delta(self) -> "CechCochain":
        if self.degree >= self.D:
            raise ValueError("no cochains above the top degree")
        out = {}
        for idx in combinations(range(self.D), self.degree + 1):
            terms = []
            for j in range(len(idx)):
                face = idx[:j] + idx[j + 1:]
                fr = self.comps.get(face)
                if fr is not None:
                    terms.append(((-1) ** j, fr))
            if terms:
                out[idx] = self._common(terms)
        return CechCochain(self.tp, self.degree + 1, self.rank, out)

    def __add__(self, other: "CechCochain") -> "CechCochain":
        self._compatible(other)
        out = {}
        for idx in set(self.comps) | set(other.comps):
            terms = [(1, fr) for fr in (self.comps.get(idx), other.comps.get(idx)) if fr is not None]
            out[idx] = self._common(terms)
        return CechCochain(self.tp, self.degree, self.rank, out)

    def __neg__(self) -> "CechCochain":
        return CechCochain(self.tp, self.degree, self.rank,
                           {i: Fraction(tuple(-x for x in fr.numer), fr.k) for i, fr in self.comps.items()})

    def __sub__(self, other: "CechCochain") -> "CechCochain":
        return self + (-other)

    def _compatible(self, other: "CechCochain") -> None:
        if self.degree != other.degree or self.rank != other.rank:
            raise ValueError("cochains of different shape")

    def scale(self, r: LaurentPoly) -> "CechCochain":
        return CechCochain(self.tp, self.degree, self.rank,
                           {i: Fraction(_scale(fr.numer, r), fr.k) for i, fr in self.comps.items()})

    def apply(self, M: Matrix) -> "CechCochain":
        """Apply a matrix (list of rows) to every numerator."""
        rows = len(M)
        return CechCochain(self.tp, self.degree, rows,
                           {i: Fraction(tuple(matvec(M, list(fr.numer))), fr.k) for i, fr in self.comps.items()})

    def conjugate(self) -> "CechCochain":
        """Antipode; 1/conj(t)^k is rewritten as (-x^ell)^k / t^k."""
        G, n, ell = self.tp.group, self.tp.modulus, self.tp.ell
        out = {}
        for idx, fr in self.comps.items():
            factor = LaurentPoly.constant(G, n, 1)
            for i, e in enumerate(fr.k):
                if e:
                    factor = factor * (LaurentPoly.variable(G, n, i, ell * e) * ((-1) ** e))
            out[idx] = Fraction(tuple(x.antipode() * factor for x in fr.numer), fr.k)
        return CechCochain(self.tp, self.degree, self.rank, out)

    def cup(self, other: "CechCochain",
            pairing: Optional[Callable[[Sequence[LaurentPoly], Sequence[LaurentPoly]], Sequence[LaurentPoly]]] = None
            ) -> "CechCochain":
        """Front-face/back-face product; degree-0 factors act by multiplication."""
        if pairing is None:
            pairing = _kron
        D = self.D
        if self.degree == 0 or other.degree == 0:
            deg = self.degree + other.degree
        else:
            deg = self.degree + other.degree - 1
        if deg > D:
            raise ValueError("cup product exceeds the top degree")
        out = {}
        rank = None
        for idx in combinations(range(D), deg):
            if self.degree == 0:
                front, back = (), idx
            elif other.degree == 0:
                front, back = idx, ()
            else:
                front, back = idx[: self.degree], idx[self.degree - 1:]
            a = self.comps.get(front)
            b = other.comps.get(back)
            if a is None or b is None:
                continue
            num = tuple(pairing(a.numer, b.numer))
            rank = len(num)
            k = tuple(x + y for x, y in zip(a.k, b.k))
            out[idx] = Fraction(num, k)
        if rank is None:
            probe = pairing(self.zero_vec(), other.zero_vec())
            rank = len(probe)
        return CechCochain(self.tp, deg, rank, out)

    def equals(self, other: "CechCochain", relations: Optional[Sequence[Column]] = None) -> bool:
        """Equality of cochains, modulo the submodule spanned by ``relations``."""
        self._compatible(other)
        ctx = gb.Context(self.tp.group, self.tp.modulus)
        for idx in set(self.comps) | set(other.comps):
            terms = [(s, fr) for s, fr in ((1, self.comps.get(idx)), (-1, other.comps.get(idx))) if fr is not None]
            diff = self._common(terms)
            if diff.is_zero():
                continue
            if not relations or not gb.member(list(relations), list(diff.numer), ctx):
                return False
        return True

    def is_zero(self, relations: Optional[Sequence[Column]] = None) -> bool:
        return self.equals(CechCochain(self.tp, self.degree, self.rank), relations)

    def to_json(self) -> list:
        names = self.tp.group.variable_names()
        out = []
        for idx in sorted(self.comps):
            fr = self.comps[idx]
            out.append({
                "index": [i + 1 for i in idx],
                "numerator": [x.render() for x in fr.numer],
                "denominator": {names[i]: fr.k[i] for i in idx if fr.k[i]},
            })
        return out


def _kron(a, b):
    return [x * y for x in a for y in b]


# ---------------------------------------------------------------------------
# residues


@lru_cache(maxsize=None)
def expansion_coefficient(k: int, m: int) -> int:
    """Coefficient of x^{m ell} in (1/t)_+^k - (1/t)_-^k, t = 1 - x^ell.

    The two orthant expansions glue into the polynomial
    (m+1)(m+2)...(m+k-1)/(k-1)! valid for every integer m.
    """
    if k <= 0:
        return 0
    num = 1
    for j in range(1, k):
        num *= m + j
    return num // factorial(k - 1)


@dataclass
class ResidueSeries:
    """Finite sum of terms r * prod_i B_{k_i}(x_i^ell), optionally reflected."""

    group: LatticeGroup
    modulus: int
    ell: int
    terms: List[Tuple[LaurentPoly, Tuple[int, ...], bool]] = field(default_factory=list)

    @property
    def D(self) -> int:
        return self.group.rank

    def coeff(self, lam: Sequence[int]) -> int:
        lam = self.group.normalize(list(lam) + [0] * (self.group.ngens - len(lam)))
        total = 0
        r = self.D
        for poly, k, flip in self.terms:
            if any(e == 0 for e in k):
                continue
            target = self.group.neg(lam) if flip else lam
            for mu, c in poly.terms.items():
                if mu[r:] != target[r:]:
                    continue
                val = c
                for i in range(r):
                    d = target[i] - mu[i]
                    if d % self.ell:
                        val = 0
                        break
                    val *= expansion_coefficient(k[i], d // self.ell)
                    if val == 0:
                        break
                total += val
        return total % self.modulus

    def scalar(self) -> int:
        return self.coeff(self.group.zero())

    def antipode(self) -> "ResidueSeries":
        return ResidueSeries(self.group, self.modulus, self.ell, [(p, k, not f) for p, k, f in self.terms])

    def scale(self, r) -> "ResidueSeries":
        if isinstance(r, int):
            return ResidueSeries(self.group, self.modulus, self.ell, [(p * r, k, f) for p, k, f in self.terms])
        return ResidueSeries(self.group, self.modulus, self.ell,
                             [(p * (r.antipode() if f else r), k, f) for p, k, f in self.terms])

    def __add__(self, other: "ResidueSeries") -> "ResidueSeries":
        return ResidueSeries(self.group, self.modulus, self.ell, self.terms + other.terms)

    def __neg__(self) -> "ResidueSeries":
        return self.scale(-1)

    def __sub__(self, other: "ResidueSeries") -> "ResidueSeries":
        return self + (-other)

    def window(self) -> List[Tuple[int, ...]]:
        """Points that determine the series: [0, K ell)^D times the torsion part."""
        K = max([max(k) for _, k, _ in self.terms if k] or [1])
        ranges = [range(K * self.ell)] * self.D + [range(m) for m in self.group.torsion]
        return [tuple(p) for p in product(*ranges)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResidueSeries):
            return NotImplemented
        diff = self - other
        return all(diff.coeff(p) == 0 for p in diff.window())

    def is_zero(self) -> bool:
        return all(self.coeff(p) == 0 for p in self.window())

    def coefficients(self, radius: int) -> Dict[Tuple[int, ...], int]:
        ranges = [range(-radius, radius + 1)] * self.D + [range(m) for m in self.group.torsion]
        out = {}
        for p in product(*ranges):
            c = self.coeff(p)
            if c:
                out[tuple(p)] = c
        return out


def residue(fr: Fraction, group: LatticeGroup, modulus: int, ell: int) -> ResidueSeries:
    if len(fr.numer) != 1:
        raise ValueError("residue needs a scalar fraction")
    if any(e == 0 for e in fr.k[: group.rank]):
        return ResidueSeries(group, modulus, ell, [])
    return ResidueSeries(group, modulus, ell, [(fr.numer[0], tuple(fr.k), False)])


# ---------------------------------------------------------------------------
# charges as cocycles


class CechSetup:
    """Everything needed to pass between Ext classes and Cech cocycles."""

    def __init__(self, code: StabilizerCode, ell: Optional[int] = None, max_power: int = 12):
        if len(set(code.qudits)) != 1:
            raise NotLagrangian("Cech constructions are implemented for uniform qudit dimensions")
        inv = code_invariants(code)
        if not inv.lagrangian:
            raise NotLagrangian(f"{code.name} is not Lagrangian")
        self.code = code
        if ell is None:
            ell = mobility(code).require_mobile()
        self.ell = ell
        self.tp = TPowers(code.lattice, code.modulus, ell)
        self.res = charge_resolution(code, code.D + 2)
        self.ctx = gb.Context(code.lattice, code.modulus)
        self.max_power = max_power
        self.L = code.columns()
        self.Lambda = code.pairing_matrix()
        self.eps = matmul(dagger(self.res.maps[0]), self.Lambda)

    def differential(self, j: int) -> Matrix:
        """The map K^j -> K^{j+1} of the dual complex (K^0 = P)."""
        if j == 0:
            return self.eps
        return dagger(self.res.maps[j])

    def _lift_fraction(self, A: Matrix, idx: Index, fr: Fraction) -> Fraction:
        if fr.is_zero():
            return Fraction((self.ctx_zero(),) * len(A[0]), fr.k)
        T = self.tp.prod([1 if i in idx else 0 for i in range(self.code.D)])
        num = list(fr.numer)
        for m in range(self.max_power + 1):
            try:
                v = gb.lift(A, num, ctx=self.ctx)
            except gb.NoSolution:
                num = [x * T for x in num]
                continue
            k = tuple(fr.k[i] + (m if i in idx else 0) for i in range(self.code.D))
            return Fraction(tuple(v), k)
        raise LiftFailed(f"no lift of the component {idx} within t-power {self.max_power}")

    def ctx_zero(self) -> LaurentPoly:
        return LaurentPoly._raw(self.code.lattice, self.code.modulus, {})

    def ext_to_cech(self, degree: int, cls: Column) -> CechCochain:
        """Zig-zag an Ext^{degree+1} cocycle down to a cochain in C^{degree+1}(t, P)."""
        j = degree + 1
        if j > self.code.D:
            raise ValueError("charge degree exceeds the lattice rank")
        self.res.extend(j + 1)
        q = CechCochain.constant(self.tp, list(cls))
        while j >= 1:
            A = self.differential(j - 1)
            dq = q.delta()
            out = {idx: self._lift_fraction(A, idx, fr) for idx, fr in dq.comps.items()}
            q = CechCochain(self.tp, dq.degree, len(A[0]), out)
            j -= 1
        return q

    def connecting(self, phi: CechCochain) -> CechCochain:
        d = phi.delta()
        for idx, fr in d.comps.items():
            if not gb.member(self.L, list(fr.numer), self.ctx):
                raise NotCocycle(f"component {idx} does not lie in the stabilizer module")
        return d

    def is_cocycle(self, phi: CechCochain) -> bool:
        try:
            self.connecting(phi)
        except NotCocycle:
            return False
        return True

    def omega_pairing(self, a: Sequence[LaurentPoly], b: Sequence[LaurentPoly]) -> List[LaurentPoly]:
        lb = self.code.apply_pairing(list(b))
        acc = self.ctx_zero()
        for x, y in zip(a, lb):
            if x.terms and y.terms:
                acc = acc + x * y
        return [acc]

    def braiding_cochains(self, phi: CechCochain, psi: CechCochain) -> ResidueSeries:
        D = self.code.D
        if phi.degree + psi.degree != D:
            raise ValueError("braiding needs cochain degrees adding up to the lattice rank")
        d = self.connecting(psi)
        prod = phi.conjugate().cup(d, self.omega_pairing)
        top = prod.get(tuple(range(D)))
        return residue(top, self.code.lattice, self.code.modulus, self.ell)

    def class_column(self, cm: ChargeModule, coords: Sequence[int]) -> Column:
        """Ambient column of the element with the given invariant-factor coordinates."""
        fs = cm.structure
        return cm.module.to_ambient(fs.element(coords))

    def generator_cochain(self, degree: int, index: int) -> CechCochain:
        cm = charge_module(self.code, degree)
        if cm.is_zero():
            raise ValueError(f"Q^{degree} is zero")
        coords = [0] * len(cm.structure.invariant_factors)
        coords[index] = 1
        return self.ext_to_cech(degree, self.class_column(cm, coords))


def braiding(code: StabilizerCode, a: int, cls_a: Column, b: int, cls_b: Column,
             ell: Optional[int] = None) -> Tuple[ResidueSeries, int]:
    if a + b != code.D - 2:
        raise ValueError("charge degrees must add up to D - 2")
    setup = CechSetup(code, ell)
    phi = setup.ext_to_cech(a, cls_a)
    psi = setup.ext_to_cech(b, cls_b)
    om = setup.braiding_cochains(phi, psi)
    return om, om.scalar()


# ---------------------------------------------------------------------------
# 2D movers and spin


@dataclass
class Excitation:
    values: Tuple[LaurentPoly, ...]     # one entry per stabilizer generator
    representable: bool = False


def excitation(setup: CechSetup, values: Sequence[LaurentPoly]) -> Excitation:
    A = setup.differential(1) if setup.res.length > 1 else None
    if A is not None:
        img = matvec(A, list(values))
        if any(not x.is_zero() for x in img):
            raise ValueError("syndrome violates the relations between stabilizers")
    try:
        gb.lift(setup.eps, list(values), ctx=setup.ctx)
        rep = True
    except gb.NoSolution:
        rep = False
    return Excitation(tuple(values), rep)


def movers_2d(setup: CechSetup, e: Excitation) -> Tuple[List[LaurentPoly], List[LaurentPoly]]:
    if setup.code.D != 2:
        raise ValueError("movers are defined for two-dimensional codes")
    out = []
    for i in range(2):
        f = LaurentPoly.variable(setup.code.lattice, setup.code.modulus, i, setup.ell) - 1
        target = [x * f for x in e.values]
        try:
            out.append(gb.lift(setup.eps, target, ctx=setup.ctx))
        except gb.NoSolution as exc:
            raise LiftFailed(f"no mover in direction {i + 1}") from exc
    return out[0], out[1]


def mover_cochain(setup: CechSetup, e: Excitation) -> CechCochain:
    """(p_1/(x_1^ell - 1), p_2/(x_2^ell - 1)) as a degree-1 cochain."""
    p1, p2 = movers_2d(setup, e)
    comps = {}
    for i, p in enumerate((p1, p2)):
        k = tuple(1 if j == i else 0 for j in range(2))
        comps[(i,)] = Fraction(tuple(-x for x in p), k)
    return CechCochain(setup.tp, 1, 2 * setup.code.q, comps)


def _string(group, modulus, i: int, ell: int, powers: Iterable[int]) -> LaurentPoly:
    terms = {}
    for j in powers:
        exp = group.unit(i, j * ell)
        terms[exp] = (terms.get(exp, 0) + 1) % modulus
    return LaurentPoly(group, modulus, terms)


def spin_at_cutoff(setup: CechSetup, p1, p2, c: int) -> int:
    code = setup.code
    G, n, ell = code.lattice, code.modulus, setup.ell
    N1 = _string(G, n, 0, ell, range(-c, 0))
    N2 = _string(G, n, 1, ell, range(-c, 0))
    P1 = _string(G, n, 0, ell, range(0, c + 1))
    a = [x * N1 for x in p1]
    b = [x * N2 for x in p2]
    d = [x * P1 for x in p1]
    val = code.omega(a, b).scalar_part() - code.omega(b, d).scalar_part() - code.omega(d, a).scalar_part()
    return val % n


def topological_spin(setup: CechSetup, e: Excitation, start: int = 2, max_cutoff: int = 1024) -> int:
    p1, p2 = movers_2d(setup, e)
    c = start
    prev = spin_at_cutoff(setup, p1, p2, c)
    while c < max_cutoff:
        c *= 2
        cur = spin_at_cutoff(setup, p1, p2, c)
        if cur == prev:
            return cur
        prev = cur
    raise RuntimeError("spin did not stabilize")


def mutual_braiding_2d(setup: CechSetup, e: Excitation, f: Excitation) -> int:
    """Omega_0 of the mover cochains of e and f."""
    return setup.braiding_cochains(mover_cochain(setup, e), mover_cochain(setup, f)).scalar()


# ---------------------------------------------------------------------------
# operators in a window


def orthant_coefficients(k: int, sign: int, radius: int, ell: int) -> Dict[int, int]:
    """Coefficients of (1/t)^k in the orthant ``sign`` for |exponent| <= radius (exponent -> coeff)."""
    out = {}
    if k == 0:
        return {0: 1}
    m_max = radius // ell
    if sign > 0:
        for m in range(0, m_max + 1):
            out[m * ell] = expansion_coefficient(k, m)
    else:
        for m in range(-m_max, -k + 1):
            out[m * ell] = -expansion_coefficient(k, m)
    return out


def operator_window(fr: Fraction, index: Index, orthant: Optional[Sequence[int]], radius: int,
                    group: LatticeGroup, modulus: int, ell: int) -> List[dict]:
    """Expand numer / prod t^k over a window.

    ``orthant`` gives a sign for each direction in ``index``; ``None`` yields
    the signed sum over all orthants.
    """
    signs = [tuple(orthant)] if orthant is not None else list(product((1, -1), repeat=len(index)))
    acc: Dict[Tuple[int, ...], List[int]] = {}
    rows = len(fr.numer)
    for s in signs:
        weight = 1
        for x in s:
            weight *= x
        if orthant is not None:
            weight = 1
        series = [orthant_coefficients(fr.k[i], sgn, radius, ell) for i, sgn in zip(index, s)]
        for shifts in product(*[list(c.items()) for c in series]):
            coef = weight
            exp = [0] * group.ngens
            for i, (e, c) in zip(index, shifts):
                exp[i] += e
                coef *= c
            coef %= modulus
            if not coef:
                continue
            for row, poly in enumerate(fr.numer):
                for mu, c in poly.terms.items():
                    site = group.add(mu, group.normalize(exp))
                    vec = acc.setdefault(site, [0] * rows)
                    vec[row] = (vec[row] + coef * c) % modulus
    out = []
    for site in sorted(acc):
        vec = acc[site]
        if any(vec):
            out.append({"site": list(site), "pauli": vec})
    return out
