"""Charge modules Q^i = Ext^{i+1}(P/L-bar, R), mobility and momentum sectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import GF, Poly, symbols

from . import gb
from .code import StabilizerCode, load_and_validate
from .fpmod import (Column, FiniteStructure, FpModule, NotFinite, Resolution, annihilator,
                    ext, finite_structure, free_resolution, ideal_contains, ideal_gb,
                    is_dim_zero, matrix_order)
from .ring import LaurentPoly, Matrix


class NotMobile(ValueError):
    def __init__(self, degrees: Sequence[int]):
        self.degrees = list(degrees)
        super().__init__("not mobile at degree " + ", ".join(str(d) for d in self.degrees))


@dataclass
class ChargeModule:
    degree: int
    module: FpModule
    annihilator: List[LaurentPoly]
    dim_zero: bool
    structure: Optional[FiniteStructure] = None
    period: Optional[int] = None

    def is_zero(self) -> bool:
        return self.module.is_zero()

    @property
    def invariant_factors(self) -> Optional[Tuple[int, ...]]:
        if self.is_zero():
            return ()
        return self.structure.invariant_factors if self.structure else None

    @property
    def order(self) -> Optional[int]:
        f = self.invariant_factors
        if f is None:
            return None
        out = 1
        for d in f:
            out *= d
        return out


_RESOLUTIONS: Dict[StabilizerCode, Resolution] = {}


def presentation(code: StabilizerCode) -> FpModule:
    """P/L as the cokernel of [sigma | relations of P] on R^{2q}."""
    cols = code.columns() + code.p_relations()
    return FpModule(code.lattice, code.modulus, 2 * code.q, cols)


def charge_resolution(code: StabilizerCode, length: Optional[int] = None) -> Resolution:
    if length is None:
        length = code.D + 2
    res = _RESOLUTIONS.get(code)
    if res is None:
        load_and_validate(code)
        gb.prime_power(code.modulus)
        res = free_resolution(presentation(code), 1)
        _RESOLUTIONS[code] = res
    return res.extend(length)


def _module_for(code: StabilizerCode, i: int, length: Optional[int]) -> FpModule:
    if length is None:
        length = max(code.D + 2, i + 2)
    res = charge_resolution(code, length)
    return ext(presentation(code), i + 1, res)


def charge_module(code: StabilizerCode, i: int, length: Optional[int] = None,
                  with_structure: bool = True) -> ChargeModule:
    if i < 0:
        raise ValueError("degree must be non-negative")
    M = _module_for(code, i, length)
    if M.is_zero():
        one = LaurentPoly.constant(code.lattice, code.modulus, 1)
        return ChargeModule(i, M, [one], True, None, 1)
    ann = annihilator(M)
    dz = is_dim_zero(ann, code.lattice, code.modulus)
    structure = None
    period = None
    if dz and with_structure:
        structure = finite_structure(M, check_dimension=False)
        period = _period(structure, code.D)
    return ChargeModule(i, M, ann, dz, structure, period)


def _period(fs: FiniteStructure, rank: int) -> int:
    out = 1
    for k in range(rank):
        out = lcm(out, matrix_order(fs.translation_matrices[k], fs.invariant_factors))
    return out


_CHARGES: Dict[Tuple[StabilizerCode, int], ChargeModule] = {}


def charge_modules(code: StabilizerCode, degrees: Optional[Sequence[int]] = None) -> List[ChargeModule]:
    if degrees is None:
        degrees = range(code.D + 1)
    out = []
    for i in degrees:
        key = (code, i)
        if key not in _CHARGES:
            _CHARGES[key] = charge_module(code, i)
        out.append(_CHARGES[key])
    return out


def charges_from_cokernel(code: StabilizerCode) -> FpModule:
    """Q^0 computed independently as the torsion submodule of coker(sigma^dagger Lambda)."""
    from .fpmod import cokernel, torsion_submodule
    eps = code.epsilon()
    T, _ = torsion_submodule(cokernel(eps, code.lattice, code.modulus))
    return T


# ---------------------------------------------------------------------------
# mobility


@dataclass
class MobilityReport:
    flags: Dict[int, bool]
    nonzero: List[int]
    mobile: bool
    period: Optional[int]
    offending: List[int] = field(default_factory=list)

    def require_mobile(self) -> int:
        if not self.mobile:
            raise NotMobile(self.offending)
        return self.period

    def message(self) -> str:
        if self.mobile:
            return f"mobile with period {self.period}"
        return "not mobile at degree " + ", ".join(str(d) for d in self.offending)


def mobility(code: StabilizerCode, ell_override: Optional[int] = None) -> MobilityReport:
    qs = charge_modules(code, range(max(code.D, 1)))
    flags = {}
    nonzero = []
    for cm in qs:
        if cm.is_zero():
            continue
        nonzero.append(cm.degree)
        flags[cm.degree] = cm.dim_zero
    offending = [d for d in nonzero if not flags[d]]
    if offending:
        return MobilityReport(flags, nonzero, False, None, offending)
    ell = 1
    for cm in qs:
        if not cm.is_zero():
            ell = lcm(ell, cm.period)
    if ell_override is not None:
        ell = ell_override
    for cm in qs:
        if cm.is_zero():
            continue
        for k in range(code.D):
            f = LaurentPoly.variable(code.lattice, code.modulus, k, ell) - 1
            if not ideal_contains(cm.annihilator, f):
                raise ValueError(f"x{k + 1}^{ell} - 1 does not annihilate Q^{cm.degree}")
    return MobilityReport(flags, nonzero, True, ell, [])


# ---------------------------------------------------------------------------
# momentum sectors


@dataclass
class MomentumSector:
    idempotent: LaurentPoly
    eigenvalues: Optional[Tuple[int, ...]]   # residues of x_k mod p when they are rational
    conjugate: int = -1
    label: str = ""


class QuotientRing:
    """The finite ring R/I, elements kept as canonical normal forms."""

    def __init__(self, ideal: Sequence[LaurentPoly], group, modulus):
        self.group = group
        self.modulus = modulus
        self.ctx = gb.Context(group, modulus)
        self.G = ideal_gb(ideal, group, modulus)

    def nf(self, f: LaurentPoly) -> LaurentPoly:
        v = self.G.normal_form(self.ctx.vec_from_column([f]))
        return self.ctx.column_from_vec(v, 1)[0]

    def mul(self, a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
        return self.nf(a * b)

    def is_zero(self, a: LaurentPoly) -> bool:
        return self.nf(a).is_zero()

    def eventual_idempotent(self, a: LaurentPoly, limit: int = 100000) -> LaurentPoly:
        """a^N for N a multiple of the cycle length past the tail; always idempotent."""
        seen = {}
        powers = []
        cur = self.nf(a)
        k = 1
        while True:
            if cur in seen:
                start = seen[cur]
                cycle = k - start
                N = cycle * max(1, -(-start // cycle))
                return powers[N - 1]
            seen[cur] = k
            powers.append(cur)
            cur = self.mul(cur, a)
            k += 1
            if k > limit:
                raise ValueError("power sequence did not cycle")


def _char_factors(T: List[List[int]], p: int) -> List[List[int]]:
    """Irreducible factors mod p of the characteristic polynomial of T (coefficients, high first)."""
    from sympy import Matrix as SMatrix
    if not T:
        return []
    lam = symbols("lam")
    cp = SMatrix(T).charpoly(lam).as_expr()
    _, facs = Poly(cp, lam, domain=GF(p, symmetric=False)).factor_list()
    return [[int(c) % p for c in f.all_coeffs()] for f, _ in facs]


def _poly_in(var: LaurentPoly, coeffs: Sequence[int]) -> LaurentPoly:
    acc = var.zero_like()
    for c in coeffs:
        acc = acc * var + c
    return acc


def momentum_sectors(code: StabilizerCode, cm: ChargeModule) -> List[MomentumSector]:
    if not cm.dim_zero:
        raise NotFinite("momentum sectors need a finite charge module")
    G, n = code.lattice, code.modulus
    p, _ = gb.prime_power(n)
    one = LaurentPoly.constant(G, n, 1)
    if cm.is_zero():
        return [MomentumSector(one, (1,) * code.D, 0, "trivial")]
    A = QuotientRing(cm.annihilator, G, n)
    idems = [A.nf(one)]
    tests = []
    for k in range(code.D):
        xk = LaurentPoly.variable(G, n, k)
        for coeffs in _char_factors(cm.structure.translation_matrices[k], p):
            tests.append(_poly_in(xk, coeffs))
    for a in range(code.D):
        for b in range(a + 1, code.D):
            xab = LaurentPoly.variable(G, n, a) * LaurentPoly.variable(G, n, b)
            tests.append(xab - 1)
            tests.append(xab + 1)
    for f in tests:
        u = A.eventual_idempotent(f)    # projection where f is invertible
        new = []
        for e in idems:
            e1 = A.mul(e, u)
            e2 = A.nf(e - e1)
            for part in (e1, e2):
                if not A.is_zero(part):
                    new.append(part)
        idems = new
    sectors = []
    for e in idems:
        sectors.append(MomentumSector(e, _eigenvalues(A, e, code, p)))
    for i, s in enumerate(sectors):
        conj = A.nf(s.idempotent.antipode())
        for j, t in enumerate(sectors):
            if A.nf(conj - t.idempotent).is_zero():
                s.conjugate = j
                break
    for s in sectors:
        if s.eigenvalues is not None:
            s.label = "(" + ", ".join(_sym(c, p) for c in s.eigenvalues) + ")"
        else:
            s.label = "nonrational"
    return sectors


def _sym(c: int, p: int) -> str:
    return str(c if c <= p // 2 else c - p)


def _eigenvalues(A: QuotientRing, e: LaurentPoly, code: StabilizerCode, p: int) -> Optional[Tuple[int, ...]]:
    """Scalars c_k with (x_k - c_k) nilpotent modulo p on the sector, if they exist."""
    G, n = code.lattice, code.modulus
    out = []
    for k in range(code.D):
        xk = LaurentPoly.variable(G, n, k)
        found = None
        for c in range(p):
            f = A.mul(e, xk - c)
            if A.is_zero(f) or A.is_zero(A.eventual_idempotent(f)):
                found = c
                break
        if found is None:
            return None
        out.append(found)
    return tuple(out)


def sector_projector(code: StabilizerCode, sectors: Sequence[MomentumSector], index: int) -> LaurentPoly:
    """prod over other sectors of (x_k - c'_k), k the first direction separating them."""
    G, n = code.lattice, code.modulus
    p, _ = gb.prime_power(n)
    me = sectors[index]
    if me.eigenvalues is None:
        return me.idempotent
    out = LaurentPoly.constant(G, n, 1)
    for j, other in enumerate(sectors):
        if j == index:
            continue
        if other.eigenvalues is None:
            return me.idempotent
        k = next(k for k in range(code.D) if other.eigenvalues[k] != me.eigenvalues[k])
        c = other.eigenvalues[k]
        c = c if c <= p // 2 else c - p
        out = out * (LaurentPoly.variable(G, n, k) - c)
    return out
