"""Translation-invariant stabilizer codes and their symplectic invariants.

A code is given by a lattice group, qudit dimensions n_1..n_q and a
2q x s stabilizer matrix sigma whose columns generate L inside
P = R^{2q} / (n_j e_j, n_j e_{q+j}).  Rows 0..q-1 hold the first half of
each qudit pair and rows q..2q-1 the second half.  The pairing is

    omega(u, v) = sum_j (n/n_j) * (-conj(u_j) v_{q+j} + conj(u_{q+j}) v_j),

which is u^dagger * Lambda * v with Lambda = [[0, -D], [D, 0]].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import factorint

from . import gb
from .fpmod import Column, FpModule, _unit_columns, subquotient
from .intlin import column_hermite
from .ring import LatticeGroup, LaurentPoly, Matrix, dagger, matmul


class ValidationError(ValueError):
    """The code description is malformed."""


class NotIsotropic(ValidationError):
    def __init__(self, i: int, j: int, value: LaurentPoly):
        self.columns = (i, j)
        self.value = value
        super().__init__(
            f"stabilizer columns {i} and {j} do not commute: omega = {value.render()}"
        )


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    name: str
    lattice: LatticeGroup
    qudits: Tuple[int, ...]
    sigma: Tuple[Tuple[LaurentPoly, ...], ...]
    metadata: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qudits", tuple(int(d) for d in self.qudits))
        object.__setattr__(self, "sigma", tuple(tuple(row) for row in self.sigma))
        if not self.qudits:
            raise ValidationError("at least one qudit is required")
        if any(d < 2 for d in self.qudits):
            raise ValidationError("qudit dimensions must be at least 2")
        if len(self.sigma) != 2 * len(self.qudits):
            raise ValidationError(
                f"stabilizer matrix has {len(self.sigma)} rows, expected {2 * len(self.qudits)}"
            )
        widths = {len(row) for row in self.sigma}
        if len(widths) > 1:
            raise ValidationError("stabilizer matrix rows have different lengths")
        n = self.modulus
        for row in self.sigma:
            for entry in row:
                if entry.modulus != n or entry.group != self.lattice:
                    raise ValidationError("stabilizer entries must live in Z_n[Lambda] with n = lcm(qudits)")

    # basic shape ----------------------------------------------------
    @property
    def modulus(self) -> int:
        return lcm(*self.qudits)

    @property
    def q(self) -> int:
        return len(self.qudits)

    @property
    def s(self) -> int:
        return len(self.sigma[0]) if self.sigma else 0

    @property
    def D(self) -> int:
        return self.lattice.rank

    def matrix(self) -> Matrix:
        return [list(row) for row in self.sigma]

    def columns(self) -> List[Column]:
        return [[row[j] for row in self.sigma] for j in range(self.s)]

    def zero(self) -> LaurentPoly:
        return LaurentPoly._raw(self.lattice, self.modulus, {})

    def one(self) -> LaurentPoly:
        return LaurentPoly.constant(self.lattice, self.modulus, 1)

    def key(self) -> tuple:
        return (self.lattice, self.qudits, self.sigma)

    def __eq__(self, other):
        return isinstance(other, StabilizerCode) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # symplectic structure -------------------------------------------
    def scales(self) -> Tuple[int, ...]:
        n = self.modulus
        return tuple(n // d for d in self.qudits)

    def pairing_matrix(self) -> Matrix:
        q = self.q
        z = self.zero()
        L = [[z] * (2 * q) for _ in range(2 * q)]
        for j, c in enumerate(self.scales()):
            L[j][q + j] = LaurentPoly.constant(self.lattice, self.modulus, -c)
            L[q + j][j] = LaurentPoly.constant(self.lattice, self.modulus, c)
        return L

    def apply_pairing(self, v: Sequence[LaurentPoly]) -> List[LaurentPoly]:
        """Lambda * v without building the matrix."""
        q = self.q
        sc = self.scales()
        return [-(v[q + j] * sc[j]) for j in range(q)] + [v[j] * sc[j] for j in range(q)]

    def omega(self, u: Sequence[LaurentPoly], v: Sequence[LaurentPoly]) -> LaurentPoly:
        lv = self.apply_pairing(v)
        acc = self.zero()
        for a, b in zip(u, lv):
            if a.terms and b.terms:
                acc = acc + a.antipode() * b
        return acc

    def p_relations(self) -> List[Column]:
        """Columns n_j e_k presenting the non-free part of P."""
        n = self.modulus
        q = self.q
        out = []
        for j, d in enumerate(self.qudits):
            if d == n:
                continue
            for row in (j, q + j):
                col = [self.zero()] * (2 * q)
                col[row] = LaurentPoly.constant(self.lattice, n, d)
                out.append(col)
        return out

    def epsilon(self) -> Matrix:
        """Syndrome map sigma^dagger Lambda : P -> R^s."""
        return matmul(dagger(self.matrix()), self.pairing_matrix())

    def syndrome(self, v: Sequence[LaurentPoly]) -> List[LaurentPoly]:
        return [self.omega(col, v) for col in self.columns()]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lattice": self.lattice.to_json(),
            "qudits": list(self.qudits),
            "stabilizers": [[entry.render() for entry in col] for col in self.columns()],
        }


def make_code(name: str, lattice: LatticeGroup, qudits: Sequence[int], sigma: Matrix) -> StabilizerCode:
    return StabilizerCode(name, lattice, tuple(qudits), tuple(tuple(r) for r in sigma))


# ---------------------------------------------------------------------------
# validation and complements


@dataclass
class SymplecticP:
    code: StabilizerCode
    pairing: Matrix
    relations: List[Column]
    L: List[Column]


def load_and_validate(code: StabilizerCode) -> SymplecticP:
    cols = code.columns()
    for i, a in enumerate(cols):
        for j in range(i, len(cols)):
            w = code.omega(a, cols[j])
            if not w.is_zero():
                raise NotIsotropic(i, j, w)
    return SymplecticP(code, code.pairing_matrix(), code.p_relations(), cols)


def _ctx(code: StabilizerCode) -> gb.Context:
    return gb.Context(code.lattice, code.modulus)


def perp(code: StabilizerCode, N: Sequence[Column]) -> List[Column]:
    """Generators of N^omega inside P (including the relations of P)."""
    N = [c for c in N if any(not x.is_zero() for x in c)]
    if not N:
        return _unit_columns(code.lattice, code.modulus, 2 * code.q)
    rows = [code.apply_pairing(c) for c in N]
    A = [[x.antipode() for x in row] for row in rows]     # (N^dagger Lambda^T) up to sign
    K = gb.syzygies(A, ctx=_ctx(code), ncols=2 * code.q)
    return gb.minimize_generators(K, code.p_relations(), _ctx(code))


def submodule_contains(code: StabilizerCode, gens: Sequence[Column], v: Column) -> bool:
    return gb.member(list(gens) + code.p_relations(), v, _ctx(code)) if (gens or code.p_relations()) \
        else all(x.is_zero() for x in v)


def same_submodule(code: StabilizerCode, a: Sequence[Column], b: Sequence[Column]) -> bool:
    return all(submodule_contains(code, b, v) for v in a) and all(submodule_contains(code, a, v) for v in b)


@dataclass
class CodeInvariants:
    Lperp: List[Column]
    Lperpperp: List[Column]
    Z: FpModule
    S: FpModule
    saturated: bool
    lagrangian: bool


_INVARIANTS: Dict[StabilizerCode, CodeInvariants] = {}


def code_invariants(code: StabilizerCode) -> CodeInvariants:
    hit = _INVARIANTS.get(code)
    if hit is not None:
        return hit
    load_and_validate(code)
    gb.prime_power(code.modulus)
    L = code.columns()
    rel = code.p_relations()
    Lw = perp(code, L)
    Lww = perp(code, Lw)
    r = 2 * code.q
    Z = subquotient(Lww, L + rel, r, code.lattice, code.modulus)
    S = subquotient(Lw, Lww + rel, r, code.lattice, code.modulus)
    saturated = Z.is_zero()
    inv = CodeInvariants(Lw, Lww, Z, S, saturated, saturated and S.is_zero())
    _INVARIANTS[code] = inv
    return inv


# ---------------------------------------------------------------------------
# code operations


def _relift(poly: LaurentPoly, modulus: int) -> LaurentPoly:
    return LaurentPoly(poly.group, modulus, poly.terms)


def direct_sum(a: StabilizerCode, b: StabilizerCode, name: Optional[str] = None) -> StabilizerCode:
    if a.lattice != b.lattice:
        raise ValidationError("direct sum needs codes on the same lattice")
    n = lcm(a.modulus, b.modulus)
    G = a.lattice
    z = LaurentPoly._raw(G, n, {})
    rows = []
    qa, qb = a.q, b.q
    order = [(0, r) for r in range(qa)] + [(1, r) for r in range(qb)] + \
            [(0, qa + r) for r in range(qa)] + [(1, qb + r) for r in range(qb)]
    for side, r in order:
        lifted = [_relift(x, n) for x in (a, b)[side].sigma[r]]
        rows.append(lifted + [z] * b.s if side == 0 else [z] * a.s + lifted)
    return make_code(name or f"{a.name}+{b.name}", G, a.qudits + b.qudits, rows)


def crt_decompose(code: StabilizerCode) -> List[StabilizerCode]:
    """Split along the prime factorization of n (one code per prime power)."""
    n = code.modulus
    f = factorint(n)
    if len(f) == 1:
        return [code]
    out = []
    q = code.q
    for p, a in sorted(f.items()):
        m = p ** a
        dims = [gcd(d, m) for d in code.qudits]
        keep = [j for j, d in enumerate(dims) if d > 1]
        rows = [code.sigma[j] for j in keep] + [code.sigma[q + j] for j in keep]
        rows = [[LaurentPoly(x.group, m, x.terms) for x in row] for row in rows]
        out.append(make_code(f"{code.name}[{m}]", code.lattice, [dims[j] for j in keep], rows))
    return out


def stack(code: StabilizerCode, target: LatticeGroup, images: Sequence[Sequence[int]], name: Optional[str] = None) -> StabilizerCode:
    """Base change along an injective homomorphism Lambda -> Gamma.

    ``images[k]`` is the image in ``target`` of the k-th generator of Lambda.
    """
    G = code.lattice
    if len(images) != G.ngens:
        raise ValidationError("one image per lattice generator is required")
    imgs = [target.normalize(v) for v in images]
    _check_injective(G, target, imgs)

    def fn(exp):
        out = [0] * target.ngens
        for k, e in enumerate(exp):
            for i, c in enumerate(imgs[k]):
                out[i] += e * c
        return out

    rows = [[x.map_exponents(target, fn) for x in row] for row in code.sigma]
    return make_code(name or f"{code.name}@stack", target, code.qudits, rows)


def _check_injective(G: LatticeGroup, target: LatticeGroup, imgs) -> None:
    from sympy import Matrix as SMatrix
    r = target.rank
    free_part = SMatrix([list(v[:r]) for v in imgs[: G.rank]]) if G.rank else None
    if G.rank and free_part.rank() < G.rank:
        raise ValidationError("embedding is not injective")
    # torsion generators must keep their order and stay independent
    from itertools import product as iproduct
    tors_imgs = imgs[G.rank:]
    for combo in iproduct(*[range(m) for m in G.torsion]):
        if not any(combo):
            continue
        total = [0] * target.ngens
        for c, v in zip(combo, tors_imgs):
            for i, x in enumerate(v):
                total[i] += c * x
        if all(x == 0 for x in target.normalize(total)):
            raise ValidationError("embedding is not injective on the torsion part")


def coarse_grain(code: StabilizerCode, generators: Sequence[Sequence[int]], name: Optional[str] = None) -> StabilizerCode:
    """Restrict translations to the sublattice spanned by the columns of ``generators``.

    ``generators`` is a D x D integer matrix acting on the free directions;
    torsion directions are kept as they are.  Sites of the new lattice carry
    the qudits of one fundamental domain.
    """
    G = code.lattice
    D = G.rank
    if len(generators) != D or any(len(row) != D for row in generators):
        raise ValidationError("sublattice must be given by a D x D matrix")
    H = column_hermite(generators)
    diag = [H[i][i] for i in range(D)]
    from itertools import product as iproduct
    reps = [tuple(r) for r in iproduct(*[range(d) for d in diag])]
    index = len(reps)
    rep_index = {r: k for k, r in enumerate(reps)}
    n = code.modulus
    q = code.q
    zero_new = LaurentPoly._raw(G, n, {})

    def split(exp):
        lam = list(exp[:D])
        mu = [0] * D
        for k in range(D - 1, -1, -1):
            c = lam[k] // H[k][k]
            mu[k] = c
            for i in range(D):
                lam[i] -= c * H[i][k]
        return tuple(lam), tuple(mu) + tuple(exp[D:])

    def regroup(col: Sequence[LaurentPoly]) -> List[LaurentPoly]:
        new = [dict() for _ in range(2 * q * index)]
        for row, poly in enumerate(col):
            half, j = divmod(row, q)
            for exp, c in poly.terms.items():
                r, mu = split(exp)
                slot = half * q * index + rep_index[r] * q + j
                mu = G.normalize(mu)
                new[slot][mu] = (new[slot].get(mu, 0) + c) % n
        return [LaurentPoly(G, n, d) for d in new]

    cols = []
    for col in code.columns():
        for r in reps:
            shifted = [x.shift(G.normalize(tuple(r) + (0,) * len(G.torsion))) for x in col]
            cols.append(regroup(shifted))
    rows = [[c[i] for c in cols] for i in range(2 * q * index)] if cols else \
        [[] for _ in range(2 * q * index)]
    qudits = tuple(d for _ in reps for d in code.qudits)
    return make_code(name or f"{code.name}@coarse", G, qudits, rows)
