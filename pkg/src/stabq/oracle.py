"""Brute-force checks on finite lattices, using Howell forms over Z_n.

Nothing here goes through Groebner bases: everything is plain linear
algebra over Z_n on explicitly enumerated sites.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

from .code import StabilizerCode, load_and_validate


class NonSquare(ValueError):
    """|L^omega / L^omegaomega| is not a perfect square."""


class NotStabilized(RuntimeError):
    """Window quotient orders were still changing at the largest radius."""


IntMatrix = List[List[int]]


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _unit_normalizer(a: int, n: int) -> int:
    """A unit u mod n with u*a = gcd(a, n) mod n."""
    g = gcd(a, n)
    m = n // g
    if m == 1:
        return 1
    u = pow(a // g, -1, m)
    while gcd(u, n) != 1:
        u += m
    return u % n


def howell(A: Sequence[Sequence[int]], n: int) -> IntMatrix:
    """Howell normal form of the row span of A over Z_n (zero rows dropped)."""
    if not A:
        return []
    ncols = len(A[0])
    rows = [[x % n for x in row] for row in A]
    rows = [r for r in rows if any(r)]
    r = 0
    for col in range(ncols):
        # gather a gcd pivot in row r
        for i in range(r + 1, len(rows)):
            b = rows[i][col]
            if not b:
                continue
            a = rows[r][col] if r < len(rows) else 0
            if not a:
                rows[r], rows[i] = rows[i], rows[r]
                continue
            g, s, t = _xgcd(a, b)
            ra, rb = rows[r], rows[i]
            rows[r] = [(s * x + t * y) % n for x, y in zip(ra, rb)]
            rows[i] = [((-b // g) * x + (a // g) * y) % n for x, y in zip(ra, rb)]
        if r >= len(rows) or rows[r][col] == 0:
            continue
        u = _unit_normalizer(rows[r][col], n)
        rows[r] = [(u * x) % n for x in rows[r]]
        piv = rows[r][col]
        for i in range(r):
            q = rows[i][col] // piv
            if q:
                rows[i] = [(x - q * y) % n for x, y in zip(rows[i], rows[r])]
        ann = [(x * (n // piv)) % n for x in rows[r]]
        if any(ann):
            rows.append(ann)
        r += 1
    return [row for row in rows[:r] if any(row)]


def pivots(H: IntMatrix) -> List[int]:
    out = []
    for row in H:
        out.append(next(x for x in row if x))
    return out


def span_order(A: Sequence[Sequence[int]], n: int) -> int:
    """Number of elements in the row span of A over Z_n."""
    out = 1
    for p in pivots(howell(A, n)):
        out *= n // gcd(p, n)
    return out


def nullspace(A: Sequence[Sequence[int]], n: int, ncols: Optional[int] = None) -> IntMatrix:
    """Rows spanning {x : A x = 0 mod n}."""
    m = len(A[0]) if A else (ncols or 0)
    if not A:
        return [[int(i == j) for j in range(m)] for i in range(m)]
    k = len(A)
    aug = [[A[r][c] % n for r in range(k)] + [int(c == j) for j in range(m)] for c in range(m)]
    H = howell(aug, n)
    return [row[k:] for row in H if not any(row[:k])]


# ---------------------------------------------------------------------------
# tori


@dataclass
class TorusInstance:
    code: StabilizerCode
    sides: Tuple[int, ...]
    sites: List[Tuple[int, ...]]
    stabilizers: IntMatrix

    @property
    def modulus(self) -> int:
        return self.code.modulus

    @property
    def dim(self) -> int:
        return 2 * self.code.q * len(self.sites)

    def site_index(self, exp) -> int:
        return self._index[self._wrap(exp)]

    def _wrap(self, exp) -> Tuple[int, ...]:
        r = self.code.D
        G = self.code.lattice
        return tuple(e % L for e, L in zip(exp[:r], self.sides)) + tuple(
            e % m for e, m in zip(exp[r:], G.torsion))

    def pairing(self, v: Sequence[int], w: Sequence[int]) -> int:
        q = self.code.q
        scales = self.code.scales()
        total = 0
        for s in range(len(self.sites)):
            base = 2 * q * s
            for j in range(q):
                a, b = v[base + j], v[base + q + j]
                c, d = w[base + j], w[base + q + j]
                total += scales[j] * (-a * d + b * c)
        return total % self.modulus

    def apply_pairing(self, w: Sequence[int]) -> List[int]:
        """J w with pairing(v, w) = v . (J w)."""
        q = self.code.q
        scales = self.code.scales()
        out = [0] * len(w)
        for s in range(len(self.sites)):
            base = 2 * q * s
            for j in range(q):
                out[base + j] = -scales[j] * w[base + q + j]
                out[base + q + j] = scales[j] * w[base + j]
        return out


def torus(code: StabilizerCode, sides: Sequence[int]) -> TorusInstance:
    load_and_validate(code)
    if len(set(code.qudits)) != 1:
        raise ValueError("the finite-lattice oracle handles uniform qudit dimensions only")
    D = code.D
    if len(sides) != D:
        raise ValueError(f"need {D} side lengths")
    G = code.lattice
    sites = [tuple(p) for p in product(*[range(L) for L in sides], *[range(m) for m in G.torsion])]
    inst = TorusInstance(code, tuple(sides), sites, [])
    inst._index = {s: k for k, s in enumerate(sites)}
    q = code.q
    n = code.modulus
    for col in code.columns():
        for shift in sites:
            v = [0] * inst.dim
            for row, poly in enumerate(col):
                for exp, c in poly.terms.items():
                    site = inst.site_index([a + b for a, b in zip(exp, shift)])
                    k = 2 * q * site + row
                    v[k] = (v[k] + c) % n
            inst.stabilizers.append(v)
    for a in inst.stabilizers:
        for b in inst.stabilizers:
            if inst.pairing(a, b):
                raise ValueError("translated stabilizers do not commute on this torus")
    return inst


def _perp_rows(inst: TorusInstance, rows: IntMatrix) -> IntMatrix:
    n = inst.modulus
    if not rows:
        return [[int(i == j) for j in range(inst.dim)] for i in range(inst.dim)]
    A = [inst.apply_pairing(r) for r in rows]
    # pairing(v, r) = v . J r  ->  constraint rows are (J r)
    return nullspace(A, n, inst.dim)


def ground_state_degeneracy(code: StabilizerCode, sides: Sequence[int]) -> int:
    inst = torus(code, sides)
    n = inst.modulus
    Lw = _perp_rows(inst, inst.stabilizers)
    Lww = _perp_rows(inst, Lw)
    ratio, rem = divmod(span_order(Lw, n), span_order(Lww, n))
    if rem:
        raise NonSquare("L^omegaomega is not contained in L^omega")
    root = isqrt(ratio)
    if root * root != ratio:
        raise NonSquare(f"|L^omega/L^omegaomega| = {ratio} is not a square")
    return root


# ---------------------------------------------------------------------------
# explicit operators on the infinite lattice


def _as_map(ops) -> Dict[Tuple[int, ...], List[int]]:
    if isinstance(ops, dict):
        return {tuple(k): list(v) for k, v in ops.items()}
    out: Dict[Tuple[int, ...], List[int]] = {}
    for item in ops:
        site = tuple(item["site"])
        vec = out.setdefault(site, [0] * len(item["pauli"]))
        for i, x in enumerate(item["pauli"]):
            vec[i] += x
    return out


def commutator_phase(code: StabilizerCode, v, w) -> int:
    """omega(v, w)_0 for finitely supported operators given as site listings."""
    q = code.q
    scales = code.scales()
    a = _as_map(v)
    b = _as_map(w)
    total = 0
    for site, x in a.items():
        y = b.get(site)
        if y is None:
            continue
        for j in range(q):
            total += scales[j] * (-x[j] * y[q + j] + x[q + j] * y[j])
    return total % code.modulus


# ---------------------------------------------------------------------------
# windowed point charges


def _box(code: StabilizerCode, radius: int) -> List[Tuple[int, ...]]:
    G = code.lattice
    return [tuple(p) for p in product(*[range(-radius, radius + 1)] * code.D, *[range(m) for m in G.torsion])]


def _local_matrix(code: StabilizerCode, matrix, col_sites: Sequence[Tuple[int, ...]]):
    """Rows indexed by (row, site) hit by matrix * (unit at (col, site))."""
    G = code.lattice
    n = code.modulus
    ncols = len(matrix[0])
    columns = []
    row_keys: Dict[Tuple[int, Tuple[int, ...]], int] = {}
    for site in col_sites:
        for c in range(ncols):
            entries = {}
            for r, row in enumerate(matrix):
                for exp, coef in row[c].terms.items():
                    key = (r, G.add(exp, site))
                    entries[key] = (entries.get(key, 0) + coef) % n
                    row_keys.setdefault(key, len(row_keys))
            columns.append(entries)
    return columns, row_keys


def window_charge_order(code: StabilizerCode, inner: int, outer: int) -> int:
    """|V / W| with V the allowed syndromes on the inner box and W those made by outer-box operators."""
    from .charges import charge_resolution
    from .ring import dagger
    n = code.modulus
    res = charge_resolution(code, 2)
    eps = code.epsilon()
    inner_sites = _box(code, inner)
    syn_index = {(j, s): k for k, (s, j) in enumerate(product(inner_sites, range(code.s)))}

    # V: syndromes on the inner box killed by the relations between stabilizers;
    # a zero stabilizer never fires, which the minimal resolution does not record
    A = []
    if res.length > 1:
        C = dagger(res.maps[1])
        cols, keys = _local_matrix(code, C, inner_sites)
        A = [[0] * len(cols) for _ in keys]
        for ci, entries in enumerate(cols):
            for key, coef in entries.items():
                A[keys[key]][ci] = coef
    dead = [j for j, col in enumerate(code.columns()) if all(x.is_zero() for x in col)]
    for j in dead:
        for site in inner_sites:
            row = [0] * len(syn_index)
            row[syn_index[(j, site)]] = 1
            A.append(row)
    V = nullspace(A, n, len(syn_index)) if A else [[int(i == j) for j in range(len(syn_index))]
                                                  for i in range(len(syn_index))]

    # W: syndromes of operators on the outer box that stay inside the inner box
    outer_sites = _box(code, outer)
    cols, keys = _local_matrix(code, eps, outer_sites)
    outside = {key: k for k, key in enumerate(k for k in keys if (k[0], k[1]) not in syn_index)}
    A_out = [[0] * len(cols) for _ in outside]
    for ci, entries in enumerate(cols):
        for key, coef in entries.items():
            if key in outside:
                A_out[outside[key]][ci] = coef
    K = nullspace(A_out, n, len(cols)) if A_out else [[int(i == j) for j in range(len(cols))] for i in range(len(cols))]
    W = []
    for kv in K:
        img = [0] * len(syn_index)
        for ci, x in enumerate(kv):
            if not x:
                continue
            for key, coef in cols[ci].items():
                if key in syn_index:
                    img[syn_index[key]] = (img[syn_index[key]] + x * coef) % n
        W.append(img)
    order_v = span_order(V, n)
    order_w = span_order(W, n) if W else 1
    return order_v // order_w


@dataclass
class WindowResult:
    orders: List[Tuple[int, int, int]]     # (inner, outer, order)
    order: int
    stabilized: bool


def window_Q0(code: StabilizerCode, inner: int, outer: int, steps: int = 2) -> WindowResult:
    """Quotient orders for growing windows; raises NotStabilized if the last two differ."""
    orders = []
    for k in range(steps):
        r, R = inner + k, outer + k
        orders.append((r, R, window_charge_order(code, r, R)))
    stable = len(orders) >= 2 and orders[-1][2] == orders[-2][2]
    if not stable:
        raise NotStabilized(f"window orders still changing: {[o for _, _, o in orders]}")
    return WindowResult(orders, orders[-1][2], True)


# ---------------------------------------------------------------------------
# crossing strings in two dimensions


def crossing_strings(setup, e, f, radius: int = 8):
    """Truncated line operators moving e along x and f along y, as site listings."""
    from .cech import mover_cochain, operator_window
    code = setup.code
    ce = mover_cochain(setup, e)
    cf = mover_cochain(setup, f)
    a = operator_window(ce.get((0,)), (0,), None, radius, code.lattice, code.modulus, setup.ell)
    b = operator_window(cf.get((1,)), (1,), None, radius, code.lattice, code.modulus, setup.ell)
    return a, b


def crossing_commutator(setup, e, f, radius: int = 8) -> int:
    a, b = crossing_strings(setup, e, f, radius)
    return commutator_phase(setup.code, a, b)
