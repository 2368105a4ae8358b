import json
from itertools import combinations

import pytest
from hypothesis import HealthCheck, settings

from stabq.cli import DATA_DIR, parse_poly, code_from_json
from stabq.ring import LatticeGroup, LaurentPoly

settings.register_profile(
    "stabq", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("stabq")


def bundled_doc(name: str) -> dict:
    return json.loads((DATA_DIR / f"{name}.json").read_text())


def bundled(name: str, n: int = None):
    """A bundled code, optionally with every qudit dimension replaced by n."""
    doc = bundled_doc(name)
    if n is not None:
        doc["qudits"] = [n] * len(doc["qudits"])
    return code_from_json(doc)


def P(text: str, rank: int = 1, n: int = 2, torsion=()):
    return parse_poly(text, LatticeGroup(rank, tuple(torsion)), n)


def const(code, c):
    return LaurentPoly.constant(code.lattice, code.modulus, c)


@pytest.fixture
def toric3d():
    return bundled("toric3d")


def random_symplectic_image(code, rng, steps=4):
    """Apply random symplectic automorphisms of P (uniform qudits) to the columns of code."""
    from stabq.code import make_code
    G, n, q = code.lattice, code.modulus, code.q
    D = code.D
    rows = [list(r) for r in code.sigma]

    def rand_poly():
        terms = {}
        for _ in range(rng.randint(1, 2)):
            e = tuple(rng.randint(-1, 1) for _ in range(D))
            terms[e] = rng.randrange(n)
        return LaurentPoly(G, n, terms)

    for _ in range(steps):
        kind = rng.choice(("shear", "phase", "swap", "shift"))
        i = rng.randrange(q)
        if kind == "shear" and q > 1:
            # a_i += r a_j, b_j -= conj(r) b_i
            j = rng.choice([k for k in range(q) if k != i])
            r = rand_poly()
            rows[i] = [x + r * y for x, y in zip(rows[i], rows[j])]
            rows[q + j] = [x - r.antipode() * y for x, y in zip(rows[q + j], rows[q + i])]
        elif kind == "phase":
            # b_i += h a_i with h self-conjugate
            r = rand_poly()
            h = r + r.antipode()
            rows[q + i] = [x + h * y for x, y in zip(rows[q + i], rows[i])]
        elif kind == "swap":
            rows[i], rows[q + i] = [-x for x in rows[q + i]], rows[i]
        else:
            e = tuple(rng.randint(-1, 1) for _ in range(D))
            m = LaurentPoly.monomial(G, n, e)
            rows[i] = [m * x for x in rows[i]]
            rows[q + i] = [m * x for x in rows[q + i]]
    return make_code(f"{code.name}~", G, code.qudits, rows)


# explicit cocycles in the bundled bases; denominators are written over t_i = 1 - x_i,
# using 1/conj(t_i) = -x_i/t_i and 1/(conj(x_i) - 1) = x_i/t_i


def frac(code, texts, k):
    from stabq.cech import Fraction
    return Fraction(tuple(P(t, code.D, code.modulus) for t in texts), k)


def unit_col(size, i, text):
    c = ["0"] * size
    c[i] = text
    return c


def _unit_poly(code, size, i, poly):
    zero = LaurentPoly(code.lattice, code.modulus, {})
    return tuple(poly if r == i else zero for r in range(size))


def plaquette_phi(setup):
    from stabq.cech import CechCochain
    s = setup.code
    return CechCochain(setup.tp, 1, 2, {(0,): frac(s, ["x", "x^2"], (1, 0)),
                                        (1,): frac(s, ["-y", "y^2"], (0, 1))})


def toric3d_cochains(setup):
    """Electric line and flux surface cocycles of the 3D toric code."""
    from stabq.cech import CechCochain
    s = setup.code
    phi = CechCochain(setup.tp, 1, 6, {
        (i,): frac(s, unit_col(6, 3 + i, "-1"), tuple(int(j == i) for j in range(3))) for i in range(3)})
    psi = CechCochain(setup.tp, 2, 6, {
        (1, 2): frac(s, unit_col(6, 0, "y*z"), (0, 1, 1)),
        (0, 2): frac(s, unit_col(6, 1, "-x*z"), (1, 0, 1)),
        (0, 1): frac(s, unit_col(6, 2, "x*y"), (1, 1, 0)),
    })
    return phi, psi


def toric4d_cochains(setup):
    """phi_i = a_i/(x_i - 1) and psi on the complement of i = (-1)^i e_i / prod_{j != i} (conj(x_j) - 1)."""
    from stabq.cech import CechCochain, Fraction
    c = setup.code
    X = [LaurentPoly.variable(c.lattice, c.modulus, k) for k in range(4)]
    one = LaurentPoly.constant(c.lattice, c.modulus, 1)
    phi = CechCochain(setup.tp, 1, 8, {
        (i,): Fraction(_unit_poly(c, 8, 4 + i, -one), tuple(int(j == i) for j in range(4))) for i in range(4)})
    comps = {}
    for i in range(4):
        rest = tuple(j for j in range(4) if j != i)
        m = one * (-1) ** (i + 1)
        for j in rest:
            m = m * X[j]
        comps[rest] = Fraction(_unit_poly(c, 8, i, m), tuple(int(j != i) for j in range(4)))
    return phi, CechCochain(setup.tp, 3, 8, comps)


def twoform_cochains(setup):
    """phi_ij = a_ij/((x_i - 1)(x_j - 1)) and psi_ij = (-1)^(i+j) e_(complement) / ((conj(x_i) - 1)(conj(x_j) - 1))."""
    from stabq.cech import CechCochain, Fraction
    c = setup.code
    X = [LaurentPoly.variable(c.lattice, c.modulus, k) for k in range(4)]
    one = LaurentPoly.constant(c.lattice, c.modulus, 1)
    pairs = list(combinations(range(4), 2))
    phi, psi = {}, {}
    for p, (i, j) in enumerate(pairs):
        k = tuple(int(m in (i, j)) for m in range(4))
        phi[(i, j)] = Fraction(_unit_poly(c, 12, 6 + p, one), k)
        q = pairs.index(tuple(m for m in range(4) if m not in (i, j)))
        psi[(i, j)] = Fraction(_unit_poly(c, 12, q, one * (-1) ** (i + j) * X[i] * X[j]), k)
    return CechCochain(setup.tp, 2, 12, phi), CechCochain(setup.tp, 2, 12, psi)
