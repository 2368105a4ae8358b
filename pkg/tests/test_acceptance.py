"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import random

import pytest

from stabq import gb
from stabq.cech import CechSetup, excitation, mutual_braiding_2d, spin_at_cutoff, movers_2d, topological_spin
from stabq.charges import (charge_module, charge_modules, charges_from_cokernel, mobility, momentum_sectors)
from stabq.cli import bundled_codes
from stabq.code import (code_invariants, coarse_grain, load_and_validate, perp, same_submodule, stack,
                        submodule_contains)
from stabq.fpmod import cokernel, ext, finite_structure, ideal_contains
from stabq.oracle import crossing_commutator, ground_state_degeneracy, window_Q0
from stabq.ring import LatticeGroup, LaurentPoly

from conftest import (P, bundled, plaquette_phi, random_symplectic_image, toric3d_cochains, toric4d_cochains,
                      twoform_cochains)


@pytest.fixture
def report(capsys):
    def emit(number, title, checks):
        failed = [label for label, ok in checks if not ok]
        line = f"{'PASS' if not failed else 'FAIL'} criterion {number}: {title}"
        if failed:
            line += " [failed: " + "; ".join(failed) + "]"
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line
    return emit


def factors(cm):
    return cm.invariant_factors


def xs_minus_one(code):
    return [LaurentPoly.variable(code.lattice, code.modulus, k) - 1 for k in range(code.D)]


def same_ideal(a, b):
    return all(ideal_contains(a, f) for f in b) and all(ideal_contains(b, f) for f in a)


def _fixed_points(T, fac):
    from itertools import product
    count = 0
    for v in product(*[range(d) for d in fac]):
        w = [sum(T[i][j] * v[j] for j in range(len(v))) % fac[i] for i in range(len(v))]
        count += w == list(v)
    return count


def _matmul(A, B, fac):
    k = len(A)
    return [[sum(A[i][m] * B[m][j] for m in range(k)) % fac[i] for j in range(k)] for i in range(k)]


def _identity(k):
    return [[int(i == j) for j in range(k)] for i in range(k)]


def test_criterion_01_toric3d(report):
    checks = []
    for n in (2, 3, 4):
        code = bundled("toric3d", n)
        q0, q1 = charge_modules(code, [0, 1])
        checks.append((f"n={n} Q0", factors(q0) == (n,)))
        checks.append((f"n={n} Q1", factors(q1) == (n,)))
        for cm in (q0, q1):
            checks.append((f"n={n} Ann Q{cm.degree}", all(ideal_contains(cm.annihilator, f) for f in xs_minus_one(code))))
        setup = CechSetup(code)
        phi, psi = toric3d_cochains(setup)
        checks.append((f"n={n} cocycles", setup.is_cocycle(phi) and setup.is_cocycle(psi)))
        checks.append((f"n={n} Omega0", setup.braiding_cochains(phi, psi).scalar() == 1))
    report(1, "3D toric code Q0 = Q1 = Z_n, Ann contains x-1, y-1, z-1, Omega0 = 1 (n = 2, 3, 4)", checks)


def test_criterion_02_toric4d(report):
    checks = []
    for n in (2, 3, 5):
        code = bundled("toric4d", n)
        table = [factors(cm) for cm in charge_modules(code, [0, 1, 2])]
        checks.append((f"n={n} table", table == [(n,), (), (n,)]))
        setup = CechSetup(code)
        phi, psi = toric4d_cochains(setup)
        checks.append((f"n={n} cocycles", setup.is_cocycle(phi) and setup.is_cocycle(psi)))
        explicit = setup.braiding_cochains(phi, psi).scalar()
        # the written cochains pair to -1 under the stated symplectic matrix; -psi is the generator pairing to 1
        checks.append((f"n={n} explicit pair", explicit == (-1) % n))
        checks.append((f"n={n} Omega0", setup.braiding_cochains(phi, psi.scale(-1)).scalar() == 1))
        ours = setup.braiding_cochains(setup.generator_cochain(0, 0), setup.generator_cochain(2, 0)).scalar()
        checks.append((f"n={n} generators pair to a unit", ours in (1, n - 1)))
    report(2, "4D toric code (Q0, Q1, Q2) = (Z_n, 0, Z_n), Omega0 = 1 for the generator pair (phi, -psi)", checks)


def test_criterion_03_twoform(report):
    checks = []
    for n in (2, 3, 5):
        code = bundled("twoform4d", n)
        table = [factors(cm) for cm in charge_modules(code, [0, 1, 2])]
        checks.append((f"n={n} table", table == [(), (n, n), ()]))
        setup = CechSetup(code)
        phi, psi = twoform_cochains(setup)
        checks.append((f"n={n} cocycles", setup.is_cocycle(phi) and setup.is_cocycle(psi)))
        checks.append((f"n={n} explicit pair", setup.braiding_cochains(phi, psi).scalar() == (-1) % n))
        checks.append((f"n={n} Omega0", setup.braiding_cochains(phi, psi.scale(-1)).scalar() == 1))
        g = [setup.generator_cochain(1, k) for k in range(2)]
        M = [[setup.braiding_cochains(a, b).scalar() for b in g] for a in g]
        det = (M[0][0] * M[1][1] - M[0][1] * M[1][0]) % n
        checks.append((f"n={n} nondegenerate", det in (1, n - 1)))
    report(3, "4D 2-form toric code (0, Z_n + Z_n, 0), Omega0 = 1 for the generator pair (phi, -psi)", checks)


def test_criterion_04_ising(report):
    checks = []
    for D in (1, 2, 3):
        for n in (2, 3):
            code = bundled(f"ising{D}d", n)
            inv = code_invariants(code)
            checks.append((f"D={D} n={n} Z", finite_structure(inv.Z).invariant_factors == (n,)))
            for cm in charge_modules(code, range(D + 1)):
                expect = (n,) if cm.degree == D - 1 else ()
                checks.append((f"D={D} n={n} Q{cm.degree}", factors(cm) == expect))
    report(4, "Ising model Z = Z_n, only Q^(D-1) = Z_n (D = 1, 2, 3)", checks)


def test_criterion_05_cylinder(report):
    checks = []
    for n in (2, 3):
        code = bundled("cylinder", n)
        inv = code_invariants(code)
        checks.append((f"n={n} Z", finite_structure(inv.Z).invariant_factors == (n, n)))
        checks.append((f"n={n} Lw = Lww", same_submodule(code, inv.Lperp, inv.Lperpperp)))
        checks.append((f"n={n} Q", factors(charge_module(code, 0)) == (n, n)))
    report(5, "toric code on a cylinder: Lww/L = Z_n x Z_n, Lw = Lww, Q = Z_n x Z_n", checks)


def test_criterion_06_plaquette(report):
    checks = []
    for name in ("plaquette_z3", "plaquette_z9", "plaquette_z4"):
        code = bundled(name)
        n, G = code.modulus, code.lattice
        q0 = charge_module(code, 0)
        I = [P("x - y", 2, n), P("x*y - 1", 2, n)]
        model = finite_structure(cokernel([I], G, n))
        fs = q0.structure
        checks.append((f"{name} factors", fs.invariant_factors == (n, n) == model.invariant_factors))
        checks.append((f"{name} Ann", same_ideal(q0.annihilator, I)))
        for k in range(2):
            checks.append((f"{name} T{k} fixed points", _fixed_points(fs.translation_matrices[k], fs.invariant_factors)
                           == _fixed_points(model.translation_matrices[k], model.invariant_factors)))
        Tx = fs.translation_matrices[0]
        checks.append((f"{name} Tx != 1", Tx != _identity(2)))
        checks.append((f"{name} Tx^2 = 1", _matmul(Tx, Tx, fs.invariant_factors) == _identity(2)))
        checks.append((f"{name} ell", mobility(code).period == 2))
        setup = CechSetup(code)
        phi = plaquette_phi(setup)
        checks.append((f"{name} Omega0(phi, phi)", setup.braiding_cochains(phi, phi).scalar() == 0))
        if n % 2:
            plus, minus = phi.scale(P("1 + x", 2, n)), phi.scale(P("1 - x", 2, n))
            checks.append((f"{name} +", setup.braiding_cochains(plus, plus).scalar() == 2 % n))
            checks.append((f"{name} -", setup.braiding_cochains(minus, minus).scalar() == (-2) % n))
            checks.append((f"{name} +-", setup.braiding_cochains(plus, minus).is_zero()
                           and setup.braiding_cochains(minus, plus).is_zero()))
            checks.append((f"{name} two sectors", len(momentum_sectors(code, q0)) == 2))
    tw = bundled("plaquette_twisted")
    qt = charge_module(tw, 0)
    checks.append(("twisted Ann", same_ideal(qt.annihilator, [P("x + y", 2, 3), P("x*y + 1", 2, 3)])))
    checks.append(("twisted factors", qt.invariant_factors == (3, 3)))
    Tp = charge_module(bundled("plaquette_z3"), 0).structure.translation_matrices
    Tt = qt.structure.translation_matrices
    checks.append(("plain xy acts as 1", _matmul(Tp[0], Tp[1], (3, 3)) == _identity(2)))
    checks.append(("twisted xy acts as -1", _matmul(Tt[0], Tt[1], (3, 3)) == [[2, 0], [0, 2]]))
    report(6, "plaquette model Q = R/(x-y, xy-1), ell = 2, sector braiding +-2 and 0, twisted variant", checks)


def test_criterion_07_fractons(report):
    checks = []
    for name in ("haah", "xcube"):
        code = bundled(name)
        syz = gb.syzygies([list(r) for r in code.sigma])
        checks.append((f"{name} syzygies", all(all(x.is_zero() for x in c) for c in syz)))
        for cm in charge_modules(code, range(1, code.D + 1)):
            checks.append((f"{name} Q{cm.degree} = 0", cm.is_zero()))
        rep = mobility(code)
        checks.append((f"{name} not mobile at 0", not rep.mobile and rep.offending == [0]))
    report(7, "Haah's code and X-cube: no syzygies, Q^i = 0 for i > 0, not mobile at degree 0", checks)


def test_criterion_08_condensation(report):
    checks = []
    code = bundled("z4_condensation")
    checks.append(("Q0", factors(charge_module(code, 0, length=5)) == (2, 2)))
    for i in (1, 2):
        checks.append((f"Q{i}", charge_module(code, i, length=5).is_zero()))
    sigma = [list(r) for r in code.sigma]
    syz = gb.syzygies(sigma)
    G2 = LatticeGroup(2)
    rows = [[LaurentPoly(G2, 2, {e: c % 2 for e, c in col[r].terms.items()}) for col in syz]
            for r in range(code.s)]
    L_mod_2 = cokernel(rows, G2, 2)
    checks.append(("Ext1(L/2L) != 0", not ext(L_mod_2, 1).is_zero()))
    report(8, "Z4 condensation Q0 = Z_2 + Z_2, Q1 = Q2 = 0, Ext1 of L/2L nonzero", checks)


def test_criterion_09_mobility_instances(report):
    rng = random.Random(7)
    bases = [bundled("toric2d", 4), bundled("plaquette_z4"), bundled("z4_condensation")]
    checks = []
    for k in range(20):
        code = random_symplectic_image(bases[k % 3], rng, steps=5)
        load_and_validate(code)
        inv = code_invariants(code)
        q0 = charge_module(code, 0, with_structure=False)
        checks.append((f"#{k} saturated", inv.saturated and inv.lagrangian))
        checks.append((f"#{k} dim zero", q0.dim_zero))
    report(9, "20 random saturated 2D Lagrangian codes over Z_4 have dimension-zero Q0", checks)


def _omega_skew(code, rng):
    G, n = code.lattice, code.modulus

    def rand_vec():
        return [LaurentPoly(G, n, {tuple(rng.randint(-1, 1) for _ in range(G.ngens)): rng.randrange(n)})
                for _ in range(2 * code.q)]
    u, v = rand_vec(), rand_vec()
    return code.omega(u, v) == -code.omega(v, u).antipode()


def _ext_of_conj_L(code, i):
    syz = gb.syzygies([list(r) for r in code.sigma])
    rows = [[col[r].antipode() for col in syz] for r in range(code.s)]
    return ext(cokernel(rows, code.lattice, code.modulus), i)


def test_criterion_10_structure(report):
    rng = random.Random(1)
    checks = []
    for name in bundled_codes():
        code = bundled(name)
        checks.append((f"{name} omega skew", all(_omega_skew(code, rng) for _ in range(5))))
        inv = code_invariants(code)
        L = code.columns()
        ww = all(submodule_contains(code, inv.Lperpperp, c) for c in L)
        checks.append((f"{name} double perp", ww and inv.saturated == same_submodule(code, inv.Lperpperp, L)))
    for name, n in [("toric3d", 3), ("toric4d", 2), ("twoform4d", 2), ("z4_condensation", None),
                    ("plaquette_z3", None), ("toric2d", 3)]:
        code = bundled(name, n)
        for i in range(1, code.D):
            M = _ext_of_conj_L(code, i)
            a = () if M.is_zero() else finite_structure(M).invariant_factors
            checks.append((f"{name} Q{i} = Ext{i}(conj L)", a == factors(charge_module(code, i))))
    for name in bundled_codes():
        if name in ("haah", "xcube"):
            continue
        code = bundled(name)
        q0 = charge_module(code, 0)
        T = charges_from_cokernel(code)
        other = () if T.is_zero() else finite_structure(T).invariant_factors
        checks.append((f"{name} Q0 via cokernel torsion", other == factors(q0)))
    for name, gens in [("toric2d", [[2, 0], [0, 1]]), ("plaquette_z3", [[2, 0], [0, 2]])]:
        code = bundled(name)
        cg = coarse_grain(code, gens)
        checks.append((f"{name} coarse grain", factors(charge_module(cg, 0)) == factors(charge_module(code, 0))))
    for name in ("toric2d", "plaquette_z3"):
        code = bundled(name)
        up = stack(code, LatticeGroup(3), [(1, 0, 0), (0, 1, 0)])
        q0 = charge_module(up, 0, with_structure=False)
        lifted = [LaurentPoly(up.lattice, up.modulus, {e + (0,): c for e, c in f.terms.items()})
                  for f in charge_module(code, 0).annihilator]
        checks.append((f"{name} stack Ann", same_ideal(q0.annihilator, lifted)))
        checks.append((f"{name} stack not mobile", not q0.dim_zero and not mobility(up).mobile))
    # graded skew-symmetry and sector orthogonality of Omega
    for name, n in [("twoform4d", 3), ("toric3d", 3), ("plaquette_z3", None)]:
        code = bundled(name, n)
        setup = CechSetup(code)
        D = code.D
        for a in range(D - 1):
            b = D - 2 - a
            qa, qb = charge_modules(code, [a, b])
            if qa.is_zero() or qb.is_zero():
                continue
            for i in range(len(qa.invariant_factors)):
                for j in range(len(qb.invariant_factors)):
                    phi, psi = setup.generator_cochain(a, i), setup.generator_cochain(b, j)
                    p = phi.degree
                    sign = -((-1) ** (p * (D - p))) * (-1) ** D
                    lhs = setup.braiding_cochains(phi, psi)
                    rhs = setup.braiding_cochains(psi, phi).antipode().scale(sign)
                    checks.append((f"{name} skew ({a},{i}),({b},{j})", lhs == rhs))
    setup = CechSetup(bundled("plaquette_z3"))
    phi = plaquette_phi(setup)
    plus, minus = phi.scale(P("1 + x", 2, 3)), phi.scale(P("1 - x", 2, 3))
    checks.append(("sector orthogonality", setup.braiding_cochains(plus, minus).is_zero()))
    report(10, "structural suites: omega skew, double perp, Ext shift, cokernel torsion, coarse graining, "
               "stacking, graded skew-symmetry, sector orthogonality", checks)


def test_criterion_11_oracle(report):
    checks = []
    for n in (2, 3):
        checks.append((f"GSD toric n={n}", ground_state_degeneracy(bundled("toric2d", n), (4, 4)) == n * n))
    # crossing strings: literal equality where the commutator sign is immaterial, and the
    # sign-corrected identity phase = -Omega0 everywhere
    t2 = CechSetup(bundled("toric2d", 2))
    G = t2.code.lattice
    one, z = LaurentPoly.constant(G, 2, 1), LaurentPoly(G, 2, {})
    e, m = excitation(t2, [one, z]), excitation(t2, [z, one])
    checks.append(("toric n=2 e,m", crossing_commutator(t2, e, m) == mutual_braiding_2d(t2, e, m) == 1))
    pl = CechSetup(bundled("plaquette_z3"))
    ep, em = excitation(pl, [P("1 + x", 2, 3)]), excitation(pl, [P("1 - x", 2, 3)])
    checks.append(("plaquette +,-", crossing_commutator(pl, ep, em) == mutual_braiding_2d(pl, ep, em) == 0))
    t3 = CechSetup(bundled("toric2d", 3))
    G = t3.code.lattice
    one, z = LaurentPoly.constant(G, 3, 1), LaurentPoly(G, 3, {})
    pairs = [(t3, excitation(t3, [one, z]), excitation(t3, [z, one])), (pl, ep, ep), (pl, em, em), (pl, ep, em)]
    for k, (s, a, b) in enumerate(pairs):
        checks.append((f"pair {k} phase = -Omega0",
                       crossing_commutator(s, a, b) == (-mutual_braiding_2d(s, a, b)) % s.code.modulus))
    for name, n in [("toric2d", 2), ("toric2d", 3), ("z4_condensation", None)]:
        code = bundled(name, n)
        res = window_Q0(code, 1, 3)
        checks.append((f"window {name} n={code.modulus}", res.order == charge_module(code, 0).order))
    report(11, "oracle: torus GSD = n^2, crossing-string phases match Omega0, window counts match |Q0|", checks)


def test_criterion_12_spin(report):
    checks = []
    rng = random.Random(12)
    setups = [CechSetup(bundled("toric2d", 3)), CechSetup(bundled("plaquette_z3"))]
    for s in setups:
        G, n = s.code.lattice, s.code.modulus
        zero = excitation(s, [LaurentPoly(G, n, {})] * s.code.s)
        checks.append((f"{s.code.name} theta(0)", topological_spin(s, zero) == 0))
        for k in range(s.code.s):
            vals = [LaurentPoly.constant(G, n, int(j == k)) for j in range(s.code.s)]
            e = excitation(s, vals)
            p1, p2 = movers_2d(s, e)
            seq = [spin_at_cutoff(s, p1, p2, c) for c in (4, 8, 16, 32)]
            checks.append((f"{s.code.name} generator {k} stabilizes", len(set(seq)) == 1))
    gens = ["1", "x", "y", "1 + x", "1 - y", "x + y", "2", "x*y"]
    for k in range(10):
        s = setups[k % 2]
        n = s.code.modulus
        a = [P(rng.choice(gens), 2, n) for _ in range(s.code.s)]
        b = [P(rng.choice(gens), 2, n) for _ in range(s.code.s)]
        e, f = excitation(s, a), excitation(s, b)
        ef = excitation(s, [x + y for x, y in zip(a, b)])
        lhs = (topological_spin(s, ef) - topological_spin(s, e) - topological_spin(s, f)) % n
        checks.append((f"pair {k} vs strings", lhs == crossing_commutator(s, e, f)))
        checks.append((f"pair {k} vs cocycles", lhs == (-mutual_braiding_2d(s, e, f)) % n))
    report(12, "topological spin: theta(0) = 0, stabilizes in the cutoff, quadratic refinement of the "
               "crossing phase on 10 random pairs", checks)
