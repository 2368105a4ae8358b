import pytest
from hypothesis import given, strategies as st

from stabq.charges import charge_module, mobility
from stabq.cli import bundled_codes
from stabq.code import (NotIsotropic, ValidationError, code_invariants, coarse_grain, crt_decompose,
                        direct_sum, load_and_validate, make_code, perp, same_submodule, stack,
                        submodule_contains)
from stabq.fpmod import finite_structure
from stabq.oracle import ground_state_degeneracy
from stabq.ring import LatticeGroup, LaurentPoly

from conftest import P, bundled


def factors(M):
    return () if M.is_zero() else finite_structure(M).invariant_factors


def test_toric3d_loads():
    code = bundled("toric3d")
    load_and_validate(code)
    assert code.D == 3 and code.q == 3


def test_conjugate_pair_not_isotropic():
    g = LatticeGroup(1)
    one, zero = P("1", 1, 3), P("0", 1, 3)
    code = make_code("pair", g, [3], [[one, zero], [zero, one]])
    with pytest.raises(NotIsotropic) as info:
        load_and_validate(code)
    assert info.value.columns == (0, 1)


def test_cylinder_torsion_direction():
    code = bundled("cylinder")
    load_and_validate(code)
    assert code.lattice.torsion == (3,) and code.D == 1


def test_perp_examples():
    code = bundled("toric2d", 3)
    L = code.columns()
    assert same_submodule(code, perp(code, L), L)
    full = perp(code, [])
    assert len(full) == 2 * code.q
    cyl = bundled("cylinder")
    inv = code_invariants(cyl)
    assert same_submodule(cyl, inv.Lperp, inv.Lperpperp)
    assert factors(inv.S) == ()


@pytest.mark.parametrize("name", ["ising1d", "ising2d", "ising3d"])
@pytest.mark.parametrize("n", [2, 3])
def test_ising_Z(name, n):
    code = bundled(name, n)
    inv = code_invariants(code)
    assert factors(inv.Z) == (n,)
    e = [P("1", code.D, n), P("0", code.D, n)]
    assert submodule_contains(code, inv.Lperpperp, e)
    assert not submodule_contains(code, code.columns(), e)


@pytest.mark.parametrize("n", [2, 3])
def test_cylinder_invariants(n):
    inv = code_invariants(bundled("cylinder", n))
    assert factors(inv.Z) == (n, n)
    assert factors(inv.S) == ()
    assert not inv.saturated


def test_toric3d_lagrangian():
    inv = code_invariants(bundled("toric3d", 3))
    assert inv.lagrangian and inv.saturated


def test_direct_sum_additive():
    t = bundled("toric2d", 3)
    s = direct_sum(t, t)
    assert charge_module(s, 0).order == 3 ** 4
    assert s.q == 2 * t.q


def test_direct_sum_mixed_moduli_splits_back():
    a, b = bundled("toric2d", 2), bundled("toric2d", 3)
    s = direct_sum(a, b)
    assert s.modulus == 6
    parts = crt_decompose(s)
    assert [p.modulus for p in parts] == [2, 3]
    for part, orig in zip(parts, (a, b)):
        nonzero = [c for c in part.columns() if any(not x.is_zero() for x in c)]
        assert part.q == orig.q
        assert same_submodule(part, nonzero, orig.columns())


def test_crt_prime_power_unchanged():
    code = bundled("z4_condensation")
    assert crt_decompose(code) == [code]


def test_crt_six_against_torus_count():
    six = bundled("toric2d", 6)
    parts = crt_decompose(six)
    assert [p.modulus for p in parts] == [2, 3]
    orders = [charge_module(p, 0).order for p in parts]
    assert orders == [4, 9]
    # independent check on a finite torus over Z_6
    assert ground_state_degeneracy(six, (3, 3)) == orders[0] * orders[1]


def test_stack_identity_and_ising():
    code = bundled("ising1d")
    same = stack(code, code.lattice, [(1,)])
    assert same == code
    up = stack(code, LatticeGroup(2), [(1, 0)])
    q0 = charge_module(up, 0, with_structure=False)
    assert not q0.is_zero() and not q0.dim_zero
    assert charge_module(up, 1).is_zero()


def test_stack_toric_not_mobile():
    up = stack(bundled("toric2d"), LatticeGroup(3), [(1, 0, 0), (0, 1, 0)])
    assert not mobility(up).mobile


def test_stack_rejects_non_injective():
    with pytest.raises(ValidationError):
        stack(bundled("toric2d"), LatticeGroup(2), [(1, 0), (2, 0)])


@pytest.mark.parametrize("name,gens", [
    ("toric2d", [[2, 0], [0, 1]]),
    ("toric2d", [[1, 0], [0, 1]]),
    ("plaquette_z3", [[2, 0], [0, 2]]),
])
def test_coarse_grain_preserves_charges(name, gens):
    code = bundled(name)
    cg = coarse_grain(code, gens)
    load_and_validate(cg)
    index = gens[0][0] * gens[1][1]
    assert cg.q == code.q * index
    assert charge_module(cg, 0).invariant_factors == charge_module(code, 0).invariant_factors


def test_coarse_grained_plaquette_trivial_action():
    cg = coarse_grain(bundled("plaquette_z3"), [[2, 0], [0, 2]])
    fs = charge_module(cg, 0).structure
    I = [[int(i == j) for j in range(2)] for i in range(2)]
    assert all(T == I for T in fs.translation_matrices)


@pytest.mark.parametrize("name", bundled_codes())
def test_bundled_isotropic_and_double_perp(name):
    code = bundled(name)
    load_and_validate(code)
    inv = code_invariants(code)
    L = code.columns()
    assert all(submodule_contains(code, inv.Lperpperp, c) for c in L)
    assert all(submodule_contains(code, inv.Lperp, c) for c in inv.Lperpperp)
    assert inv.saturated == same_submodule(code, inv.Lperpperp, L)


def test_rank_zero_lattice_has_no_Z():
    g = LatticeGroup(0, (3,))
    z = LaurentPoly(g, 3, {})
    code = make_code("ring", g, [3], [[z], [LaurentPoly(g, 3, {(0,): 1, (1,): 2})]])
    assert factors(code_invariants(code).Z) == ()


coef = st.integers(0, 3)
G2 = LatticeGroup(2)
poly2 = st.dictionaries(st.tuples(st.integers(-1, 1), st.integers(-1, 1)), coef, max_size=3).map(
    lambda d: LaurentPoly(G2, 4, d))


@given(st.lists(poly2, min_size=4, max_size=4), st.lists(poly2, min_size=4, max_size=4))
def test_omega_skew(u, v):
    code = make_code("free", G2, [4, 4], [[x] for x in u])
    assert code.omega(u, v) == -code.omega(v, u).antipode()
