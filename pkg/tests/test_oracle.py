import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from stabq.cech import CechSetup, excitation, mutual_braiding_2d
from stabq.code import make_code
from stabq.oracle import (NotStabilized, commutator_phase, crossing_commutator, crossing_strings,
                          ground_state_degeneracy, howell, nullspace, span_order, torus, window_Q0)
from stabq.ring import LatticeGroup, LaurentPoly

from conftest import P, bundled


def _matmul(A, x, n):
    return [sum(a * b for a, b in zip(row, x)) % n for row in A]


def test_howell_identity():
    I = [[int(i == j) for j in range(3)] for i in range(3)]
    assert howell(I, 5) == I


def test_howell_zero_divisor():
    assert howell([[2]], 4) == [[2]]
    assert nullspace([[2]], 4) == [[2]]
    assert span_order([[2]], 4) == 2


def test_howell_adds_annihilator_rows():
    # span of (2, 1) over Z_4 contains (0, 2) = 2 * (2, 1)
    H = howell([[2, 1]], 4)
    assert span_order(H, 4) == 4
    assert [0, 2] in H or any(r[0] == 0 for r in H)


small_mats = st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3), min_size=1, max_size=3)


@given(small_mats)
def test_rank_nullity_exhaustive(A):
    n = 4
    kernel = [x for x in product(range(n), repeat=3) if not any(_matmul(A, x, n))]
    image = {tuple(_matmul(A, x, n)) for x in product(range(n), repeat=3)}
    N = nullspace(A, n)
    assert all(not any(_matmul(A, row, n)) for row in N)
    assert span_order(N, n) == len(kernel)
    cols = [[A[r][c] for r in range(len(A))] for c in range(3)]
    assert span_order(cols, n) == len(image)
    assert len(image) * len(kernel) == n ** 3


def test_random_6x6_over_z4():
    rng = random.Random(11)
    n = 4
    for _ in range(5):
        A = [[rng.randrange(n) for _ in range(6)] for _ in range(6)]
        N = nullspace(A, n)
        assert all(not any(_matmul(A, row, n)) for row in N)
        cols = [[A[r][c] for r in range(6)] for c in range(6)]
        assert span_order(cols, n) * span_order(N, n) == n ** 6


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [3, 4, 5])
def test_toric_gsd(n, k):
    assert ground_state_degeneracy(bundled("toric2d", n), (k, k)) == n * n


def test_trivial_code_gsd():
    g = LatticeGroup(2)
    z = LaurentPoly(g, 3, {})
    code = make_code("empty", g, [3], [[z], [z]])
    assert ground_state_degeneracy(code, (2, 2)) == 3 ** 4


def test_torus_site_count():
    inst = torus(bundled("toric3d", 2), (2, 2, 2))
    assert len(inst.sites) == 8


def test_disjoint_supports_commute():
    code = bundled("toric2d", 3)
    a = [{"site": [0, 0], "pauli": [1, 0, 0, 0]}]
    b = [{"site": [5, 5], "pauli": [0, 0, 1, 0]}]
    assert commutator_phase(code, a, b) == 0


def test_single_site_commutator_sign():
    code = bundled("toric2d", 3)
    a = [{"site": [0, 0], "pauli": [1, 0, 0, 0]}]
    b = [{"site": [0, 0], "pauli": [0, 0, 1, 0]}]
    assert commutator_phase(code, a, b) == (-commutator_phase(code, b, a)) % 3
    assert commutator_phase(code, a, b) != 0


@pytest.mark.parametrize("n", [2, 3, 5])
def test_toric_crossing_strings(n):
    setup = CechSetup(bundled("toric2d", n))
    G = setup.code.lattice
    one, z = LaurentPoly.constant(G, n, 1), LaurentPoly(G, n, {})
    e, m = excitation(setup, [one, z]), excitation(setup, [z, one])
    a, b = crossing_strings(setup, e, m, radius=5)
    assert a and b
    phase = crossing_commutator(setup, e, m, radius=5)
    assert phase in (1, n - 1)
    assert crossing_commutator(setup, m, e, radius=5) == phase
    assert crossing_commutator(setup, e, e, radius=5) == 0
    assert phase == (-mutual_braiding_2d(setup, e, m)) % n


def test_plaquette_sector_strings_commute():
    setup = CechSetup(bundled("plaquette_z3"))
    plus = excitation(setup, [P("1 + x", 2, 3)])
    minus = excitation(setup, [P("1 - x", 2, 3)])
    assert crossing_commutator(setup, plus, minus) == 0
    assert crossing_commutator(setup, minus, plus) == 0


@pytest.mark.parametrize("name,n", [("toric2d", 3), ("plaquette_z3", None), ("plaquette_z9", None)])
def test_commutator_matches_braiding(name, n):
    setup = CechSetup(bundled(name, n))
    s = setup.code
    rng = random.Random(5)
    gens = ["1", "x", "y", "1 + x", "1 - y", "x + y"]
    for _ in range(3):
        e = excitation(setup, [P(rng.choice(gens), 2, s.modulus) for _ in range(s.s)])
        f = excitation(setup, [P(rng.choice(gens), 2, s.modulus) for _ in range(s.s)])
        assert crossing_commutator(setup, e, f) == (-mutual_braiding_2d(setup, e, f)) % s.modulus


@pytest.mark.parametrize("name,n,expect", [("toric2d", 2, 4), ("toric2d", 3, 9), ("z4_condensation", None, 4),
                                           ("plaquette_z3", None, 9)])
def test_window_counts(name, n, expect):
    res = window_Q0(bundled(name, n), 1, 3)
    assert res.stabilized and res.order == expect


def test_window_trivial_code():
    g = LatticeGroup(2)
    z = LaurentPoly(g, 3, {})
    code = make_code("empty", g, [3], [[z], [z]])
    assert window_Q0(code, 1, 2).order == 1


def test_window_needs_two_steps():
    with pytest.raises(NotStabilized):
        window_Q0(bundled("toric2d", 2), 1, 3, steps=1)
