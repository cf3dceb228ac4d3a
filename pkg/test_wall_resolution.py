import itertools
import random

import pytest

import lattice_resolution
from group_model import HolonomyAction
from wall_resolution import WallChain, WallResolution

EXAMPLE_ROWS = [[0, 1, 0, 0], [-1, 0, 0, 1], [0, 0, -1, 1], [0, 0, 0, 1]]

# Images of e^s_S written as sums of x^a t1^v1 ... t4^v4 e_T, keyed by S
D1_ODD = {
    "": "x e - e",
    "1": "e1 - x e2",
    "2": "x t1^-1 t4 e1 + e2 - x e4",
    "3": "x t3^-1 t4 e3 + e3 - x e4",
    "4": "- x e4 + e4",
    "12": "x t1^-1 t4 e12 - e12 + x e24",
    "13": "- e13 - x t3^-1 t4 e23 + x e24",
    "14": "- e14 + x e24",
    "23": "x t1^-1 t3^-1 t4^2 e13 - x t1^-1 t4 e14 - e23 + x t3^-1 t4 e34",
    "24": "- x t1^-1 t4 e14 - e24",
    "34": "- x t3^-1 t4 e34 - e34",
    "123": "x t1^-1 t3^-1 t4^2 e123 + e123 - x t1^-1 t4 e124 - x t3^-1 t4 e234",
    "124": "- x t1^-1 t4 e124 + e124",
    "134": "e134 + x t3^-1 t4 e234",
    "234": "- x t1^-1 t3^-1 t4^2 e134 + e234",
    "1234": "- x t1^-1 t3^-1 t4^2 e1234 - e1234",
}

D1_EVEN = {
    "": "x^3 e + x^2 e + x e + e",
    "1": "x^2 t1^-1 t4 e1 - e1 + x^3 t2^-1 t4 e2 - x e2 - x^3 e4 - x^2 e4",
    "2": "- x^3 e1 + x t1^-1 t4 e1 + x^2 t2^-1 t4 e2 - e2 - x^2 e4 - x e4",
    "3": "x^3 t3^-1 t4 e3 - x^2 e3 + x t3^-1 t4 e3 - e3 - x^3 e4 - x e4",
    "4": "- x^3 e4 - x^2 e4 - x e4 - e4",
    "12": "x^3 t2^-1 t4 e12 + x^2 t1^-1 t2^-1 t4^2 e12 + x t1^-1 t4 e12 + e12 "
          "- x^3 e14 - x^2 t1^-1 t4 e14 + x^2 t2^-1 t4 e24 + x e24",
    "13": "- x^2 t1^-1 t4 e13 + e13 + x^3 t2^-1 t3^-1 t4^2 e23 - x t3^-1 t4 e23 "
          "- x^3 t2^-1 t4 e24 + x e24 + x^3 t3^-1 t4 e34 - x^2 e34",
    "14": "- x^2 t1^-1 t4 e14 + e14 - x^3 t2^-1 t4 e24 + x e24",
    "23": "- x^3 t3^-1 t4 e13 + x t1^-1 t3^-1 t4^2 e13 + x^3 e14 - x t1^-1 t4 e14 "
          "- x^2 t2^-1 t4 e23 + e23 - x^2 e34 + x t3^-1 t4 e34",
    "24": "- x^2 t2^-1 t4 e24 + e24 + x^3 e14 - x t1^-1 t4 e14",
    "34": "- x^3 t3^-1 t4 e34 + x^2 e34 - x t3^-1 t4 e34 + e34",
    "123": "x^3 t2^-1 t3^-1 t4^2 e123 - x^2 t1^-1 t2^-1 t4^2 e123 + x t1^-1 t3^-1 t4^2 e123 - e123 "
           "- x^3 t2^-1 t4 e124 - x t1^-1 t4 e124 + x^3 t3^-1 t4 e134 - x^2 t1^-1 t4 e134 "
           "+ x^2 t2^-1 t4 e234 - x t3^-1 t4 e234",
    "124": "- x^3 t2^-1 t4 e124 - x^2 t1^-1 t2^-1 t4^2 e124 - x t1^-1 t4 e124 - e124",
    "134": "x^2 t1^-1 t4 e134 - e134 - x^3 t2^-1 t3^-1 t4^2 e234 + x t3^-1 t4 e234",
    "234": "x^3 t3^-1 t4 e134 - x t1^-1 t3^-1 t4^2 e134 + x^2 t2^-1 t4 e234 - e234",
    "1234": "- x^3 t2^-1 t3^-1 t4^2 e1234 + x^2 t1^-1 t2^-1 t4^2 e1234 "
            "- x t1^-1 t3^-1 t4^2 e1234 + e1234",
}

D2_EVEN = {
    "1": "e14",
    "2": "x^3 e14",
    "3": "x^2 e34 + e34",
    "12": "- x^3 t2^-1 t4 e124 - e124",
    "13": "x^2 t1^-1 t4 e134 - t4 e134 - e134",
    "23": "x^3 t3^-1 t4 e134 + x^2 t2^-1 t4 e234 - e234",
    "123": "- x^3 t2^-1 t3^-1 t4^2 e1234 + x^2 t1^-1 t2^-1 t4^2 e1234 + t4 e1234 + e1234",
}

D2_ODD = {
    "2": "x^3 e14 + e24",
    "3": "x^2 e34 + e34",
    "12": "- x^3 t2^-1 t4 e124 - e124",
    "13": "x^2 t1^-1 t4 e134 - e134",
    "23": "x^3 t3^-1 t4 e134 + x^2 t2^-1 t4 e234 - t4 e234 - e234",
    "123": "- x^3 t2^-1 t3^-1 t4^2 e1234 + x^2 t1^-1 t2^-1 t4^2 e1234 + t4 e1234 + e1234",
}

ALL_CUBES = [S for r in range(5) for S in itertools.combinations(range(1, 5), r)]


@pytest.fixture(scope="module")
def group():
    return HolonomyAction(EXAMPLE_ROWS, 4, label="min.27-1.5")


@pytest.fixture(scope="module")
def resolution(group):
    return WallResolution(group)


def cube(key):
    return tuple(int(c) for c in key)


def parse_chain(group, text, twist):
    """Read a chain written as signed monomials x^a t_k^v ... e_S."""
    chain = WallChain()
    sign, power, exponents = 1, 0, [0] * group.n
    for token in text.split():
        if token in ("+", "-"):
            sign = 1 if token == "+" else -1
        elif token.startswith("x"):
            power = int(token[2:]) if "^" in token else 1
        elif token.startswith("t"):
            index, _, exponent = token[1:].partition("^")
            exponents[int(index) - 1] = int(exponent) if exponent else 1
        elif token.startswith("e"):
            chain.add_term(group.from_coset(power, exponents), cube(token[1:]), twist, sign)
            sign, power, exponents = 1, 0, [0] * group.n
        else:
            raise ValueError(f"Unexpected token {token}")
    return chain


@pytest.mark.parametrize("twist", [1, 3])
def test_d1_on_odd_twists(group, resolution, twist):
    for key, text in D1_ODD.items():
        assert resolution.differential(1, cube(key), twist) == parse_chain(group, text, twist - 1), key


@pytest.mark.parametrize("twist", [2, 4])
def test_d1_on_even_twists(group, resolution, twist):
    for key, text in D1_EVEN.items():
        assert resolution.differential(1, cube(key), twist) == parse_chain(group, text, twist - 1), key


@pytest.mark.parametrize("twist, golden", [(2, D2_EVEN), (4, D2_EVEN), (3, D2_ODD), (5, D2_ODD)])
def test_d2(group, resolution, twist, golden):
    for S in ALL_CUBES:
        key = "".join(str(i) for i in S)
        expected = parse_chain(group, golden[key], twist - 2) if key in golden else WallChain()
        assert resolution.differential(2, S, twist) == expected, key


def test_higher_differentials_vanish(resolution):
    for s in range(3, 6):
        for k in range(3, s + 1):
            for S in ALL_CUBES:
                assert not resolution.differential(k, S, s)


def test_ranks(resolution):
    assert [resolution.rank(m) for m in range(7)] == [1, 5, 11, 15, 16, 16, 16]
    assert resolution.generators(2)[:3] == [((), 2), ((1,), 1), ((2,), 1)]


def test_augmentation_is_compatible_with_cyclic_boundary(resolution):
    for s in range(1, 6):
        assert resolution.check_cyclic_compatibility(s)


def test_differential_relations(resolution):
    for s in range(0, 5):
        for S in ALL_CUBES:
            for k in range(0, s + 1):
                assert resolution.check_relation(k, S, s), (k, S, s)


def test_total_differential_squares_to_zero(resolution):
    for m in range(1, 6):
        for S, s in resolution.generators(m):
            assert not resolution.apply_total(resolution.total_differential(S, s)), (S, s)


def test_homotopy_contracts_lattice_direction(group, resolution):
    rng = random.Random(31)
    for _ in range(20):
        chain = WallChain()
        for _ in range(3):
            g = group.element([rng.randint(-2, 2) for _ in range(4)], rng.randrange(4))
            chain.add_term(g, rng.choice(ALL_CUBES[1:]), 1, rng.randint(-2, 2))
        total = WallChain()
        total.add_chain(resolution.homotopy_f(resolution.apply(0, chain)))
        total.add_chain(resolution.apply(0, resolution.homotopy_f(chain)))
        assert total == chain


def test_homotopy_matches_lattice_homotopy(group, resolution):
    rng = random.Random(32)
    for _ in range(20):
        a, v = rng.randrange(4), [rng.randint(-3, 3) for _ in range(4)]
        S = rng.choice(ALL_CUBES)
        g = group.from_coset(a, v)
        lattice = lattice_resolution.contracting_homotopy_h(lattice_resolution.monomial(4, v, S), 4)
        for coefficient in (1, -3):
            expected = WallChain()
            for (w, T), value in lattice.items():
                expected.add_term(group.from_coset(a, w), T, 2, coefficient * value)
            assert resolution.homotopy_f(WallChain({(g, S, 2): coefficient})) == expected


def test_parity_stability(resolution):
    for k in (1, 2):
        for s in (k, k + 1):
            for S in ALL_CUBES:
                assert resolution.parity_stable(k, S, s), (k, S, s)


def test_reuse_matches_direct_construction(group):
    reused = WallResolution(group)
    direct = WallResolution(group, reuse_periodic=False)
    for m in range(1, 7):
        for S, s in reused.generators(m):
            assert reused.total_differential(S, s) == direct.total_differential(S, s)
    reused.assemble_resolution(6)
    assert reused.recheck_window_edge(6) > 0


def test_trivial_holonomy():
    group = HolonomyAction([[1, 0], [0, 1]], 1)
    resolution = WallResolution(group)
    assert not resolution.differential(1, (), 1)
    assert resolution.differential(1, (), 2) == WallChain({(group.identity, (), 1): 1})
    for m in range(1, 5):
        for S, s in resolution.generators(m):
            assert not resolution.apply_total(resolution.total_differential(S, s))


def test_assemble_resolution_shapes(resolution):
    maps = resolution.assemble_resolution(3)
    assert [free_map.degree for free_map in maps] == [1, 2, 3]
    assert [len(free_map.sources) for free_map in maps] == [5, 11, 15]
    assert maps[0].targets == [((), 0)]
    with pytest.raises(ValueError):
        resolution.assemble_resolution(0)
