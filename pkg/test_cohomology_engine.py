import random
from math import comb

import pytest

import catalog
import cohomology_engine
import exact_linalg
from cohomology_engine import (
    EQUAL,
    EXTENSION_PROBLEM,
    RANK_MISMATCH,
    TORSION_MISMATCH,
    GammaCohomology,
)
from exact_linalg import AbelianGroupInvariants
from group_model import HolonomyAction

EXAMPLE_ROWS = [[0, 1, 0, 0], [-1, 0, 0, 1], [0, 0, -1, 1], [0, 0, 0, 1]]


def G(text):
    return AbelianGroupInvariants.from_string(text)


@pytest.fixture(scope="module")
def example_group():
    return HolonomyAction(EXAMPLE_ROWS, 4, label="min.27-1.5")


@pytest.fixture(scope="module")
def example_report(example_group):
    return cohomology_engine.compare_conjecture(example_group, top_degree=6)


def test_coboundary_diagonals(example_report):
    complex_ = example_report.gamma.complex
    assert complex_.dims[:6] == [1, 5, 11, 15, 16, 16]
    assert complex_.diagonals()[:6] == [
        (0,),
        (1, 1, 2, 4, 0),
        (1, 1, 1, 1, 2, 4) + (0,) * 5,
        (1,) * 6 + (4, 4) + (0,) * 7,
        (1, 1, 1, 1, 2, 2, 2, 2) + (0,) * 8,
        (1,) * 6 + (4, 4) + (0,) * 8,
    ]


def test_example_cohomology(example_report):
    gamma = example_report.gamma
    expected = ["Z", "Z", "Z + Z_4 + Z_2", "Z + Z_4 + Z_2", "Z_4^2", "Z_2^4", "Z_4^2"]
    assert [group.render() for group in gamma.groups] == expected
    assert gamma.tail == (G("Z_4^2"), G("Z_2^4"))


def test_example_e2_rows(example_group):
    e2 = cohomology_engine.e2_page(example_group)
    expected = {
        0: ("Z", "Z_4", "0"),
        1: ("Z", "Z_2", "Z_2"),
        2: ("Z", "Z_2", "Z_4"),
        3: ("Z", "Z_2", "Z_2"),
        4: ("0", "0", "Z_2"),
    }
    for j, (h0, even, odd) in expected.items():
        assert (e2.entry(0, j), e2.entry(2, j), e2.entry(1, j)) == (G(h0), G(even), G(odd)), j
        assert e2.entry(4, j) == G(even) and e2.entry(5, j) == G(odd)


def test_example_e2_diagonals(example_group):
    e2 = cohomology_engine.e2_page(example_group)
    assert e2.diagonals[0] == ((0,), (4,))
    assert e2.diagonals[1] == ((1, 1, 2, 0), (2, 0, 0, 0))
    assert e2.diagonals[2] == ((1, 1, 1, 1, 4, 0), (2, 0, 0, 0, 0, 0))
    assert e2.diagonals[3] == ((1, 1, 2, 0), (2, 0, 0, 0))
    assert e2.diagonals[4] == ((2,), (0,))


def test_second_exterior_power(example_group):
    assert exact_linalg.to_rows(cohomology_engine.exterior_action(example_group, 2)) == [
        [1, 0, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, -1, -1, 0],
        [0, -1, 0, 0, 0, 0],
        [1, 1, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, -1],
    ]


def test_example_comparison(example_report):
    verdicts = {c.degree: c.verdict for c in example_report.degrees}
    assert verdicts == {
        1: EQUAL, 2: EQUAL, 3: EQUAL,
        4: TORSION_MISMATCH, 5: TORSION_MISMATCH, 6: TORSION_MISMATCH,
    }
    assert example_report.e2.degree_sum(4) == G("Z_4 + Z_2^3")
    assert example_report.e2.degree_sum(5) == G("Z_4 + Z_2^3")
    assert example_report.first_failure == 4
    assert not example_report.holds
    assert [c.verdict for c in example_report.tail] == [TORSION_MISMATCH, TORSION_MISMATCH]


def test_rational_cohomology(example_group):
    ranks = cohomology_engine.invariant_ranks(example_group)
    assert ranks == [1, 1, 1, 1, 0]
    assert cohomology_engine.euler_characteristic(ranks) == 0


def test_euler_characteristic_matches_invariants(example_report, example_group):
    free_ranks = [group.free_rank for group in example_report.gamma.groups[:5]]
    ranks = cohomology_engine.invariant_ranks(example_group)
    assert cohomology_engine.euler_characteristic(free_ranks) == cohomology_engine.euler_characteristic(ranks)


def test_torus_ranks_are_binomial():
    for n in range(1, 5):
        group = HolonomyAction(exact_linalg.to_rows(exact_linalg.identity(n)), 1)
        ranks = cohomology_engine.invariant_ranks(group)
        assert ranks == [comb(n, k) for k in range(n + 1)]
        assert cohomology_engine.euler_characteristic(ranks) == 0


def test_free_abelian_cohomology():
    group = HolonomyAction([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 1)
    result = cohomology_engine.gamma_cohomology(group, top_degree=5)
    assert result.groups == [G("Z"), G("Z^3"), G("Z^3"), G("Z"), G("0"), G("0")]
    assert result.tail == (G("0"), G("0"))
    assert cohomology_engine.compare_conjecture(group, top_degree=5).holds


def test_infinite_dihedral_group():
    group = HolonomyAction([[-1]], 2)
    result = cohomology_engine.gamma_cohomology(group, top_degree=5)
    assert result.groups == [G("Z"), G("0"), G("Z_2^2"), G("0"), G("Z_2^2"), G("0")]
    assert result.tail == (G("Z_2^2"), G("0"))
    assert cohomology_engine.compare_conjecture(group, top_degree=5).holds


def test_product_with_circle():
    # Infinite dihedral group times Z, by the Kunneth formula
    group = HolonomyAction([[-1, 0], [0, 1]], 2)
    result = cohomology_engine.gamma_cohomology(group, top_degree=5)
    assert result.groups == [G("Z"), G("Z"), G("Z_2^2"), G("Z_2^2"), G("Z_2^2"), G("Z_2^2")]


def test_tail_needs_window():
    group = HolonomyAction([[-1]], 2)
    result = cohomology_engine.gamma_cohomology(group, top_degree=2, check_periodicity=False)
    assert result.tail is None
    assert len(result.groups) == 3


def test_cyclic_cohomology_with_coefficients():
    sign = exact_linalg.as_matrix([[-1]])
    cyclic = cohomology_engine.cyclic_cohomology_with_coeffs(sign, 2)
    assert (cyclic.h0, cyclic.even, cyclic.odd) == (G("0"), G("0"), G("Z_2"))
    swap = exact_linalg.as_matrix([[0, 1], [1, 0]])
    cyclic = cohomology_engine.cyclic_cohomology_with_coeffs(swap, 2)
    assert (cyclic.h0, cyclic.even, cyclic.odd) == (G("Z"), G("0"), G("0"))
    trivial = cohomology_engine.cyclic_cohomology_with_coeffs(exact_linalg.identity(1), 6)
    assert (trivial.degree(0), trivial.degree(2), trivial.degree(3)) == (G("Z"), G("Z_6"), G("0"))
    with pytest.raises(ValueError):
        cohomology_engine.cyclic_cohomology_with_coeffs(swap, 3)


def test_classify():
    assert cohomology_engine.classify(G("Z + Z_4"), G("Z + Z_4")) == EQUAL
    assert cohomology_engine.classify(G("Z"), G("Z^2")) == RANK_MISMATCH
    assert cohomology_engine.classify(G("Z_4^2"), G("Z_4 + Z_2^3")) == TORSION_MISMATCH
    assert cohomology_engine.classify(G("Z_4"), G("Z_2^2")) == EXTENSION_PROBLEM


def test_rational_check_rejects_inconsistent_ranks():
    group = HolonomyAction([[-1]], 2)
    wrong = GammaCohomology([G("Z"), G("Z"), G("0")], None, None, 1)
    with pytest.raises(cohomology_engine.RationalCheckError):
        cohomology_engine.compare_conjecture(group, top_degree=2, gamma=wrong)


MAX_ENTRY = 4


def _elementary(n, i, j, c):
    matrix = exact_linalg.identity(n)
    matrix[i, j] = c
    return matrix


def _conjugate_block_sum(rng, blocks):
    n = sum(len(block) for block in blocks)
    B = exact_linalg.zeros(n, n)
    offset = 0
    for block in blocks:
        size = len(block)
        B[offset:offset + size, offset:offset + size] = exact_linalg.as_matrix(block)
        offset += size
    # Homotopy cost grows with |entry|
    for _ in range(20):
        P, P_inverse = exact_linalg.identity(n), exact_linalg.identity(n)
        for _ in range(n if n > 1 else 0):
            i, j = rng.sample(range(n), 2)
            c = rng.choice([-1, 1, 2])
            P = exact_linalg.matmul(P, _elementary(n, i, j, c))
            P_inverse = exact_linalg.matmul(_elementary(n, i, j, -c), P_inverse)
        rows = exact_linalg.to_rows(exact_linalg.matmul(exact_linalg.matmul(P, B), P_inverse))
        if max(abs(entry) for row in rows for entry in row) <= MAX_ENTRY:
            return rows
    return exact_linalg.to_rows(B)


PRIME_BLOCKS = {
    2: [[[1]], [[-1]], [[0, 1], [1, 0]]],
    3: [[[1]], [[0, -1], [1, -1]], [[0, 0, 1], [1, 0, 0], [0, 1, 0]]],
}


@pytest.mark.parametrize("q", [2, 3])
def test_prime_holonomy_agrees(q):
    rng = random.Random(40 + q)
    for _ in range(4):
        blocks = []
        while sum(len(block) for block in blocks) < 2 or all(len(b) == 1 and b[0][0] == 1 for b in blocks):
            blocks = [rng.choice(PRIME_BLOCKS[q]) for _ in range(rng.randint(1, 2))]
            if sum(len(block) for block in blocks) > 3:
                blocks = []
        rows = _conjugate_block_sum(rng, blocks)
        group = HolonomyAction(rows, q)
        report = cohomology_engine.compare_conjecture(group)
        assert report.holds, (rows, [(c.degree, str(c.lhs), str(c.rhs)) for c in report.degrees])


def _check_against_catalog(entry):
    group = entry.to_group()
    expected = entry.expected
    report = cohomology_engine.compare_conjecture(
        group, expected.get("top_degree"), expected.get("check_periodicity", True)
    )
    for degree, value in entry.expected_cohomology().items():
        assert report.gamma.groups[degree] == value, (entry.id, degree)
    if entry.expected_tail():
        assert report.gamma.tail == entry.expected_tail(), entry.id
    for degree, value in entry.expected_e2().items():
        assert report.e2.degree_sum(degree) == value, (entry.id, degree)
    verdicts = {c.degree: c.verdict for c in report.degrees}
    for degree, verdict in entry.expected_verdicts().items():
        assert verdicts[degree] == verdict, (entry.id, degree)
    return report


@pytest.mark.parametrize("entry_id", ["min.27-1.2", "min.27-1.5"])
def test_catalog_dimension_four(entry_id):
    report = _check_against_catalog(catalog.lookup(entry_id))
    assert not report.holds


@pytest.mark.slow
@pytest.mark.parametrize("entry_id", [
    entry.id for entry in catalog.list_catalog() if entry.dim > 4 and entry.expected
])
def test_catalog_larger_dimensions(entry_id):
    _check_against_catalog(catalog.lookup(entry_id))


@pytest.mark.slow
def test_extension_problem_in_higher_degree():
    report = _check_against_catalog(catalog.lookup("min.142-1.2"))
    assert report.first_failure == 6
    assert {c.degree: c.verdict for c in report.degrees}[6] == EXTENSION_PROBLEM


def test_order_five_holonomy_agrees():
    # Companion matrix of the fifth cyclotomic polynomial
    rows = [[0, 0, 0, -1], [1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1]]
    report = cohomology_engine.compare_conjecture(HolonomyAction(rows, 5))
    assert report.holds


@pytest.mark.parametrize("q", [2, 3, 4])
def test_trivial_action_matches_kunneth(q):
    n = 2
    group = HolonomyAction([[1, 0], [0, 1]], q, exact_order=False)
    report = cohomology_engine.compare_conjecture(group, top_degree=5)
    for k in range(6):
        torsion = sum(comb(n, i) for i in range(k - 1) if (k - i) % 2 == 0)
        expected = AbelianGroupInvariants.from_cyclic_orders(comb(n, k), [q] * torsion)
        assert report.gamma.groups[k] == expected, k
        if k:
            assert report.e2.degree_sum(k) == expected, k
    assert report.holds


@pytest.mark.slow
def test_order_twelve_lattice_in_rank_six():
    group = catalog.lookup("Z12^(6)").to_group()
    result = cohomology_engine.gamma_cohomology(group, top_degree=6)
    expected = ["Z", "0", "Z^3 + Z_12 + Z_3", "Z^2", "Z^3 + Z_12 + Z_6 + Z_3^3", "Z_2^2", "Z + Z_12 + Z_6^2 + Z_3^5"]
    assert result.groups == [G(text) for text in expected]
    assert result.tail == (G("Z_12^2 + Z_6^2 + Z_3^5"), G("Z_2^2"))
