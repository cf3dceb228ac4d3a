"""
Integral cohomology of Γ = Z^n ⋊ Z_q, the E2-page of the extension
Z^n -> Γ -> Z_q, and the degree-by-degree comparison of the two.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

try:
    from . import exact_linalg
    from .exact_linalg import AbelianGroupInvariants
    from .wall_resolution import WallResolution
except ImportError:
    import exact_linalg
    from exact_linalg import AbelianGroupInvariants
    from wall_resolution import WallResolution

logger = logging.getLogger(__name__)

EQUAL = "equal"
RANK_MISMATCH = "rank-mismatch"
TORSION_MISMATCH = "torsion-mismatch"
EXTENSION_PROBLEM = "extension-problem"


class PeriodicityCheckError(ValueError):
    """H^(n+1) and H^(n+3) of Γ came out different."""


class RationalCheckError(ValueError):
    """Free ranks of H^k(Γ) and of the E2 sum differ."""


@dataclass
class CochainComplexZ:
    """Cochain complex F_0 -> F_1 -> ... of free abelian groups."""

    dims: list
    deltas: list
    periodic_tail: Optional[tuple] = None

    def diagonals(self):
        return [exact_linalg.invariant_factors(delta) for delta in self.deltas]


@dataclass
class GammaCohomology:
    """H^0 .. H^top_degree of Γ plus the 2-periodic tail (H^even, H^odd) for degrees > n."""

    groups: list
    tail: Optional[tuple]
    complex: CochainComplexZ
    n: int


@dataclass
class CyclicCohomology:
    h0: AbelianGroupInvariants
    even: AbelianGroupInvariants
    odd: AbelianGroupInvariants

    def degree(self, i):
        if i == 0:
            return self.h0
        return self.even if i % 2 == 0 else self.odd


@dataclass
class E2Page:
    """H^i(Z_q, H^j(Z^n)) for 0 <= j <= n, with the per-degree direct sums."""

    rows: dict
    top_degree: int
    n: int
    diagonals: dict = field(default_factory=dict)

    def entry(self, i, j):
        return self.rows[j].degree(i)

    def degree_sum(self, k):
        return exact_linalg.direct_sum(self.entry(k - j, j) for j in range(0, min(k, self.n) + 1))

    @property
    def sums(self):
        return [self.degree_sum(k) for k in range(self.top_degree + 1)]

    @property
    def tail(self):
        """Degree sums for the first even and odd degree above n."""
        start = self.n + 1
        first, second = self.degree_sum(start), self.degree_sum(start + 1)
        return (first, second) if start % 2 == 0 else (second, first)


@dataclass
class DegreeComparison:
    degree: object
    lhs: AbelianGroupInvariants
    rhs: AbelianGroupInvariants
    verdict: str


@dataclass
class CohomologyReport:
    """Both sides of the comparison, degree by degree, plus the tail."""

    label: str
    n: int
    q: int
    top_degree: int
    degrees: list
    tail: list
    e2: Optional[E2Page] = None
    gamma: Optional[GammaCohomology] = None

    @property
    def first_failure(self):
        for comparison in self.degrees:
            if comparison.verdict != EQUAL:
                return comparison.degree
        return None

    @property
    def holds(self):
        return self.first_failure is None and all(c.verdict == EQUAL for c in self.tail)

    def __eq__(self, other):
        return isinstance(other, CohomologyReport) and (
            self.label, self.n, self.q, self.top_degree, self.degrees, self.tail
        ) == (other.label, other.n, other.q, other.top_degree, other.degrees, other.tail)


def hom_to_coboundaries(resolution):
    """
    Apply Hom_ZΓ(-, Z) to the assembled differentials.

    Parameters:
    - resolution (list): FreeModuleMap for degrees 1..m, in order.

    Returns:
    - CochainComplexZ: deltas[m - 1] maps F_(m-1) to F_m; entry (source, target)
      is the augmentation of the coefficient of the target generator in d(source).
    """
    dims = [len(resolution[0].targets)] + [len(free_map.sources) for free_map in resolution]
    deltas = []
    for free_map in resolution:
        column_of = {generator: index for index, generator in enumerate(free_map.targets)}
        delta = exact_linalg.zeros(len(free_map.sources), len(free_map.targets))
        for row, source in enumerate(free_map.sources):
            for (g, S, s), coefficient in free_map.images[source].items():
                delta[row, column_of[(S, s)]] += coefficient
        deltas.append(delta)
    return CochainComplexZ(dims, deltas)


def _tail_pair(groups, n):
    start = n + 1
    first, second = groups[start], groups[start + 1]
    return (first, second) if start % 2 == 0 else (second, first)


def gamma_cohomology(group, top_degree=None, check_periodicity=True, resolution=None):
    """
    H^k(Γ, Z) for k = 0 .. top_degree.

    Parameters:
    - group (HolonomyAction): the group.
    - top_degree (int): defaults to n + 2.
    - check_periodicity (bool): also compute through degree n + 3 and require
      H^(n+1) = H^(n+3).
    - resolution (WallResolution): reuse an existing differential cache.

    Returns:
    - GammaCohomology: the groups, and the tail when the computed window reaches n + 2.

    Raises:
    - PeriodicityCheckError: if the periodic cross-check fails.
    """
    n = group.n
    if top_degree is None:
        top_degree = n + 2
    window = max(top_degree, n + 3) if check_periodicity else top_degree
    resolution = resolution or WallResolution(group)
    logger.info("Computing H^0..H^%d of %s (n=%d, q=%d)", window, group.label or "group", n, group.q)

    maps = resolution.assemble_resolution(window + 1)
    cochains = hom_to_coboundaries(maps)
    groups = exact_linalg.cohomology_from_coboundaries(cochains.deltas, cochains.dims)[: window + 1]

    if check_periodicity and groups[n + 1] != groups[n + 3]:
        raise PeriodicityCheckError(f"H^{n + 1} = {groups[n + 1]} but H^{n + 3} = {groups[n + 3]}")

    tail = _tail_pair(groups, n) if window >= n + 2 else None
    cochains.periodic_tail = (n + 1, tail) if tail else None
    return GammaCohomology(groups[: top_degree + 1], tail, cochains, n)


def norm_matrix(Mj, q):
    """Sum of Mj^a for a = 0..q-1."""
    norm = exact_linalg.zeros(*Mj.shape)
    power = exact_linalg.identity(Mj.shape[0])
    for _ in range(q):
        norm = norm + power
        power = exact_linalg.matmul(power, Mj)
    return norm


def cyclic_cohomology_with_coeffs(Mj, q):
    """
    H^*(Z_q, Z^m) where the generator acts by Mj.

    Returns:
    - CyclicCohomology: H^0 (invariants), H^even for even degrees >= 2 and H^odd.
    """
    size = Mj.shape[0]
    if not (exact_linalg.matrix_power(Mj, q) == exact_linalg.identity(size)).all():
        raise ValueError(f"Coefficient action does not have order dividing {q}")
    difference = Mj - exact_linalg.identity(size)
    norm = norm_matrix(Mj, q)
    h0 = AbelianGroupInvariants(size - exact_linalg.rank(difference))
    even = exact_linalg.subquotient_invariants(difference, norm)
    odd = exact_linalg.subquotient_invariants(norm, difference)
    return CyclicCohomology(h0, even, odd)


def exterior_action(group, j):
    """The action of x on H^j(Z^n) = Λ^j, the j-th compound of M^T."""
    return exact_linalg.compound_matrix(group.matrix.T, j)


def e2_page(group, top_degree=None):
    """
    The E2-page H^i(Z_q, H^j(Z^n)) for 0 <= j <= n.

    Returns:
    - E2Page: with the Smith diagonals of (Λ^j - I) and of the norm for each j.
    """
    if top_degree is None:
        top_degree = group.n + 2
    rows = {}
    diagonals = {}
    for j in range(group.n + 1):
        Mj = exterior_action(group, j)
        rows[j] = cyclic_cohomology_with_coeffs(Mj, group.q)
        diagonals[j] = (
            exact_linalg.invariant_factors(Mj - exact_linalg.identity(Mj.shape[0])),
            exact_linalg.invariant_factors(norm_matrix(Mj, group.q)),
        )
        logger.debug("E2 row j=%d: %s / %s / %s", j, rows[j].h0, rows[j].even, rows[j].odd)
    return E2Page(rows, top_degree, group.n, diagonals)


def invariant_ranks(group):
    """nullity(Λ^k(M^T) - I) for k = 0..n: the rational cohomology of Γ."""
    ranks = []
    for k in range(group.n + 1):
        Mk = exterior_action(group, k)
        ranks.append(Mk.shape[0] - exact_linalg.rank(Mk - exact_linalg.identity(Mk.shape[0])))
    return ranks


def euler_characteristic(ranks):
    return sum((-1) ** k * r for k, r in enumerate(ranks))


def classify(lhs, rhs):
    """
    Verdict for one degree.

    Parameters:
    - lhs (AbelianGroupInvariants): H^k(Γ).
    - rhs (AbelianGroupInvariants): the E2 degree-k sum.
    """
    if lhs == rhs:
        return EQUAL
    if lhs.free_rank != rhs.free_rank:
        return RANK_MISMATCH
    if lhs.torsion_order != rhs.torsion_order:
        return TORSION_MISMATCH
    return EXTENSION_PROBLEM


def compare_conjecture(group, top_degree=None, check_periodicity=True, gamma=None, e2=None):
    """
    Compare H^k(Γ) with the E2 sum in degrees 1..top_degree and on the tail.

    Raises:
    - RationalCheckError: if free ranks differ in some degree.
    """
    if top_degree is None:
        top_degree = group.n + 2
    gamma = gamma or gamma_cohomology(group, top_degree, check_periodicity)
    e2 = e2 or e2_page(group, top_degree)
    rational = invariant_ranks(group)

    degrees = []
    for k in range(1, top_degree + 1):
        lhs, rhs = gamma.groups[k], e2.degree_sum(k)
        expected_rank = rational[k] if k <= group.n else 0
        if not lhs.free_rank == rhs.free_rank == expected_rank:
            raise RationalCheckError(
                f"Degree {k}: free ranks {lhs.free_rank} (Γ), {rhs.free_rank} (E2), {expected_rank} (invariants)"
            )
        degrees.append(DegreeComparison(k, lhs, rhs, classify(lhs, rhs)))

    tail = []
    if gamma.tail is not None:
        for name, lhs, rhs in zip(("2k", "2k+1"), gamma.tail, e2.tail):
            tail.append(DegreeComparison(name, lhs, rhs, classify(lhs, rhs)))

    report = CohomologyReport(group.label or "", group.n, group.q, top_degree, degrees, tail, e2, gamma)
    if report.first_failure is not None:
        logger.info("First failure for %s at degree %s", report.label, report.first_failure)
    return report
