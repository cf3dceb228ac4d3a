"""Exact integer matrix algebra.

Matrices are numpy arrays with ``dtype=object`` holding Python ints, so every
entry has arbitrary precision and nothing ever wraps. Empty shapes (0 rows or
0 columns) are legal everywhere and behave as zero objects.
"""
import itertools
import logging
from dataclasses import dataclass
from math import comb, gcd

import numpy as np
from sympy import Matrix, factorint

logger = logging.getLogger(__name__)


class NoIntegerSolutionError(ValueError):
    """Raised when A·X = B has no solution over the integers."""


class CompositionNonzeroError(ValueError):
    """Raised when a subquotient ker A / im B is requested with A·B != 0."""


class ChainConditionError(ValueError):
    """Raised when consecutive coboundaries do not compose to zero or shapes do not chain."""


class DegreeOutOfRangeError(ValueError):
    """Raised for an exterior power degree outside 0..n."""


def as_matrix(rows, shape=None):
    """
    Build an exact integer matrix.

    Parameters:
    - rows: nested sequence of integers (or an existing array).
    - shape (tuple): required when ``rows`` is empty, so the column count is known.

    Returns:
    - numpy.ndarray: 2-dimensional array of Python ints.
    """
    if shape is not None and (shape[0] == 0 or shape[1] == 0):
        return np.zeros(shape, dtype=object)
    matrix = np.array([[int(entry) for entry in row] for row in rows], dtype=object)
    if matrix.ndim != 2:
        if shape is None:
            raise ValueError("Cannot infer the shape of an empty matrix, pass shape=(rows, cols)")
        matrix = matrix.reshape(shape)
    if shape is not None and matrix.shape != tuple(shape):
        raise ValueError(f"Matrix has shape {matrix.shape}, expected {tuple(shape)}")
    return matrix


def zeros(rows, cols):
    return np.zeros((rows, cols), dtype=object)


def identity(size):
    matrix = np.zeros((size, size), dtype=object)
    for i in range(size):
        matrix[i, i] = 1
    return matrix


def matmul(A, B):
    """Exact product that also handles an empty inner dimension."""
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"Cannot multiply {A.shape} by {B.shape}")
    if A.shape[1] == 0 or A.shape[0] == 0 or B.shape[1] == 0:
        return zeros(A.shape[0], B.shape[1])
    return A.dot(B)


def matrix_power(A, exponent):
    result = identity(A.shape[0])
    for _ in range(exponent):
        result = matmul(result, A)
    return result


def is_zero(A):
    return not np.any(A)


def to_rows(A):
    """Plain nested lists of ints, for JSON and for comparisons in tests."""
    return [[int(entry) for entry in row] for row in A]


def determinant(A):
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    size = A.shape[0]
    if A.shape[1] != size:
        raise ValueError(f"Determinant needs a square matrix, got {A.shape}")
    if size == 0:
        return 1
    return int(Matrix(to_rows(A)).det(method="bareiss"))


def _min_abs_position(D, start):
    rows, cols = np.nonzero(D[start:, start:])
    if len(rows) == 0:
        return None
    best = min(range(len(rows)), key=lambda k: abs(D[start + rows[k], start + cols[k]]))
    return start + rows[best], start + cols[best]


def _swap_rows(D, U, i, j):
    if i != j:
        D[[i, j]] = D[[j, i]]
        if U is not None:
            U[[i, j]] = U[[j, i]]


def _swap_cols(D, V, i, j):
    if i != j:
        D[:, [i, j]] = D[:, [j, i]]
        if V is not None:
            V[:, [i, j]] = V[:, [j, i]]


def _smith_reduce(A, transforms):
    D = np.array(A, dtype=object, copy=True)
    rows, cols = D.shape
    U = identity(rows) if transforms else None
    V = identity(cols) if transforms else None

    for t in range(min(rows, cols)):
        position = _min_abs_position(D, t)
        if position is None:
            break
        _swap_rows(D, U, t, position[0])
        _swap_cols(D, V, t, position[1])

        while True:
            pivot = D[t, t]
            for i in range(t + 1, rows):
                if D[i, t] != 0:
                    factor = D[i, t] // pivot
                    D[i] -= factor * D[t]
                    if U is not None:
                        U[i] -= factor * U[t]
            for j in range(t + 1, cols):
                if D[t, j] != 0:
                    factor = D[t, j] // pivot
                    D[:, j] -= factor * D[:, t]
                    if V is not None:
                        V[:, j] -= factor * V[:, t]

            # Remainders smaller than the pivot move into the pivot slot
            column_rest = [i for i in range(t + 1, rows) if D[i, t] != 0]
            row_rest = [j for j in range(t + 1, cols) if D[t, j] != 0]
            if column_rest or row_rest:
                best_row = min(column_rest, key=lambda i: abs(D[i, t]), default=None)
                best_col = min(row_rest, key=lambda j: abs(D[t, j]), default=None)
                if best_col is None or (
                    best_row is not None and abs(D[best_row, t]) <= abs(D[t, best_col])
                ):
                    _swap_rows(D, U, t, best_row)
                else:
                    _swap_cols(D, V, t, best_col)
                continue

            bad = np.nonzero(D[t + 1:, t + 1:] % pivot)
            if len(bad[0]) == 0:
                break
            # Pull an entry the pivot does not divide into row t
            offender = t + 1 + bad[0][0]
            D[t] += D[offender]
            if U is not None:
                U[t] += U[offender]

        if D[t, t] < 0:
            D[t] = -D[t]
            if U is not None:
                U[t] = -U[t]
    return D, U, V


def smith_normal_form(A):
    """
    Smith normal form with unimodular transforms.

    The pivot at each stage is the nonzero entry of minimal absolute value.

    Parameters:
    - A (numpy.ndarray): integer matrix of any shape, including empty.

    Returns:
    - tuple: (D, U, V) with U·A·V = D, D diagonal, d_1 | d_2 | ..., all d_k >= 0.
    """
    D, U, V = _smith_reduce(A, transforms=True)
    return D, U, V


def invariant_factors(A):
    """Diagonal of the Smith normal form, length min(rows, cols), zeros last."""
    D, _, _ = _smith_reduce(A, transforms=False)
    return tuple(int(D[i, i]) for i in range(min(D.shape)))


def rank(A):
    return sum(1 for d in invariant_factors(A) if d != 0)


def integer_kernel(A):
    """
    Saturated basis of {x : A·x = 0} as the columns of the returned matrix.

    Parameters:
    - A (numpy.ndarray): integer matrix.

    Returns:
    - numpy.ndarray: cols × (cols - rank A) matrix K with A·K = 0 whose columns
      extend to a basis of Z^cols.
    """
    D, _, V = smith_normal_form(A)
    r = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    return np.array(V[:, r:], dtype=object).reshape(A.shape[1], A.shape[1] - r)


def solve_exact(A, B):
    """
    Solve A·X = B over the integers.

    Raises:
    - NoIntegerSolutionError: if some column of B is outside the integer column span of A.
    """
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"Row counts differ: A is {A.shape}, B is {B.shape}")
    D, U, V = smith_normal_form(A)
    C = matmul(U, B)
    Y = zeros(A.shape[1], B.shape[1])
    for i in range(A.shape[0]):
        d = D[i, i] if i < min(D.shape) else 0
        for column in range(B.shape[1]):
            value = C[i, column]
            if d == 0:
                if value != 0:
                    raise NoIntegerSolutionError(
                        f"Right-hand side column {column} is not in the span of the matrix"
                    )
            elif value % d != 0:
                raise NoIntegerSolutionError(
                    f"Right-hand side column {column} is not an integer combination "
                    f"(entry {value} is not divisible by invariant factor {d})"
                )
            else:
                Y[i, column] = value // d
    return matmul(V, Y)


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """Finitely generated abelian group Z^free_rank + Z_d1 + ... with d1 | d2 | ..."""

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError(f"Free rank must be nonnegative, got {self.free_rank}")
        for k, d in enumerate(self.torsion):
            if d < 2:
                raise ValueError(f"Invariant factors must be at least 2, got {self.torsion}")
            if k + 1 < len(self.torsion) and self.torsion[k + 1] % d != 0:
                raise ValueError(f"Invariant factors must form a divisibility chain, got {self.torsion}")

    @classmethod
    def from_cyclic_orders(cls, free_rank, orders):
        """Canonical invariants of Z^free_rank plus cyclic groups of the given orders (in any form)."""
        prime_powers = {}
        for order in orders:
            if order == 0:
                free_rank += 1
                continue
            for prime, exponent in factorint(int(order)).items():
                prime_powers.setdefault(prime, []).append(exponent)
        length = max((len(exponents) for exponents in prime_powers.values()), default=0)
        factors = [1] * length
        for prime, exponents in prime_powers.items():
            for k, exponent in enumerate(sorted(exponents, reverse=True)):
                factors[k] *= prime ** exponent
        return cls(free_rank, tuple(sorted(factors)))

    @classmethod
    def from_diagonal(cls, free_rank, diagonal):
        """Drop unit factors from a Smith diagonal; zero entries are not allowed here."""
        return cls.from_cyclic_orders(free_rank, [abs(d) for d in diagonal if abs(d) > 1])

    @classmethod
    def from_string(cls, text):
        """
        Parse "Z^3 + Z_12 + Z_3", "Z + Z_4^2 + Z_2", "0" and the ⊕ spelling.
        """
        text = text.replace("⊕", "+").strip()
        if text in ("", "0"):
            return cls()
        free_rank = 0
        orders = []
        for summand in text.split("+"):
            summand = summand.strip().replace("{", "").replace("}", "")
            if summand == "0":
                continue
            base, _, power = summand.partition("^")
            multiplicity = int(power) if power else 1
            base = base.strip()
            if base == "Z":
                free_rank += multiplicity
            elif base.startswith("Z_"):
                orders.extend([int(base[2:])] * multiplicity)
            else:
                raise ValueError(f"Cannot parse group summand '{summand}' in '{text}'")
        return cls.from_cyclic_orders(free_rank, orders)

    @property
    def torsion_order(self):
        order = 1
        for d in self.torsion:
            order *= d
        return order

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def primary_decomposition(self):
        """List of (prime, exponent) pairs, primes ascending, exponents descending."""
        parts = []
        for d in self.torsion:
            parts.extend(factorint(d).items())
        return sorted(parts, key=lambda part: (part[0], -part[1]))

    def __add__(self, other):
        return AbelianGroupInvariants.from_cyclic_orders(
            self.free_rank + other.free_rank, list(self.torsion) + list(other.torsion)
        )

    def render(self, plus=" + "):
        if self.is_trivial:
            return "0"
        summands = []
        if self.free_rank == 1:
            summands.append("Z")
        elif self.free_rank > 1:
            summands.append(f"Z^{self.free_rank}")
        counted = []
        for part in self.primary_decomposition():
            if counted and counted[-1][0] == part:
                counted[-1][1] += 1
            else:
                counted.append([part, 1])
        for (prime, exponent), multiplicity in counted:
            name = f"Z_{prime ** exponent}"
            summands.append(name if multiplicity == 1 else f"{name}^{multiplicity}")
        return plus.join(summands)

    def __str__(self):
        return self.render()

    def to_dict(self):
        return {"rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["rank"]), tuple(int(d) for d in data["torsion"]))


def direct_sum(groups):
    total = AbelianGroupInvariants()
    for group in groups:
        total = total + group
    return total


def subquotient_invariants(A, B):
    """
    Invariants of ker A / im B.

    Parameters:
    - A (numpy.ndarray): p × m integer matrix.
    - B (numpy.ndarray): m × k integer matrix with A·B = 0.

    Returns:
    - AbelianGroupInvariants: the canonical invariants of the quotient.

    Raises:
    - CompositionNonzeroError: if A·B is not the zero matrix.
    """
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"Shapes do not compose: A is {A.shape}, B is {B.shape}")
    if not is_zero(matmul(A, B)):
        raise CompositionNonzeroError("Image is not contained in the kernel (A·B != 0)")
    K = integer_kernel(A)
    X = solve_exact(K, B)
    diagonal = invariant_factors(X)
    nonzero = [d for d in diagonal if d != 0]
    return AbelianGroupInvariants.from_diagonal(K.shape[1] - len(nonzero), nonzero)


def compound_matrix(A, j):
    """
    j-th compound (exterior power) of a square matrix on the wedge basis.

    Rows and columns are indexed by the j-subsets of {0..n-1} in lexicographic
    order; entry (S, T) is the minor with rows S and columns T.
    """
    size = A.shape[0]
    if A.shape[1] != size:
        raise ValueError(f"Compound matrix needs a square matrix, got {A.shape}")
    if j < 0 or j > size:
        raise DegreeOutOfRangeError(f"Exterior degree {j} is outside 0..{size}")
    subsets = list(itertools.combinations(range(size), j))
    result = zeros(comb(size, j), comb(size, j))
    for row, S in enumerate(subsets):
        for col, T in enumerate(subsets):
            result[row, col] = determinant(A[np.ix_(S, T)]) if j else 1
    return result


def cohomology_from_coboundaries(deltas, dims):
    """
    Cohomology of a cochain complex of free abelian groups.

    Parameters:
    - deltas (list): coboundaries, deltas[i] maps F_i to F_(i+1) (shape dims[i+1] × dims[i]).
    - dims (list): ranks of F_0, F_1, ...; len(dims) == len(deltas) + 1.

    Returns:
    - list: AbelianGroupInvariants for H^0 .. H^(len(dims) - 1). The complex is
      taken to end after the last coboundary.

    Raises:
    - ChainConditionError: on mismatched shapes or a nonzero composite.
    """
    if len(dims) != len(deltas) + 1:
        raise ChainConditionError(f"Expected {len(deltas) + 1} ranks for {len(deltas)} coboundaries, got {len(dims)}")
    for i, delta in enumerate(deltas):
        if delta.shape != (dims[i + 1], dims[i]):
            raise ChainConditionError(
                f"Coboundary {i} has shape {delta.shape}, expected {(dims[i + 1], dims[i])}"
            )
        if i > 0 and not is_zero(matmul(delta, deltas[i - 1])):
            raise ChainConditionError(f"Coboundaries {i - 1} and {i} do not compose to zero")

    diagonals = [invariant_factors(delta) for delta in deltas]
    ranks = [sum(1 for d in diagonal if d != 0) for diagonal in diagonals] + [0]

    groups = [AbelianGroupInvariants(dims[0] - ranks[0])]
    for i, diagonal in enumerate(diagonals):
        logger.debug("Coboundary %d: rank %d, diagonal %s", i, ranks[i], diagonal)
        free_rank = dims[i + 1] - ranks[i] - ranks[i + 1]
        groups.append(AbelianGroupInvariants.from_diagonal(free_rank, [d for d in diagonal if d > 1]))
    return groups


def elementary_divisor_gcd(A, size):
    """gcd of all size × size minors; used as an independent invariant-factor check."""
    rows, cols = A.shape
    value = 0
    for S in itertools.combinations(range(rows), size):
        for T in itertools.combinations(range(cols), size):
            value = gcd(value, determinant(A[np.ix_(S, T)]))
    return value
