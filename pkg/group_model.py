"""
Split crystallographic groups Γ = Z^n ⋊ Z_q and their integral group rings.

The holonomy matrix M is given by its rows, and the rows are the images of
the lattice generators: the generator x of Z_q satisfies
x^-1 · t_v · x = t_(M^T v). Group elements are stored as pairs (t, a) meaning
t·x^a, multiplied with the conjugation matrix N = (M^T)^-1 = (M^(q-1))^T:

    (t, a) · (s, b) = (t + N^a s, a + b mod q)
"""
import logging
from typing import NamedTuple

from sympy import primerange

try:
    from . import exact_linalg
except ImportError:
    import exact_linalg

logger = logging.getLogger(__name__)


class HolonomyValidationError(ValueError):
    """The matrix is not an order-q automorphism of the lattice."""


class MismatchedGroupError(ValueError):
    """Operands belong to different groups."""


class GroupElement(NamedTuple):
    t: tuple
    a: int


def _euler_phi(prime, exponent):
    return prime ** exponent - prime ** (exponent - 1)


def max_holonomy_order(n):
    """
    Largest finite order of an element of GL_n(Z).

    An order m occurs iff the sum of phi(p^a) over the prime powers p^a
    exactly dividing m is at most n, where a lone factor 2 costs nothing
    (m = 2 itself needs n >= 1).
    """
    primes = list(primerange(2, n + 2))
    best = 2 if n >= 1 else 1

    def search(index, budget, value):
        nonlocal best
        best = max(best, value)
        for position in range(index, len(primes)):
            prime = primes[position]
            exponent = 1
            while True:
                cost = 0 if prime ** exponent == 2 else _euler_phi(prime, exponent)
                if cost > budget:
                    break
                search(position + 1, budget - cost, value * prime ** exponent)
                exponent += 1

    search(0, n, 1)
    return best


def _apply(sparse_rows, vector):
    return tuple(sum(c * vector[k] for k, c in row) for row in sparse_rows)


class HolonomyAction:
    """
    The group Γ = Z^n ⋊ Z_q determined by an order-q matrix M.

    Parameters:
    - rows (list): the n × n integer matrix M.
    - q (int): the exact order of M.
    - label (str): optional display name.
    - exact_order (bool): if False, q only has to be a multiple of the order
      of M. This gives products such as Z^n x Z_q with trivial action.
    """

    def __init__(self, rows, q, label=None, exact_order=True):
        self.label = label
        self.exact_order = exact_order
        matrix = exact_linalg.as_matrix(rows) if len(rows) else exact_linalg.zeros(0, 0)
        if matrix.shape[0] != matrix.shape[1]:
            raise HolonomyValidationError(f"Holonomy matrix must be square, got shape {matrix.shape}")
        self.n = matrix.shape[0]
        self.q = int(q)
        if self.q < 1:
            raise HolonomyValidationError(f"Holonomy order must be positive, got {q}")
        self.matrix = matrix

        det = exact_linalg.determinant(matrix)
        if abs(det) != 1:
            raise HolonomyValidationError(f"Holonomy matrix has determinant {det}, expected ±1")

        order = self._exact_order()
        if order is None:
            raise HolonomyValidationError(
                f"Holonomy matrix has infinite order (no power up to {max_holonomy_order(self.n)} is the identity)"
            )
        if exact_order and order != self.q:
            raise HolonomyValidationError(f"Holonomy matrix has order {order}, not {self.q}")
        if self.q % order:
            raise HolonomyValidationError(f"Holonomy matrix has order {order}, which does not divide {self.q}")

        # Powers of the conjugation matrix N = (M^(q-1))^T, each row as (column, entry) pairs
        conjugation = exact_linalg.matrix_power(matrix, self.q - 1).T
        self._powers = []
        current = exact_linalg.identity(self.n)
        for _ in range(self.q):
            self._powers.append(tuple(tuple((k, int(x)) for k, x in enumerate(row) if x) for row in current))
            current = exact_linalg.matmul(current, conjugation)
        self.zero = tuple([0] * self.n)
        self.identity = GroupElement(self.zero, 0)
        logger.debug("Validated holonomy %s of order %d on Z^%d", label or "", self.q, self.n)

    def _exact_order(self):
        current = exact_linalg.identity(self.n)
        for k in range(1, max_holonomy_order(self.n) + 1):
            current = exact_linalg.matmul(current, self.matrix)
            if (current == exact_linalg.identity(self.n)).all():
                return k
        return None

    def __repr__(self):
        return f"HolonomyAction(label={self.label!r}, n={self.n}, q={self.q}, rows={self.rows()})"

    def __eq__(self, other):
        return isinstance(other, HolonomyAction) and self.q == other.q and self.rows() == other.rows()

    def __hash__(self):
        return hash((self.q, tuple(map(tuple, self.rows()))))

    def rows(self):
        return exact_linalg.to_rows(self.matrix)

    def descriptor(self):
        descriptor = {"label": self.label, "n": self.n, "q": self.q, "rows": self.rows()}
        if not self.exact_order:
            descriptor["exact_order"] = False
        return descriptor

    def element(self, t, a=0):
        t = tuple(int(x) for x in t)
        if len(t) != self.n:
            raise MismatchedGroupError(f"Translation {t} does not have length {self.n}")
        return GroupElement(t, int(a) % self.q)

    def translation(self, index, power=1):
        """t_index^power for a 1-based lattice coordinate."""
        t = [0] * self.n
        t[index - 1] = power
        return GroupElement(tuple(t), 0)

    def generator(self, power=1):
        """x^power."""
        return GroupElement(self.zero, power % self.q)

    def from_coset(self, a, s):
        """The element x^a · t^s, i.e. (0, a)·(s, 0)."""
        return GroupElement(_apply(self._powers[a % self.q], s), a % self.q)

    def _check(self, g):
        if len(g.t) != self.n or not 0 <= g.a < self.q:
            raise MismatchedGroupError(f"Element {g} does not belong to Z^{self.n} ⋊ Z_{self.q}")

    def multiply(self, g, h):
        self._check(g)
        self._check(h)
        return self._multiply(g, h)

    def _multiply(self, g, h):
        moved = _apply(self._powers[g.a], h.t) if g.a else h.t
        return GroupElement(tuple(x + y for x, y in zip(g.t, moved)), (g.a + h.a) % self.q)

    def invert(self, g):
        self._check(g)
        back = (-g.a) % self.q
        moved = _apply(self._powers[back], g.t)
        return GroupElement(tuple(-x for x in moved), back)

    def coset_normal_form(self, g):
        """
        Split g as (0, a)·(s, 0).

        Returns:
        - tuple: (a, s) with s = N^-a t, the lattice vector that is written
          t^s after x^a in printed monomials.
        """
        self._check(g)
        return self._coset_normal_form(g)

    def _coset_normal_form(self, g):
        if g.a == 0:
            return 0, g.t
        return g.a, _apply(self._powers[(-g.a) % self.q], g.t)

    def one(self):
        return GroupRingElement(self, {self.identity: 1})


class GroupRingElement(dict):
    """
    Sparse element of ZΓ, a map from GroupElement to nonzero int.
    """

    def __init__(self, group, terms=None):
        super().__init__()
        self.group = group
        if terms:
            for g, c in terms.items():
                self.add_term(g, c)

    def add_term(self, g, coefficient):
        value = self.get(g, 0) + coefficient
        if value:
            self[g] = value
        else:
            self.pop(g, None)
        return self

    def copy(self):
        return GroupRingElement(self.group, self)

    def __repr__(self):
        return f"GroupRingElement({dict.__repr__(self)})"

    def __eq__(self, other):
        if isinstance(other, GroupRingElement) and other.group is not self.group and other.group != self.group:
            return False
        return dict.__eq__(self, other)

    __hash__ = None

    def __add__(self, other):
        return ring_add(self, other)

    def __sub__(self, other):
        return ring_add(self, ring_scale(other, -1))

    def __mul__(self, other):
        if isinstance(other, int):
            return ring_scale(self, other)
        return ring_multiply(self, other)

    __rmul__ = __mul__


def _same_group(rho, sigma):
    if rho.group is not sigma.group and rho.group != sigma.group:
        raise MismatchedGroupError("Group ring elements belong to different groups")


def ring_add(rho, sigma):
    _same_group(rho, sigma)
    result = rho.copy()
    for g, c in sigma.items():
        result.add_term(g, c)
    return result


def ring_scale(rho, factor):
    if not factor:
        return GroupRingElement(rho.group)
    return GroupRingElement(rho.group, {g: c * factor for g, c in rho.items()})


def ring_multiply(rho, sigma):
    _same_group(rho, sigma)
    group = rho.group
    result = GroupRingElement(group)
    for g, c in rho.items():
        for h, d in sigma.items():
            result.add_term(group.multiply(g, h), c * d)
    return result


def augmentation(rho):
    """Sum of coefficients: the ring map ZΓ -> Z sending every group element to 1."""
    return sum(rho.values())
