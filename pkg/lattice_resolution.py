"""
Cubical free resolution of Z over Z[Z^n] and its contracting homotopy.

A lattice chain is a ``LatticeChain`` mapping (exponents, S) to an int,
where ``exponents`` is the exponent vector of a lattice monomial and ``S`` a
strictly increasing tuple of 1-based coordinates (the cube e_S). Chains of
degree -1 are plain ints.
"""
import itertools
from math import comb


class LatticeChain(dict):
    """Sparse Z-combination of lattice monomials times cube generators."""

    def __init__(self, n, degree, terms=None):
        super().__init__()
        self.n = n
        self.degree = degree
        if terms:
            for key, coefficient in terms.items():
                self.add_term(key[0], key[1], coefficient)

    def add_term(self, exponents, S, coefficient):
        key = (tuple(exponents), tuple(S))
        value = self.get(key, 0) + coefficient
        if value:
            self[key] = value
        else:
            self.pop(key, None)
        return self

    def add_chain(self, other, factor=1):
        for (exponents, S), coefficient in other.items():
            self.add_term(exponents, S, factor * coefficient)
        return self

    def __repr__(self):
        return f"LatticeChain(n={self.n}, degree={self.degree}, {dict.__repr__(self)})"


def cube_generators(n, m):
    """The C(n, m) cubes of dimension m in lexicographic order."""
    if m < 0 or m > n:
        return []
    return list(itertools.combinations(range(1, n + 1), m))


def module_rank(n, m):
    return comb(n, m) if 0 <= m <= n else 0


def validate_cube(S, n):
    if any(i < 1 or i > n for i in S) or any(a >= b for a, b in zip(S, S[1:])):
        raise ValueError(f"Cube {S} is not a strictly increasing subset of 1..{n}")


def monomial(n, exponents, S, coefficient=1):
    S = tuple(S)
    validate_cube(S, n)
    return LatticeChain(n, len(S), {(tuple(exponents), S): coefficient})


def cube_boundary(chain):
    """
    d(e_S) = sum_j (-1)^(j-1) (t_(i_j) - 1) e_(S without i_j), extended linearly.

    In degree 0 this is the augmentation, returning an int.
    """
    if chain.degree == 0:
        return sum(chain.values())
    boundary = LatticeChain(chain.n, chain.degree - 1)
    for (exponents, S), coefficient in chain.items():
        for j, index in enumerate(S):
            sign = coefficient if j % 2 == 0 else -coefficient
            face = S[:j] + S[j + 1:]
            shifted = list(exponents)
            shifted[index - 1] += 1
            boundary.add_term(shifted, face, sign)
            boundary.add_term(exponents, face, -sign)
    return boundary


def _c_powers(j):
    """Exponent range and sign of the terms of C(j, t_k, -)."""
    if j > 0:
        return range(0, j), 1
    return range(-1, j - 1, -1), -1


def c_symbol(j, k, S, n, base=None):
    """
    The chain C(j, t_k, e_S).

    j > 0 gives sum_(i=0)^(j-1) t_k^i e_S, j < 0 gives -sum_(i=1)^(-j) t_k^(-i) e_S
    and j = 0 the zero chain. ``base`` multiplies every term by a monomial.
    """
    if not 1 <= k <= n:
        raise ValueError(f"Coordinate {k} is outside 1..{n}")
    exponents = list(base) if base is not None else [0] * n
    start = exponents[k - 1]
    chain = LatticeChain(n, len(S))
    powers, sign = _c_powers(j)
    for power in powers:
        exponents[k - 1] = start + power
        chain.add_term(exponents, S, sign)
    return chain


def accumulate_homotopy(exponents, S, n, result, coefficient):
    # Tensor factors are peeled off from coordinate 1 upward; a factor already
    # in the cube kills the remaining recursion.
    current = list(exponents)
    for p in range(1, n + 1):
        if p in S:
            return
        power = current[p - 1]
        if power:
            cube = (p,) + tuple(S)
            powers, sign = _c_powers(power)
            for exponent in powers:
                current[p - 1] = exponent
                result.add_term(current, cube, sign * coefficient)
            current[p - 1] = 0


def contracting_homotopy_h(chain, n):
    """
    Contracting homotopy of the augmented cube complex.

    Parameters:
    - chain: LatticeChain of degree m >= 0, or an int for degree -1.
    - n (int): lattice rank.

    Returns:
    - LatticeChain: chain of degree m + 1 with h·d + d·h = id.
    """
    if isinstance(chain, int):
        return LatticeChain(n, 0, {((0,) * n, ()): chain} if chain else None)
    result = LatticeChain(n, chain.degree + 1)
    for (exponents, S), coefficient in chain.items():
        accumulate_homotopy(exponents, S, n, result, coefficient)
    return result
