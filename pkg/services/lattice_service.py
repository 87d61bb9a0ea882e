"""Exact integer-lattice algebra on Z^n.

Vectors are plain tuples of ints. Subgroups are stored in column Hermite normal
form, so two generator lists with the same span produce equal ``Subgroup``
values.
"""

from dataclasses import dataclass
from functools import cached_property, reduce
from itertools import combinations
from math import gcd, prod
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy import Matrix

from config import MAX_DIMENSION
from logger import get_logger
from services.errors import (
    DimensionMismatch,
    LatticeOverflow,
    MixedDimension,
    NotABasis,
    UnsupportedDimension,
)

logger = get_logger(__name__)

LatticeVector = Tuple[int, ...]
IntMatrix = Tuple[Tuple[int, ...], ...]

INT64_LIMIT = 2 ** 63


def _checked(value: int) -> int:
    if not -INT64_LIMIT <= value < INT64_LIMIT:
        raise LatticeOverflow(f"Integer {value} leaves the 64-bit range")
    return value


def zero(n: int) -> LatticeVector:
    return (0,) * n


def add(u: Sequence[int], v: Sequence[int]) -> LatticeVector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[int], v: Sequence[int]) -> LatticeVector:
    return tuple(a - b for a, b in zip(u, v))


def neg(v: Sequence[int]) -> LatticeVector:
    return tuple(-a for a in v)


def scale(c: int, v: Sequence[int]) -> LatticeVector:
    return tuple(c * a for a in v)


def sup_norm(v: Sequence[int]) -> int:
    return max((abs(a) for a in v), default=0)


def content(v: Iterable[int]) -> int:
    """gcd of the coordinates (0 for the zero vector)."""
    return reduce(gcd, v, 0)


def canonical_representative(v: Sequence[int]) -> LatticeVector:
    """The member of {v, -v} whose first nonzero coordinate is positive."""
    for c in v:
        if c > 0:
            return tuple(v)
        if c < 0:
            return neg(v)
    return tuple(v)


def check_dimension(n: int) -> int:
    if not 1 <= n <= MAX_DIMENSION:
        raise UnsupportedDimension(f"Dimension {n} is outside 1..{MAX_DIMENSION}")
    return n


def _dimension_of(vectors: Sequence[Sequence[int]], n: Optional[int] = None) -> int:
    dims = {len(v) for v in vectors}
    if len(dims) > 1:
        raise MixedDimension(f"Vectors of different lengths {sorted(dims)}")
    if n is not None:
        if dims and dims != {n}:
            raise MixedDimension(f"Vectors of length {dims.pop()} in dimension {n}")
        return check_dimension(n)
    if not dims:
        raise DimensionMismatch("The dimension must be given for an empty vector list")
    return check_dimension(dims.pop())


@dataclass(frozen=True)
class SymmetricSet:
    n: int
    members: Tuple[LatticeVector, ...]

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(self.members)

    def __contains__(self, v) -> bool:
        return tuple(v) in self._lookup

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def is_symmetric(self) -> bool:
        return zero(self.n) in self._lookup and all(neg(v) in self._lookup for v in self.members)

    def pairs(self) -> Tuple[LatticeVector, ...]:
        """Canonical representatives of the ±-pairs of the nonzero members."""
        return tuple(sorted({canonical_representative(v) for v in self.members if any(v)}))

    def nonzero(self) -> Tuple[LatticeVector, ...]:
        return tuple(v for v in self.members if any(v))

    def union(self, vectors: Iterable[Sequence[int]]) -> "SymmetricSet":
        return normalize_symmetric(list(self.members) + [tuple(v) for v in vectors], self.n)

    def to_lists(self) -> List[List[int]]:
        return [list(v) for v in self.members]


def normalize_symmetric(vectors: Iterable[Sequence[int]], n: Optional[int] = None) -> SymmetricSet:
    vectors = [tuple(int(c) for c in v) for v in vectors]
    dim = _dimension_of(vectors, n)
    closure = {zero(dim)}
    for v in vectors:
        closure.add(v)
        closure.add(neg(v))
    return SymmetricSet(dim, tuple(sorted(closure)))


@dataclass(frozen=True)
class Subgroup:
    n: int
    hnf_basis: Tuple[LatticeVector, ...]
    pivots: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.hnf_basis)

    @property
    def index(self) -> Optional[int]:
        """[Z^n : L] for full-rank L, None otherwise."""
        if self.rank != self.n:
            return None
        return prod(h[p] for h, p in zip(self.hnf_basis, self.pivots))


def hermite_basis(vectors: Iterable[Sequence[int]], n: Optional[int] = None) -> Subgroup:
    """Column Hermite normal form of the integer span of ``vectors``.

    Basis vector j is zero above its pivot row p_j, has a positive pivot entry,
    and every earlier basis vector has its row-p_j entry reduced into [0, pivot).
    """
    vectors = [tuple(int(c) for c in v) for v in vectors]
    dim = _dimension_of(vectors, n)
    pool = [list(v) for v in vectors if any(v)]
    basis: List[List[int]] = []
    pivots: List[int] = []

    for row in range(dim):
        active = [v for v in pool if v[row] != 0]
        if not active:
            continue
        rest = [v for v in pool if v[row] == 0]
        while len(active) > 1:
            active.sort(key=lambda v: (abs(v[row]), v))
            pivot = active[0]
            survivors = [pivot]
            for v in active[1:]:
                q = v[row] // pivot[row]
                w = [_checked(a - q * b) for a, b in zip(v, pivot)]
                if w[row] != 0:
                    survivors.append(w)
                elif any(w):
                    rest.append(w)
            active = survivors
        pivot = active[0]
        if pivot[row] < 0:
            pivot = [-c for c in pivot]
        basis.append(pivot)
        pivots.append(row)
        pool = rest

    for j, row in enumerate(pivots):
        for i in range(j):
            q = basis[i][row] // basis[j][row]
            if q:
                basis[i] = [_checked(a - q * b) for a, b in zip(basis[i], basis[j])]

    return Subgroup(dim, tuple(tuple(v) for v in basis), tuple(pivots))


def contains(subgroup: Subgroup, v: Sequence[int]) -> bool:
    v = tuple(v)
    if len(v) != subgroup.n:
        raise DimensionMismatch(f"Vector of length {len(v)} tested against a subgroup of Z^{subgroup.n}")
    residual = list(v)
    by_pivot = dict(zip(subgroup.pivots, subgroup.hnf_basis))
    for row in range(subgroup.n):
        h = by_pivot.get(row)
        if h is None:
            if residual[row] != 0:
                return False
            continue
        q, r = divmod(residual[row], h[row])
        if r:
            return False
        residual = [_checked(a - q * b) for a, b in zip(residual, h)]
    return True


def span(s: Union[SymmetricSet, Subgroup]) -> Subgroup:
    if isinstance(s, Subgroup):
        return s
    return hermite_basis(s.members, s.n)


def generates_full_lattice(s: Union[SymmetricSet, Subgroup]) -> bool:
    subgroup = span(s)
    return subgroup.index == 1


def is_primitive(v: Sequence[int]) -> bool:
    return any(v) and content(v) == 1


def subgroup_has_primitive(subgroup: Subgroup) -> bool:
    # Unimodular maps preserve coordinate gcd, so a span with content 1 has a primitive member.
    if subgroup.rank == 0:
        return False
    return content(c for h in subgroup.hnf_basis for c in h) == 1


@dataclass(frozen=True)
class SmithInvariants:
    n: int
    factors: Tuple[int, ...]

    @property
    def free_rank(self) -> int:
        return self.n - len(self.factors)

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(d for d in self.factors if d > 1)

    @property
    def cyclic(self) -> bool:
        return self.free_rank + len(self.torsion) <= 1

    def describe(self) -> str:
        summands = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " ⊕ ".join(summands) if summands else "0"


def smith_invariants(subgroup: Subgroup) -> SmithInvariants:
    """Invariant factors d_1 | ... | d_r of the basis matrix via determinantal divisors."""
    n, r = subgroup.n, subgroup.rank
    if r == 0:
        return SmithInvariants(n, ())
    columns = subgroup.hnf_basis
    matrix = Matrix(n, r, lambda i, j: columns[j][i])
    factors: List[int] = []
    previous = 1
    for size in range(1, r + 1):
        divisor = 0
        for rows in combinations(range(n), size):
            for cols in combinations(range(r), size):
                divisor = gcd(divisor, int(matrix.extract(list(rows), list(cols)).det()))
        factors.append(divisor // previous)
        previous = divisor
    return SmithInvariants(n, tuple(factors))


def determinant(matrix: Sequence[Sequence[int]]) -> int:
    return int(Matrix([list(row) for row in matrix]).det())


def unimodular_to_basis(u: Sequence[int], v: Sequence[int]) -> IntMatrix:
    """The 2x2 matrix with columns u and v; it must have determinant ±1."""
    if len(u) != 2 or len(v) != 2:
        raise UnsupportedDimension("unimodular_to_basis works in Z^2 only")
    matrix = ((u[0], v[0]), (u[1], v[1]))
    det = determinant(matrix)
    if det not in (1, -1):
        raise NotABasis(f"{tuple(u)} and {tuple(v)} span a sublattice of index {abs(det)}")
    return matrix


def inverse_unimodular(matrix: Sequence[Sequence[int]]) -> IntMatrix:
    m = Matrix([list(row) for row in matrix])
    if not m.is_square or m.det() not in (1, -1):
        raise NotABasis(f"Matrix {tuple(map(tuple, matrix))} is not unimodular")
    inverse = m.inv()
    return tuple(tuple(int(inverse[i, j]) for j in range(m.cols)) for i in range(m.rows))


def apply_matrix(matrix: Sequence[Sequence[int]], v: Sequence[int]) -> LatticeVector:
    if len(v) != len(matrix[0]):
        raise DimensionMismatch(f"Vector of length {len(v)} for a {len(matrix)}x{len(matrix[0])} matrix")
    return tuple(_checked(sum(a * b for a, b in zip(row, v))) for row in matrix)


def transform_set(matrix: Sequence[Sequence[int]], s: SymmetricSet) -> SymmetricSet:
    """Image of a symmetric set under a unimodular change of coordinates."""
    inverse_unimodular(matrix)
    return normalize_symmetric([apply_matrix(matrix, v) for v in s.members], s.n)
