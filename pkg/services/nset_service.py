"""Exactly k-discrete N-sets stored as translate maps f: (Z/k)^n -> Z^n.

Cell u of the grid is the closed cube u/k + [0, 1/k]^n. The represented set is
the union over all cells of that cube moved by f(u), so it has one cube per
residue class and is an N-set by construction.
"""

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from config import IDEAL_STRATA_BUDGET, RESOLUTION_CAPS
from logger import get_logger
from services.errors import BudgetExceeded, InvalidInput, ResolutionCap
from services.lattice_service import (
    LatticeVector,
    SymmetricSet,
    add,
    canonical_representative,
    normalize_symmetric,
    sub,
    zero,
)
from services.torus_service import TorusGraph, Vertex, cell_index, cells, check_resolution

logger = get_logger(__name__)


@dataclass(frozen=True)
class DiscreteNSet:
    n: int
    k: int
    shifts: Tuple[LatticeVector, ...]

    def __post_init__(self):
        check_resolution(self.n, self.k)
        if len(self.shifts) != self.k ** self.n:
            raise InvalidInput(f"Expected {self.k ** self.n} cell shifts, got {len(self.shifts)}")
        for i, x in enumerate(self.shifts):
            if len(x) != self.n:
                raise InvalidInput(f"Shift of cell #{i} has length {len(x)}, expected {self.n}")

    @classmethod
    def zero(cls, n: int, k: int) -> "DiscreteNSet":
        return cls(n, k, (zero(n),) * k ** n)

    @classmethod
    def from_mapping(cls, n: int, k: int, mapping: Mapping[Vertex, Sequence[int]]) -> "DiscreteNSet":
        missing = [u for u in cells(n, k) if u not in mapping]
        if missing:
            raise InvalidInput(f"Cells {missing[:3]} have no shift ({len(missing)} missing)")
        extra = [u for u in mapping if len(u) != n or any(not 0 <= c < k for c in u)]
        if extra:
            raise InvalidInput(f"Cell {extra[0]} is not a residue of (Z/{k})^{n}")
        return cls(n, k, tuple(tuple(int(c) for c in mapping[u]) for u in cells(n, k)))

    @cached_property
    def graph(self) -> TorusGraph:
        return TorusGraph(self.n, self.k)

    def cells(self) -> List[Vertex]:
        return cells(self.n, self.k)

    def shift(self, cell: Sequence[int]) -> LatticeVector:
        return self.shifts[cell_index(cell, self.k)]

    def normalized(self, base: Optional[Sequence[int]] = None) -> "DiscreteNSet":
        """Translate of self with f(base) = 0."""
        pin = self.shift(base if base is not None else zero(self.n))
        return DiscreteNSet(self.n, self.k, tuple(sub(x, pin) for x in self.shifts))


def edge_value(K: DiscreteNSet, u: Sequence[int], d: Sequence[int]) -> LatticeVector:
    """f(u) - f(v') + w for the step d from u, v' = (u + d) mod k."""
    v, w = K.graph.move(u, d)
    return add(sub(K.shift(u), K.shift(v)), w)


def achieved_set(K: DiscreteNSet) -> SymmetricSet:
    graph = K.graph
    values = {edge_value(K, u, d) for u, d in graph.edges()}
    return normalize_symmetric(values, K.n)


def refine(K: DiscreteNSet, factor: int) -> DiscreteNSet:
    if factor < 2:
        raise InvalidInput(f"Refinement factor {factor} must be at least 2")
    k = K.k * factor
    if k > RESOLUTION_CAPS[K.n]:
        raise ResolutionCap(f"Refining k={K.k} by {factor} exceeds the cap {RESOLUTION_CAPS[K.n]}")
    shifts = tuple(K.shift(tuple(c // factor for c in u)) for u in cells(K.n, k))
    return DiscreteNSet(K.n, k, shifts)


def translate_cell(K: DiscreteNSet, cell: Sequence[int], x: Sequence[int]) -> DiscreteNSet:
    index = cell_index(cell, K.k)
    shifts = list(K.shifts)
    shifts[index] = add(shifts[index], x)
    return DiscreteNSet(K.n, K.k, tuple(shifts))


def augment(K: DiscreteNSet, x: Sequence[int]) -> DiscreteNSet:
    """Refine by 3 and move the central subcell of cell 0 by x, adding exactly ±x."""
    fine = refine(K, 3)
    return translate_cell(fine, (1,) * K.n, x)


# Achieved ideal

PointSet = Tuple[LatticeVector, ...]


def canonical_class(points) -> PointSet:
    """Translate of a finite point set whose lexicographic minimum is the origin."""
    points = sorted(set(map(tuple, points)))
    base = points[0]
    return tuple(sub(p, base) for p in points)


def _embeds(small: PointSet, large: PointSet) -> bool:
    large_set = frozenset(large)
    for b in large:
        t = sub(b, small[0])
        if all(add(a, t) in large_set for a in small):
            return True
    return False


@dataclass(frozen=True)
class AchievedIdeal:
    n: int
    classes: Tuple[PointSet, ...]
    order: Tuple[Tuple[int, int], ...]
    observed: Tuple[int, ...]

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(len(c) - 1 for c in self.classes)

    def maximal(self) -> Tuple[int, ...]:
        above = Counter(i for i, j in self.order if i != j)
        return tuple(i for i in range(len(self.classes)) if not above[i])

    def rank_counts(self) -> Dict[int, int]:
        return dict(sorted(Counter(self.ranks).items()))


def _coordinate_options(m: int, k: int) -> List[Tuple[int, int]]:
    """(cell coordinate, wrap) pairs whose closed interval contains m / (2k)."""
    j, odd = divmod(m, 2)
    if odd:
        return [(j, 0)]
    options = [(c, 0) for c in (j - 1, j) if 0 <= c < k]
    if j == 0:
        options.append((k - 1, 1))
    return options


def covering_translates(K: DiscreteNSet, strata: Sequence[int]) -> FrozenSet[LatticeVector]:
    """{g : p + g in K} for the point p with coordinates strata[i] / (2k)."""
    per_axis = [_coordinate_options(m, K.k) for m in strata]
    result = set()
    for choice in product(*per_axis):
        u = tuple(c for c, _ in choice)
        e = tuple(w for _, w in choice)
        result.add(add(K.shift(u), e))
    return frozenset(result)


def achieved_ideal(K: DiscreteNSet) -> AchievedIdeal:
    strata_count = (2 * K.k) ** K.n
    if K.n > 2 and strata_count > IDEAL_STRATA_BUDGET:
        raise BudgetExceeded(f"{strata_count} strata exceed the budget {IDEAL_STRATA_BUDGET}")

    seen = {canonical_class(covering_translates(K, m)) for m in product(range(2 * K.k), repeat=K.n)}

    closure = set()
    for cls in seen:
        for size in range(1, len(cls) + 1):
            for subset in combinations(cls, size):
                closure.add(canonical_class(subset))

    classes = tuple(sorted(closure, key=lambda c: (len(c), c)))
    order = tuple(
        (i, j)
        for i, small in enumerate(classes)
        for j, large in enumerate(classes)
        if len(small) <= len(large) and _embeds(small, large)
    )
    observed = tuple(i for i, c in enumerate(classes) if c in seen)
    logger.info(f"Achieved ideal of n={K.n}, k={K.k}: {len(classes)} classes from {strata_count} strata")
    return AchievedIdeal(K.n, classes, order, observed)


def difference_pairs(ideal: AchievedIdeal) -> Tuple[LatticeVector, ...]:
    """Canonical ±-representatives read off the rank-1 classes."""
    return tuple(sorted(canonical_representative(c[1]) for c in ideal.classes if len(c) == 2))
