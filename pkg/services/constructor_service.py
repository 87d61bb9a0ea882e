"""Constructive family in Z^2 from generators a_1..a_m (sum (1,0)) and b_1..b_n (sum (0,1)).

Vertical lines V_i sit at x = c_i + 1/2 and horizontal lines H_j at y = c'_j + 1/2
(cell units, c_i = 4i - 2, c'_j = 4j - 2) on a grid of resolution k = 4 max(m, n) + 2.
A lifted vertex X carries the crossing counts

    S_i(X) = floor((X_0 - c_i - 1) / k)        T_j(X) = floor((X_1 - c'_j - 1) / k)

and an edge X -> Y is assigned sum a_i dS_i + sum b_j dT_j. At the intersection of
V_i and H_j one corner of the unit square is moved across V_i: the top-left corner
to the right side for '+', the top-right corner to the left side for '-'. That
removes the unwanted diagonal value a_i -/+ b_j.
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

from logger import get_logger
from services.assignment_service import EdgeAssignment, classify, integrate
from services.errors import ConstructionInvariantViolated, InvalidInput
from services.lattice_service import (
    IntMatrix,
    LatticeVector,
    SymmetricSet,
    add,
    apply_matrix,
    inverse_unimodular,
    normalize_symmetric,
    scale,
    transform_set,
    unimodular_to_basis,
    zero,
)
from services.nset_service import DiscreteNSet, achieved_set
from services.torus_service import TorusGraph

logger = get_logger(__name__)


@dataclass(frozen=True)
class GeneratorSpec:
    a_list: Tuple[LatticeVector, ...]
    b_list: Tuple[LatticeVector, ...]
    signs: Tuple[Tuple[str, ...], ...]

    def __post_init__(self):
        self.check_shape()
        if _total(self.a_list) != (1, 0) or _total(self.b_list) != (0, 1):
            raise InvalidInput(
                f"Generators must sum to (1,0) and (0,1), got {_total(self.a_list)} and {_total(self.b_list)}"
            )

    def check_shape(self):
        m, n = len(self.a_list), len(self.b_list)
        if not m or not n:
            raise InvalidInput("Both generator lists need at least one vector")
        if any(len(v) != 2 for v in self.a_list + self.b_list):
            raise InvalidInput("Generators must lie in Z^2")
        if len(self.signs) != m or any(len(row) != n for row in self.signs):
            raise InvalidInput(f"Signs must form a {m}x{n} table")
        if any(s not in ("+", "-") for row in self.signs for s in row):
            raise InvalidInput("Signs must be '+' or '-'")

    @property
    def resolution(self) -> int:
        return 4 * max(len(self.a_list), len(self.b_list)) + 2

    def target(self) -> SymmetricSet:
        vectors = list(self.a_list) + list(self.b_list)
        for i, a in enumerate(self.a_list):
            for j, b in enumerate(self.b_list):
                vectors.append(add(a, b) if self.signs[i][j] == "+" else add(a, scale(-1, b)))
        return normalize_symmetric(vectors, 2)


def _total(vectors: Sequence[Sequence[int]]) -> LatticeVector:
    total = (0, 0)
    for v in vectors:
        total = add(total, v)
    return total


def _line_offset(i: int) -> int:
    return 4 * (i + 1) - 2


def _corrections(spec: GeneratorSpec) -> Dict[Tuple[int, int, int], int]:
    """(line i, x, y) -> change of S_i at the residue (x, y)."""
    corrections = {}
    for i in range(len(spec.a_list)):
        c = _line_offset(i)
        for j in range(len(spec.b_list)):
            top = _line_offset(j) + 1
            if spec.signs[i][j] == "+":
                corrections[(i, c, top)] = 1
            else:
                corrections[(i, c + 1, top)] = -1
    return corrections


def _potential(spec: GeneratorSpec, k: int, corrections: Dict, X: Sequence[int]) -> LatticeVector:
    x, y = X
    rx, ry = x % k, y % k
    value = zero(2)
    for i, a in enumerate(spec.a_list):
        s = (x - _line_offset(i) - 1) // k + corrections.get((i, rx, ry), 0)
        value = add(value, scale(s, a))
    for j, b in enumerate(spec.b_list):
        t = (y - _line_offset(j) - 1) // k
        value = add(value, scale(t, b))
    return value


def _assignment(spec: GeneratorSpec, deformed: bool) -> EdgeAssignment:
    k = spec.resolution
    graph = TorusGraph(2, k)
    corrections = _corrections(spec) if deformed else {}

    def value(u, d):
        start = _potential(spec, k, corrections, u)
        end = _potential(spec, k, corrections, add(u, d))
        return add(end, scale(-1, start))

    return EdgeAssignment.from_function(graph, value)


def line_assignment(spec: GeneratorSpec) -> EdgeAssignment:
    """Signed line crossings only, before the intersection corners are moved."""
    return _assignment(spec, deformed=False)


def deformed_assignment(spec: GeneratorSpec) -> EdgeAssignment:
    return _assignment(spec, deformed=True)


@dataclass(frozen=True)
class Construction:
    spec: GeneratorSpec
    k: int
    witness: DiscreteNSet
    achieved: SymmetricSet
    target: SymmetricSet


def build_from_generators(spec: GeneratorSpec) -> Construction:
    chi = deformed_assignment(spec)
    if not classify(chi).proper:
        raise ConstructionInvariantViolated("The deformed line assignment is not proper")
    witness = integrate(chi, (0, 0))
    achieved = achieved_set(witness)
    target = spec.target()
    if achieved != target:
        raise ConstructionInvariantViolated(
            f"Construction achieved {achieved.to_lists()} instead of {target.to_lists()}"
        )
    logger.info(f"Built a k={spec.resolution} witness for {len(target.pairs())} pairs "
                f"({len(spec.a_list)} x {len(spec.b_list)} generators)")
    return Construction(spec, spec.resolution, witness, achieved, target)


@dataclass(frozen=True)
class GeneralConstruction:
    matrix: IntMatrix
    pullback: Construction
    achieved_set_of_target: SymmetricSet
    reasoning: str


def build_general(
    u: Sequence[int],
    v: Sequence[int],
    a_list: Sequence[Sequence[int]],
    b_list: Sequence[Sequence[int]],
    signs: Sequence[Sequence[str]],
) -> GeneralConstruction:
    """Construction for generators summing to an arbitrary basis u, v of Z^2."""
    matrix = unimodular_to_basis(u, v)
    inverse = inverse_unimodular(matrix)
    spec = GeneratorSpec(
        tuple(apply_matrix(inverse, a) for a in a_list),
        tuple(apply_matrix(inverse, b) for b in b_list),
        tuple(tuple(row) for row in signs),
    )
    pullback = build_from_generators(spec)
    image = transform_set(matrix, pullback.achieved)
    reasoning = (
        f"The witness achieves the pulled-back set exactly. Applying M={[list(r) for r in matrix]} "
        f"(determinant ±1) to that N-set gives an N-set achieving M times its achieved set, "
        f"which is the reported target; the transformed set is not re-discretized."
    )
    logger.info(f"General construction through M={matrix}: {len(image)} elements")
    return GeneralConstruction(matrix, pullback, image, reasoning)

