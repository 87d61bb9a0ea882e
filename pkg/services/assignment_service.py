"""Z^n-valued edge assignments on G_{n,k} (discrete one-forms).

Values are stored once per unoriented edge under its canonical key (u, d) with d
lexicographically positive; the opposite orientation is read by antisymmetry.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from config import CYCLE_BUDGET
from logger import get_logger
from services.errors import (
    BudgetExceeded,
    DimensionMismatch,
    InvalidInput,
    InvalidStep,
    NotALoop,
    NotProper,
    UnsupportedDimension,
)
from services.lattice_service import (
    LatticeVector,
    SymmetricSet,
    add,
    is_primitive,
    neg,
    normalize_symmetric,
    sub,
    zero,
)
from services.nset_service import DiscreteNSet, edge_value
from services.torus_service import EdgeKey, GridPath, TorusGraph, Vertex, cell_index

logger = get_logger(__name__)


@dataclass(frozen=True)
class EdgeAssignment:
    graph: TorusGraph
    values: Tuple[LatticeVector, ...]

    def __post_init__(self):
        if len(self.values) != self.graph.edge_count():
            raise InvalidInput(f"Expected {self.graph.edge_count()} edge values, got {len(self.values)}")
        if any(len(x) != self.graph.n for x in self.values):
            raise DimensionMismatch(f"Edge values must lie in Z^{self.graph.n}")

    def _slot(self, key: EdgeKey) -> int:
        u, d = key
        return cell_index(u, self.graph.k) * len(self.graph.canonical_directions) + self.graph.canonical_directions.index(d)

    def value(self, u: Sequence[int], d: Sequence[int]) -> LatticeVector:
        key, sign = self.graph.canonical_key(u, d)
        stored = self.values[self._slot(key)]
        return stored if sign > 0 else neg(stored)

    @classmethod
    def from_mapping(cls, graph: TorusGraph, mapping: Mapping[EdgeKey, Sequence[int]]) -> "EdgeAssignment":
        """Build from values given on any orientation; unlisted edges get 0."""
        stored: Dict[EdgeKey, LatticeVector] = {}
        for (u, d), x in mapping.items():
            key, sign = graph.canonical_key(u, d)
            x = tuple(x) if sign > 0 else neg(x)
            if stored.get(key, x) != x:
                raise InvalidInput(f"Edge {key} given two inconsistent values")
            stored[key] = x
        return cls(graph, tuple(stored.get(key, zero(graph.n)) for key in graph.edges()))

    @classmethod
    def from_function(cls, graph: TorusGraph, fn: Callable[[Vertex, LatticeVector], Sequence[int]]) -> "EdgeAssignment":
        return cls(graph, tuple(tuple(fn(u, d)) for u, d in graph.edges()))


def zero_assignment(graph: TorusGraph) -> EdgeAssignment:
    return EdgeAssignment(graph, (zero(graph.n),) * graph.edge_count())


def _same_graph(chi: EdgeAssignment, psi: EdgeAssignment):
    if chi.graph != psi.graph:
        raise DimensionMismatch(f"Assignments live on G_{{{chi.graph.n},{chi.graph.k}}} and G_{{{psi.graph.n},{psi.graph.k}}}")


def add_assignments(chi: EdgeAssignment, psi: EdgeAssignment) -> EdgeAssignment:
    _same_graph(chi, psi)
    return EdgeAssignment(chi.graph, tuple(add(a, b) for a, b in zip(chi.values, psi.values)))


def negate_assignment(chi: EdgeAssignment) -> EdgeAssignment:
    return EdgeAssignment(chi.graph, tuple(neg(a) for a in chi.values))


def coboundary(graph: TorusGraph, h: Union[Mapping[Vertex, Sequence[int]], Callable[[Vertex], Sequence[int]]]) -> EdgeAssignment:
    """The exact assignment (u, d) -> h(v') - h(u) of a vertex function h."""
    lookup = h if callable(h) else h.__getitem__

    def value(u, d):
        v, _ = graph.move(u, d)
        return sub(lookup(v), lookup(u))

    return EdgeAssignment.from_function(graph, value)


def evaluate(chi: EdgeAssignment, p: GridPath) -> LatticeVector:
    if p.k != chi.graph.k or p.n != chi.graph.n:
        raise InvalidStep(f"Path on G_{{{p.n},{p.k}}} evaluated on G_{{{chi.graph.n},{chi.graph.k}}}")
    total = zero(chi.graph.n)
    u = p.start
    for d in p.steps:
        total = add(total, chi.value(u, d))
        u, _ = chi.graph.move(u, d)
    return total


def winding_vector(p: GridPath) -> LatticeVector:
    if not p.is_loop():
        raise NotALoop(f"Path from {p.start} ends at {p.end()}")
    return tuple(c // p.k for c in p.displacement())


@dataclass(frozen=True)
class Classification:
    closed: bool
    exact: bool
    proper: bool


def classify(chi: EdgeAssignment) -> Classification:
    graph = chi.graph
    closed = all(not any(evaluate(chi, t)) for t in graph.triangles())
    if not closed:
        return Classification(False, False, False)
    axis_values = [evaluate(chi, graph.axis_loop(i)) for i in range(graph.n)]
    exact = all(not any(x) for x in axis_values)
    proper = all(x == graph.axis_loop(i).steps[0] for i, x in enumerate(axis_values))
    return Classification(True, exact, proper)


def edge_values(chi: EdgeAssignment) -> SymmetricSet:
    return normalize_symmetric(chi.values, chi.graph.n)


def differentiate(K: DiscreteNSet) -> EdgeAssignment:
    return EdgeAssignment.from_function(K.graph, lambda u, d: edge_value(K, u, d))


def integrate(chi: EdgeAssignment, base: Optional[Sequence[int]] = None) -> DiscreteNSet:
    graph = chi.graph
    base = tuple(base) if base is not None else zero(graph.n)
    if not classify(chi).proper:
        raise NotProper("Only proper assignments correspond to N-sets")

    f: Dict[Vertex, LatticeVector] = {base: zero(graph.n)}
    for a, b in nx.bfs_edges(graph.to_networkx(), base):
        d = graph.step_between(a, b)
        _, w = graph.move(a, d)
        f[b] = add(sub(f[a], chi.value(a, d)), w)
    return DiscreteNSet.from_mapping(graph.n, graph.k, f)


# Simple cycles on G_{2,k}


@dataclass(frozen=True)
class CycleRecord:
    path: GridPath
    winding: LatticeVector
    embedded: bool

    @property
    def vertices(self) -> List[Vertex]:
        return self.path.vertices()[:-1]


def _toroidal_distance(u: Vertex, v: Vertex, k: int) -> int:
    return max(min((a - b) % k, (b - a) % k) for a, b in zip(u, v))


def _is_embedded(path: GridPath) -> bool:
    """False when two diagonal steps are the two diagonals of one unit square."""
    k = path.k
    seen: Dict[Vertex, int] = {}
    u = path.start
    for d in path.steps:
        if all(d):
            square = tuple(min(a, a + s) % k for a, s in zip(u, d))
            kind = d[0] * d[1]
            if seen.setdefault(square, kind) != kind:
                return False
        u = tuple((a + s) % k for a, s in zip(u, d))
    return True


def simple_cycles(graph: TorusGraph, max_len: int, embedded_only: bool = False) -> List[CycleRecord]:
    """Vertex-simple cycles of length 3..max_len, one per rotation/reflection class.

    A cycle is reported from its smallest vertex, walked in the direction whose
    second vertex is smaller than its last.
    """
    if graph.n != 2:
        raise UnsupportedDimension("Cycle enumeration is implemented for n=2 only")
    k = graph.k
    neighbours = {
        u: sorted(graph.move(u, d)[0] for d in graph.directions) for u in graph.vertices()
    }
    records: List[CycleRecord] = []

    for start in graph.vertices():
        path = [start]
        on_path = {start}
        stack = [iter(v for v in neighbours[start] if v > start)]
        while stack:
            v = next(stack[-1], None)
            if v is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if v in on_path:
                continue
            remaining = max_len - len(path)
            if _toroidal_distance(v, start, k) > remaining:
                continue
            path.append(v)
            on_path.add(v)
            if len(path) >= 3 and path[1] < v and start in neighbours[v]:
                cycle = GridPath.through(path + [start], k)
                record = CycleRecord(cycle, winding_vector(cycle), _is_embedded(cycle))
                if record.embedded or not embedded_only:
                    records.append(record)
                    if len(records) > CYCLE_BUDGET:
                        raise BudgetExceeded(f"More than {CYCLE_BUDGET} cycles up to length {max_len}")
            if len(path) < max_len:
                stack.append(iter(w for w in neighbours[v] if w > start and w not in on_path))
            else:
                on_path.discard(path.pop())

    logger.info(f"Enumerated {len(records)} simple cycles on G_{{2,{k}}} up to length {max_len}")
    return records


def winding_is_zero_or_primitive(record: CycleRecord) -> bool:
    return not any(record.winding) or is_primitive(record.winding)
