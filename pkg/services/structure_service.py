"""Characteristic graph G(A), component filter and decomposition obstructions.

G(A) has one vertex per ±-pair of A∖{0} (stored by its canonical representative)
and joins a_i, a_j whenever a_i + a_j or a_i - a_j lies in A.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from config import OBSTRUCTION_PAIR_BUDGET
from logger import get_logger
from services.errors import BudgetExceeded, InvalidDecomposition, InvalidInput, UnsupportedDimension
from services.lattice_service import (
    LatticeVector,
    SymmetricSet,
    add,
    canonical_representative,
    content,
    generates_full_lattice,
    hermite_basis,
    normalize_symmetric,
    smith_invariants,
    sub,
    subgroup_has_primitive,
)

logger = get_logger(__name__)

THEOREM53 = "theorem53"
CONJECTURE54 = "conjecture54"


@dataclass(frozen=True)
class CharacteristicGraph:
    source: SymmetricSet
    vertices: Tuple[LatticeVector, ...]
    edges: Tuple[Tuple[int, int], ...]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.vertices)))
        graph.add_edges_from(self.edges)
        return graph

    def neighbours(self, pairs: Iterable[LatticeVector]) -> FrozenSet[LatticeVector]:
        """Pairs adjacent to some member of ``pairs`` (members themselves included if adjacent)."""
        index = {v: i for i, v in enumerate(self.vertices)}
        graph = self.to_networkx()
        found = set()
        for p in pairs:
            found.update(self.vertices[j] for j in graph.neighbors(index[p]))
        return frozenset(found)


def characteristic_graph(A: SymmetricSet) -> CharacteristicGraph:
    if not A.is_symmetric():
        raise InvalidInput("The characteristic graph needs a symmetric set containing 0")
    vertices = A.pairs()
    edges = tuple(
        (i, j)
        for i, j in combinations(range(len(vertices)), 2)
        if add(vertices[i], vertices[j]) in A or sub(vertices[i], vertices[j]) in A
    )
    return CharacteristicGraph(A, vertices, edges)


def components(g: CharacteristicGraph) -> List[SymmetricSet]:
    parts = sorted(sorted(c) for c in nx.connected_components(g.to_networkx()))
    return [normalize_symmetric([g.vertices[i] for i in part], g.source.n) for part in parts]


# Necessary conditions


@dataclass(frozen=True)
class NecessaryCondition:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class NecessaryReport:
    verdict: str
    conditions: Tuple[NecessaryCondition, ...]

    @property
    def failed(self) -> Optional[NecessaryCondition]:
        return next((c for c in self.conditions if not c.passed), None)


ACHIEVABLE = "Achievable"
NOT_ACHIEVABLE = "NotAchievable"
INCONCLUSIVE = "Inconclusive"


def necessary_report(A: SymmetricSet) -> NecessaryReport:
    conditions = [
        NecessaryCondition(
            "symmetric",
            A.is_symmetric(),
            "contains 0 and is closed under negation" if A.is_symmetric() else "not symmetric or missing 0",
        )
    ]
    lattice = hermite_basis(A.members, A.n)
    generates = lattice.index == 1
    if A.n == 1:
        detail = f"gcd {content(v[0] for v in A.members)}"
    elif lattice.index is None:
        detail = f"rank {lattice.rank} < {A.n}"
    else:
        detail = f"index {lattice.index}"
    conditions.append(NecessaryCondition("generates", generates, detail))

    # Component filter; in dimension one {0,±2,±3} is achievable while no component generates Z.
    if A.n >= 2:
        parts = components(characteristic_graph(A)) if A.is_symmetric() else []
        good = [B for B in parts if generates_full_lattice(B)]
        conditions.append(
            NecessaryCondition(
                "component_generates",
                bool(good),
                f"{len(good)} of {len(parts)} components generate Z^{A.n}",
            )
        )

    if not all(c.passed for c in conditions):
        verdict = NOT_ACHIEVABLE
    elif A.n == 1:
        verdict = ACHIEVABLE
    else:
        verdict = INCONCLUSIVE
    return NecessaryReport(verdict, tuple(conditions))


# Decompositions


@dataclass(frozen=True)
class Piece:
    S: Tuple[LatticeVector, ...]
    delta: Tuple[LatticeVector, ...]


@dataclass(frozen=True)
class Decomposition:
    pieces: Tuple[Piece, ...]
    mode: str = THEOREM53
    conjectural: bool = field(default=False)

    def to_certificate(self) -> Dict:
        return {
            "mode": self.mode,
            "pieces": [
                {"S": _expand(p.S), "Delta": _expand(p.delta)} for p in self.pieces
            ],
        }


def _expand(pairs: Sequence[LatticeVector]) -> List[List[int]]:
    return sorted([list(v) for v in pairs] + [[-c for c in v] for v in pairs])


def _delta_ok(delta: Sequence[LatticeVector], n: int, mode: str) -> bool:
    subgroup = hermite_basis(delta, n)
    if mode == THEOREM53:
        return not subgroup_has_primitive(subgroup)
    return not smith_invariants(subgroup).cyclic


def _hypothesis_violations(
    g: CharacteristicGraph, pieces: Sequence[Tuple[FrozenSet[LatticeVector], FrozenSet[LatticeVector]]], mode: str
) -> List[str]:
    violations = []
    n = g.source.n
    index = {v: i for i, v in enumerate(g.vertices)}
    adjacency = g.to_networkx()
    for a, (S_a, _) in enumerate(pieces):
        for b in range(a + 1, len(pieces)):
            S_b = pieces[b][0]
            if S_a & S_b:
                violations.append(f"pieces {a} and {b} overlap")
            elif any(adjacency.has_edge(index[x], index[y]) for x in S_a for y in S_b):
                violations.append(f"pieces {a} and {b} are adjacent")
    covered = set()
    for S, delta in pieces:
        covered |= S | delta
    if covered != set(g.vertices):
        missing = sorted(set(g.vertices) - covered)
        violations.append(f"pairs {missing} are not covered")
    for i, (_, delta) in enumerate(pieces):
        if not _delta_ok(sorted(delta), n, mode):
            if mode == THEOREM53:
                violations.append(f"Delta of piece {i} spans a primitive vector")
            else:
                violations.append(f"Delta of piece {i} has a cyclic quotient")
    return violations


def _pairs_of(A: SymmetricSet, S: Iterable[Sequence[int]]) -> FrozenSet[LatticeVector]:
    pairs = set()
    for v in S:
        v = tuple(v)
        if not any(v):
            continue
        if v not in A:
            raise InvalidDecomposition(f"{v} is not an element of the set", [f"{v} not in A"])
        pairs.add(canonical_representative(v))
    return frozenset(pairs)


def validate_decomposition(
    A: SymmetricSet, S_list: Sequence[Iterable[Sequence[int]]], mode: str = THEOREM53
) -> Decomposition:
    g = characteristic_graph(A)
    pieces = []
    for S in S_list:
        pairs = _pairs_of(A, S)
        pieces.append((pairs, g.neighbours(pairs) - pairs))
    violations = _hypothesis_violations(g, pieces, mode)
    if violations:
        raise InvalidDecomposition("; ".join(violations), violations)
    return Decomposition(
        tuple(Piece(tuple(sorted(S)), tuple(sorted(delta))) for S, delta in pieces),
        mode,
        mode == CONJECTURE54,
    )


def _search(A: SymmetricSet, mode: str) -> Optional[Decomposition]:
    g = characteristic_graph(A)
    count = len(g.vertices)
    if count > OBSTRUCTION_PAIR_BUDGET:
        raise BudgetExceeded(f"{count} pairs exceed the obstruction budget {OBSTRUCTION_PAIR_BUDGET}")
    n = A.n
    adjacency = g.to_networkx()

    @lru_cache(maxsize=None)
    def generates(pairs: FrozenSet[LatticeVector]) -> bool:
        return bool(pairs) and hermite_basis(sorted(pairs), n).index == 1

    @lru_cache(maxsize=None)
    def delta_ok(pairs: FrozenSet[LatticeVector]) -> bool:
        return _delta_ok(sorted(pairs), n, mode)

    for size in range(1, count + 1):
        for chosen in combinations(range(count), size):
            induced = adjacency.subgraph(chosen)
            parts = sorted(sorted(c) for c in nx.connected_components(induced))
            pieces = []
            for part in parts:
                S = frozenset(g.vertices[i] for i in part)
                delta = frozenset(g.vertices[j] for i in part for j in adjacency.neighbors(i)) - S
                pieces.append((S, delta))
            covered = set().union(*(S | delta for S, delta in pieces))
            if len(covered) != count:
                continue
            if not all(delta_ok(delta) for _, delta in pieces):
                continue
            if any(generates(S | delta) for S, delta in pieces):
                continue
            if generates(frozenset().union(*(delta for _, delta in pieces))):
                continue
            decomposition = Decomposition(
                tuple(Piece(tuple(sorted(S)), tuple(sorted(delta))) for S, delta in pieces),
                mode,
                mode == CONJECTURE54,
            )
            logger.info(f"{mode} certificate with {len(pieces)} pieces for a set of {count} pairs")
            return decomposition
    return None


def obstruction_search(A: SymmetricSet) -> Optional[Decomposition]:
    """First decomposition (by pair-subset size, then index order) that refutes A."""
    if A.n != 2:
        raise UnsupportedDimension("The decomposition obstruction is a statement about Z^2")
    return _search(A, THEOREM53)


def conjecture54_search(A: SymmetricSet) -> Optional[Decomposition]:
    """Same search with the non-cyclic-quotient hypothesis; results are conjectural."""
    if A.n < 2:
        raise UnsupportedDimension("The non-cyclic quotient variant needs n >= 2")
    return _search(A, CONJECTURE54)
