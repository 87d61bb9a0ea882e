"""The torus grid graph G_{n,k} and paths on it."""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterator, List, Sequence, Tuple

import networkx as nx

from config import RESOLUTION_CAPS
from logger import get_logger
from services.errors import InvalidInput, InvalidStep, ResolutionCap
from services.lattice_service import LatticeVector, check_dimension, neg, zero

logger = get_logger(__name__)

Vertex = Tuple[int, ...]
EdgeKey = Tuple[Vertex, LatticeVector]


def check_resolution(n: int, k: int) -> int:
    check_dimension(n)
    if k < 3:
        raise InvalidInput(f"Resolution k={k} must be at least 3")
    cap = RESOLUTION_CAPS[n]
    if k > cap:
        raise ResolutionCap(f"Resolution k={k} exceeds the cap {cap} for n={n}")
    return k


def cells(n: int, k: int) -> List[Vertex]:
    """All residues of (Z/k)^n in lexicographic order."""
    return list(product(range(k), repeat=n))


def cell_index(u: Sequence[int], k: int) -> int:
    index = 0
    for c in u:
        index = index * k + c
    return index


def is_positive(d: Sequence[int]) -> bool:
    """True when the first nonzero coordinate of d is positive."""
    for c in d:
        if c:
            return c > 0
    return False


def _is_step(d: Sequence[int]) -> bool:
    return any(d) and all(c in (-1, 0, 1) for c in d)


@dataclass(frozen=True)
class TorusGraph:
    n: int
    k: int

    def __post_init__(self):
        check_resolution(self.n, self.k)

    def vertices(self) -> List[Vertex]:
        return cells(self.n, self.k)

    @cached_property
    def directions(self) -> Tuple[LatticeVector, ...]:
        return tuple(d for d in product((-1, 0, 1), repeat=self.n) if any(d))

    @cached_property
    def canonical_directions(self) -> Tuple[LatticeVector, ...]:
        return tuple(d for d in self.directions if is_positive(d))

    def move(self, u: Sequence[int], d: Sequence[int]) -> Tuple[Vertex, LatticeVector]:
        """Endpoint of the step d from u, with its wrap vector (u + d - v') / k."""
        raw = [a + b for a, b in zip(u, d)]
        v = tuple(c % self.k for c in raw)
        w = tuple((c - r) // self.k for c, r in zip(raw, v))
        return v, w

    def step_between(self, u: Sequence[int], v: Sequence[int]) -> LatticeVector:
        d = tuple(((b - a + 1) % self.k) - 1 for a, b in zip(u, v))
        if any(c > 1 for c in d) or not any(d):
            raise InvalidStep(f"{tuple(u)} and {tuple(v)} are not adjacent in G_{{{self.n},{self.k}}}")
        return d

    def canonical_key(self, u: Sequence[int], d: Sequence[int]) -> Tuple[EdgeKey, int]:
        """Stored key of the oriented edge (u, d) and the sign relating the two."""
        u, d = tuple(u), tuple(d)
        if not _is_step(d) or len(d) != self.n:
            raise InvalidStep(f"{d} is not a step of G_{{{self.n},{self.k}}}")
        if is_positive(d):
            return (u, d), 1
        v, _ = self.move(u, d)
        return (v, neg(d)), -1

    def edges(self) -> Iterator[EdgeKey]:
        for u in self.vertices():
            for d in self.canonical_directions:
                yield u, d

    def edge_count(self) -> int:
        return self.k ** self.n * len(self.canonical_directions)

    def triangles(self) -> Iterator["GridPath"]:
        """Every triangle loop spanned by three corners of one unit cell."""
        corners = list(product((0, 1), repeat=self.n))
        triples = list(combinations(corners, 3))
        for base in self.vertices():
            for a, b, c in triples:
                start = tuple((x + e) % self.k for x, e in zip(base, a))
                steps = (
                    tuple(y - x for x, y in zip(a, b)),
                    tuple(y - x for x, y in zip(b, c)),
                    tuple(y - x for x, y in zip(c, a)),
                )
                yield GridPath(start, steps, self.k)

    def axis_loop(self, i: int) -> "GridPath":
        e = tuple(1 if j == i else 0 for j in range(self.n))
        return GridPath(zero(self.n), (e,) * self.k, self.k)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices())
        for u, d in self.edges():
            v, _ = self.move(u, d)
            graph.add_edge(u, v, step=(u, d))
        return graph


@dataclass(frozen=True)
class GridPath:
    start: Vertex
    steps: Tuple[LatticeVector, ...]
    k: int

    def __post_init__(self):
        n = len(self.start)
        for d in self.steps:
            if len(d) != n or not _is_step(d):
                raise InvalidStep(f"{tuple(d)} is not a grid step in dimension {n}")
        if any(not 0 <= c < self.k for c in self.start):
            raise InvalidStep(f"Start {self.start} is not a residue modulo {self.k}")

    @property
    def n(self) -> int:
        return len(self.start)

    def __len__(self) -> int:
        return len(self.steps)

    def displacement(self) -> LatticeVector:
        """Lift(end) - lift(start) in cell units."""
        return tuple(sum(d[i] for d in self.steps) for i in range(self.n))

    def vertices(self) -> List[Vertex]:
        positions = [self.start]
        for d in self.steps:
            positions.append(tuple((a + b) % self.k for a, b in zip(positions[-1], d)))
        return positions

    def end(self) -> Vertex:
        return tuple((a + b) % self.k for a, b in zip(self.start, self.displacement()))

    def is_loop(self) -> bool:
        return self.end() == self.start

    def reversed(self) -> "GridPath":
        return GridPath(self.end(), tuple(neg(d) for d in reversed(self.steps)), self.k)

    def concat(self, other: "GridPath") -> "GridPath":
        if other.k != self.k or other.start != self.end():
            raise InvalidStep(f"Path starting at {other.start} cannot follow a path ending at {self.end()}")
        return GridPath(self.start, self.steps + other.steps, self.k)

    @classmethod
    def through(cls, vertices: Sequence[Sequence[int]], k: int) -> "GridPath":
        """Path visiting the given residues in order (consecutive ones must be adjacent)."""
        vertices = [tuple(v) for v in vertices]
        if not vertices:
            raise InvalidStep("A path needs at least one vertex")
        graph = TorusGraph(len(vertices[0]), k)
        steps = tuple(graph.step_between(u, v) for u, v in zip(vertices, vertices[1:]))
        return cls(vertices[0], steps, k)
