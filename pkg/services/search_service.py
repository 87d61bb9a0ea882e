"""Bounded backtracking search for exactly k-discrete witnesses.

Cells are assigned in lexicographic order with f(0) = 0. Every unassigned cell
keeps a domain of shifts still compatible with its assigned neighbours: setting
f(u) = x narrows each later neighbour v to x + w + A (w the wrap of the step
u -> v) and the branch is dropped as soon as a domain empties. In exact mode a
branch is also dropped once some missing pair of A can no longer be realized
by any remaining edge.
"""

import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from config import DEFAULT_NODE_LIMIT, SEARCH_CELL_CAP
from logger import get_logger
from schemas.achieve_schema import SearchConfig, SearchMode
from services.errors import (
    BudgetExceeded,
    ConstructionInvariantViolated,
    DimensionMismatch,
    InvalidInput,
    NodeLimit,
    ResolutionCap,
    UnsupportedDimension,
)
from services.lattice_service import (
    LatticeVector,
    SymmetricSet,
    add,
    canonical_representative,
    normalize_symmetric,
    sub,
    sup_norm,
    zero,
)
from services.nset_service import DiscreteNSet, achieved_set
from services.structure_service import (
    NOT_ACHIEVABLE,
    Decomposition,
    NecessaryReport,
    conjecture54_search,
    necessary_report,
    obstruction_search,
    validate_decomposition,
)
from services.torus_service import TorusGraph

logger = get_logger(__name__)

FLUSH_EVERY = 1024


class _Cancelled(Exception):
    pass


class _NodeBudget:
    """Node counter shared by all workers of one search.

    Branch b is charged with the nodes of branches 0..b only, which is what a
    sequential run would have spent before finishing b.
    """

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0
        self.by_branch: Counter = Counter()
        self.best_branch: Optional[int] = None
        self._lock = threading.Lock()

    def spend(self, count: int, branch: int = 0, final: bool = False):
        with self._lock:
            self.used += count
            self.by_branch[branch] += count
            if final:
                return
            if self.best_branch is not None and branch > self.best_branch:
                raise _Cancelled()
            ahead = sum(c for b, c in self.by_branch.items() if b <= branch)
            if ahead > self.limit:
                raise NodeLimit(f"Node limit {self.limit} reached", ahead)

    def found(self, branch: int):
        with self._lock:
            if self.best_branch is None or branch < self.best_branch:
                self.best_branch = branch


class _Grid:
    """Cell order and edge lists of G_{n,k} for the search loops.

    back[i] holds (j, w) for j < i with edge value f(i) - f(j) + w; forward[i]
    holds (j, w) for j > i with f(j) in f(i) + w + A; settled[d] counts the edges
    between cells up to d.
    """

    def __init__(self, n: int, k: int):
        graph = TorusGraph(n, k)
        self.n, self.k = n, k
        self.cells = graph.vertices()
        index = {u: i for i, u in enumerate(self.cells)}
        size = len(self.cells)
        self.back: List[List[Tuple[int, LatticeVector]]] = [[] for _ in range(size)]
        self.forward: List[List[Tuple[int, LatticeVector]]] = [[] for _ in range(size)]
        for i, u in enumerate(self.cells):
            for d in graph.directions:
                v, w = graph.move(u, d)
                if index[v] < i:
                    self.back[i].append((index[v], w))
                elif index[v] > i:
                    self.forward[i].append((index[v], w))
        self.settled: List[int] = []
        for edges in self.back:
            self.settled.append((self.settled[-1] if self.settled else 0) + len(edges))
        self.total_edges = self.settled[-1]

    def frontier(self, depth: int):
        """Edges (j, i, w) from an unassigned cell j to an assigned cell i."""
        for j in range(depth + 1, len(self.cells)):
            for i, w in self.back[j]:
                if i <= depth:
                    yield j, i, w

    def witness(self, f: Sequence[LatticeVector]) -> DiscreteNSet:
        return DiscreteNSet(self.n, self.k, tuple(f))


def _ordered(values) -> List[LatticeVector]:
    return sorted(values, key=lambda x: (sup_norm(x), x))


class _WitnessSearch:
    def __init__(self, A: SymmetricSet, cfg: SearchConfig):
        self.grid = _Grid(A.n, cfg.k)
        self.shifts = list(A.members)
        self.targets = frozenset(A.pairs())
        self.bound = cfg.bound
        self.exact = cfg.mode == SearchMode.exact
        self.box = frozenset(product(range(-cfg.bound, cfg.bound + 1), repeat=A.n))
        self.reachable = self._reachable_after() if self.exact else None

    def allowed(self, x: LatticeVector, w: LatticeVector) -> FrozenSet[LatticeVector]:
        base = add(x, w)
        return frozenset(add(base, a) for a in self.shifts)

    def _reachable_after(self) -> List[FrozenSet[LatticeVector]]:
        """Target pairs an edge between two cells after d could still realize."""
        grid = self.grid
        size = len(grid.cells)
        spread = {sub(x, y) for x in self.box for y in self.box}
        by_wrap: Dict[LatticeVector, FrozenSet[LatticeVector]] = {}
        reach: List[FrozenSet[LatticeVector]] = [frozenset()] * size
        for d in range(size - 2, -1, -1):
            pairs = set(reach[d + 1])
            for _, w in grid.forward[d + 1]:
                if w not in by_wrap:
                    values = (add(s, w) for s in spread)
                    by_wrap[w] = frozenset(canonical_representative(v) for v in values if any(v)) & self.targets
                pairs |= by_wrap[w]
            reach[d] = frozenset(pairs)
        return reach

    def initial_domains(self) -> Optional[List[FrozenSet[LatticeVector]]]:
        grid = self.grid
        origin = zero(grid.n)
        domains = [frozenset([origin])] + [self.box] * (len(grid.cells) - 1)
        for j, w in grid.forward[0]:
            domains[j] = domains[j] & self.allowed(origin, w)
        return domains if all(domains) else None

    def first_choices(self) -> List[LatticeVector]:
        domains = self.initial_domains()
        return _ordered(domains[1]) if domains else []

    def _hopeless(self, f, domains, depth: int, realized: Counter) -> bool:
        grid = self.grid
        missing: Set[LatticeVector] = {p for p in self.targets if not realized[p]}
        if len(missing) > grid.total_edges - grid.settled[depth]:
            return True
        missing -= self.reachable[depth]
        if not missing:
            return False
        for j, i, w in grid.frontier(depth):
            for y in domains[j]:
                value = add(sub(y, f[i]), w)
                if any(value):
                    missing.discard(canonical_representative(value))
            if not missing:
                return False
        return True

    def run(self, budget: _NodeBudget, first: Optional[LatticeVector] = None, branch: int = 0) -> Optional[DiscreteNSet]:
        grid = self.grid
        size = len(grid.cells)
        local = 0
        domains = self.initial_domains()
        if domains is None:
            budget.spend(local, branch, final=True)
            return None

        f: List[Optional[LatticeVector]] = [zero(grid.n)] + [None] * (size - 1)
        iters = [None] * size
        trail: List[List[Tuple[int, FrozenSet[LatticeVector]]]] = [[] for _ in range(size)]
        added: List[List[LatticeVector]] = [[] for _ in range(size)]
        realized: Counter = Counter()
        distinct = 0

        iters[1] = iter([first] if first is not None else _ordered(domains[1]))
        depth = 1
        while depth >= 1:
            if f[depth] is not None:
                for p in added[depth]:
                    realized[p] -= 1
                    if not realized[p]:
                        distinct -= 1
                for j, old in trail[depth]:
                    domains[j] = old
                trail[depth] = []
                f[depth] = None

            x = next(iters[depth], None)
            if x is None:
                depth -= 1
                continue

            local += 1
            if local >= FLUSH_EVERY:
                budget.spend(local, branch)
                local = 0

            f[depth] = x
            pairs = []
            for j, w in grid.back[depth]:
                value = add(sub(x, f[j]), w)
                if any(value):
                    pairs.append(canonical_representative(value))
            added[depth] = pairs
            for p in pairs:
                if not realized[p]:
                    distinct += 1
                realized[p] += 1

            wiped = False
            for j, w in grid.forward[depth]:
                narrowed = domains[j] & self.allowed(x, w)
                if narrowed != domains[j]:
                    trail[depth].append((j, domains[j]))
                    domains[j] = narrowed
                if not narrowed:
                    wiped = True
                    break
            if wiped:
                continue

            if depth == size - 1:
                if not self.exact or distinct == len(self.targets):
                    budget.spend(local, branch, final=True)
                    return grid.witness(f)
                continue
            if self.exact and distinct < len(self.targets) and self._hopeless(f, domains, depth, realized):
                continue
            depth += 1
            iters[depth] = iter(_ordered(domains[depth]))

        budget.spend(local, branch, final=True)
        return None


def _check_search_size(n: int, k: int):
    if n * k ** n > SEARCH_CELL_CAP:
        raise ResolutionCap(f"n*k^n = {n * k ** n} exceeds the search cap {SEARCH_CELL_CAP}")


def verify_witness(A: SymmetricSet, K: DiscreteNSet, mode: SearchMode = SearchMode.exact) -> bool:
    if A.n != K.n:
        raise DimensionMismatch(f"Set in Z^{A.n} checked against a witness in Z^{K.n}")
    achieved = achieved_set(K)
    if SearchMode(mode) == SearchMode.exact:
        return achieved.members == A.members
    return all(v in A for v in achieved.members)


def find_witness(A: SymmetricSet, cfg: SearchConfig) -> Optional[DiscreteNSet]:
    if not A.is_symmetric():
        raise InvalidInput("The witness search needs a symmetric set containing 0")
    TorusGraph(A.n, cfg.k)
    _check_search_size(A.n, cfg.k)
    recommended = max(sup_norm(v) for v in A.members) + 1
    if cfg.bound < recommended:
        logger.warning(f"Bound {cfg.bound} is below the recommended {recommended}")

    search = _WitnessSearch(A, cfg)
    budget = _NodeBudget(cfg.node_limit)
    logger.info(f"Witness search: n={A.n}, k={cfg.k}, bound={cfg.bound}, mode={cfg.mode.value}, threads={cfg.threads}")

    if cfg.threads == 1:
        witness = search.run(budget)
    else:
        witness = _run_split(search, budget, cfg.threads)

    logger.info(f"Witness search at k={cfg.k} {'found a witness' if witness else 'exhausted'} after {budget.used} nodes")
    if witness is not None and not verify_witness(A, witness, cfg.mode):
        raise ConstructionInvariantViolated(f"Search returned a witness at k={cfg.k} that fails re-verification")
    return witness


def _run_split(search: _WitnessSearch, budget: _NodeBudget, threads: int) -> Optional[DiscreteNSet]:
    """Split on the value of cell 1; the earliest successful branch wins.

    Later branches never count against an earlier one, so a parallel run stops
    at the node limit only where the sequential run would have stopped too,
    up to FLUSH_EVERY nodes.
    """
    choices = search.first_choices()

    def work(branch: int):
        try:
            witness = search.run(budget, choices[branch], branch)
        except _Cancelled:
            return "cancelled"
        except NodeLimit as e:
            return e
        if witness is not None:
            budget.found(branch)
        return witness

    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(work, i) for i in range(len(choices))]
        for future in futures:
            outcome = future.result()
            if isinstance(outcome, NodeLimit):
                budget.found(-1)
                raise outcome
            if isinstance(outcome, DiscreteNSet):
                return outcome
    return None


# Decision


@dataclass
class FrontierStep:
    k: int
    bound: int
    outcome: str
    nodes: int = 0


@dataclass
class Decision:
    kind: str
    mode: SearchMode
    necessary: NecessaryReport
    k: Optional[int] = None
    witness: Optional[DiscreteNSet] = None
    reason: Optional[str] = None
    certificate: Optional[Decomposition] = None
    conjectural: Optional[Decomposition] = None
    frontier: List[FrontierStep] = field(default_factory=list)


ACHIEVED = "Achieved"
REFUTED_NECESSARY = "RefutedNecessary"
REFUTED_OBSTRUCTION = "RefutedObstruction"
UNKNOWN = "Unknown"


def decide(A: SymmetricSet, k_max: int, cfg: SearchConfig) -> Decision:
    report = necessary_report(A)
    if report.verdict == NOT_ACHIEVABLE:
        failed = report.failed
        logger.info(f"Refuted by necessary condition '{failed.name}' ({failed.detail})")
        return Decision(REFUTED_NECESSARY, cfg.mode, report, reason=f"{failed.name}: {failed.detail}")

    if A.n == 2:
        try:
            certificate = obstruction_search(A)
        except BudgetExceeded as e:
            logger.warning(f"Obstruction search skipped: {e.detail}")
            certificate = None
        if certificate is not None:
            validate_decomposition(A, [p.S for p in certificate.pieces])
            logger.info(f"Refuted by a decomposition with {len(certificate.pieces)} pieces")
            return Decision(REFUTED_OBSTRUCTION, cfg.mode, report, certificate=certificate)

    frontier: List[FrontierStep] = []
    for k in range(3, k_max + 1):
        step_cfg = cfg.model_copy(update={"k": k})
        try:
            witness = find_witness(A, step_cfg)
        except ResolutionCap as e:
            logger.warning(f"Stopping at k={k}: {e.detail}")
            frontier.append(FrontierStep(k, cfg.bound, "resolution_cap"))
            break
        except NodeLimit as e:
            frontier.append(FrontierStep(k, cfg.bound, "node_limit", e.nodes))
            continue
        if witness is not None:
            logger.info(f"Achieved at k={k}")
            return Decision(ACHIEVED, cfg.mode, report, k=k, witness=witness, frontier=frontier)
        frontier.append(FrontierStep(k, cfg.bound, "exhausted"))

    conjectural = None
    if A.n >= 2:
        try:
            conjectural = conjecture54_search(A)
        except BudgetExceeded as e:
            logger.warning(f"Non-cyclic quotient search skipped: {e.detail}")
    logger.info(f"Unknown after k=3..{k_max}, bound={cfg.bound}")
    return Decision(
        UNKNOWN,
        cfg.mode,
        report,
        reason=f"no witness for k <= {k_max} with |f| <= {cfg.bound}",
        conjectural=conjectural,
        frontier=frontier,
    )


# Catalog


@dataclass
class CatalogResult:
    n: int
    k: int
    bound: int
    records: List[Tuple[SymmetricSet, DiscreteNSet]]
    partial: bool
    nodes: int
    admitted: int = 0


def catalog(n: int, k: int, bound: int, node_limit: int = DEFAULT_NODE_LIMIT) -> CatalogResult:
    """All achieved sets of k-discrete sets with f(0) = 0 and |f| <= bound, one witness each."""
    if n > 2:
        raise UnsupportedDimension("Catalogs are supported for n <= 2")
    if bound < 0:
        raise InvalidInput(f"Bound {bound} must be non-negative")
    TorusGraph(n, k)
    _check_search_size(n, k)
    grid = _Grid(n, k)
    values = _ordered(product(range(-bound, bound + 1), repeat=n))
    size = len(grid.cells)

    f: List[Optional[LatticeVector]] = [zero(n)] + [None] * (size - 1)
    iters = [None] * size
    added: List[List[LatticeVector]] = [[] for _ in range(size)]
    realized: Counter = Counter()
    found: Dict[frozenset, DiscreteNSet] = {}
    nodes = 0
    admitted = 0
    partial = False

    iters[1] = iter(values)
    depth = 1
    while depth >= 1:
        if f[depth] is not None:
            for p in added[depth]:
                realized[p] -= 1
                if not realized[p]:
                    del realized[p]
            f[depth] = None
        x = next(iters[depth], None)
        if x is None:
            depth -= 1
            continue
        nodes += 1
        if nodes > node_limit:
            partial = True
            break
        f[depth] = x
        added[depth] = [
            canonical_representative(v)
            for v in (add(sub(x, f[j]), w) for j, w in grid.back[depth])
            if any(v)
        ]
        realized.update(added[depth])
        if depth == size - 1:
            admitted += 1
            key = frozenset(realized)
            if key not in found:
                found[key] = grid.witness(f)
            continue
        depth += 1
        iters[depth] = iter(values)

    records = sorted(
        ((normalize_symmetric(key, n), witness) for key, witness in found.items()),
        key=lambda r: (len(r[0]), r[0].members),
    )
    if partial:
        logger.warning(f"Catalog n={n}, k={k}, bound={bound} stopped at the node limit {node_limit}")
    logger.info(f"Catalog n={n}, k={k}, bound={bound}: {len(records)} sets from {admitted} completed assignments")
    return CatalogResult(n, k, bound, records, partial, min(nodes, node_limit), admitted)
