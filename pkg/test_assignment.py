"""
Test Suite for the torus graph and edge assignments
Covers G_{n,k}, path evaluation, winding vectors, classification,
differentiate/integrate and simple-cycle enumeration on G_{2,k}.
"""

import random

import pytest

from services.assignment_service import (
    EdgeAssignment,
    add_assignments,
    classify,
    coboundary,
    differentiate,
    edge_values,
    evaluate,
    integrate,
    negate_assignment,
    simple_cycles,
    winding_is_zero_or_primitive,
    winding_vector,
    zero_assignment,
)
from services.errors import (
    DimensionMismatch,
    InvalidInput,
    InvalidStep,
    NotALoop,
    NotProper,
    ResolutionCap,
    UnsupportedDimension,
)
from services.lattice_service import add, normalize_symmetric
from services.nset_service import DiscreteNSet
from services.torus_service import GridPath, TorusGraph


def random_nset(rng, n, k, spread=2):
    shifts = [tuple(rng.randint(-spread, spread) for _ in range(n)) for _ in range(k ** n)]
    shifts[0] = (0,) * n
    return DiscreteNSet(n, k, tuple(shifts))


def random_walk(rng, graph, length, start=None):
    start = start or tuple(rng.randrange(graph.k) for _ in range(graph.n))
    steps = tuple(rng.choice(graph.directions) for _ in range(length))
    return GridPath(start, steps, graph.k)


def close_loop(rng, graph, length):
    """Random walk followed by the shortest way back to its start."""
    path = random_walk(rng, graph, length)
    steps = list(path.steps)
    position = path.end()
    while position != path.start:
        d = []
        for a, b in zip(position, path.start):
            gap = (b - a) % graph.k
            d.append(0 if gap == 0 else (1 if gap <= graph.k // 2 else -1))
        steps.append(tuple(d))
        position = graph.move(position, d)[0]
    return GridPath(path.start, tuple(steps), graph.k)


def random_proper(rng, n, k):
    """Proper assignment: derivative of a random N-set plus a random coboundary."""
    graph = TorusGraph(n, k)
    h = {u: tuple(rng.randint(-3, 3) for _ in range(n)) for u in graph.vertices()}
    return add_assignments(differentiate(random_nset(rng, n, k)), coboundary(graph, h))


# ============================================
# Torus Graph Tests
# ============================================

class TestTorusGraph:
    """Test vertices, edges and resolution checks of G_{n,k}"""

    def test_resolution_below_three_rejected(self):
        """Test k=2 is invalid"""
        with pytest.raises(InvalidInput):
            TorusGraph(2, 2)

    def test_resolution_cap(self):
        """Test k above the planar cap raises ResolutionCap"""
        with pytest.raises(ResolutionCap):
            TorusGraph(2, 33)

    def test_edge_counts(self):
        """Test (3^n - 1)/2 unoriented edges per vertex"""
        assert TorusGraph(1, 5).edge_count() == 5
        assert TorusGraph(2, 3).edge_count() == 36
        assert len(list(TorusGraph(2, 4).edges())) == 64

    def test_move_wraps_around(self):
        """Test the wrap vector of a step across the boundary"""
        graph = TorusGraph(2, 3)
        assert graph.move((2, 0), (1, -1)) == ((0, 2), (1, -1))
        assert graph.move((1, 1), (1, 1)) == ((2, 2), (0, 0))

    def test_non_step_rejected(self):
        """Test a path step outside {-1,0,1}^n raises InvalidStep"""
        with pytest.raises(InvalidStep):
            GridPath((0, 0), ((2, 0),), 3)

    def test_through_needs_adjacent_vertices(self):
        """Test GridPath.through rejects non-adjacent residues"""
        with pytest.raises(InvalidStep):
            GridPath.through([(0, 0), (2, 2), (0, 2)], 5)


# ============================================
# Evaluation and Winding Tests
# ============================================

class TestEvaluate:
    """Test path evaluation and its groupoid behaviour"""

    def test_zero_assignment_gives_zero(self):
        """Test any path evaluates to 0 under the zero assignment"""
        graph = TorusGraph(2, 4)
        chi = zero_assignment(graph)
        assert evaluate(chi, random_walk(random.Random(1), graph, 10)) == (0, 0)

    def test_single_edge_and_reverse(self):
        """Test one edge gives its value and the path plus its reverse gives 0"""
        graph = TorusGraph(2, 3)
        chi = EdgeAssignment.from_mapping(graph, {((0, 0), (1, 0)): (5, -2)})
        p = GridPath((0, 0), ((1, 0),), 3)
        assert evaluate(chi, p) == (5, -2)
        assert evaluate(chi, p.reversed()) == (-5, 2)
        assert evaluate(chi, p.concat(p.reversed())) == (0, 0)

    def test_inconsistent_orientations_rejected(self):
        """Test the same edge given two contradicting values"""
        graph = TorusGraph(2, 3)
        with pytest.raises(InvalidInput):
            EdgeAssignment.from_mapping(graph, {((0, 0), (1, 0)): (1, 0), ((1, 0), (-1, 0)): (1, 0)})

    def test_concatenation_adds(self):
        """Test v(P + Q) = v(P) + v(Q) and v(-P) = -v(P)"""
        rng = random.Random(2)
        graph = TorusGraph(2, 4)
        for _ in range(50):
            chi = EdgeAssignment(graph, tuple((rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(graph.edge_count())))
            p = random_walk(rng, graph, rng.randint(1, 8))
            q = random_walk(rng, graph, rng.randint(1, 8), start=p.end())
            assert evaluate(chi, p.concat(q)) == add(evaluate(chi, p), evaluate(chi, q))
            assert evaluate(chi, p.reversed()) == tuple(-c for c in evaluate(chi, p))

    def test_path_on_other_graph_rejected(self):
        """Test evaluating a G_{2,4} path on G_{2,3}"""
        chi = zero_assignment(TorusGraph(2, 3))
        with pytest.raises(InvalidStep):
            evaluate(chi, GridPath((0, 0), ((1, 0),), 4))

    def test_sum_of_assignments_on_different_graphs(self):
        """Test adding assignments of different graphs"""
        with pytest.raises(DimensionMismatch):
            add_assignments(zero_assignment(TorusGraph(2, 3)), zero_assignment(TorusGraph(2, 4)))


class TestWinding:
    """Test winding vectors of loops"""

    def test_axis_loop(self):
        """Test the axis loop winds once"""
        graph = TorusGraph(2, 3)
        assert winding_vector(graph.axis_loop(0)) == (1, 0)
        assert winding_vector(graph.axis_loop(1)) == (0, 1)

    def test_triangle_has_zero_winding(self):
        """Test a unit-cell triangle does not wind"""
        t = GridPath((0, 0), ((1, 0), (0, 1), (-1, -1)), 3)
        assert winding_vector(t) == (0, 0)

    def test_diagonal_loop(self):
        """Test k diagonal steps wind (1,1)"""
        assert winding_vector(GridPath((0, 0), ((1, 1),) * 4, 4)) == (1, 1)

    def test_open_path_rejected(self):
        """Test NotALoop for a path that does not return"""
        with pytest.raises(NotALoop):
            winding_vector(GridPath((0, 0), ((1, 0),), 3))


# ============================================
# Classification Tests
# ============================================

class TestClassify:
    """Test closed, exact and proper assignments"""

    def test_zero_is_closed_and_exact(self):
        """Test the zero assignment"""
        result = classify(zero_assignment(TorusGraph(2, 3)))
        assert result.closed and result.exact and not result.proper

    def test_single_edge_is_not_closed(self):
        """Test a lone nonzero edge breaks closedness"""
        graph = TorusGraph(2, 3)
        chi = EdgeAssignment.from_mapping(graph, {((0, 0), (1, 0)): (1, 0)})
        assert not classify(chi).closed

    def test_derivative_is_proper(self):
        """Test differentiate(K) is proper for random N-sets"""
        rng = random.Random(4)
        for n, k in ((1, 5), (2, 3), (2, 4)):
            for _ in range(10):
                assert classify(differentiate(random_nset(rng, n, k))).proper

    def test_coboundary_is_exact(self):
        """Test a vertex-function coboundary is exact"""
        rng = random.Random(6)
        graph = TorusGraph(2, 4)
        h = {u: (rng.randint(-3, 3), rng.randint(-3, 3)) for u in graph.vertices()}
        result = classify(coboundary(graph, h))
        assert result.closed and result.exact

    def test_proper_plus_exact_is_proper(self):
        """Test adding an exact assignment keeps properness"""
        rng = random.Random(8)
        for _ in range(10):
            assert classify(random_proper(rng, 2, 3)).proper

    def test_negated_proper_is_not_proper(self):
        """Test -chi winds the wrong way"""
        chi = differentiate(DiscreteNSet.zero(2, 3))
        result = classify(negate_assignment(chi))
        assert result.closed and not result.proper


class TestLoopValues:
    """Test evaluation on loops of closed and proper assignments"""

    def test_proper_loop_value_is_winding(self):
        """Test v(P) = winding(P) for proper assignments"""
        rng = random.Random(10)
        for n, k in ((1, 4), (2, 3), (2, 5)):
            graph = TorusGraph(n, k)
            for _ in range(5):
                chi = random_proper(rng, n, k)
                for _ in range(20):
                    loop = close_loop(rng, graph, rng.randint(1, 12))
                    assert evaluate(chi, loop) == winding_vector(loop)

    def test_triangle_moves_preserve_closed_values(self):
        """Test replacing two steps by their sum inside a unit cell keeps v(P)"""
        rng = random.Random(12)
        graph = TorusGraph(2, 4)
        chi = random_proper(rng, 2, 4)
        checked = 0
        while checked < 100:
            p = close_loop(rng, graph, rng.randint(2, 10))
            for i in range(len(p.steps) - 1):
                d1, d2 = p.steps[i], p.steps[i + 1]
                s = add(d1, d2)
                if any(s) and all(max(0, a, c) - min(0, a, c) <= 1 for a, c in zip(d1, s)):
                    q = GridPath(p.start, p.steps[:i] + (s,) + p.steps[i + 2:], p.k)
                    assert evaluate(chi, q) == evaluate(chi, p)
                    checked += 1
                    break


# ============================================
# Differentiate / Integrate Tests
# ============================================

class TestDifferentiateIntegrate:
    """Test the N-set and proper-assignment correspondence"""

    def test_zero_nset_values(self):
        """Test f = 0 on G_{1,3} has edge values {0, ±1}"""
        chi = differentiate(DiscreteNSet.zero(1, 3))
        assert chi.value((0,), (1,)) == (0,)
        assert chi.value((2,), (1,)) == (1,)
        assert edge_values(chi) == normalize_symmetric([(1,)])

    def test_shifted_cell_values(self):
        """Test f = [0,0,1] on G_{1,3} gives values 0, -1, 2"""
        K = DiscreteNSet(1, 3, ((0,), (0,), (1,)))
        chi = differentiate(K)
        assert [chi.value((u,), (1,)) for u in range(3)] == [(0,), (-1,), (2,)]
        assert edge_values(chi) == normalize_symmetric([(1,), (2,)])

    def test_integrate_recovers_shifts(self):
        """Test integrate inverts differentiate for the [0,0,1] example"""
        graph = TorusGraph(1, 3)
        chi = EdgeAssignment(graph, ((0,), (-1,), (2,)))
        assert integrate(chi).shifts == ((0,), (0,), (1,))

    def test_zero_assignment_cannot_be_integrated(self):
        """Test NotProper for the zero assignment"""
        with pytest.raises(NotProper):
            integrate(zero_assignment(TorusGraph(2, 3)))

    def test_round_trips(self):
        """Test integrate(differentiate(K)) = K - f(0) and differentiate(integrate(chi)) = chi"""
        rng = random.Random(14)
        for n, k in ((1, 6), (2, 3), (2, 4), (3, 3)):
            for _ in range(5):
                K = random_nset(rng, n, k, spread=3)
                K = DiscreteNSet(n, k, tuple(add(x, (1,) * n) for x in K.shifts))
                assert integrate(differentiate(K)) == K.normalized()
                chi = random_proper(rng, n, k)
                assert differentiate(integrate(chi)) == chi


# ============================================
# Simple Cycle Tests
# ============================================

class TestSimpleCycles:
    """Test simple-cycle enumeration on G_{2,k}"""

    def find(self, records, vertices):
        return next(r for r in records if r.vertices == vertices)

    def test_triangles_and_axis_loops(self):
        """Test length-3 cycles include triangles and the k=3 axis loop"""
        records = simple_cycles(TorusGraph(2, 3), 3)
        assert self.find(records, [(0, 0), (0, 1), (1, 1)]).winding == (0, 0)
        assert self.find(records, [(0, 0), (1, 0), (2, 0)]).winding == (1, 0)
        assert all(len(r.vertices) == 3 for r in records)

    def test_cycles_are_listed_once(self):
        """Test no cycle appears twice in either orientation"""
        records = simple_cycles(TorusGraph(2, 3), 5)
        orientations = {tuple(r.vertices) for r in records}
        assert len(orientations) == len(records)
        for r in records:
            assert r.vertices[0] == min(r.vertices)
            reverse = tuple([r.vertices[0]] + r.vertices[:0:-1])
            assert reverse not in orientations

    def test_crossing_cycle_winds_twice(self):
        """Test the 6-cycle with crossing diagonals winds (2,0) and is not embedded"""
        records = simple_cycles(TorusGraph(2, 3), 6)
        record = self.find(records, [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)])
        assert record.winding == (2, 0)
        assert not record.embedded
        assert not winding_is_zero_or_primitive(record)

    def test_embedded_cycles_wind_primitively_k3(self):
        """Test embedded cycles of G_{2,3} up to length 6 wind by 0 or a primitive vector"""
        records = simple_cycles(TorusGraph(2, 3), 6, embedded_only=True)
        assert records
        assert all(r.embedded for r in records)
        assert all(winding_is_zero_or_primitive(r) for r in records)

    @pytest.mark.slow
    def test_embedded_cycles_wind_primitively(self):
        """Test embedded cycles up to length 8 on G_{2,3} and G_{2,4}"""
        for k in (3, 4):
            for r in simple_cycles(TorusGraph(2, k), 8, embedded_only=True):
                assert winding_is_zero_or_primitive(r)

    def test_planar_only(self):
        """Test cycle enumeration rejects n != 2"""
        with pytest.raises(UnsupportedDimension):
            simple_cycles(TorusGraph(1, 5), 4)
