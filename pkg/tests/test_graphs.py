import itertools

import numpy as np
import pytest

from helpers import rand_unitary
from qgraph import (
    ClassicalGraph,
    QuantumGraph,
    VnAlgebra,
    bell_state,
    chromatic_number,
    classical_oracle,
    devectorize,
    edge_basis,
    graph_operator_system,
    homomorphism_exists,
    hs_inner,
    proper_coloring,
    validate,
    vectorize,
)
from qgraph.algebra import commutant, orthonormalize, project_onto_span
from qgraph.graphs import SAME_VERTEX, classical_graph_from_operator_system
from qgraph.linalg import hs_norm, matrix_unit


def diag_algebra(n):
    return VnAlgebra(n=n, blocks=tuple((1, 1) for _ in range(n)))


def full_graph(n):
    alg = VnAlgebra(n=n, blocks=((1, n),))
    basis = tuple(matrix_unit(n, i, j) for i in range(n) for j in range(n))
    return QuantumGraph(n=n, algebra=alg, s_basis=basis)


class TestValidate:
    def test_classical_triangle(self):
        g = graph_operator_system(ClassicalGraph.complete(3))
        assert validate(g).passed

    def test_missing_identity(self):
        alg = VnAlgebra(n=2, blocks=((1, 2),))
        g = QuantumGraph(n=2, algebra=alg, s_basis=(matrix_unit(2, 0, 1) + matrix_unit(2, 1, 0),))
        report = validate(g)
        assert not report.passed
        assert not report.check("operator_system").passed

    def test_bimodule_failure_witness(self):
        # E_11 (E_12 + E_21) E_22 = E_12 is not in span{I, E_12 + E_21}.
        g = QuantumGraph(
            n=2,
            algebra=diag_algebra(2),
            s_basis=(np.eye(2, dtype=complex), matrix_unit(2, 0, 1) + matrix_unit(2, 1, 0)),
        )
        report = validate(g)
        assert not report.passed
        check = report.check("bimodule")
        assert not check.passed
        assert check.residual == pytest.approx(1 / np.sqrt(2), abs=1e-12)

    def test_traceless_variant(self):
        alg = VnAlgebra(n=2, blocks=((1, 2),))
        g = QuantumGraph(
            n=2,
            algebra=alg,
            s_basis=(matrix_unit(2, 0, 1), matrix_unit(2, 1, 0)),
            traceless=True,
        )
        assert validate(g).passed
        bad = QuantumGraph(n=2, algebra=alg, s_basis=(np.eye(2, dtype=complex),), traceless=True)
        assert not validate(bad).check("traceless").passed


class TestEdgeBasis:
    def test_classical_k2(self):
        g = graph_operator_system(ClassicalGraph.complete(2))
        basis = edge_basis(g)
        same = basis.tagged(SAME_VERTEX)
        adj = basis.tagged("adjacency")
        assert len(basis.elements) == 4
        assert len(same) == 2 and len(adj) == 2
        same_span = orthonormalize([e.matrix for e in same])
        for i in range(2):
            e = matrix_unit(2, i, i)
            assert hs_norm(e - project_onto_span(e, same_span)) < 1e-12
        adj_span = orthonormalize([e.matrix for e in adj])
        for pos in [(0, 1), (1, 0)]:
            e = matrix_unit(2, *pos)
            assert hs_norm(e - project_onto_span(e, adj_span)) < 1e-12

    def test_full_m2_contains_normalized_identity(self):
        basis = edge_basis(full_graph(2))
        same = basis.tagged(SAME_VERTEX)
        assert len(same) == 1
        np.testing.assert_allclose(same[0].matrix, np.eye(2) / np.sqrt(2), atol=1e-12)

    def test_cardinality(self):
        for g in [graph_operator_system(ClassicalGraph.cycle(4)), full_graph(3)]:
            basis = edge_basis(g)
            assert len(basis.elements) == len(orthonormalize(list(g.s_basis)))

    def test_orthonormal(self):
        g = graph_operator_system(ClassicalGraph.cycle(5))
        mats = edge_basis(g).matrices()
        gram = np.array([[hs_inner(a, b) for b in mats] for a in mats])
        np.testing.assert_allclose(gram, np.eye(len(mats)), atol=1e-10)

    def test_block_positions(self):
        g = graph_operator_system(ClassicalGraph.complete(2))
        for e in edge_basis(g).elements:
            r, s = e.block
            # E_r Y E_s = Y for the tagged block pair.
            er = np.zeros((2, 2)); er[r, r] = 1
            es = np.zeros((2, 2)); es[s, s] = 1
            np.testing.assert_allclose(er @ e.matrix @ es, e.matrix, atol=1e-12)

    def test_reordering_spans_same_space(self):
        g = graph_operator_system(ClassicalGraph.cycle(4))
        reordered = QuantumGraph(
            n=g.n, algebra=g.algebra, s_basis=tuple(reversed(g.s_basis))
        )
        b1 = edge_basis(g)
        b2 = edge_basis(reordered)
        assert len(b1.tagged(SAME_VERTEX)) == len(b2.tagged(SAME_VERTEX))
        assert len(b1.tagged("adjacency")) == len(b2.tagged("adjacency"))
        span2 = orthonormalize(b2.matrices())
        worst = max(
            hs_norm(m - project_onto_span(m, span2)) for m in b1.matrices()
        )
        assert worst < 1e-10

    def test_multiplicity_blocks(self):
        # M = C I_2 (x) M_2 in M_4: two K-copies of dimension 2; the
        # same-vertex part is the 4 normalized matrix units of M'.
        alg = VnAlgebra(n=4, blocks=((2, 2),))
        basis = tuple(matrix_unit(4, i, j) for i in range(4) for j in range(4))
        g = QuantumGraph(n=4, algebra=alg, s_basis=basis)
        eb = edge_basis(g)
        same = eb.tagged(SAME_VERTEX)
        assert len(same) == alg.dim_commutant == 4
        assert sorted(e.block for e in same) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert eb.block_dims == (2, 2)
        for e in same:
            if e.block[0] == e.block[1]:
                # Diagonal seeds are the normalized block projections.
                k = g.algebra.k_blocks()[e.block[0]]
                np.testing.assert_allclose(
                    e.matrix, k.projection / np.sqrt(k.dim), atol=1e-12
                )

    def test_adjacency_perp_to_commutant(self):
        alg = VnAlgebra(n=4, blocks=((2, 2),))
        basis = tuple(matrix_unit(4, i, j) for i in range(4) for j in range(4))
        g = QuantumGraph(n=4, algebra=alg, s_basis=basis)
        eb = edge_basis(g)
        comm = commutant(alg)
        worst = max(
            abs(hs_inner(e.matrix, a))
            for e in eb.tagged("adjacency")
            for a in comm
        )
        assert worst <= 1e-10

    def test_invalid_graph_rejected(self):
        alg = VnAlgebra(n=2, blocks=((1, 2),))
        g = QuantumGraph(n=2, algebra=alg, s_basis=(matrix_unit(2, 0, 1),))
        with pytest.raises(ValueError):
            edge_basis(g)


class TestVectorize:
    def test_matrix_unit(self):
        v = vectorize(matrix_unit(2, 0, 1))
        expected = np.zeros(4); expected[1] = 1
        np.testing.assert_allclose(v, expected)

    def test_identity_gives_bell(self):
        n = 3
        np.testing.assert_allclose(
            vectorize(np.eye(n) / np.sqrt(n)), bell_state(range(n), n), atol=1e-12
        )

    def test_isometry(self):
        rng = np.random.default_rng(12)
        for _ in range(5):
            a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            assert np.vdot(vectorize(b), vectorize(a)) == pytest.approx(hs_inner(a, b))

    def test_roundtrip(self):
        rng = np.random.default_rng(13)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        np.testing.assert_allclose(devectorize(vectorize(a)), a)

    def test_general_basis(self):
        rng = np.random.default_rng(14)
        u = rand_unitary(rng, 3)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        vec = vectorize(a, basis=u)
        np.testing.assert_allclose(devectorize(vec, basis=u), a, atol=1e-12)
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert np.vdot(vectorize(b, basis=u), vectorize(a, basis=u)) == pytest.approx(
            hs_inner(a, b)
        )

    def test_non_orthonormal_rejected(self):
        with pytest.raises(ValueError):
            vectorize(np.eye(2), basis=np.ones((2, 2)))


class TestBellState:
    def test_full(self):
        v = bell_state(range(2), 2)
        np.testing.assert_allclose(v, np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_singleton(self):
        v = bell_state([1], 3)
        expected = np.zeros(9); expected[4] = 1
        np.testing.assert_allclose(v, expected)

    def test_unit_norm(self):
        for s in ([0], [0, 2], range(4)):
            assert np.linalg.norm(bell_state(s, 4)) == pytest.approx(1.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            bell_state([], 3)


class TestGraphOperatorSystem:
    def test_complete_gives_full(self):
        g = graph_operator_system(ClassicalGraph.complete(3))
        assert len(orthonormalize(list(g.s_basis))) == 9

    def test_empty_gives_diagonal(self):
        g = graph_operator_system(ClassicalGraph.empty(3))
        assert len(g.s_basis) == 3

    def test_c5_dimension(self):
        g = graph_operator_system(ClassicalGraph.cycle(5))
        assert len(g.s_basis) == 15

    def test_always_validates(self):
        for graph in [ClassicalGraph.cycle(4), ClassicalGraph.complete(4), ClassicalGraph.empty(2)]:
            assert validate(graph_operator_system(graph)).passed

    def test_recognition_roundtrip(self):
        for graph in [ClassicalGraph.cycle(5), ClassicalGraph.empty(3), ClassicalGraph.complete(4)]:
            recovered = classical_graph_from_operator_system(graph_operator_system(graph))
            assert recovered == graph

    def test_recognition_rejects_quantum(self):
        assert classical_graph_from_operator_system(full_graph(2)) is None


class TestClassicalGraph:
    def test_loops_rejected(self):
        with pytest.raises(ValueError):
            ClassicalGraph(2, ((0, 0),))

    def test_range_checked(self):
        with pytest.raises(ValueError):
            ClassicalGraph(2, ((0, 5),))

    def test_edges_deduplicated(self):
        g = ClassicalGraph(3, ((1, 0), (0, 1)))
        assert g.edges == ((0, 1),)


class TestOracle:
    def test_complete(self):
        assert chromatic_number(ClassicalGraph.complete(4)) == 4

    def test_c5_against_inline_enumeration(self):
        # Independent oracle: enumerate all assignments directly here.
        g = ClassicalGraph.cycle(5)

        def colorable(c):
            for assign in itertools.product(range(c), repeat=5):
                if all(assign[a] != assign[b] for a, b in g.edges):
                    return True
            return False

        assert not colorable(2)
        assert colorable(3)
        assert chromatic_number(g) == 3

    def test_bipartite_hom(self):
        assert homomorphism_exists(ClassicalGraph.cycle(4), ClassicalGraph.complete(2))
        assert not homomorphism_exists(ClassicalGraph.cycle(5), ClassicalGraph.complete(2))

    def test_proper_coloring_is_proper(self):
        g = ClassicalGraph.cycle(5)
        col = proper_coloring(g, 3)
        assert col is not None
        assert all(col[a] != col[b] for a, b in g.edges)
        assert proper_coloring(g, 2) is None

    def test_oracle_report(self):
        rep = classical_oracle(ClassicalGraph.cycle(5))
        assert rep.chromatic_number == 3
        assert rep.hom_to(ClassicalGraph.complete(3))
        assert not rep.hom_to(ClassicalGraph.complete(2))

    def test_cap(self):
        with pytest.raises(ValueError):
            chromatic_number(ClassicalGraph.empty(9))
