"""Quantum graphs (S, M, M_n), classical graphs, and the bridge between them.

A quantum graph is an operator system S inside M_n that is a bimodule over
the commutant of a von Neumann algebra M.  Classical graphs embed via the
graph operator system S_G over the diagonal algebra, and a brute-force
oracle supplies exact chromatic numbers for small classical graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import (
    VnAlgebra,
    commutant,
    orthonormalize,
    project,
    project_onto_span,
)
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, hs_norm, matrix_unit

__all__ = [
    "QuantumGraph",
    "EdgeBasisElement",
    "EdgeBasis",
    "ClassicalGraph",
    "ValidationCheck",
    "ValidationReport",
    "validate",
    "edge_basis",
    "adjacency_subspace_basis",
    "vectorize",
    "devectorize",
    "bell_state",
    "graph_operator_system",
    "classical_graph_from_operator_system",
    "proper_coloring",
    "chromatic_number",
    "homomorphism_exists",
    "classical_oracle",
    "OracleReport",
]

SAME_VERTEX = "same_vertex"
ADJACENCY = "adjacency"


@dataclass(frozen=True)
class QuantumGraph:
    """Triple (S, M, M_n): spanning set for S plus the algebra M.

    traceless=True selects the variant where S is a self-adjoint traceless
    bimodule instead of an operator system; the game machinery is unchanged.
    """

    n: int
    algebra: VnAlgebra
    s_basis: tuple[np.ndarray, ...]
    traceless: bool = False

    def __post_init__(self):
        mats = tuple(as_matrix(m) for m in self.s_basis)
        for m in mats:
            if m.shape != (self.n, self.n):
                raise ValueError(f"s_basis element of shape {m.shape}, expected {(self.n, self.n)}")
        if self.algebra.n != self.n:
            raise ValueError(f"algebra lives in M_{self.algebra.n}, graph in M_{self.n}")
        object.__setattr__(self, "s_basis", mats)

    def span_basis(self) -> list[np.ndarray]:
        """HS-orthonormal basis of span(S)."""
        return list(self._span)

    # Immutable value: derived bases are computed once and memoized.
    @cached_property
    def _span(self) -> tuple[np.ndarray, ...]:
        return tuple(orthonormalize(list(self.s_basis)))

    @cached_property
    def _adjacency_basis(self) -> tuple[np.ndarray, ...]:
        perp = [project(self.algebra, "comm_perp", y) for y in self.s_basis]
        return tuple(orthonormalize(perp))


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    residual: float
    witness: dict | None = None


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> ValidationCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(g: QuantumGraph, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Check the quantum graph invariants, reporting worst residual per check."""
    span = g.span_basis()
    checks = []

    worst, witness = 0.0, None
    for idx, y in enumerate(g.s_basis):
        r = hs_norm(y.conj().T - project_onto_span(y.conj().T, span))
        if r > worst:
            worst, witness = r, {"basis_index": idx}
    checks.append(ValidationCheck("self_adjoint", worst <= tol.eps, worst, witness))

    if g.traceless:
        worst, witness = 0.0, None
        for idx, y in enumerate(g.s_basis):
            r = abs(np.trace(y))
            if r > worst:
                worst, witness = r, {"basis_index": idx}
        checks.append(ValidationCheck("traceless", worst <= tol.eps, worst, witness))
    else:
        eye = np.eye(g.n, dtype=np.complex128)
        r = hs_norm(eye - project_onto_span(eye, span))
        checks.append(ValidationCheck("operator_system", r <= tol.eps, r, None))

    comm = commutant(g.algebra)
    worst, witness = 0.0, None
    for ai, a in enumerate(comm):
        for bi, b in enumerate(comm):
            for yi, y in enumerate(g.s_basis):
                z = a @ y @ b
                r = hs_norm(z - project_onto_span(z, span))
                if r > worst:
                    worst, witness = r, {"comm_left": ai, "comm_right": bi, "basis_index": yi}
    checks.append(ValidationCheck("bimodule", worst <= tol.eps, worst, witness))
    return ValidationReport(tuple(checks))


@dataclass(frozen=True)
class EdgeBasisElement:
    matrix: np.ndarray
    tag: str  # SAME_VERTEX or ADJACENCY
    block: tuple[int, int]  # indices into the flattened K-block list


@dataclass(frozen=True)
class EdgeBasis:
    elements: tuple[EdgeBasisElement, ...]
    block_dims: tuple[int, ...]

    def tagged(self, tag: str) -> list[EdgeBasisElement]:
        return [e for e in self.elements if e.tag == tag]

    def matrices(self) -> list[np.ndarray]:
        return [e.matrix for e in self.elements]


def adjacency_subspace_basis(g: QuantumGraph) -> list[np.ndarray]:
    """HS-orthonormal basis of S intersect (M')^perp."""
    return list(g._adjacency_basis)


def edge_basis(g: QuantumGraph, tol: Tolerance = DEFAULT_TOL) -> EdgeBasis:
    """Quantum edge basis for the homomorphism game.

    Per K-block pair the basis is seeded with the compressions of M'
    (normalized matrix units between the copies, including the normalized
    block projections on the diagonal) and extended by modified Gram-Schmidt
    over the compressions of S intersect (M')^perp.  Deterministic, and
    memoized per graph and tolerance.
    """
    cache = g.__dict__.setdefault("_edge_basis_cache", {})
    if tol.eps not in cache:
        cache[tol.eps] = _compute_edge_basis(g, tol)
    return cache[tol.eps]


def _compute_edge_basis(g: QuantumGraph, tol: Tolerance) -> EdgeBasis:
    report = validate(g, tol)
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        raise ValueError(f"quantum graph fails validation: {failed}")

    kblocks = g.algebra.k_blocks()
    perp_basis = adjacency_subspace_basis(g)
    drop = tol.eps * 10

    elements: list[EdgeBasisElement] = []
    for a_idx, ka in enumerate(kblocks):
        for b_idx, kb in enumerate(kblocks):
            seeds: list[np.ndarray] = []
            if not g.traceless and ka.central == kb.central:
                # E_a M' E_b is one-dimensional: the normalized matrix unit
                # between the two copies of the irreducible representation.
                unit = ka.isometry @ kb.isometry.conj().T / np.sqrt(ka.dim)
                seeds.append(unit)
                elements.append(EdgeBasisElement(unit, SAME_VERTEX, (a_idx, b_idx)))
            pa, pb = ka.projection, kb.projection
            kept = list(seeds)
            for z in perp_basis:
                cand = pa @ z @ pb
                for prev in kept:
                    cand = cand - np.vdot(prev, cand) * prev
                nrm = hs_norm(cand)
                if nrm >= drop:
                    cand = cand / nrm
                    kept.append(cand)
                    elements.append(EdgeBasisElement(cand, ADJACENCY, (a_idx, b_idx)))
    return EdgeBasis(tuple(elements), tuple(k.dim for k in kblocks))


def vectorize(y, basis: np.ndarray | None = None) -> np.ndarray:
    """Matrix -> vector under v_i (x) v_j  <->  v_i v_j*.

    With the standard basis this is the row-major flattening; a general
    orthonormal basis is handled by conjugation.  Inner-product preserving
    between the unnormalized HS and standard inner products.
    """
    y = as_matrix(y)
    n = y.shape[0]
    if y.shape != (n, n):
        raise ValueError(f"expected square matrix, got {y.shape}")
    if basis is None:
        return y.reshape(n * n).copy()
    v = _checked_basis(basis, n)
    coeff = v.conj().T @ y @ v
    return (np.kron(v, v) @ coeff.reshape(n * n)).reshape(n * n)


def devectorize(vec, basis: np.ndarray | None = None) -> np.ndarray:
    """Inverse of vectorize."""
    vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
    n = round(np.sqrt(vec.size))
    if n * n != vec.size:
        raise ValueError(f"vector of length {vec.size} is not n^2")
    if basis is None:
        return vec.reshape(n, n).copy()
    v = _checked_basis(basis, n)
    coeff = (np.kron(v, v).conj().T @ vec).reshape(n, n)
    return v @ coeff @ v.conj().T


def _checked_basis(basis, n: int) -> np.ndarray:
    v = as_matrix(basis)
    if v.shape != (n, n):
        raise ValueError(f"basis must be {n} column vectors of length {n}")
    if hs_norm(v.conj().T @ v - np.eye(n)) > 1e-8:
        raise ValueError("basis columns are not orthonormal")
    return v


def bell_state(subset, n: int) -> np.ndarray:
    """Maximally entangled state (1/sqrt|S|) sum_{j in S} e_j (x) e_j in C^n (x) C^n."""
    idx = sorted(set(int(j) for j in subset))
    if not idx:
        raise ValueError("subset must be nonempty")
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError(f"subset {idx} out of range for n={n}")
    v = np.zeros(n * n, dtype=np.complex128)
    for j in idx:
        v[j * n + j] = 1.0
    return v / np.sqrt(len(idx))


@dataclass(frozen=True)
class ClassicalGraph:
    """Finite simple graph: vertex count plus a set of unordered edges."""

    vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            x, y = int(e[0]), int(e[1])
            if x == y:
                raise ValueError(f"loop at vertex {x} not allowed")
            if not (0 <= x < self.vertices and 0 <= y < self.vertices):
                raise ValueError(f"edge {e} out of range")
            seen.add((min(x, y), max(x, y)))
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @classmethod
    def complete(cls, c: int) -> "ClassicalGraph":
        return cls(c, tuple((i, j) for i in range(c) for j in range(i + 1, c)))

    @classmethod
    def cycle(cls, n: int) -> "ClassicalGraph":
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def empty(cls, n: int) -> "ClassicalGraph":
        return cls(n, ())

    def adjacent(self, x: int, y: int) -> bool:
        return (min(x, y), max(x, y)) in self._edge_set

    @property
    def _edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def neighbors(self, x: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == x:
                out.append(b)
            elif b == x:
                out.append(a)
        return sorted(out)


def graph_operator_system(g: ClassicalGraph) -> QuantumGraph:
    """S_G = span({E_ii} u {E_ij : i ~ j}) over the diagonal algebra D_n."""
    n = g.vertices
    basis = [matrix_unit(n, i, i) for i in range(n)]
    for i, j in g.edges:
        basis.append(matrix_unit(n, i, j))
        basis.append(matrix_unit(n, j, i))
    diag = VnAlgebra(n=n, blocks=tuple((1, 1) for _ in range(n)))
    return QuantumGraph(n=n, algebra=diag, s_basis=tuple(basis))


def classical_graph_from_operator_system(
    g: QuantumGraph, tol: Tolerance = DEFAULT_TOL
) -> ClassicalGraph | None:
    """Recognize S_G over D_n; returns the graph, or None if g is not of that form."""
    if g.traceless or not all(b == (1, 1) for b in g.algebra.blocks):
        return None
    if g.algebra.unitary is not None:
        return None
    n = g.n
    span = g.span_basis()
    edges = []
    for i in range(n):
        e = matrix_unit(n, i, i)
        if hs_norm(e - project_onto_span(e, span)) > tol.eps:
            return None
    for i in range(n):
        for j in range(i + 1, n):
            e = matrix_unit(n, i, j)
            r = hs_norm(e - project_onto_span(e, span))
            if r <= tol.eps:
                edges.append((i, j))
            elif abs(r - 1.0) > tol.eps * 10:
                return None  # partially present matrix unit: not a graph system
    candidate = ClassicalGraph(n, tuple(edges))
    if len(span) != n + 2 * len(candidate.edges):
        return None
    return candidate


# --- brute-force oracle -----------------------------------------------------

DEFAULT_VERTEX_CAP = 8


def _check_cap(g: ClassicalGraph, cap: int):
    if g.vertices > cap:
        raise ValueError(f"graph has {g.vertices} vertices; oracle cap is {cap}")


def proper_coloring(g: ClassicalGraph, colors: int) -> tuple[int, ...] | None:
    """First proper coloring with the given number of colors, or None.

    Backtracking over vertices in index order; deterministic.
    """
    assignment = [-1] * g.vertices
    adj = [g.neighbors(v) for v in range(g.vertices)]

    def extend(v: int) -> bool:
        if v == g.vertices:
            return True
        for col in range(colors):
            if all(assignment[u] != col for u in adj[v] if u < v):
                assignment[v] = col
                if extend(v + 1):
                    return True
                assignment[v] = -1
        return False

    if extend(0):
        return tuple(assignment)
    return None


def chromatic_number(g: ClassicalGraph, cap: int = DEFAULT_VERTEX_CAP) -> int:
    """Exact chromatic number by exhaustive search (chi of the empty graph on 0 vertices is 0)."""
    _check_cap(g, cap)
    if g.vertices == 0:
        return 0
    for c in range(1, g.vertices + 1):
        if proper_coloring(g, c) is not None:
            return c
    return g.vertices


def homomorphism_exists(
    g: ClassicalGraph, h: ClassicalGraph, cap: int = DEFAULT_VERTEX_CAP
) -> bool:
    """Exhaustive search for a graph homomorphism g -> h."""
    _check_cap(g, cap)
    if g.vertices == 0:
        return True
    if h.vertices == 0:
        return False
    adj = [g.neighbors(v) for v in range(g.vertices)]
    assignment = [-1] * g.vertices

    def extend(v: int) -> bool:
        if v == g.vertices:
            return True
        for img in range(h.vertices):
            ok = True
            for u in adj[v]:
                if u < v and not h.adjacent(assignment[u], img):
                    ok = False
                    break
            if ok:
                assignment[v] = img
                if extend(v + 1):
                    return True
                assignment[v] = -1
        return False

    return extend(0)


@dataclass(frozen=True)
class OracleReport:
    """Brute-force facts about a classical graph."""

    graph: ClassicalGraph
    chromatic_number: int
    cap: int = DEFAULT_VERTEX_CAP

    def hom_to(self, h: ClassicalGraph) -> bool:
        return homomorphism_exists(self.graph, h, self.cap)


def classical_oracle(g: ClassicalGraph, cap: int = DEFAULT_VERTEX_CAP) -> OracleReport:
    return OracleReport(graph=g, chromatic_number=chromatic_number(g, cap), cap=cap)
