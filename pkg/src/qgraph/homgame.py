"""The quantum-to-classical graph homomorphism game and its winning checks.

All characterizations of a winning strategy are exposed and cross-checked:
the structural PVM conditions, the operational (probability) rules on the
quantum edge basis, the CPTP channel with its Kraus subset conditions, and
the game *-algebra relations on a concrete representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import commutant
from .correlations import outcome_probability
from .graphs import SAME_VERTEX, ClassicalGraph, QuantumGraph, adjacency_subspace_basis, edge_basis
from .linalg import DEFAULT_TOL, Tolerance, hs_norm
from .strategies import BlockStrategy, TracialAncilla

__all__ = [
    "GameInstance",
    "GameCheck",
    "GameReport",
    "ChannelRep",
    "verify_structural",
    "verify_operational",
    "extract_channel",
    "check_game_algebra_rep",
    "compose_reps",
]


@dataclass(frozen=True)
class GameInstance:
    """Source quantum graph and classical target for the homomorphism game."""

    source: QuantumGraph
    target: ClassicalGraph


@dataclass(frozen=True)
class GameCheck:
    name: str
    passed: bool
    max_residual: float
    witness: dict | None = None


@dataclass(frozen=True)
class GameReport:
    checks: tuple[GameCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> GameCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "pass": c.passed,
                    "max_residual": c.max_residual,
                    "witness": c.witness,
                }
                for c in self.checks
            ],
        }


def _check_dims(inst: GameInstance, strategy: BlockStrategy):
    if strategy.n != inst.source.n:
        raise ValueError(
            f"strategy has n={strategy.n}, source graph has n={inst.source.n}"
        )
    if strategy.c != inst.target.vertices:
        raise ValueError(
            f"strategy has {strategy.c} outputs, target has {inst.target.vertices} vertices"
        )


def _nonadjacent_pairs(target: ClassicalGraph) -> list[tuple[int, int]]:
    """Pairs (a, b) with a not adjacent to b; includes a = b (targets are loop-free)."""
    c = target.vertices
    return [(a, b) for a in range(c) for b in range(c) if not target.adjacent(a, b)]


def verify_structural(
    inst: GameInstance, strategy: BlockStrategy, tol: Tolerance = DEFAULT_TOL
) -> GameReport:
    """Winning-strategy conditions on the PVM itself.

    (i) the family is a PVM respecting the ancilla blocks, (ii) each P_a lies
    in M (x) N (commutes with M' (x) 1), and (iii) P_a ((S n (M')perp) (x) 1)
    P_b = 0 for every non-adjacent target pair, including a = b.
    """
    _check_dims(inst, strategy)
    checks = []

    rep = strategy.measurement_report(tol)
    pvm_residual = max(
        rep.hermitian_defect,
        max(0.0, -rep.min_eigenvalue),
        rep.sum_defect,
        rep.idempotency_defect,
        rep.orthogonality_defect,
    )
    checks.append(GameCheck("pvm", rep.is_pvm, pvm_residual, None))

    block_defect = strategy.ancilla_block_defect()
    checks.append(GameCheck("ancilla_blocks", block_defect <= tol.eps, block_defect, None))

    d = strategy.ancilla.dim
    eye = np.eye(d)
    worst, witness = 0.0, None
    for a, p in enumerate(strategy.projections):
        for ci, x in enumerate(commutant(inst.source.algebra)):
            big = np.kron(x, eye)
            r = hs_norm(p @ big - big @ p)
            if r > worst:
                worst, witness = r, {"a": a, "commutant_index": ci}
    checks.append(GameCheck("membership", worst <= tol.eps, worst, witness))

    perp = adjacency_subspace_basis(inst.source)
    worst, witness = 0.0, None
    for a, b in _nonadjacent_pairs(inst.target):
        pa, pb = strategy.projections[a], strategy.projections[b]
        for yi, y in enumerate(perp):
            r = hs_norm(pa @ np.kron(y, eye) @ pb)
            if r > worst:
                worst, witness = r, {"a": a, "b": b, "basis_index": yi}
    checks.append(GameCheck("adjacency_zeros", worst <= tol.eps, worst, witness))
    return GameReport(tuple(checks))


def verify_operational(
    inst: GameInstance, strategy: BlockStrategy, tol: Tolerance = DEFAULT_TOL
) -> GameReport:
    """Winning-strategy conditions as vanishing forbidden outcome probabilities.

    Every same-vertex edge-basis input must give p(a,b) = 0 for a != b; every
    adjacency input must give p(a,b) = 0 for non-adjacent target pairs.
    Equivalent to verify_structural for PVM strategies with a faithful trace.
    """
    _check_dims(inst, strategy)
    basis = edge_basis(inst.source, tol)
    nonadj = _nonadjacent_pairs(inst.target)
    c = strategy.c

    same_worst, same_wit = 0.0, None
    adj_worst, adj_wit = 0.0, None
    for idx, elem in enumerate(basis.elements):
        p = outcome_probability(strategy, elem.matrix, tol)
        if elem.tag == SAME_VERTEX:
            for a in range(c):
                for b in range(c):
                    if a != b and abs(p[a, b]) > same_worst:
                        same_worst = float(abs(p[a, b]))
                        same_wit = {"a": a, "b": b, "basis_index": idx}
        else:
            for a, b in nonadj:
                if abs(p[a, b]) > adj_worst:
                    adj_worst = float(abs(p[a, b]))
                    adj_wit = {"a": a, "b": b, "basis_index": idx}
    checks = (
        GameCheck("same_vertex_rule", same_worst <= tol.eps, same_worst, same_wit),
        GameCheck("adjacency_rule", adj_worst <= tol.eps, adj_worst, adj_wit),
    )
    return GameReport(checks)


@dataclass(frozen=True)
class ChannelRep:
    """Kraus form of the CPTP map extracted from a winning PVM.

    kraus[i] maps C^{n D} -> C^c; choi is the (positive) Choi matrix of the
    map X -> sum_i F_i X F_i*.
    """

    kraus: tuple[np.ndarray, ...]
    choi: np.ndarray
    completeness_residual: float
    subset_residual: float

    @property
    def num_kraus(self) -> int:
        return len(self.kraus)


def extract_channel(
    inst: GameInstance, strategy: BlockStrategy, tol: Tolerance = DEFAULT_TOL
) -> ChannelRep:
    """Kraus operators F_{(a,k)} = |a><u_{a,k}| from eigenvectors of each P_a.

    Projections must have spectrum within tol of {0,1}; eigenvectors above 1/2
    are kept, so the Kraus count is sum_a rank(P_a).  Also verifies the
    channel subset conditions: compressions of adjacency inputs land in
    S_G n (D_c)perp, compressions of same-vertex inputs land in D_c.
    """
    _check_dims(inst, strategy)
    rep = strategy.measurement_report(tol)
    if not rep.is_pvm:
        raise ValueError(f"strategy is not a PVM within tolerance: {rep.residuals()}")
    size = strategy.n * strategy.ancilla.dim
    c = strategy.c

    kraus = []
    for a, p in enumerate(strategy.projections):
        w, v = np.linalg.eigh((p + p.conj().T) / 2)
        drift = float(np.minimum(np.abs(w), np.abs(w - 1.0)).max())
        if drift > max(tol.eps * 100, 1e-8):
            raise ValueError(f"P_{a} spectrum drifts from {{0,1}} by {drift:.3e}")
        for k in np.nonzero(w > 0.5)[0]:
            f = np.zeros((c, size), dtype=np.complex128)
            f[a, :] = v[:, k].conj()
            kraus.append(f)

    stack = np.stack(kraus)
    completeness = hs_norm(
        np.einsum("mau,mav->uv", np.conj(stack), stack) - np.eye(size)
    )
    choi = np.einsum("mau,mbv->uavb", stack, np.conj(stack)).reshape(
        size * c, size * c
    )

    basis = edge_basis(inst.source, tol)
    eye_d = np.eye(strategy.ancilla.dim)
    worst = 0.0
    for elem in basis.elements:
        big = np.kron(elem.matrix, eye_d)
        # [F_i (Y x 1) F_j*] has a single entry at (a_i, a_j); assemble the
        # c x c table of those entries over all Kraus pairs at once.
        table = np.einsum("mau,uv,lbv->mlab", stack, big, np.conj(stack))
        for a in range(c):
            for b in range(c):
                block = float(np.abs(table[:, :, a, b]).max())
                if elem.tag == SAME_VERTEX:
                    if a != b:
                        worst = max(worst, block)
                elif not inst.target.adjacent(a, b):
                    worst = max(worst, block)
    if worst > tol.eps:
        raise ValueError(f"channel subset conditions violated (residual {worst:.3e})")
    return ChannelRep(
        kraus=tuple(kraus),
        choi=choi,
        completeness_residual=completeness,
        subset_residual=worst,
    )


def check_game_algebra_rep(
    inst: GameInstance, strategy: BlockStrategy, tol: Tolerance = DEFAULT_TOL
) -> GameReport:
    """The defining relations of the game *-algebra on this representation.

    Relation 1: the p_a are self-adjoint idempotents summing to I_n (x) 1.
    Relation 2: p_a ((S n (M')perp) (x) 1) p_b = 0 for a !~ b in the target.
    Relation 3: p_a (M' (x) 1) p_b = 0 for a != b.
    """
    _check_dims(inst, strategy)
    eye_d = np.eye(strategy.ancilla.dim)
    size = strategy.n * strategy.ancilla.dim

    r1 = max(
        max(hs_norm(p - p.conj().T) for p in strategy.projections),
        max(hs_norm(p @ p - p) for p in strategy.projections),
        hs_norm(sum(strategy.projections) - np.eye(size)),
    )

    perp = adjacency_subspace_basis(inst.source)
    r2, wit2 = 0.0, None
    for a, b in _nonadjacent_pairs(inst.target):
        for yi, y in enumerate(perp):
            r = hs_norm(strategy.projections[a] @ np.kron(y, eye_d) @ strategy.projections[b])
            if r > r2:
                r2, wit2 = r, {"a": a, "b": b, "basis_index": yi}

    comm = commutant(inst.source.algebra)
    r3, wit3 = 0.0, None
    for a in range(strategy.c):
        for b in range(strategy.c):
            if a == b:
                continue
            for ci, x in enumerate(comm):
                r = hs_norm(
                    strategy.projections[a] @ np.kron(x, eye_d) @ strategy.projections[b]
                )
                if r > r3:
                    r3, wit3 = r, {"a": a, "b": b, "commutant_index": ci}

    checks = (
        GameCheck("idempotents_sum_to_identity", r1 <= tol.eps, r1, None),
        GameCheck("adjacency_relation", r2 <= tol.eps, r2, wit2),
        GameCheck("commutant_relation", r3 <= tol.eps, r3, wit3),
    )
    return GameReport(checks)


def compose_reps(
    strategy: BlockStrategy,
    hom_rep,
    hom_ancilla: TracialAncilla,
    tol: Tolerance = DEFAULT_TOL,
) -> BlockStrategy:
    """Compose a strategy for target K_c with a representation of Hom(K_c, K_r).

    hom_rep[a][v] are self-adjoint idempotents over the hom ancilla with
    sum_v f_{a,v} = 1 for each a and f_{a,v} f_{b,v} = 0 for a != b.  The
    output entries are q_{v,ij} = sum_a p_{a,ij} (x) f_{a,v} over the
    tensor-product ancilla.
    """
    c = strategy.c
    if len(hom_rep) != c:
        raise ValueError(f"hom representation must have {c} input rows")
    r = len(hom_rep[0])
    e = hom_ancilla.dim
    f = [[np.asarray(m, dtype=np.complex128).reshape(e, e) for m in row] for row in hom_rep]
    if any(len(row) != r for row in f):
        raise ValueError("ragged hom representation")

    worst = 0.0
    eye_e = np.eye(e)
    for a in range(c):
        worst = max(worst, hs_norm(sum(f[a]) - eye_e))
        for v in range(r):
            worst = max(worst, hs_norm(f[a][v] - f[a][v].conj().T))
            worst = max(worst, hs_norm(f[a][v] @ f[a][v] - f[a][v]))
            for b in range(c):
                if a != b:
                    worst = max(worst, hs_norm(f[a][v] @ f[b][v]))
    if worst > tol.eps:
        raise ValueError(f"hom representation fails the K_c -> K_r relations ({worst:.3e})")

    new_ancilla = strategy.ancilla.tensor(hom_ancilla)
    n = strategy.n
    d_new = new_ancilla.dim
    a_slices = strategy.ancilla.block_slices()
    b_slices = hom_ancilla.block_slices()
    new_slices = new_ancilla.block_slices()

    def tensor_entry(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Blockwise Kronecker product into the tensor ancilla's block layout."""
        out = np.zeros((d_new, d_new), dtype=np.complex128)
        pos = 0
        for sa in a_slices:
            for sb in b_slices:
                out[new_slices[pos], new_slices[pos]] = np.kron(x[sa, sa], y[sb, sb])
                pos += 1
        return out

    projections = []
    for v in range(r):
        big = np.zeros((n * d_new, n * d_new), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                acc = np.zeros((d_new, d_new), dtype=np.complex128)
                for a in range(c):
                    acc += tensor_entry(strategy.entry(a, i, j), f[a][v])
                big[i * d_new : (i + 1) * d_new, j * d_new : (j + 1) * d_new] = acc
        projections.append(big)
    return BlockStrategy(n=n, c=r, ancilla=new_ancilla, projections=tuple(projections))
