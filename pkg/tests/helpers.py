"""Random generators shared across the test suite (always seeded by the caller)."""

from __future__ import annotations

import numpy as np

from qgraph import BlockStrategy, TracialAncilla


def rand_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def rand_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (z + z.conj().T) / 2


def random_pvm(rng: np.random.Generator, size: int, c: int) -> list[np.ndarray]:
    """Random PVM with c outputs on C^size; every output can be zero-rank."""
    u = rand_unitary(rng, size)
    labels = rng.integers(0, c, size=size)
    # Ensure at least one nonzero projection so the family is not degenerate.
    labels[0] = 0
    out = []
    for a in range(c):
        cols = u[:, labels == a]
        out.append(cols @ cols.conj().T)
    return out


def random_povm(rng: np.random.Generator, size: int, c: int) -> list[np.ndarray]:
    gs = []
    for _ in range(c):
        z = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
        gs.append(z @ z.conj().T + 1e-2 * np.eye(size))
    total = sum(gs)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return [inv_sqrt @ g @ inv_sqrt for g in gs]


def random_weights(rng: np.random.Generator, m: int) -> tuple[float, ...]:
    w = rng.uniform(0.2, 1.0, size=m)
    w = w / w.sum()
    # Renormalize exactly so the ancilla constructor accepts it.
    w[-1] = 1.0 - w[:-1].sum()
    return tuple(w)


def random_block_strategy(
    rng: np.random.Generator,
    n: int,
    c: int,
    block_dims: tuple[int, ...],
    weights: tuple[float, ...] | None = None,
) -> BlockStrategy:
    """Random PVM in M_n((+)_s M_{d_s}) with a random (or given) trace."""
    if weights is None:
        weights = random_weights(rng, len(block_dims))
    ancilla = TracialAncilla(tuple(block_dims), tuple(weights))
    per_block = [random_pvm(rng, n * d, c) for d in block_dims]
    d_total = ancilla.dim
    projections = []
    for a in range(c):
        big = np.zeros((n * d_total, n * d_total), dtype=np.complex128)
        off = 0
        for d, pvm in zip(block_dims, per_block):
            p = pvm[a].reshape(n, d, n, d)
            for i in range(n):
                for j in range(n):
                    big[i * d_total + off : i * d_total + off + d,
                        j * d_total + off : j * d_total + off + d] = p[i, :, j, :]
            off += d
        projections.append(big)
    return BlockStrategy(n=n, c=c, ancilla=ancilla, projections=tuple(projections))
