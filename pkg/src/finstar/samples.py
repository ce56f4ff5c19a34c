"""Random test instances with known structure: block algebras and clustered Hermitians."""

from __future__ import annotations

import numpy as np

from .numkit import adjoint


def random_complex(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase correction of Mezzadri."""
    q, r = np.linalg.qr(random_complex((n, n), rng))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    x = random_complex((n, n), rng)
    return 0.5 * (x + adjoint(x))


def random_signature(n_max: int, rng: np.random.Generator, max_blocks: int = 4) -> list[tuple[int, int]]:
    """Random block signature ``[(d_k, m_k), ...]`` with ``sum d_k * m_k <= n_max``."""
    sig: list[tuple[int, int]] = []
    room = n_max
    for _ in range(rng.integers(1, max_blocks + 1)):
        if room < 1:
            break
        d = int(rng.integers(1, min(3, room) + 1))
        m = int(rng.integers(1, min(3, room // d) + 1))
        sig.append((d, m))
        room -= d * m
    return sig


def block_element(signature, n: int, conj: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """``conj @ (sum_k a_k (x) I_{m_k}  (+) 0) @ conj*`` with random complex blocks ``a_k``."""
    x = np.zeros((n, n), dtype=complex)
    pos = 0
    for d, m in signature:
        blk = np.kron(random_complex((d, d), rng), np.eye(m))
        x[pos:pos + d * m, pos:pos + d * m] = blk
        pos += d * m
    return conj @ x @ adjoint(conj)


def block_algebra_generators(signature, n: int, rng: np.random.Generator, count: int = 2):
    """Generators of a unitarily conjugated direct sum of amplified full matrix algebras.

    Returns ``(generators, conj)`` where ``conj`` is the conjugating unitary.
    """
    if sum(d * m for d, m in signature) > n:
        raise ValueError("signature does not fit in the ambient dimension")
    conj = random_unitary(n, rng)
    return [block_element(signature, n, conj, rng) for _ in range(count)], conj


def clustered_hermitian(n: int, k: int, rng: np.random.Generator, min_gap: float = 0.1, spread: float = 1.0):
    """Hermitian matrix with exactly ``k`` distinct eigenvalues in ``[-spread, spread]``.

    Returns ``(matrix, values, projections)`` where ``matrix = sum values[j] * projections[j]``.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if (k - 1) * min_gap > 2 * spread:
        raise ValueError("cannot place k values with the requested gap")
    while True:
        vals = np.sort(rng.uniform(-spread, spread, size=k))
        if k == 1 or np.diff(vals).min() >= min_gap:
            break
    sizes = np.ones(k, dtype=int)
    for extra in rng.integers(0, k, size=n - k):
        sizes[extra] += 1
    u = random_unitary(n, rng)
    projs = []
    pos = 0
    for s in sizes:
        cols = u[:, pos:pos + s]
        projs.append(cols @ adjoint(cols))
        pos += s
    a = sum(v * p for v, p in zip(vals, projs))
    return 0.5 * (a + adjoint(a)), vals, projs
