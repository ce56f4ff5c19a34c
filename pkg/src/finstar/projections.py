"""Projection order, minimality relative to an algebra, and minimal decompositions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotAProjectionError, NotInAlgebraError, SplitFailureError
from .numkit import DEFAULT_TOL, adjoint, as_square, hermitian_eig, hs_norm, matrix_rank, orthonormalize
from .spectral import spectral_decompose
from .star_algebra import StarAlgebra, contains, unit

MAX_SPLIT_RETRIES = 16


@dataclass(frozen=True)
class ProjectionFamily:
    """Pairwise orthogonal projections ``members`` summing to ``parent``."""

    members: list[np.ndarray]
    parent: np.ndarray

    def __len__(self) -> int:
        return len(self.members)

    def ranks(self) -> list[int]:
        return [rank_of(p) for p in self.members]


def rank_of(p: np.ndarray) -> int:
    """Rank of a projection, read off its trace."""
    return int(round(float(np.trace(p).real)))


def is_projection(p, tol: float = DEFAULT_TOL) -> bool:
    p = as_square(p, "P")
    return hs_norm(p - adjoint(p)) <= tol and hs_norm(p @ p - p) <= tol


def leq(p, q, tol: float = DEFAULT_TOL) -> bool:
    """The projection order: ``P <= Q`` iff ``PQ = QP = P``."""
    p = as_square(p, "P")
    q = as_square(q, "Q")
    if not (is_projection(p, tol) and is_projection(q, tol)):
        raise NotAProjectionError("leq requires projections")
    return hs_norm(p @ q - p) <= tol and hs_norm(q @ p - p) <= tol


def _require_member(alg: StarAlgebra, p: np.ndarray, tol: float) -> np.ndarray:
    p = as_square(p, "P")
    if not contains(alg, p, tol=max(tol, 1e-8)):
        raise NotInAlgebraError("projection does not belong to the algebra")
    return p


def corner_dimension(alg: StarAlgebra, p, tol: float = DEFAULT_TOL) -> int:
    """``dim(P A P)``, the rank of the compressions of the algebra basis by P."""
    p = _require_member(alg, p, tol)
    return matrix_rank(p[None] @ alg.basis @ p[None], tol)


def is_minimal(alg: StarAlgebra, p, tol: float = DEFAULT_TOL) -> bool:
    p = as_square(p, "P")
    if hs_norm(p) <= tol:
        raise NotAProjectionError("the zero projection is never minimal")
    return corner_dimension(alg, p, tol) == 1


def _range_basis(p: np.ndarray) -> np.ndarray:
    eig = hermitian_eig(0.5 * (p + adjoint(p)), tol=1e-6)
    return eig.basis[:, eig.eigenvalues > 0.5]


def _split(alg: StarAlgebra, p: np.ndarray, rng: np.random.Generator, tol: float, seed: int) -> list[np.ndarray]:
    # corner coordinates: an orthonormal basis of range(P) keeps idempotency errors local
    v = _range_basis(p)
    corner = orthonormalize([adjoint(v) @ b @ v for b in alg.basis], tol)
    if len(corner) <= 1:
        return [v @ adjoint(v)]
    r = v.shape[1]
    for _ in range(MAX_SPLIT_RETRIES):
        coeffs = rng.normal(size=len(corner))
        x = sum(c * b for c, b in zip(coeffs, corner))
        x = 0.5 * (x + adjoint(x))
        dec = spectral_decompose(x)
        pieces = list(dec.projections)
        if np.trace(dec.kernel_projection).real > 0.5:
            pieces.append(dec.kernel_projection)
        if len(pieces) < 2:
            continue
        out = []
        for q in pieces:
            w = _range_basis(q)
            sub = v @ w
            out.extend(_split(alg, sub @ adjoint(sub), rng, tol, seed))
        return out
    raise SplitFailureError(
        f"could not split a non-minimal projection of rank {r} after {MAX_SPLIT_RETRIES} draws (seed={seed})"
    )


def _family_order(p: np.ndarray):
    return (-rank_of(p), tuple(np.round(p[:, 0].real, 9)))


def minimal_decomposition(alg: StarAlgebra, p, seed: int = 0, tol: float = DEFAULT_TOL) -> ProjectionFamily:
    """Split a projection of the algebra into pairwise orthogonal minimal projections.

    A random self-adjoint element of the corner ``P A P`` is spectrally
    decomposed and each spectral projection (and the kernel inside the corner)
    is split again until every piece has a one-dimensional corner.
    """
    p = _require_member(alg, p, tol)
    if hs_norm(p) <= tol:
        raise NotAProjectionError("cannot decompose the zero projection")
    if not is_projection(p, max(tol, 1e-8)):
        raise NotAProjectionError("input is not a projection")
    rng = np.random.default_rng(seed)
    members = sorted(_split(alg, p, rng, tol, seed), key=_family_order)
    return ProjectionFamily(members, p)


def unit_decomposition(alg: StarAlgebra, seed: int = 0, tol: float = DEFAULT_TOL) -> ProjectionFamily:
    """Minimal decomposition ``I = P_1 + ... + P_d`` of the algebra's unit."""
    return minimal_decomposition(alg, unit(alg, tol=max(tol, 1e-8)), seed=seed, tol=tol)


def random_chain(n: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Greedy strictly increasing chain of projections in M_n.

    Starting from a random nonzero projection, each step adjoins a random
    number of random directions orthogonal to the current range, stopping
    when the identity is reached.
    """
    frame = np.zeros((n, 0), dtype=complex)
    chain = []
    while frame.shape[1] < n:
        room = n - frame.shape[1]
        k = int(rng.integers(1, room + 1)) if rng.random() < 0.3 else 1
        cand = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
        cand -= frame @ (adjoint(frame) @ cand)
        q, _ = np.linalg.qr(cand)
        q -= frame @ (adjoint(frame) @ q)
        frame, _ = np.linalg.qr(np.hstack([frame, q]))
        p = frame @ adjoint(frame)
        if chain and not (leq(chain[-1], p, 1e-8) and hs_norm(p - chain[-1]) > 1e-8):
            raise AssertionError("greedy extension failed to increase the chain")
        chain.append(p)
    return chain
