"""Dense complex linear algebra primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Everything here
is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotHermitianError, ShapeError

DEFAULT_TOL = 1e-9

_MAX_SWEEPS = 50
_OFFDIAG_RTOL = 1e-14


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def as_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(np.asarray(a).ravel()))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``trace(b* a)``, linear in ``a``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(b.ravel(), a.ravel()))


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return hs_norm(a - adjoint(a)) <= tol * max(1.0, hs_norm(a))


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues in ascending order and a unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ adjoint(self.basis)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # first component of non-negligible modulus becomes real positive
    for j in range(v.shape[1]):
        col = v[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-10)
        if idx.size:
            z = col[idx[0]]
            v[:, j] = col * (np.conj(z) / abs(z))
    return v


def hermitian_eig(a, tol: float = DEFAULT_TOL) -> EigenResult:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Sweeps over all pairs ``(p, q)`` and annihilates ``a[p, q]`` with a unitary
    plane rotation until the off-diagonal Hilbert-Schmidt mass falls below
    ``1e-14 * ||a||`` or 50 sweeps have run.

    Args:
        a: square matrix with ``||a - a*|| <= tol * max(1, ||a||)``.
        tol: Hermiticity tolerance.

    Returns:
        EigenResult with ascending real eigenvalues and orthonormal eigenvectors.
        Each eigenvector's first non-negligible component is real positive.
    """
    a = as_square(a, "A")
    if not is_hermitian(a, tol):
        raise NotHermitianError(f"matrix is not Hermitian within tol={tol:g}")
    n = a.shape[0]
    h = 0.5 * (a + adjoint(a))
    v = np.eye(n, dtype=complex)
    scale = hs_norm(h)
    if scale == 0.0:
        return EigenResult(np.zeros(n), v)

    threshold = _OFFDIAG_RTOL * scale
    for _ in range(_MAX_SWEEPS):
        off = hs_norm(h - np.diag(np.diag(h)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = h[p, q]
                b = abs(apq)
                if b <= 1e-300:
                    continue
                phase = apq / b
                theta = (h[q, q].real - h[p, p].real) / (2.0 * b)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                h[:, idx] = h[:, idx] @ g
                h[idx, :] = adjoint(g) @ h[idx, :]
                h[p, q] = h[q, p] = 0.0
                h[p, p] = h[p, p].real
                h[q, q] = h[q, q].real
                v[:, idx] = v[:, idx] @ g

    w = np.real(np.diag(h)).copy()
    order = np.argsort(w, kind="stable")
    return EigenResult(w[order], _fix_phase(v[:, order]))


def polar(a, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``A = U P`` with ``P = (A* A)^(1/2)``.

    ``U`` is a partial isometry: ``U* U`` is the projection onto ``range(P)``
    and ``U`` vanishes on ``ker(A)``.
    """
    a = as_square(a, "A")
    n = a.shape[0]
    eig = hermitian_eig(adjoint(a) @ a, tol=max(tol, 1e-12))
    vecs = eig.basis
    images = a @ vecs
    # column norms of A V are the singular values; more accurate than sqrt(eigenvalue)
    sigma = np.linalg.norm(images, axis=0)
    cut = tol * max(1.0, float(sigma.max(initial=0.0)))
    keep = sigma > cut
    p = (vecs * np.where(keep, sigma, 0.0)) @ adjoint(vecs)
    u = np.zeros((n, n), dtype=complex)
    if keep.any():
        left = images[:, keep] / sigma[keep]
        u = left @ adjoint(vecs[:, keep])
    return u, 0.5 * (p + adjoint(p))


def _flatten(family: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    arr = np.asarray(family, dtype=complex)
    return arr.reshape(arr.shape[0], -1)


def orthonormalize(family: Iterable, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Hilbert-Schmidt Gram-Schmidt with a re-orthogonalization pass.

    A member is dropped when its residual after projection has norm at most
    ``tol * max(1, ||member||)``.
    """
    members = [as_matrix(m) for m in family]
    if not members:
        return []
    shape = members[0].shape
    for m in members:
        if m.shape != shape:
            raise ShapeError(f"shape mismatch: {m.shape} vs {shape}")
    basis: list[np.ndarray] = []
    for m in members:
        v = m.ravel().copy()
        cut = tol * max(1.0, np.linalg.norm(v))
        for _ in range(2):
            for q in basis:
                v -= np.vdot(q, v) * q
        nv = np.linalg.norm(v)
        if nv > cut:
            basis.append(v / nv)
    return [q.reshape(shape) for q in basis]


def extend_orthonormal(basis: np.ndarray, candidates: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Extend orthonormal rows ``basis`` so that their span contains ``candidates``.

    Both arguments are 2-D arrays of flattened matrices (one per row).  A
    candidate contributes only if its residual exceeds ``tol * max(1, ||c||)``;
    the new directions come from an SVD of the surviving residuals, which is
    much cheaper than sequential Gram-Schmidt on large product families.
    """
    candidates = np.asarray(candidates, dtype=complex)
    if candidates.size == 0:
        return basis
    resid = candidates
    for _ in range(2):
        if basis.shape[0]:
            resid = resid - (resid @ basis.conj().T) @ basis
    norms = np.linalg.norm(resid, axis=1)
    cuts = tol * np.maximum(1.0, np.linalg.norm(candidates, axis=1))
    mask = norms > cuts
    live = resid[mask]
    if live.shape[0] == 0:
        return basis
    _, s, vh = np.linalg.svd(live, full_matrices=False)
    new = vh[s > float(cuts[mask].max())]
    if new.shape[0] == 0:
        return basis
    if basis.shape[0]:
        new = new - (new @ basis.conj().T) @ basis
    q, _ = np.linalg.qr(new.T)
    return np.vstack([basis, q.T])


def matrix_rank(family, tol: float = DEFAULT_TOL) -> int:
    """Rank of the span of a family of equal-shape matrices.

    Singular values of the stacked family at most ``tol * max(1, s_max)`` count
    as zero.
    """
    flat = _flatten(family)
    if flat.shape[0] == 0:
        return 0
    s = np.linalg.svd(flat, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, float(s[0]))))


def psd_rank(a, tol: float = DEFAULT_TOL) -> int:
    """Number of eigenvalues above ``tol * max(1, ||a||)`` of a Hermitian matrix."""
    w = hermitian_eig(a, tol=max(tol, 1e-12)).eigenvalues
    return int(np.sum(w > tol * max(1.0, float(np.abs(w).max(initial=0.0)))))
