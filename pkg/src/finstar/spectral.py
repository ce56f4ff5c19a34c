"""Spectral decomposition of self-adjoint matrices into orthogonal projections."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotAProjectionError, NotHermitianError
from .numkit import DEFAULT_TOL, adjoint, as_square, hermitian_eig, is_hermitian
from .star_algebra import generate

DEFAULT_CLUSTER_TOL = 1e-7


@dataclass(frozen=True)
class SpectralDecomposition:
    """``A = sum_j lambdas[j] * projections[j]`` over the nonzero spectrum.

    ``lambdas`` are distinct, nonzero and ordered by descending absolute value
    (positive first on ties).  ``kernel_projection`` projects onto the zero
    eigenspace, so the projections plus the kernel sum to the identity.
    """

    lambdas: np.ndarray
    projections: np.ndarray
    kernel_projection: np.ndarray

    @property
    def d(self) -> int:
        return len(self.lambdas)

    def reconstruct(self) -> np.ndarray:
        return np.tensordot(self.lambdas.astype(complex), self.projections, axes=1)


def _clusters(w: np.ndarray, gap: float) -> list[np.ndarray]:
    # w ascending; single linkage on consecutive gaps
    if w.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(w) > gap) + 1
    return np.split(np.arange(w.size), breaks)


def spectral_decompose(a, cluster_tol: float = DEFAULT_CLUSTER_TOL, tol: float = DEFAULT_TOL) -> SpectralDecomposition:
    """Cluster the eigenvalues of a Hermitian matrix and build spectral projectors.

    Two eigenvalues share a cluster when their gap is at most
    ``cluster_tol * max(1, ||A||)`` (operator norm).  A cluster reaching within
    that distance of zero becomes the kernel.  Each cluster is represented by
    its mean eigenvalue.
    """
    a = as_square(a, "A")
    n = a.shape[0]
    if not is_hermitian(a, tol):
        raise NotHermitianError(f"matrix is not Hermitian within tol={tol:g}")
    eig = hermitian_eig(a, tol=tol)
    w, v = eig.eigenvalues, eig.basis
    gap = cluster_tol * max(1.0, float(np.abs(w).max(initial=0.0)))

    kernel = np.zeros((n, n), dtype=complex)
    found: list[tuple[float, np.ndarray]] = []
    for idx in _clusters(w, gap):
        cols = v[:, idx]
        proj = cols @ adjoint(cols)
        if np.abs(w[idx]).min() <= gap:
            kernel = kernel + proj
        else:
            found.append((float(w[idx].mean()), proj))
    # ties in |lambda| are judged at 12 significant digits
    found.sort(key=lambda lp: (-float(f"{abs(lp[0]):.12g}"), -lp[0]))
    lambdas = np.array([lam for lam, _ in found], dtype=float)
    projs = np.array([p for _, p in found], dtype=complex).reshape(len(found), n, n)
    return SpectralDecomposition(lambdas, projs, kernel)


def lagrange_projector(a, dec: SpectralDecomposition, j: int) -> np.ndarray:
    """``P_j = A L_j(A) / lambda_j`` with ``L_j`` the Lagrange basis polynomial on the nonzero spectrum.

    ``L_j(A)`` is evaluated in product form ``prod_{i != j} (A - lambda_i) / (lambda_j - lambda_i)``.
    ``j`` is a 0-based index into ``dec.lambdas``.
    """
    a = as_square(a, "A")
    if not 0 <= j < dec.d:
        raise IndexError(f"projector index {j} out of range for d={dec.d}")
    lam = dec.lambdas
    if abs(lam[j]) <= DEFAULT_TOL:
        raise ValueError(f"lambda_{j} = {lam[j]:g} is too close to zero")
    eye = np.eye(a.shape[0], dtype=complex)
    acc = a / lam[j]
    for i in range(dec.d):
        if i != j:
            acc = acc @ (a - lam[i] * eye) / (lam[j] - lam[i])
    return acc


def cstar_dimension_identity(a, tol: float = DEFAULT_TOL, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> tuple[int, int]:
    """Return ``(dim C*(A, I), number of eigenvalue clusters including zero)``.

    For self-adjoint A the unital C*-algebra it generates is isomorphic to the
    functions on its spectrum, so the two numbers agree.
    """
    a = as_square(a, "A")
    if not is_hermitian(a, tol):
        raise NotHermitianError(f"matrix is not Hermitian within tol={tol:g}")
    dim = generate([a, np.eye(a.shape[0])], tol=tol).dim
    dec = spectral_decompose(a, cluster_tol=cluster_tol, tol=tol)
    has_zero = np.trace(dec.kernel_projection).real > 0.5
    return dim, dec.d + int(has_zero)


def chain_element(projections: Sequence, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``sum_k (1/k) (P_{k+1} - P_k)`` for a strictly increasing chain ``P_1 < P_2 < ...``."""
    from .projections import is_projection, leq

    ps = [as_square(p, "projection") for p in projections]
    if not ps:
        raise ValueError("empty chain")
    n = ps[0].shape[0]
    for p in ps:
        if p.shape != (n, n) or not is_projection(p, tol):
            raise NotAProjectionError("chain member is not an n x n projection")
    out = np.zeros((n, n), dtype=complex)
    for k, (lo, hi) in enumerate(zip(ps, ps[1:]), start=1):
        if not leq(lo, hi, tol) or np.linalg.norm(hi - lo) <= tol:
            raise ValueError(f"chain is not strictly increasing at position {k}")
        out += (hi - lo) / k
    return out
