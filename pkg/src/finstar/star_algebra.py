"""The *-algebra generated by a set of matrices, its unit, and the GNS construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ClosureOverflowError, NotInAlgebraError, ShapeError, StateError, UnitNotFoundError
from .numkit import DEFAULT_TOL, adjoint, as_square, extend_orthonormal, hermitian_eig, hs_norm


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """Subspace of n x n matrices closed under product and adjoint.

    ``basis`` has shape ``(dim, n, n)`` and is orthonormal for the
    Hilbert-Schmidt inner product.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        self.basis.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coordinates(self, a) -> np.ndarray:
        """Coefficients ``c_k = <a, B_k>`` of the orthogonal projection onto the span."""
        a = _check_ambient(self, a)
        return self._flat.conj() @ a.ravel()

    def element(self, coords) -> np.ndarray:
        return np.tensordot(np.asarray(coords, dtype=complex), self.basis, axes=1)

    def project(self, a) -> np.ndarray:
        return self.element(self.coordinates(a))

    @property
    def _flat(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1)


def _check_ambient(alg: StarAlgebra, a) -> np.ndarray:
    a = as_square(a)
    if a.shape[0] != alg.ambient_dim:
        raise ShapeError(f"expected {alg.ambient_dim}x{alg.ambient_dim} matrix, got {a.shape}")
    return a


def generate(generators: Sequence, tol: float = DEFAULT_TOL) -> StarAlgebra:
    """Smallest *-subalgebra of M_n containing ``generators``.

    The span is seeded with the generators and their adjoints and then
    repeatedly enlarged by products of basis elements until a pass adds
    nothing.  Each pass only multiplies pairs involving elements added by the
    previous pass.
    """
    gens = [as_square(g, "generator") for g in generators]
    if not gens:
        raise ValueError("generator list is empty")
    n = gens[0].shape[0]
    for g in gens:
        if g.shape != (n, n):
            raise ShapeError(f"generator shapes differ: {g.shape} vs {(n, n)}")
    seeds = []
    for g in gens:
        norm = hs_norm(g)
        if norm > 0.0:
            g = g / norm
            seeds.extend([g.ravel(), adjoint(g).ravel()])
    if not seeds:
        raise ValueError("all generators are zero; the generated algebra is {0}")

    cap = n * n
    basis = extend_orthonormal(np.zeros((0, cap), dtype=complex), np.array(seeds), tol)
    fresh = basis
    while fresh.shape[0]:
        k = basis.shape[0]
        cur = basis.reshape(k, n, n)
        new = fresh.reshape(-1, n, n)
        prods = np.concatenate(
            [
                np.einsum("aij,bjk->abik", cur, new).reshape(-1, cap),
                np.einsum("aij,bjk->abik", new, cur).reshape(-1, cap),
                adjoint(new).reshape(-1, cap),
            ]
        )
        enlarged = extend_orthonormal(basis, prods, tol)
        if enlarged.shape[0] > cap:
            raise ClosureOverflowError(f"closure exceeded n^2 = {cap} basis elements (numerical drift)")
        fresh = enlarged[k:]
        basis = enlarged
    return StarAlgebra(n, basis.reshape(-1, n, n).copy())


def contains(alg: StarAlgebra, a, tol: float = DEFAULT_TOL) -> bool:
    a = _check_ambient(alg, a)
    resid = a - alg.project(a)
    return hs_norm(resid) <= tol * max(1.0, hs_norm(a))


def unit(alg: StarAlgebra, tol: float = DEFAULT_TOL) -> np.ndarray:
    """The unit of the algebra, found by solving ``E B = B E = B`` for E in the span.

    A matrix *-algebra always has a unit, so failure to find one is raised as
    :class:`UnitNotFoundError` rather than returned.
    """
    b = alg.basis
    k, n = alg.dim, alg.ambient_dim
    left = np.einsum("aij,bjk->bika", b, b).reshape(k * n * n, k)  # column a: B_a B_b
    right = np.einsum("bij,ajk->bika", b, b).reshape(k * n * n, k)  # column a: B_b B_a
    system = np.vstack([left, right])
    rhs = np.concatenate([b.ravel(), b.ravel()])
    coeffs, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    e = alg.element(coeffs)
    e = 0.5 * (e + adjoint(e))
    resid = max(
        max(hs_norm(e @ bi - bi) for bi in b),
        max(hs_norm(bi @ e - bi) for bi in b),
        hs_norm(e @ e - e),
    )
    if resid > tol:
        raise UnitNotFoundError(f"unit equations have residual {resid:.3g} > tol={tol:g}")
    return e


@dataclass(frozen=True)
class State:
    """A linear functional given by its values on the algebra basis."""

    values: np.ndarray

    def __call__(self, alg: StarAlgebra, a) -> complex:
        return complex(alg.coordinates(a) @ self.values)


def state_from_density(alg: StarAlgebra, density) -> State:
    """The functional ``X -> trace(D X)`` normalized so that the unit maps to 1."""
    d = _check_ambient(alg, density)
    vals = np.einsum("ij,kji->k", d, alg.basis)
    e = unit(alg)
    norm = np.einsum("ij,ji->", d, e)
    if abs(norm) <= DEFAULT_TOL:
        raise StateError("density vanishes on the unit; cannot normalize")
    return State(vals / norm)


def is_positive(alg: StarAlgebra, phi: State, samples: int = 32, seed: int = 0, tol: float = DEFAULT_TOL) -> bool:
    """Check ``phi(a* a) >= -tol`` on random elements of the algebra."""
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        c = rng.normal(size=alg.dim) + 1j * rng.normal(size=alg.dim)
        a = alg.element(c)
        if phi(alg, adjoint(a) @ a).real < -tol * max(1.0, hs_norm(a) ** 2):
            return False
    return True


@dataclass(frozen=True)
class Representation:
    """A *-representation of an algebra on C^space_dim with a cyclic vector.

    ``images[k]`` is the image of the k-th algebra basis element.
    """

    space_dim: int
    images: np.ndarray
    cyclic_vector: np.ndarray

    def __call__(self, alg: StarAlgebra, a) -> np.ndarray:
        return np.tensordot(alg.coordinates(a), self.images, axes=1)


def _multiplication_tensor(alg: StarAlgebra) -> np.ndarray:
    # table[x, a] = coordinates of B_x B_a
    b = alg.basis
    prods = np.einsum("xij,ajk->xaik", b, b).reshape(alg.dim, alg.dim, -1)
    return prods @ alg._flat.conj().T


def gns(alg: StarAlgebra, phi: State, tol: float = DEFAULT_TOL) -> Representation:
    """GNS representation of a positive functional.

    The sesquilinear form ``<x, y> = phi(y* x)`` is diagonalized on the
    algebra coordinates; eigen-directions with eigenvalue at most
    ``tol * (largest eigenvalue)`` form the null space that is quotiented out.
    The representation is left multiplication on the quotient, and the cyclic
    vector is the class of the unit.
    """
    vals = np.asarray(phi.values, dtype=complex)
    if vals.shape != (alg.dim,):
        raise StateError(f"state has {vals.shape} values for an algebra of dim {alg.dim}")
    b = alg.basis
    adj_prods = np.einsum("bji,ajk->abik", b.conj(), b).reshape(alg.dim, alg.dim, -1)
    # gram[a, b] = phi(B_b* B_a); form[b, a] = gram[a, b] so <x, y> = y^H form x
    gram = (adj_prods @ alg._flat.conj().T) @ vals
    form = gram.T
    if hs_norm(form - adjoint(form)) > tol * max(1.0, hs_norm(form)):
        raise StateError("functional is not Hermitian, so it cannot be positive")
    form = 0.5 * (form + adjoint(form))
    eig = hermitian_eig(form, tol=max(tol, 1e-12))
    top = float(eig.eigenvalues.max(initial=0.0))
    if top <= 0.0:
        raise StateError("state vanishes identically on a* a")
    if float(eig.eigenvalues.min()) < -tol * max(1.0, top):
        raise StateError(f"Gram matrix has eigenvalue {eig.eigenvalues.min():.3g} < -tol; state is not positive")
    keep = eig.eigenvalues > tol * top
    w = eig.basis[:, keep]
    root = np.sqrt(eig.eigenvalues[keep])

    table = _multiplication_tensor(alg)  # table[x, a, c]
    # left multiplication by B_x on coordinates: L_x[c, a] = table[x, a, c]
    left = np.swapaxes(table, 1, 2)
    images = root[None, :, None] * (adjoint(w)[None] @ left @ w[None]) / root[None, None, :]

    e_coords = alg.coordinates(unit(alg, tol=max(tol, 1e-8)))
    omega = root * (adjoint(w) @ e_coords)
    return Representation(int(keep.sum()), images, omega)
