"""Block structure of a matrix *-algebra and its isomorphism onto a direct sum of full matrix algebras."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotInAlgebraError, StructureError
from .numkit import DEFAULT_TOL, adjoint, hs_norm, matrix_rank, polar
from .projections import ProjectionFamily, corner_dimension, rank_of, unit_decomposition
from .spectral import spectral_decompose
from .star_algebra import StarAlgebra, contains, unit

FPP_NOTE = (
    "fixed point property: not computed; for a finite-dimensional algebra it follows from "
    "Brouwer's theorem, since bounded closed convex sets are compact"
)


@dataclass(frozen=True)
class BlockStructure:
    """Equivalence classes of minimal projections under ``dim Hom(P_j, P_i) = 1``.

    ``classes[k]`` lists indices into ``projections``; block k is isomorphic
    to the full matrix algebra of size ``block_sizes[k]`` and is repeated
    ``multiplicities[k]`` times in the ambient space.
    """

    classes: list[list[int]]
    block_sizes: list[int]
    multiplicities: list[int]
    total_d: int
    projections: list[np.ndarray] = field(repr=False)

    @property
    def n_blocks(self) -> int:
        return len(self.classes)

    def signature(self) -> list[tuple[int, int]]:
        return list(zip(self.block_sizes, self.multiplicities))


@dataclass(frozen=True)
class MatrixUnits:
    """``units[k][i, j]`` is the matrix unit E^(k)_ij; shape ``(d_k, d_k, n, n)``."""

    units: list[np.ndarray]
    multiplicities: list[int]

    def block_sizes(self) -> list[int]:
        return [u.shape[0] for u in self.units]


def hom_dim(alg: StarAlgebra, p, q, tol: float = DEFAULT_TOL) -> int:
    """``dim(Q A P)``; 0 or 1 whenever P and Q are minimal."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    for name, x in (("P", p), ("Q", q)):
        if corner_dimension(alg, x, tol) != 1:
            raise StructureError(f"{name} is not a minimal projection of the algebra")
    r = matrix_rank(q[None] @ alg.basis @ p[None], tol)
    if r > 1:
        raise StructureError(f"Hom space between minimal projections has dimension {r} > 1")
    return r


def _hom_rank(alg: StarAlgebra, p: np.ndarray, q: np.ndarray, tol: float) -> int:
    return matrix_rank(q[None] @ alg.basis @ p[None], tol)


def block_structure(alg: StarAlgebra, seed: int = 0, tol: float = DEFAULT_TOL) -> BlockStructure:
    """Recover the block decomposition of ``alg`` from a minimal decomposition of its unit.

    The relation ``i ~ j iff dim Hom(P_j, P_i) = 1`` is checked to be an
    equivalence relation, multiplicities are checked to be constant on
    classes, and ``dim(alg) = sum d_k^2`` is verified.
    """
    family: ProjectionFamily = unit_decomposition(alg, seed=seed, tol=tol)
    ps = family.members
    d = len(ps)
    rel = np.zeros((d, d), dtype=bool)
    for i in range(d):
        for j in range(i, d):
            r = _hom_rank(alg, ps[j], ps[i], tol)
            if r > 1:
                raise StructureError(f"Hom(P_{j}, P_{i}) has dimension {r}; minimal decomposition failed")
            rel[i, j] = r == 1
            rel[j, i] = _hom_rank(alg, ps[i], ps[j], tol) == 1
    if not rel.diagonal().all():
        raise StructureError("relation is not reflexive")
    if not (rel == rel.T).all():
        raise StructureError("relation is not symmetric")
    closure = (rel.astype(int) @ rel.astype(int)) > 0
    if (closure & ~rel).any():
        raise StructureError("relation is not transitive")

    classes: list[list[int]] = []
    seen: set[int] = set()
    for i in range(d):
        if i not in seen:
            cls = [j for j in range(d) if rel[i, j]]
            seen.update(cls)
            classes.append(cls)

    mults = []
    for cls in classes:
        ranks = {rank_of(ps[j]) for j in cls}
        if len(ranks) != 1:
            raise StructureError(f"multiplicities differ within a class: {sorted(ranks)}")
        mults.append(ranks.pop())

    def key(k):
        trace = sum(np.trace(ps[j]).real for j in classes[k])
        return (-len(classes[k]), -mults[k], -trace, classes[k][0])

    order = sorted(range(len(classes)), key=key)
    classes = [classes[k] for k in order]
    mults = [mults[k] for k in order]
    sizes = [len(c) for c in classes]

    if sum(s * s for s in sizes) != alg.dim:
        raise StructureError(f"dim(alg) = {alg.dim} but sum d_k^2 = {sum(s * s for s in sizes)}")
    unit_rank = rank_of(family.parent)
    if sum(s * m for s, m in zip(sizes, mults)) != unit_rank:
        raise StructureError("sum d_k m_k does not match the rank of the unit")
    return BlockStructure(classes, sizes, mults, d, list(ps))


def matrix_units(alg: StarAlgebra, bs: BlockStructure, tol: float = DEFAULT_TOL) -> MatrixUnits:
    """Matrix units built from partial isometries between equivalent minimal projections.

    In each class, ``E_11 = P_1`` and ``E_i1`` is the polar part of the
    largest compression ``P_i B P_1`` over the algebra basis.
    """
    n = alg.ambient_dim
    units = []
    for cls in bs.classes:
        ps = [bs.projections[j] for j in cls]
        dk = len(ps)
        e = np.zeros((dk, dk, n, n), dtype=complex)
        e[0, 0] = ps[0]
        for i in range(1, dk):
            comps = ps[i][None] @ alg.basis @ ps[0][None]
            norms = np.linalg.norm(comps.reshape(alg.dim, -1), axis=1)
            best = int(np.argmax(norms))
            if norms[best] <= tol:
                raise StructureError("no nonzero Hom element between equivalent projections")
            u, _ = polar(comps[best], tol=tol)
            e[i, 0] = u
            e[0, i] = adjoint(u)
        for i in range(1, dk):
            for j in range(1, dk):
                e[i, j] = e[i, 0] @ e[0, j]
        units.append(e)
    return MatrixUnits(units, list(bs.multiplicities))


def to_blocks(alg: StarAlgebra, units: MatrixUnits, a, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Coordinates of ``a`` in the matrix units: block k entry (i, j) is ``<a, E_ij> / m_k``."""
    a = np.asarray(a, dtype=complex)
    if not contains(alg, a, tol=max(tol, 1e-8)):
        raise NotInAlgebraError("matrix does not belong to the algebra")
    out = []
    for e, m in zip(units.units, units.multiplicities):
        dk = e.shape[0]
        coords = np.einsum("ijab,ab->ij", e.conj(), a) / m
        out.append(coords.reshape(dk, dk))
    return out


def from_blocks(units: MatrixUnits, blocks) -> np.ndarray:
    """Inverse of :func:`to_blocks`: ``sum_k sum_ij c^(k)_ij E^(k)_ij``."""
    n = units.units[0].shape[-1]
    out = np.zeros((n, n), dtype=complex)
    for e, c in zip(units.units, blocks):
        out += np.einsum("ij,ijab->ab", np.asarray(c, dtype=complex), e)
    return out


def is_abelian(alg: StarAlgebra, tol: float = DEFAULT_TOL, structure: BlockStructure | None = None) -> bool:
    """True iff all basis commutators vanish; optionally cross-checked against a block structure."""
    b = alg.basis
    comm = np.einsum("aij,bjk->abik", b, b) - np.einsum("bij,ajk->abik", b, b)
    norms = np.linalg.norm(comm.reshape(comm.shape[0], comm.shape[1], -1), axis=-1)
    verdict = bool(norms.max(initial=0.0) <= tol)
    if structure is not None and verdict != all(s == 1 for s in structure.block_sizes):
        raise StructureError("commutator test disagrees with the block structure")
    return verdict


@dataclass(frozen=True)
class TheoremReport:
    dimension: int
    blocks: list[tuple[int, int]]
    total_d: int
    abelian: bool
    spectrum_sizes: list[int]
    unit_rank: int
    dim_bound_holds: bool
    structure: BlockStructure = field(repr=False)
    fpp_note: str = FPP_NOTE

    @property
    def finite_dimensional(self) -> bool:
        return self.dimension == sum(d * d for d, _ in self.blocks)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "sum_dk_squared": sum(d * d for d, _ in self.blocks),
            "blocks": [{"d": d, "m": m} for d, m in self.blocks],
            "total_d": self.total_d,
            "abelian": self.abelian,
            "dim_le_d_squared": self.dim_bound_holds,
            "unit_rank": self.unit_rank,
            "spectrum_sizes": self.spectrum_sizes,
            "fpp": self.fpp_note,
        }


def theorem_report(alg: StarAlgebra, seed: int = 0, tol: float = DEFAULT_TOL) -> TheoremReport:
    """Verdict on finite spectra, finite dimension and the block isomorphism for one algebra.

    Spectrum sizes are listed for the self-adjoint parts ``(B + B*)/2`` and
    ``(B - B*)/2i`` of every basis element.
    """
    bs = block_structure(alg, seed=seed, tol=tol)
    sizes = []
    for b in alg.basis:
        for h in (0.5 * (b + adjoint(b)), -0.5j * (b - adjoint(b))):
            if hs_norm(h) <= tol:
                continue
            dec = spectral_decompose(h, tol=max(tol, 1e-8))
            sizes.append(dec.d + int(np.trace(dec.kernel_projection).real > 0.5))
    e = unit(alg, tol=max(tol, 1e-8))
    return TheoremReport(
        dimension=alg.dim,
        blocks=bs.signature(),
        total_d=bs.total_d,
        abelian=is_abelian(alg, tol=max(tol, 1e-8), structure=bs),
        spectrum_sizes=sizes,
        unit_rank=rank_of(e),
        dim_bound_holds=alg.dim <= bs.total_d ** 2,
        structure=bs,
    )
