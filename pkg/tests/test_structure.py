from collections import Counter

import numpy as np
import pytest

from finstar.errors import NotInAlgebraError, StructureError
from finstar.numkit import adjoint
from finstar.projections import unit_decomposition
from finstar.samples import block_algebra_generators, block_element, random_signature, random_unitary
from finstar.star_algebra import generate, unit
from finstar.structure import (
    BlockStructure,
    block_structure,
    from_blocks,
    hom_dim,
    is_abelian,
    matrix_units,
    theorem_report,
    to_blocks,
)

from .helpers import crandn, e, hs


def check_units(units, u, tol=1e-8):
    total = np.zeros_like(u)
    for blk in units.units:
        dk = blk.shape[0]
        for i in range(dk):
            total = total + blk[i, i]
            for j in range(dk):
                assert hs(adjoint(blk[i, j]) - blk[j, i]) <= tol
                for p in range(dk):
                    for q in range(dk):
                        target = blk[i, q] if j == p else 0
                        assert hs(blk[i, j] @ blk[p, q] - target) <= tol
    assert hs(total - u) <= tol


class TestHomDim:
    def test_full_m2(self):
        alg = generate([e(1, 2)])
        assert hom_dim(alg, e(1, 1), e(2, 2)) == 1

    def test_diagonal(self):
        alg = generate([np.diag([1.0, 2.0])])
        assert hom_dim(alg, e(1, 1), e(2, 2)) == 0

    def test_block_disjoint(self):
        alg = generate([e(1, 2, 3), e(3, 3, 3)])
        assert hom_dim(alg, e(1, 1, 3), e(3, 3, 3)) == 0

    def test_rejects_non_minimal(self):
        alg = generate([e(1, 2)])
        with pytest.raises(StructureError):
            hom_dim(alg, np.eye(2), e(1, 1))

    def test_reflexive_and_symmetric(self, rng):
        gens, _ = block_algebra_generators([(2, 1), (2, 2)], 7, rng)
        alg = generate(gens)
        fam = unit_decomposition(alg)
        for p in fam.members:
            assert hom_dim(alg, p, p) == 1
            for q in fam.members:
                assert hom_dim(alg, p, q) == hom_dim(alg, q, p)


class TestBlockStructure:
    def test_full_m2(self):
        bs = block_structure(generate([e(1, 2)]))
        assert bs.signature() == [(2, 1)]

    def test_diagonal_m3(self):
        bs = block_structure(generate([np.diag([1.0, 2.0, 3.0])]))
        assert bs.signature() == [(1, 1)] * 3

    def test_amplified_block(self, rng):
        gens, _ = block_algebra_generators([(2, 2), (1, 1)], 5, rng)
        alg = generate(gens)
        assert alg.dim == 5
        assert block_structure(alg).signature() == [(2, 2), (1, 1)]

    def test_canonical_ordering(self, rng):
        gens, _ = block_algebra_generators([(1, 1), (1, 2), (2, 1)], 6, rng)
        assert block_structure(generate(gens)).signature() == [(2, 1), (1, 2), (1, 1)]

    def test_round_trip(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 13))
            sig = random_signature(n, rng)
            gens, _ = block_algebra_generators(sig, n, rng)
            alg = generate(gens)
            bs = block_structure(alg, seed=int(rng.integers(0, 1000)))
            assert Counter(bs.signature()) == Counter(sig)
            assert alg.dim == sum(d * d for d, _ in sig)
            assert alg.dim <= bs.total_d**2
            assert (alg.dim == bs.total_d**2) == (bs.n_blocks == 1)


class TestMatrixUnits:
    def test_full_m2_up_to_phase(self):
        alg = generate([e(1, 2)])
        bs = BlockStructure([[0, 1]], [2], [1], 2, [e(1, 1), e(2, 2)])
        (blk,) = matrix_units(alg, bs).units
        # phase-quotient oracle: E_ij = z_i conj(z_j) e_ij for unimodular z
        z = np.array([1.0, blk[1, 0][1, 0]])
        assert abs(abs(z[1]) - 1) <= 1e-12
        for i in range(2):
            for j in range(2):
                assert hs(blk[i, j] - z[i] * np.conj(z[j]) * e(i + 1, j + 1)) <= 1e-12

    def test_abelian_units_are_projections(self):
        alg = generate([np.diag([1.0, 2.0, 3.0])])
        bs = block_structure(alg)
        units = matrix_units(alg, bs)
        assert units.block_sizes() == [1, 1, 1]
        for blk, cls in zip(units.units, bs.classes):
            np.testing.assert_allclose(blk[0, 0], bs.projections[cls[0]])

    def test_random_block_algebras(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 11))
            gens, _ = block_algebra_generators(random_signature(n, rng), n, rng)
            alg = generate(gens)
            units = matrix_units(alg, block_structure(alg))
            check_units(units, unit(alg))


class TestToBlocks:
    def setup_alg(self, rng, sig=((2, 2), (1, 1)), n=6):
        gens, conj = block_algebra_generators(list(sig), n, rng)
        alg = generate(gens)
        units = matrix_units(alg, block_structure(alg))
        return alg, units, conj

    def test_unit_maps_to_identities(self, rng):
        alg, units, _ = self.setup_alg(rng)
        for blk in to_blocks(alg, units, unit(alg)):
            np.testing.assert_allclose(blk, np.eye(blk.shape[0]), atol=1e-10)

    def test_matrix_unit_maps_to_elementary(self, rng):
        alg, units, _ = self.setup_alg(rng)
        for k, blk in enumerate(units.units):
            for i in range(blk.shape[0]):
                for j in range(blk.shape[0]):
                    out = to_blocks(alg, units, blk[i, j])
                    for kk, c in enumerate(out):
                        expected = np.zeros_like(c)
                        if kk == k:
                            expected[i, j] = 1
                        np.testing.assert_allclose(c, expected, atol=1e-10)

    def test_star_isomorphism(self, rng):
        sig = [(2, 2), (1, 1), (3, 1)]
        alg, units, conj = self.setup_alg(rng, sig, 10)
        for _ in range(30):
            a = block_element(sig, 10, conj, rng)
            b = block_element(sig, 10, conj, rng)
            ta, tb, tab = (to_blocks(alg, units, x) for x in (a, b, a @ b))
            for x, y, z in zip(ta, tb, tab):
                assert hs(x @ y - z) <= 1e-8
            for x, y in zip(ta, to_blocks(alg, units, adjoint(a))):
                assert hs(adjoint(x) - y) <= 1e-8
            for x, y, z in zip(ta, tb, to_blocks(alg, units, a + 2 * b)):
                assert hs(x + 2 * y - z) <= 1e-8
            assert hs(from_blocks(units, ta) - a) <= 1e-8
            assert np.sqrt(sum(hs(x) ** 2 for x in ta)) >= 1e-9 * hs(a)

    def test_rejects_outsider(self, rng):
        alg, units, _ = self.setup_alg(rng)
        with pytest.raises(NotInAlgebraError):
            to_blocks(alg, units, crandn(rng, 6, 6))


class TestAbelian:
    def test_examples(self):
        assert is_abelian(generate([np.diag([1.0, 2.0])]))
        assert not is_abelian(generate([e(1, 2)]))

    def test_conjugated_one_by_one_blocks(self, rng):
        u = random_unitary(5, rng)
        alg = generate([u @ np.diag([1.0, 2.0, 3.0, 4.0, 0.0]) @ adjoint(u)])
        bs = block_structure(alg)
        assert is_abelian(alg, structure=bs)
        assert all(d == 1 for d in bs.block_sizes)

    def test_cross_check_disagreement(self):
        alg = generate([np.diag([1.0, 2.0])])
        fake = block_structure(generate([e(1, 2)]))
        with pytest.raises(StructureError):
            is_abelian(alg, structure=fake)


class TestTheoremReport:
    def test_full_m2(self):
        rep = theorem_report(generate([e(1, 2)]))
        assert rep.dimension == 4 and rep.blocks == [(2, 1)]
        assert rep.finite_dimensional and rep.dim_bound_holds
        assert all(s >= 1 for s in rep.spectrum_sizes)

    def test_diagonal_m3(self):
        rep = theorem_report(generate([np.diag([1.0, 2.0, 3.0])]))
        assert rep.dimension == 3 and len(rep.blocks) == 3 and rep.abelian

    def test_random(self, rng):
        sig = [(2, 1), (1, 3)]
        gens, _ = block_algebra_generators(sig, 6, rng)
        rep = theorem_report(generate(gens))
        assert Counter(rep.blocks) == Counter(sig)
        assert rep.unit_rank == 5
        d = rep.to_dict()
        assert d["sum_dk_squared"] == d["dimension"] == 5
        assert "Brouwer" in d["fpp"]
