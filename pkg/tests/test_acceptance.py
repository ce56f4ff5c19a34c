"""Acceptance criteria, each run at its stated tolerance.

Every test records a PASS/FAIL row that is printed in the ``acceptance``
section of the pytest terminal summary.
"""

import io
import json
import time
from collections import Counter

import numpy as np
import pytest

from finstar import cli
from finstar.fpp_lab import (
    GridFunction,
    GridSpace,
    c0_fixed_point,
    cs_fixed_point_profile,
    default_multiplier,
    goebel_c0_map,
    goebel_cs_map,
)
from finstar.numkit import adjoint, polar
from finstar.projections import random_chain
from finstar.samples import (
    block_algebra_generators,
    block_element,
    clustered_hermitian,
    random_signature,
)
from finstar.spectral import cstar_dimension_identity, lagrange_projector, spectral_decompose
from finstar.star_algebra import gns, generate, state_from_density, unit
from finstar.structure import block_structure, matrix_units, to_blocks

from .helpers import hs, record

N_BLOCK_INSTANCES = 100


def block_instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 13))
    sig = random_signature(n, rng)
    gens, conj = block_algebra_generators(sig, n, rng, count=2)
    return n, sig, gens, conj


@pytest.fixture(scope="module")
def block_instances():
    return [block_instance(s) for s in range(N_BLOCK_INSTANCES)]


@pytest.fixture(scope="module")
def block_results(block_instances):
    """Structures for every instance plus the total wall time to compute them."""
    t0 = time.perf_counter()
    out = []
    for seed, (n, sig, gens, conj) in enumerate(block_instances):
        alg = generate(gens)
        out.append((alg, block_structure(alg, seed=seed)))
    return out, time.perf_counter() - t0


def test_block_structure_round_trip(block_instances, block_results):
    results, elapsed = block_results
    hits = 0
    for (n, sig, _, _), (alg, bs) in zip(block_instances, results):
        if Counter(bs.signature()) == Counter(sig) and alg.dim == sum(d * d for d, _ in sig):
            hits += 1
    ok = hits == N_BLOCK_INSTANCES and elapsed < 60.0
    record("1 block-structure round trip", ok, f"{hits}/{N_BLOCK_INSTANCES} in {elapsed:.1f}s")
    assert hits == N_BLOCK_INSTANCES
    assert elapsed < 60.0


def test_spectral_reconstruction_and_lagrange():
    rng = np.random.default_rng(2)
    worst_rec = worst_lag = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, n + 1))
        a, vals, projs = clustered_hermitian(n, k, rng)
        dec = spectral_decompose(a)
        worst_rec = max(worst_rec, hs(a - dec.reconstruct()) / max(hs(a), 1e-300))
        for j, lam in enumerate(dec.lambdas):
            truth = projs[int(np.argmin(np.abs(vals - lam)))]
            worst_lag = max(worst_lag, hs(lagrange_projector(a, dec, j) - truth))
    ok = worst_rec <= 1e-9 and worst_lag <= 1e-7
    record("2 spectral reconstruction + Lagrange", ok, f"rec {worst_rec:.2e}, lagrange {worst_lag:.2e}")
    assert worst_rec <= 1e-9
    assert worst_lag <= 1e-7


def test_dimension_identity():
    rng = np.random.default_rng(3)
    bad = 0
    for i in range(1000):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, n + 1))
        _, vals, projs = clustered_hermitian(n, k, rng)
        if i % 2:
            vals = vals.copy()
            vals[int(rng.integers(0, k))] = 0.0  # exercise the kernel cluster
        a = sum(v * p for v, p in zip(vals, projs))
        dim, clusters = cstar_dimension_identity(a)
        bad += not (dim == clusters == k)
    record("3 dimension identity", bad == 0, f"{1000 - bad}/1000 exact")
    assert bad == 0


def test_matrix_unit_relations(block_instances, block_results):
    results, _ = block_results
    worst_rel = worst_mult = 0.0
    for seed, ((n, sig, _, conj), (alg, bs)) in enumerate(zip(block_instances, results)):
        units = matrix_units(alg, bs)
        total = np.zeros((n, n), dtype=complex)
        for blk in units.units:
            dk = blk.shape[0]
            for i in range(dk):
                total = total + blk[i, i]
                for j in range(dk):
                    worst_rel = max(worst_rel, hs(adjoint(blk[i, j]) - blk[j, i]))
                    for p in range(dk):
                        for q in range(dk):
                            target = blk[i, q] if j == p else 0
                            worst_rel = max(worst_rel, hs(blk[i, j] @ blk[p, q] - target))
        worst_rel = max(worst_rel, hs(total - unit(alg)))
        rng = np.random.default_rng(10_000 + seed)
        for _ in range(100):
            x, y = block_element(sig, n, conj, rng), block_element(sig, n, conj, rng)
            tx, ty, txy = (to_blocks(alg, units, z) for z in (x, y, x @ y))
            worst_mult = max(worst_mult, max(hs(u @ v - w) for u, v, w in zip(tx, ty, txy)))
    ok = worst_rel <= 1e-8 and worst_mult <= 1e-8
    record("4 matrix units + to_blocks", ok, f"relations {worst_rel:.2e}, multiplicative {worst_mult:.2e}")
    assert worst_rel <= 1e-8
    assert worst_mult <= 1e-8


def test_polar_decomposition():
    rng = np.random.default_rng(5)
    worst = 0.0
    for i in range(1000):
        n = int(rng.integers(1, 9))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        if i % 4 == 0:
            r = int(rng.integers(0, n + 1))
            a = a[:, :r] @ (rng.normal(size=(r, n)) + 1j * rng.normal(size=(r, n)))
        u, p = polar(a)
        q = adjoint(u) @ u
        worst = max(worst, hs(a - u @ p), hs(q - adjoint(q)), hs(q @ q - q))
    record("5 polar decomposition", worst <= 1e-10, f"worst {worst:.2e}")
    assert worst <= 1e-10


def test_gns():
    rng = np.random.default_rng(6)
    worst_state = worst_mult = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        sig = random_signature(n, rng)
        gens, conj = block_algebra_generators(sig, n, rng)
        alg = generate(gens)
        r = int(rng.integers(1, n + 1))
        g = rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
        phi = state_from_density(alg, g @ adjoint(g))
        rep = gns(alg, phi)
        omega = rep.cyclic_vector
        for _ in range(10):
            x, y = block_element(sig, n, conj, rng), block_element(sig, n, conj, rng)
            px, py = rep(alg, x), rep(alg, y)
            worst_state = max(worst_state, abs(phi(alg, x) - np.vdot(omega, px @ omega)))
            worst_mult = max(worst_mult, np.abs(rep(alg, x @ y) - px @ py).max(initial=0.0))
    ok = worst_state <= 1e-8 and worst_mult <= 1e-8
    record("6 GNS", ok, f"state {worst_state:.2e}, multiplicative {worst_mult:.2e}")
    assert worst_state <= 1e-8
    assert worst_mult <= 1e-8


def test_projection_chains():
    rng = np.random.default_rng(7)
    longest = max(len(random_chain(8, rng)) for _ in range(1000))
    record("7 projection chains in M_8", longest <= 8, f"longest {longest}")
    assert longest <= 8


def test_fpp_lab():
    worst_c0 = 0.0
    tails_exact = True
    for m in range(1, 2**10 + 1):
        x = c0_fixed_point(m)
        worst_c0 = max(worst_c0, np.abs(x - 0.5).max(), np.abs(goebel_c0_map(x) - x).max())
        tails_exact &= bool(x[-1] == 0.5)

    rng = np.random.default_rng(8)
    worst_c0_ne = worst_cs_ne = -np.inf
    for _ in range(1000):
        m = int(rng.integers(1, 33))
        x = rng.uniform(-1, 1, m) * np.exp(2j * np.pi * rng.uniform(size=m))
        y = rng.uniform(-1, 1, m) * np.exp(2j * np.pi * rng.uniform(size=m))
        gap = np.abs(goebel_c0_map(x) - goebel_c0_map(y)).max() - np.abs(x - y).max()
        worst_c0_ne = max(worst_c0_ne, gap)
    g = GridSpace(rng.uniform(-1, 1, 64) + 1j * rng.uniform(-1, 1, 64), base_index=0)
    b = default_multiplier(g)
    for _ in range(1000):
        a1, a2 = (rng.uniform(0, 1, 64) * np.exp(2j * np.pi * rng.uniform(size=64)) for _ in range(2))
        a1[0] = a2[0] = 1.0
        f1, f2 = GridFunction(g, a1), GridFunction(g, a2)
        gap = np.abs(goebel_cs_map(b, f1).values - goebel_cs_map(b, f2).values).max() - np.abs(a1 - a2).max()
        worst_cs_ne = max(worst_cs_ne, gap)

    prof = cs_fixed_point_profile([GridSpace.uniform(m) for m in range(2, 2**10 + 1)])
    lips = [lip for _, lip in prof]
    lip_exact = all(lip == m - 1 for m, lip in prof)
    increasing = all(p < q for p, q in zip(lips, lips[1:]))

    ok = (
        worst_c0 <= 1e-12
        and tails_exact
        and worst_c0_ne <= 1e-12
        and worst_cs_ne <= 1e-12
        and lip_exact
        and increasing
    )
    detail = (
        f"c0 {worst_c0:.1e}, tail exact {tails_exact}, nonexpansive slack c0 {worst_c0_ne:.1e} "
        f"cs {worst_cs_ne:.1e}, lipschitz m-1 {lip_exact}, increasing {increasing}"
    )
    record("8 FPP lab", ok, detail)
    assert worst_c0 <= 1e-12 and tails_exact
    assert worst_c0_ne <= 1e-12 and worst_cs_ne <= 1e-12
    assert lip_exact and increasing


def _decompose_report(files, seed):
    buf = io.StringIO()
    code = cli.main(["decompose", *map(str, files), "--seed", str(seed)], out=buf)
    return code, buf.getvalue().encode()


def test_cli_determinism(block_instances, tmp_path):
    mismatches = failures = 0
    for seed, (_, _, gens, _) in enumerate(block_instances):
        files = []
        for i, g in enumerate(gens):
            path = tmp_path / f"s{seed}_g{i}.json"
            path.write_text(json.dumps(cli.matrix_to_json(g)))
            files.append(path)
        (c1, r1), (c2, r2) = _decompose_report(files, seed), _decompose_report(files, seed)
        failures += c1 != 0 or c2 != 0
        mismatches += r1 != r2
    ok = mismatches == 0 and failures == 0
    record("9 CLI determinism", ok, f"{N_BLOCK_INSTANCES - mismatches}/{N_BLOCK_INSTANCES} identical, {failures} errors")
    assert failures == 0
    assert mismatches == 0
