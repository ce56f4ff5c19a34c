"""Command-line interface.

Matrix files are JSON objects ``{"n": n, "entries": [[re, im], ...]}`` with
``n*n`` row-major entries.  Reports are plain text followed by a
machine-readable JSON block.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fpp_lab
from .errors import (
    AdmissibilityError,
    ClosureOverflowError,
    NotHermitianError,
    ShapeError,
    SplitFailureError,
    StructureError,
    UnitNotFoundError,
)
from .numkit import hs_norm
from .projections import rank_of
from .spectral import cstar_dimension_identity, lagrange_projector, spectral_decompose
from .star_algebra import generate, unit
from .structure import is_abelian, matrix_units, theorem_report

log = logging.getLogger("finstar")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_OVERFLOW = 3
EXIT_INCONSISTENT = 4
EXIT_PRECONDITION = 5
EXIT_PARAMS = 6

JSON_MARKER = "--- json ---"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class JobConfig:
    tol: float = 1e-9
    cluster_tol: float = 1e-7
    seed: int = 0
    max_iter: int = 200
    out: Path | None = None

    def __post_init__(self):
        if not (self.tol > 0 and self.cluster_tol > 0):
            raise CliError("tolerances must be positive", EXIT_PARAMS)
        if self.seed < 0:
            raise CliError("seed must be nonnegative", EXIT_PARAMS)
        if self.max_iter < 0:
            raise CliError("max-iter must be nonnegative", EXIT_PARAMS)


def _num(x: float) -> float:
    # 12 significant digits keeps reports stable against last-bit noise
    return float(f"{x:.12g}")


def matrix_to_json(a: np.ndarray) -> dict:
    return {"n": a.shape[0], "entries": [[_num(z.real), _num(z.imag)] for z in np.asarray(a).ravel()]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = obj["n"]
        entries = obj["entries"]
    except (TypeError, KeyError) as exc:
        raise CliError(f"matrix object needs 'n' and 'entries': {exc}", EXIT_PARSE) from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise CliError(f"'n' must be a positive integer, got {n!r}", EXIT_PARSE)
    if not isinstance(entries, list) or len(entries) != n * n:
        raise CliError(f"expected {n * n} entries", EXIT_PARSE)
    vals = []
    for e in entries:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, (int, float)) for v in e)):
            raise CliError(f"entry {e!r} is not a [re, im] pair", EXIT_PARSE)
        if not all(math.isfinite(v) for v in e):
            raise CliError("non-finite entry", EXIT_PARSE)
        vals.append(complex(e[0], e[1]))
    return np.array(vals, dtype=complex).reshape(n, n)


def load_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc}", EXIT_PARSE) from None


def load_matrices(paths) -> list[np.ndarray]:
    mats = [matrix_from_json(load_json(p)) for p in paths]
    if len({m.shape for m in mats}) > 1:
        raise CliError("input matrices have different sizes", EXIT_PRECONDITION)
    return mats


def render(title: str, lines: list[str], payload: dict) -> str:
    body = [title, "=" * len(title), *lines, JSON_MARKER, json.dumps(payload, indent=2, sort_keys=True)]
    return "\n".join(body) + "\n"


def _emit(text: str, cfg: JobConfig, name: str, out) -> None:
    out.write(text)
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / name).write_text(text)


def cmd_closure(paths, cfg: JobConfig, out=sys.stdout) -> int:
    gens = load_matrices(paths)
    alg = generate(gens, tol=cfg.tol)
    try:
        e = unit(alg, tol=max(cfg.tol, 1e-8))
        unit_rank = rank_of(e)
    except UnitNotFoundError:
        e, unit_rank = None, None
    payload = {
        "ambient_dim": alg.ambient_dim,
        "dimension": alg.dim,
        "basis_count": alg.dim,
        "unit_present": e is not None,
        "unit_rank": unit_rank,
        "generators": len(gens),
    }
    lines = [
        f"ambient dimension n = {alg.ambient_dim}",
        f"generators: {len(gens)}",
        f"algebra dimension: {alg.dim}",
        f"unit present: {'yes' if e is not None else 'no'}" + (f" (rank {unit_rank})" if e is not None else ""),
    ]
    _emit(render("closure report", lines, payload), cfg, "closure_report.txt", out)
    return EXIT_OK


def cmd_decompose(paths, cfg: JobConfig, out=sys.stdout) -> int:
    gens = load_matrices(paths)
    alg = generate(gens, tol=cfg.tol)
    rep = theorem_report(alg, seed=cfg.seed, tol=cfg.tol)
    bs = rep.structure
    units = matrix_units(alg, bs, tol=cfg.tol)
    payload = rep.to_dict()
    payload["matrix_units"] = [
        {
            "block": k,
            "d": int(e.shape[0]),
            "m": units.multiplicities[k],
            "units": [[matrix_to_json(e[i, j]) for j in range(e.shape[1])] for i in range(e.shape[0])],
        }
        for k, e in enumerate(units.units)
    ]
    lines = [
        f"algebra dimension: {alg.dim}",
        f"minimal projections in unit decomposition: d = {bs.total_d}",
        f"blocks: {bs.n_blocks}",
        *(f"  block {k}: d_k = {d}, m_k = {m}" for k, (d, m) in enumerate(bs.signature())),
        f"sum d_k^2 = {sum(d * d for d in bs.block_sizes)} (matches dimension: {rep.finite_dimensional})",
        f"abelian: {is_abelian(alg, tol=max(cfg.tol, 1e-8), structure=bs)}",
        f"dim <= d^2: {rep.dim_bound_holds}",
        f"spectrum sizes of basis self-adjoint parts: {rep.spectrum_sizes}",
        rep.fpp_note,
    ]
    _emit(render("structure report", lines, payload), cfg, "structure_report.txt", out)
    return EXIT_OK


def cmd_spectral(path, cfg: JobConfig, out=sys.stdout) -> int:
    (a,) = load_matrices([path])
    dec = spectral_decompose(a, cluster_tol=cfg.cluster_tol, tol=cfg.tol)
    recon = hs_norm(a - dec.reconstruct())
    lagrange = [hs_norm(lagrange_projector(a, dec, j) - dec.projections[j]) for j in range(dec.d)]
    dim_alg, n_spec = cstar_dimension_identity(a, tol=cfg.tol, cluster_tol=cfg.cluster_tol)
    payload = {
        "lambdas": [_num(x) for x in dec.lambdas],
        "projector_ranks": [rank_of(p) for p in dec.projections],
        "kernel_rank": rank_of(dec.kernel_projection),
        "reconstruction_residual": _num(recon),
        "lagrange_residuals": [_num(r) for r in lagrange],
        "dim_cstar_a_i": dim_alg,
        "spectrum_size": n_spec,
        "dimension_identity_holds": dim_alg == n_spec,
    }
    if dec.d == 0:
        lines = ["empty spectrum: A = 0, kernel projection is the identity"]
    else:
        lines = [f"lambda_{j + 1} = {_num(lam)}  rank {rank_of(p)}" for j, (lam, p) in enumerate(zip(dec.lambdas, dec.projections))]
    lines += [
        f"kernel rank: {payload['kernel_rank']}",
        f"||A - sum lambda_j P_j||_HS = {recon:.3e}",
        *(f"Lagrange vs eigenprojector {j + 1}: {r:.3e}" for j, r in enumerate(lagrange)),
        f"dim C*(A, I) = {dim_alg}, |spec(A)| = {n_spec}",
    ]
    _emit(render("spectral report", lines, payload), cfg, "spectral_report.txt", out)
    if cfg.out is not None:
        for j, p in enumerate(dec.projections, start=1):
            (cfg.out / f"projector_{j}.json").write_text(json.dumps(matrix_to_json(p)))
    return EXIT_OK


def trace_csv(trace: fpp_lab.IterationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "displacement", "norm"])
    for t, disp, norm in trace.rows():
        w.writerow([t, repr(disp), repr(norm)])
    return buf.getvalue()


def _load_grid(path) -> tuple[fpp_lab.GridSpace, fpp_lab.GridFunction]:
    obj = load_json(path)
    try:
        pts = [complex(*p) for p in obj["points"]]
        space = fpp_lab.GridSpace(np.array(pts), int(obj.get("base_index", 0)))
        if "b" in obj:
            b = fpp_lab.GridFunction(space, np.array([complex(*v) for v in obj["b"]]))
        else:
            b = fpp_lab.default_multiplier(space)
    except CliError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid grid file: {exc}", EXIT_PARAMS) from None
    return space, b


def cmd_fpp(sub: str, cfg: JobConfig, m: int | None = None, grid: Path | None = None, out=sys.stdout) -> int:
    if sub == "c0":
        if m is None or m < 1:
            raise CliError("c0 needs --m >= 1", EXIT_PARAMS)
        trace = fpp_lab.iterate(fpp_lab.goebel_c0_map, np.zeros(m), cfg.max_iter, 0.5, fpp_lab.c0_admissible)
        fixed = fpp_lab.c0_fixed_point(m)
        residual = float(np.abs(fpp_lab.goebel_c0_map(fixed) - fixed).max())
        payload = {
            "space": "c0 truncation",
            "m": m,
            "steps": trace.steps,
            "averaging": 0.5,
            "fixed_point_residual": _num(residual),
            "tail_coordinate": _num(float(fixed[-1])),
            "final_displacement": _num(trace.displacements[-1]) if trace.steps else None,
        }
        summary = [
            f"truncated c0, m = {m}: fixed point (1/2, ..., 1/2), residual {residual:.3e}",
            f"tail coordinate {fixed[-1]:g}: does not decay with m, so no fixed point survives in c0",
        ]
    elif sub == "cs":
        if grid is not None:
            space, b = _load_grid(grid)
        else:
            if m is None or m < 2:
                raise CliError("cs needs --m >= 2 or --grid FILE", EXIT_PARAMS)
            space = fpp_lab.GridSpace.uniform(m)
            b = fpp_lab.default_multiplier(space)
        try:
            fpp_lab.check_multiplier(b)
        except AdmissibilityError as exc:
            raise CliError(str(exc), EXIT_PARAMS) from None
        trace = fpp_lab.iterate(fpp_lab.cs_map_on_values(b), np.ones(len(space), dtype=complex), cfg.max_iter, 1.0)
        fixed = fpp_lab.indicator(space)
        lip = fpp_lab.discrete_lipschitz(fixed)
        residual = float(np.abs(fpp_lab.goebel_cs_map(b, fixed).values - fixed.values).max())
        payload = {
            "space": "C(S) grid",
            "grid_size": len(space),
            "steps": trace.steps,
            "averaging": 1.0,
            "fixed_point_residual": _num(residual),
            "lipschitz_constant": _num(lip),
            "distance_to_indicator": _num(float(np.abs(trace.final - fixed.values).max())),
        }
        summary = [
            f"C(S) grid with {len(space)} points: fixed point is the indicator of p, residual {residual:.3e}",
            f"discrete Lipschitz constant {lip:g}: diverges as the grid refines, so no continuous fixed point",
        ]
    else:
        raise CliError(f"unknown fpp subcommand {sub!r}", EXIT_PARAMS)
    summary.append("note: truncations have fixed points (Brouwer); the output shows how the fixed point degenerates")
    csv_text = trace_csv(trace)
    report = render(f"fpp {sub} summary", summary, payload)
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / "trace.csv").write_text(csv_text)
        (cfg.out / f"fpp_{sub}_summary.txt").write_text(report)
    else:
        out.write(csv_text)
    out.write(report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--cluster-tol", type=float, default=1e-7)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-iter", type=int, default=200)
    common.add_argument("--out", type=Path, default=None, help="directory for report and data files")

    parser = argparse.ArgumentParser(prog="finstar", description="Finite-dimensional matrix *-algebra toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("closure", parents=[common], help="dimension of the generated *-algebra")
    p.add_argument("inputs", nargs="+", type=Path)
    p = sub.add_parser("decompose", parents=[common], help="block structure and matrix units")
    p.add_argument("inputs", nargs="+", type=Path)
    p = sub.add_parser("spectral", parents=[common], help="spectral projections of a Hermitian matrix")
    p.add_argument("input", type=Path)
    p = sub.add_parser("fpp", parents=[common], help="Goebel maps on truncated spaces")
    p.add_argument("space", choices=["c0", "cs"])
    p.add_argument("--m", type=int, default=None, help="truncation length (c0) or uniform grid size (cs)")
    p.add_argument("--grid", type=Path, default=None, help="JSON grid file for cs")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = JobConfig(args.tol, args.cluster_tol, args.seed, args.max_iter, args.out)
        if args.command == "closure":
            return cmd_closure(args.inputs, cfg, out)
        if args.command == "decompose":
            return cmd_decompose(args.inputs, cfg, out)
        if args.command == "spectral":
            return cmd_spectral(args.input, cfg, out)
        return cmd_fpp(args.space, cfg, m=args.m, grid=args.grid, out=out)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except ClosureOverflowError as exc:
        log.error("%s", exc)
        return EXIT_OVERFLOW
    except (StructureError, SplitFailureError, UnitNotFoundError) as exc:
        log.error("structural inconsistency: %s", exc)
        return EXIT_INCONSISTENT
    except (NotHermitianError, ShapeError) as exc:
        log.error("precondition failed: %s", exc)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
