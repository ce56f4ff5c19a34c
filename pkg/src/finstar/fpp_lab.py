"""Goebel's fixed-point-free nonexpansive maps, truncated to finite dimensions.

Truncations always have fixed points (Brouwer).  What survives truncation is
the mechanism that kills the fixed point in the limit: the c0 fixed point has
a tail that never decays, and the C(S) fixed point (the indicator of the base
point) has a Lipschitz constant that blows up as the grid refines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import AdmissibilityError

_SLACK = 1e-12


@dataclass(frozen=True)
class GridSpace:
    """Finite grid ``points`` in the complex plane with distinguished point ``points[base_index]``.

    ``exact`` optionally carries the same points as real rationals so that
    distances on uniform grids are computed without rounding.
    """

    points: np.ndarray
    base_index: int = 0
    exact: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        object.__setattr__(self, "points", pts)
        if pts.size == 0:
            raise ValueError("grid is empty")
        if not 0 <= self.base_index < pts.size:
            raise ValueError(f"base_index {self.base_index} out of range")
        if np.unique(pts).size != pts.size:
            raise ValueError("grid has repeated points")
        if self.exact is not None:
            if len(self.exact) != pts.size or len(set(self.exact)) != pts.size:
                raise ValueError("exact coordinates do not match the grid")

    @property
    def base_point(self) -> complex:
        return complex(self.points[self.base_index])

    def __len__(self) -> int:
        return self.points.size

    @classmethod
    def uniform(cls, m: int, base_index: int = 0) -> "GridSpace":
        """``m`` equally spaced points on [0, 1]."""
        if m < 2:
            raise ValueError("uniform grid needs at least 2 points")
        exact = tuple(Fraction(i, m - 1) for i in range(m))
        return cls(np.array([float(x) for x in exact]), base_index, exact)

    @classmethod
    def geometric(cls, m: int) -> "GridSpace":
        """``{0} + {2^-k : k = 0..m-1}`` with base point 0."""
        exact = (Fraction(0),) + tuple(Fraction(1, 2**k) for k in range(m))
        return cls(np.array([float(x) for x in exact]), 0, exact)


@dataclass(frozen=True)
class GridFunction:
    space: GridSpace
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).ravel()
        object.__setattr__(self, "values", vals)
        if vals.size != len(self.space):
            raise ValueError("values do not match the grid")
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite values")

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    @property
    def at_base(self) -> complex:
        return complex(self.values[self.space.base_index])


def default_multiplier(space: GridSpace) -> GridFunction:
    """``B(s) = max(0, 1 - |s - p|) * (s - p)/|s - p|`` for ``s != p`` and ``B(p) = 1``."""
    diff = space.points - space.base_point
    mod = np.abs(diff)
    vals = np.ones(len(space), dtype=complex)
    off = mod > 0
    vals[off] = np.maximum(0.0, 1.0 - mod[off]) * diff[off] / mod[off]
    return GridFunction(space, vals)


def in_k(a: GridFunction, slack: float = _SLACK) -> bool:
    """Membership in ``K = {A : ||A|| <= 1, A(p) = 1}``."""
    return a.sup_norm() <= 1.0 + slack and abs(a.at_base - 1.0) <= slack


def check_multiplier(b: GridFunction) -> None:
    if abs(b.at_base - 1.0) > _SLACK:
        raise AdmissibilityError("multiplier must equal 1 at the base point")
    mask = np.ones(len(b.space), dtype=bool)
    mask[b.space.base_index] = False
    if np.any(np.abs(b.values[mask]) >= 1.0):
        raise AdmissibilityError("multiplier must have modulus < 1 away from the base point")


def goebel_cs_map(b: GridFunction, a: GridFunction) -> GridFunction:
    """``A -> B * A`` (pointwise) on K."""
    if b.space is not a.space and not np.array_equal(b.space.points, a.space.points):
        raise ValueError("B and A live on different grids")
    check_multiplier(b)
    if not in_k(a):
        raise AdmissibilityError("A is not in K (need sup norm <= 1 and A(p) = 1)")
    return GridFunction(a.space, b.values * a.values)


def indicator(space: GridSpace) -> GridFunction:
    vals = np.zeros(len(space), dtype=complex)
    vals[space.base_index] = 1.0
    return GridFunction(space, vals)


def discrete_lipschitz(f: GridFunction) -> float:
    """``max_{s != t} |f(s) - f(t)| / |s - t|`` by brute force over all pairs.

    Real-valued functions on grids with exact coordinates are evaluated in
    rational arithmetic, so e.g. a jump of 1 over spacing 1/(m-1) gives m-1.
    On a line every chord slope averages the neighbouring slopes, so only
    adjacent pairs are checked there.
    """
    pts, vals = f.space.points, f.values
    if f.space.exact is not None and not np.any(vals.imag):
        order = sorted(range(len(vals)), key=lambda i: f.space.exact[i])
        xs = [f.space.exact[i] for i in order]
        ys = [Fraction(float(vals.real[i])) for i in order]
        slopes = (abs(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1))
        return float(max(slopes, default=Fraction(0)))
    dist = np.abs(pts[:, None] - pts[None, :])
    diff = np.abs(vals[:, None] - vals[None, :])
    off = ~np.eye(pts.size, dtype=bool)
    if not off.any():
        return 0.0
    return float((diff[off] / dist[off]).max())


MultiplierFactory = Callable[[GridSpace], GridFunction]


def cs_fixed_point_profile(
    grids: Sequence[GridSpace], multiplier: MultiplierFactory = default_multiplier
) -> list[tuple[int, float]]:
    """Lipschitz constant of the fixed point of ``M_B`` on each grid.

    On a finite grid ``(B(s) - 1) A(s) = 0`` forces the fixed point to be the
    indicator of the base point; its Lipschitz constant is the reciprocal of
    the distance from p to its nearest neighbour, which diverges as grids
    refine toward a limit point.
    """
    out = []
    for g in grids:
        b = multiplier(g)
        fixed = indicator(g)
        image = goebel_cs_map(b, fixed)
        if np.abs(image.values - fixed.values).max() > _SLACK:
            raise AssertionError("indicator of the base point is not fixed by M_B")
        out.append((len(g), discrete_lipschitz(fixed)))
    return out


def goebel_c0_map(a) -> np.ndarray:
    """Truncated shift ``(a_1, ..., a_m) -> (1 - ||a||_sup, a_1, ..., a_{m-1})`` on the unit ball."""
    a = np.asarray(a)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("expected a non-empty vector")
    norm = float(np.abs(a).max())
    if norm > 1.0 + _SLACK:
        raise AdmissibilityError(f"||a||_sup = {norm:g} > 1")
    out = np.empty_like(a, dtype=np.result_type(a.dtype, float))
    out[0] = 1.0 - norm
    out[1:] = a[:-1]
    return out


def c0_fixed_point(m: int) -> np.ndarray:
    """The unique fixed point of the m-dimensional truncated map.

    The fixed-point equations give ``a_{i+1} = a_i`` so all entries equal some
    c with ``c = 1 - |c|``, hence ``c = 1/2``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return np.full(m, 0.5)


@dataclass
class IterationTrace:
    """``displacements[t] = ||x_{t+1} - x_t||`` and ``norms[t] = ||x_{t+1}||`` (sup norms)."""

    displacements: list[float] = field(default_factory=list)
    norms: list[float] = field(default_factory=list)
    final: np.ndarray | None = None

    @property
    def steps(self) -> int:
        return len(self.displacements)

    def rows(self):
        for t, (disp, norm) in enumerate(zip(self.displacements, self.norms), start=1):
            yield t, disp, norm


def iterate(
    fmap: Callable[[np.ndarray], np.ndarray],
    x0,
    steps: int,
    averaging: float = 1.0,
    admissible: Callable[[np.ndarray], bool] | None = None,
) -> IterationTrace:
    """Krasnoselskii-Mann iteration ``x <- (1 - lam) x + lam * fmap(x)``."""
    if not 0.0 < averaging <= 1.0:
        raise ValueError("averaging must lie in (0, 1]")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    x = np.asarray(x0)
    if admissible is not None and not admissible(x):
        raise AdmissibilityError("initial point is not admissible")
    trace = IterationTrace()
    for _ in range(steps):
        nxt = (1.0 - averaging) * x + averaging * np.asarray(fmap(x))
        if admissible is not None and not admissible(nxt):
            raise AdmissibilityError("iterate left the admissible set")
        trace.displacements.append(float(np.abs(nxt - x).max()))
        trace.norms.append(float(np.abs(nxt).max()))
        x = nxt
    trace.final = x
    return trace


def cs_map_on_values(b: GridFunction) -> Callable[[np.ndarray], np.ndarray]:
    """``goebel_cs_map`` as a map on value arrays, for use with :func:`iterate`."""

    def step(values: np.ndarray) -> np.ndarray:
        return goebel_cs_map(b, GridFunction(b.space, values)).values

    return step


def c0_admissible(x: np.ndarray) -> bool:
    return float(np.abs(x).max()) <= 1.0 + _SLACK
