import numpy as np

from finstar.numkit import adjoint


def e(i, j, n=2):
    """Elementary matrix with a 1 at (i, j), 1-based."""
    m = np.zeros((n, n), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def hs(a):
    return float(np.linalg.norm(np.asarray(a).ravel()))


def herm(x):
    return 0.5 * (x + adjoint(x))


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def span_rank(mats, tol=1e-9):
    """Rank of a family of matrices via numpy's SVD-based rank (independent of finstar)."""
    flat = np.array([np.asarray(m, dtype=complex).ravel() for m in mats])
    return int(np.linalg.matrix_rank(flat, tol=tol))


# (criterion, passed, detail) rows collected by the acceptance suite
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record(name: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((name, passed, detail))
