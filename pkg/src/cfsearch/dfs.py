"""Cost-pruned depth-first minimization of a Gram quadratic form.

`cost_pruned_scan` finds the exact minimum of a M a^H over nonzero ring
vectors by assigning components depth-first against the lower Cholesky
factor of M, visiting per-component candidates in increasing partial cost
and abandoning a branch the moment it reaches the incumbent.  Because every
vector cheaper than the incumbent is provably visited, the scan doubles as
a certifier: seeded with the result of a faster heuristic or sampling scan,
it either confirms the seed or returns something strictly cheaper.

The exhaustive reference search uses this scan as its fast pruning mode and
the coefficient searches use it as their final certification phase.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericError
from .rings import SQRT3, Ring, eisenstein_values, gaussian_values

#: Hard ceiling on nodes expanded by the cost-pruned depth-first scan.
MAX_DFS_NODES = 20_000_000


def _near_candidates(ring: Ring, t: complex, rsq: float) -> list[tuple[float, int, int]]:
    """Ring points within squared distance rsq of t, sorted by (d^2, x, y)."""
    out: list[tuple[float, int, int]] = []
    r = math.sqrt(rsq)
    if ring is Ring.GAUSSIAN:
        for x in range(math.ceil(t.real - r), math.floor(t.real + r) + 1):
            dre2 = (x - t.real) ** 2
            rem = rsq - dre2
            if rem < 0:
                continue
            dy = math.sqrt(rem)
            for y in range(math.ceil(t.imag - dy), math.floor(t.imag + dy) + 1):
                out.append((dre2 + (y - t.imag) ** 2, x, y))
    else:
        half_rt3 = SQRT3 / 2.0
        for b in range(math.ceil((t.imag - r) / half_rt3), math.floor((t.imag + r) / half_rt3) + 1):
            dim2 = (half_rt3 * b - t.imag) ** 2
            rem = rsq - dim2
            if rem < 0:
                continue
            dre = math.sqrt(rem)
            for a in range(math.ceil(t.real - dre + b / 2.0), math.floor(t.real + dre + b / 2.0) + 1):
                out.append((dim2 + (a - b / 2.0 - t.real) ** 2, a, b))
    out.sort()
    return out


def cost_pruned_scan(
    M: np.ndarray,
    ring: Ring,
    max_nodes: int = MAX_DFS_NODES,
    seed: tuple[np.ndarray, np.ndarray, float] | None = None,
) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Depth-first scan with partial-cost pruning; exact same minimum as a ball scan.

    Components are assigned from index L-1 down to 0 so that with a lower
    Cholesky factor M = C C^H each assignment fixes one coordinate of a*C.
    Candidates for a component are visited in increasing partial cost, so a
    branch is abandoned as soon as one candidate reaches the incumbent.

    `seed` is an optional (x, y, f) incumbent; only strictly cheaper vectors
    are explored, so the seed is returned unchanged whenever it is already
    optimal.  Without a seed the incumbent starts at the best unit vector,
    whose cost is the smallest diagonal entry of M.

    Returns (x, y, f_best, nodes expanded).
    """
    L = M.shape[0]
    C = np.linalg.cholesky(M)
    if seed is None:
        diag = M.diagonal().real
        j0 = int(np.argmin(diag))
        f_best = float(diag[j0])
        best_x = np.zeros(L, np.int64)
        best_y = np.zeros(L, np.int64)
        best_x[j0] = 1
    else:
        best_x = np.asarray(seed[0], np.int64).copy()
        best_y = np.asarray(seed[1], np.int64).copy()
        f_best = float(seed[2])
    values_fn = gaussian_values if ring is Ring.GAUSSIAN else eisenstein_values

    s = np.zeros(L, np.complex128)
    cur_x = np.zeros(L, np.int64)
    cur_y = np.zeros(L, np.int64)
    nodes = 0

    def descend(j: int, partial: float, nonzero: bool) -> None:
        nonlocal f_best, best_x, best_y, nodes
        cjj = C[j, j].real
        t = -s[j] / cjj
        budget = f_best - partial
        if budget <= 0:
            return
        for d2, x, y in _near_candidates(ring, complex(t), budget / (cjj * cjj)):
            inc = d2 * cjj * cjj
            if partial + inc >= f_best:
                break
            nodes += 1
            if nodes > max_nodes:
                raise NumericError(
                    f"cost-pruned scan exceeded the {max_nodes}-node budget"
                )
            nz = nonzero or x != 0 or y != 0
            cur_x[j], cur_y[j] = x, y
            if j == 0:
                if nz:
                    f_best = partial + inc
                    best_x, best_y = cur_x.copy(), cur_y.copy()
            else:
                v = complex(values_fn(np.int64(x), np.int64(y)))
                saved = s[:j].copy()
                s[:j] += v * C[j, :j]
                descend(j - 1, partial + inc, nz)
                s[:j] = saved

    descend(L - 1, 0.0, False)
    return best_x, best_y, f_best, nodes
