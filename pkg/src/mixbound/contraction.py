"""Markov contraction, the column-difference kernel norm, and TV tensorization.

Kernels are column-stochastic: ``K[x, y] = P(x | y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import INPUT_TOL, SpecError, StochasticityError, check_kernel


@dataclass(frozen=True)
class BlockKernel:
    """Column-stochastic matrix between product index sets.

    Rows are indexed by ``Sigma^rows`` and columns by ``Sigma^cols``, each
    flattened row-major over the node tuple in ascending node order (the
    first node is the most significant digit).
    """

    entries: np.ndarray
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    k: int


def _entries(K) -> np.ndarray:
    return K.entries if isinstance(K, BlockKernel) else np.asarray(K, dtype=float)


def doeblin_coefficient(K, *, tol: float = INPUT_TOL) -> float:
    """Largest TV distance between two columns of a column-stochastic matrix.

    Accepts a plain matrix or a :class:`BlockKernel`. The result is in [0, 1].
    """
    A = _entries(K)
    if A.ndim != 2:
        raise SpecError(f"expected a matrix, got shape {A.shape}")
    if np.any(A < 0) or np.any(np.abs(A.sum(axis=0) - 1.0) > tol):
        raise StochasticityError("input is not column-stochastic")
    m = A.shape[1]
    if m < 2:
        return 0.0
    # pairwise half-L1 between columns, one row of the pair table at a time
    best = 0.0
    for j in range(m - 1):
        d = 0.5 * np.abs(A[:, j + 1:] - A[:, j:j + 1]).sum(axis=0)
        best = max(best, float(d.max()))
    return min(best, 1.0)


def contract(K, v) -> np.ndarray:
    """Apply ``K`` to the signed measure ``v`` (plain matrix-vector product)."""
    A = _entries(K)
    v = np.asarray(v, dtype=float)
    if A.ndim != 2 or v.shape != (A.shape[1],):
        raise SpecError(f"dimension mismatch: kernel {A.shape} vs vector {v.shape}")
    return A @ v


def alpha(xs: Iterable[float]) -> float:
    """The inclusion-exclusion combiner ``alpha`` over a finite multiset.

    ``alpha({x}) = x`` and ``alpha(B + {x}) = x + (1 - x) * alpha(B)``;
    ``alpha`` of the empty multiset is 0. Arguments must lie in [0, 1].
    The fold runs over the values in descending order so the floating-point
    result does not depend on the caller's ordering.
    """
    xs = sorted((float(x) for x in xs), reverse=True)
    for x in xs:
        if not (0.0 <= x <= 1.0):
            raise ValueError(f"alpha arguments must lie in [0, 1], got {x!r}")
    acc = 0.0
    for x in xs:
        acc = x + (1.0 - x) * acc
    return acc


def product_tv_bound(dp: float, dq: float) -> float:
    """Upper bound on ``||p x q - p' x q'||`` given ``||p - p'||`` and ``||q - q'||``."""
    for d in (dp, dq):
        if not (0.0 <= d <= 1.0):
            raise ValueError(f"TV distances must lie in [0, 1], got {d!r}")
    return dp + dq - dp * dq


def block_tensor(kernels: Mapping[tuple[int, int], np.ndarray]) -> BlockKernel:
    """Tensor product of square kernels attached to the edges of a bipartite graph.

    ``kernels`` maps edges ``(i, j)`` (source node ``i``, target node ``j``)
    to ``|Sigma| x |Sigma|`` column-stochastic matrices. Every target node must
    appear in exactly one edge and sources and targets must be disjoint. The
    entry at ``(y_J, x_I)`` is the product over edges of ``K_ij[y_j, x_i]``.
    """
    if not kernels:
        raise SpecError("block_tensor needs at least one edge")
    edges = list(kernels)
    sources = sorted({i for i, _ in edges})
    targets = [j for _, j in edges]
    if len(set(targets)) != len(targets):
        raise SpecError("a target node has more than one incident edge")
    if set(sources) & set(targets):
        raise SpecError("source and target node sets must be disjoint")
    targets = sorted(targets)
    mats = {e: check_kernel(K, name=f"kernel{e}") for e, K in kernels.items()}
    k = {M.shape[0] for M in mats.values()} | {M.shape[1] for M in mats.values()}
    if len(k) != 1:
        raise SpecError("all edge kernels must be square over one alphabet")
    k = k.pop()

    nr, nc = len(targets), len(sources)
    out = np.ones((k,) * (nr + nc))
    for (i, j), M in mats.items():
        shape = [1] * (nr + nc)
        shape[targets.index(j)] = k
        shape[nr + sources.index(i)] = k
        out = out * M.reshape(shape)
    return BlockKernel(out.reshape(k ** nr, k ** nc), tuple(targets), tuple(sources), k)
