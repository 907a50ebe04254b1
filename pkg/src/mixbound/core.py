"""Shared numeric substrate: alphabets, distributions, TV norm, Hamming metric."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

#: Tolerance for stochasticity of user-supplied distributions and kernels.
INPUT_TOL = 1e-9
#: Tolerance for internal comparisons (balance checks and the like).
INTERNAL_TOL = 1e-12
#: Default cap on ``n * |alphabet|**n`` for exhaustive Lipschitz evaluation.
LIPSCHITZ_CAP = 2_000_000
#: sums this close to 1 are taken as exact (keeps renormalization idempotent)
_RENORM_EPS = 1e-14


class SpecError(ValueError):
    """Structurally invalid input (wrong shapes, bad indices, unknown labels)."""


class StochasticityError(SpecError):
    """A distribution or kernel fails the nonnegativity / unit-sum check.

    ``where`` names the offending object (e.g. ``"kernels[2]"``) and
    ``column`` the offending column (conditioning symbol), when applicable.
    """

    def __init__(self, message: str, *, where: str | None = None, column: object = None):
        super().__init__(message)
        self.where = where
        self.column = column


class CapExceededError(ValueError):
    """An exhaustive computation would exceed its configured size cap."""


@dataclass(frozen=True)
class Alphabet:
    """Finite ordered set of distinct symbol labels."""

    symbols: tuple

    def __init__(self, symbols: Iterable[Hashable]):
        symbols = tuple(symbols)
        if not symbols:
            raise SpecError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise SpecError(f"alphabet labels are not unique: {list(symbols)}")
        object.__setattr__(self, "symbols", symbols)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, label: Hashable) -> int:
        try:
            return self.symbols.index(label)
        except ValueError:
            raise SpecError(f"unknown symbol {label!r}; alphabet is {list(self.symbols)}") from None

    def label(self, idx: int) -> Hashable:
        return self.symbols[idx]

    def encode(self, labels: Sequence[Hashable]) -> tuple[int, ...]:
        return tuple(self.index(s) for s in labels)

    def decode(self, indices: Sequence[int]) -> tuple:
        return tuple(self.symbols[int(i)] for i in indices)

    @classmethod
    def of_size(cls, k: int) -> "Alphabet":
        return cls(range(k))


@dataclass(frozen=True)
class HammingConfig:
    """Sequence length plus the Lipschitz normalization a concentration
    envelope expects: ``"per-coordinate"`` (Lip <= 1/n) or ``"root"``
    (Lip <= 1/sqrt(n)), both with respect to the unnormalized Hamming metric.
    """

    n: int
    normalization: str = "per-coordinate"

    def __post_init__(self):
        if self.n < 1:
            raise SpecError(f"sequence length must be >= 1, got {self.n}")
        if self.normalization not in ("per-coordinate", "root"):
            raise SpecError(f"unknown normalization {self.normalization!r}")

    @property
    def lipschitz_budget(self) -> float:
        if self.normalization == "per-coordinate":
            return 1.0 / self.n
        return 1.0 / math.sqrt(self.n)


def as_probvec(p, *, name: str = "distribution", tol: float = INPUT_TOL) -> np.ndarray:
    """Validate ``p`` as a probability vector and return a float copy.

    Deviations of the total from 1 up to ``tol`` are renormalized away; larger
    deviations, negative or non-finite entries raise :class:`StochasticityError`.
    """
    p = np.array(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise SpecError(f"{name}: expected a nonempty 1-d array, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise StochasticityError(f"{name}: non-finite entry", where=name)
    if np.any(p < 0):
        k = int(np.argmin(p))
        raise StochasticityError(f"{name}: negative entry {float(p[k])!r} at index {k}", where=name)
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise StochasticityError(f"{name}: sums to {float(total)!r} (tolerance {tol:g})", where=name)
    # leave already-normalized input untouched so revalidation is idempotent
    return p if abs(total - 1.0) <= _RENORM_EPS else p / total


def check_kernel(K, *, name: str = "kernel", labels: Sequence | None = None,
                 tol: float = INPUT_TOL) -> np.ndarray:
    """Validate a column-stochastic matrix ``K[to, from]`` and return a float copy.

    Columns whose sums deviate from 1 by at most ``tol`` are renormalized.
    Errors name the first offending column; ``labels`` (if given) are used for
    the column name instead of its index.
    """
    K = np.array(K, dtype=float)
    if K.ndim != 2 or K.size == 0:
        raise SpecError(f"{name}: expected a nonempty matrix, got shape {K.shape}")
    if not np.all(np.isfinite(K)):
        raise StochasticityError(f"{name}: non-finite entry", where=name)

    def col_name(c):
        return labels[c] if labels is not None else c

    neg = np.argwhere(K < 0)
    if len(neg):
        r, c = neg[0]
        raise StochasticityError(
            f"{name}: column {col_name(c)!r} has negative entry {float(K[r, c])!r}",
            where=name, column=col_name(c))
    sums = K.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if len(bad):
        c = int(bad[0])
        raise StochasticityError(
            f"{name}: column {col_name(c)!r} sums to {float(sums[c])!r} (tolerance {tol:g})",
            where=name, column=col_name(c))
    fix = np.abs(sums - 1.0) > _RENORM_EPS
    if fix.any():
        K[:, fix] /= sums[fix]
    return K


def is_balanced(v, tol: float = INTERNAL_TOL) -> bool:
    return abs(float(np.sum(v))) <= tol


def tv_norm(a) -> float:
    """Total-variation norm with the 1/2 factor: ``0.5 * sum |a|``."""
    return 0.5 * float(np.abs(np.asarray(a, dtype=float)).sum())


def hamming_distance(x: Sequence, y: Sequence) -> int:
    """Number of coordinates in which ``x`` and ``y`` disagree."""
    if len(x) != len(y):
        raise SpecError(f"length mismatch: {len(x)} vs {len(y)}")
    return sum(1 for a, b in zip(x, y) if a != b)


def _as_table(f, n: int) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim == 1:
        k = round(f.size ** (1.0 / n))
        if k ** n != f.size:
            raise SpecError(f"table of size {f.size} is not |alphabet|**{n}")
        f = f.reshape((k,) * n)
    if f.ndim != n or len(set(f.shape)) != 1:
        raise SpecError(f"expected a table of shape (k,)*{n}, got {f.shape}")
    return f


def lipschitz_constant(f, metric: HammingConfig, *, cap: int = LIPSCHITZ_CAP) -> float:
    """Lipschitz constant of a tabulated ``f`` under the unnormalized Hamming metric.

    ``f`` is indexed by ``(x_1, ..., x_n)`` (an n-d array, or its C-order
    flattening). Because the Hamming metric is the path metric of the Hamming
    graph, the supremum over all pairs is attained on pairs at distance 1,
    so only single-coordinate changes are scanned.
    """
    n = metric.n
    f = _as_table(f, n)
    k = f.shape[0]
    if n * k ** n > cap:
        raise CapExceededError(f"n*|alphabet|**n = {n * k ** n} exceeds cap {cap}")
    if k == 1:
        return 0.0
    best = 0.0
    for axis in range(n):
        moved = np.moveaxis(f, axis, 0)
        for a, b in itertools.combinations(range(k), 2):
            best = max(best, float(np.max(np.abs(moved[a] - moved[b]))))
    return best
