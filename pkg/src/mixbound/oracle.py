"""Ground truth by exhaustive enumeration.

Joint tables are dense arrays of shape ``(k,) * n`` (C order, so the flat
index is the lexicographic rank of the sequence). Eta coefficients are
computed straight from their definition: a supremum over prefixes and symbol
pairs of the TV distance between conditional laws of the suffix.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .chain import ChainSpec
from .core import Alphabet, CapExceededError, SpecError
from .mixing import EtaMatrix
from .mmp import MmpSpec
from .process import ProcessSpec
from .tree import TreeSpec
from .undirected import UndirectedChainSpec

DEFAULT_CAP = 2_000_000
#: Conditioning events at or below this probability are excluded.
ZERO_PROB = 1e-15


def thread_count() -> int:
    """Worker count from ``MIXBOUND_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("MIXBOUND_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise SpecError(f"MIXBOUND_THREADS must be an integer, got {raw!r}") from None
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class JointTable:
    alphabet: Alphabet
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        k = self.alphabet.size
        if p.shape != (k,) * p.ndim:
            raise SpecError(f"joint table shape {p.shape} does not match alphabet size {k}")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise SpecError(f"joint table is not a probability (total {float(p.sum())!r})")
        object.__setattr__(self, "probs", p)

    @property
    def n(self) -> int:
        return self.probs.ndim

    @property
    def k(self) -> int:
        return self.alphabet.size


def _check_cap(entries: int, cap: int) -> None:
    if entries > cap:
        raise CapExceededError(f"enumeration needs {entries} table entries, cap is {cap}")


def _chain_table(p0: np.ndarray, kernels: Sequence[np.ndarray]) -> np.ndarray:
    joint = p0.copy()
    for K in kernels:
        joint = joint[..., None] * K.T  # [.., x_t] * K[x_{t+1}, x_t]
    return joint


def enumerate_joint(spec: ProcessSpec, cap: int = DEFAULT_CAP) -> JointTable:
    """Dense joint law of the (observed) process over all of ``Sigma^n``."""
    if isinstance(spec, ChainSpec):
        _check_cap(spec.alphabet.size ** spec.n, cap)
        return JointTable(spec.alphabet, _chain_table(spec.p0, spec.kernels))

    if isinstance(spec, UndirectedChainSpec):
        k, n = spec.alphabet.size, spec.n
        _check_cap(k ** n, cap)
        w = np.ones((k,) * n)
        for t, psi in enumerate(spec.potentials):
            shape = [1] * n
            shape[t], shape[t + 1] = k, k
            w = w * psi.reshape(shape)
        return JointTable(spec.alphabet, w / w.sum())

    if isinstance(spec, TreeSpec):
        k, n = spec.alphabet.size, spec.n
        _check_cap(k ** n, cap)
        joint = np.ones((k,) * n) * spec.p0.reshape((k,) + (1,) * (n - 1))
        for (u, v) in spec.topology.edges:
            K = spec.edge_kernels[(u, v)]
            shape = [1] * n
            shape[u - 1], shape[v - 1] = k, k
            # K is [x_v, x_u]; lay it out along axes (u-1, v-1), u < v
            joint = joint * K.T.reshape(shape)
        return JointTable(spec.alphabet, joint)

    if isinstance(spec, MmpSpec):
        ko, kh, n = spec.obs_alphabet.size, spec.hid_alphabet.size, spec.n
        _check_cap((ko * kh) ** n, cap)
        pair = _chain_table(spec.p0, spec.kernels).reshape((ko, kh) * n)
        obs = pair.sum(axis=tuple(range(1, 2 * n, 2)))
        return JointTable(spec.obs_alphabet, obs)

    raise TypeError(f"unsupported spec type {type(spec).__name__}")


@dataclass(frozen=True)
class EtaWitness:
    """Detailed result of an exact eta computation.

    ``prefix`` (symbol indices, length ``i - 1``) and ``w``/``w2`` attain
    ``value``; ``excluded`` counts (prefix, symbol) conditioning events
    dropped for having probability <= ``ZERO_PROB``; ``vacuous`` is set when
    no admissible conditioning pair exists (``value`` is then 0).
    """

    value: float
    prefix: tuple[int, ...] | None
    w: int | None
    w2: int | None
    excluded: int
    vacuous: bool


def _check_pair(n: int, i: int, j: int) -> None:
    if not (1 <= i < j <= n):
        raise SpecError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")


def eta_witness(table: JointTable, i: int, j: int) -> EtaWitness:
    _check_pair(table.n, i, j)
    k, n = table.k, table.n
    P = table.probs.reshape(k ** (i - 1), k, k ** (j - i - 1), k ** (n - j + 1)).sum(axis=2)
    mass = P.sum(axis=2)  # [prefix, w]
    ok = mass > ZERO_PROB
    excluded = int((~ok).sum())
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = P / np.where(ok, mass, 1.0)[..., None]
    best, arg = -1.0, None
    for a in range(k):
        for b in range(a + 1, k):
            both = ok[:, a] & ok[:, b]
            if not both.any():
                continue
            d = 0.5 * np.abs(cond[:, a] - cond[:, b]).sum(axis=1)
            d[~both] = -1.0
            y = int(np.argmax(d))
            if d[y] > best:
                best, arg = float(d[y]), (y, a, b)
    if arg is None:
        return EtaWitness(0.0, None, None, None, excluded, True)
    y, a, b = arg
    prefix = tuple(int(s) for s in np.unravel_index(y, (k,) * (i - 1))) if i > 1 else ()
    return EtaWitness(min(best, 1.0), prefix, a, b, excluded, False)


def exact_eta(table: JointTable, i: int, j: int) -> float:
    """Exact eta-mixing coefficient, zero-probability conditionings excluded."""
    return eta_witness(table, i, j).value


def exact_eta_matrix(table: JointTable, *, threads: int | None = None) -> EtaMatrix:
    """All exact coefficients; pairs are spread over ``threads`` workers."""
    n = table.n
    pairs = [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]
    workers = threads or thread_count()
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            vals = list(pool.map(lambda ij: exact_eta(table, *ij), pairs))
    else:
        vals = [exact_eta(table, i, j) for i, j in pairs]
    v = np.zeros((n, n))
    for (i, j), x in zip(pairs, vals):
        v[i - 1, j - 1] = x
    return EtaMatrix(v, np.triu(np.ones((n, n), bool), 1))


def conditional_law(table: JointTable, condition: Mapping[int, int],
                    targets: Sequence[int]) -> np.ndarray:
    """Law of ``X[targets]`` given ``X[pos] = sym`` for each ``pos: sym`` in ``condition``.

    Positions are 1-based; the result has shape ``(k,) * len(targets)`` with
    axes in the order of ``targets``.
    """
    n = table.n
    for pos in list(condition) + list(targets):
        if not (1 <= pos <= n):
            raise SpecError(f"position {pos} out of range 1..{n}")
    if len(set(targets)) != len(targets):
        raise SpecError("duplicate target positions")
    idx = [slice(None)] * n
    for pos, sym in condition.items():
        idx[pos - 1] = slice(sym, sym + 1)
    sub = table.probs[tuple(idx)]
    total = sub.sum()
    if total <= ZERO_PROB:
        raise SpecError(f"conditioning event has probability {float(total)!r}")
    keep = [t - 1 for t in targets]
    drop = tuple(a for a in range(n) if a not in keep)
    marg = sub.sum(axis=drop, keepdims=True) / total
    marg = marg.reshape([sub.shape[a] for a in range(n) if a in keep])
    # axes are now in ascending position order; reorder to match targets
    order = sorted(keep)
    perm = [order.index(t) for t in keep]
    out = np.transpose(marg, perm)
    # conditioned targets collapse to a point mass on the fixed symbol
    k = table.k
    full = np.zeros((k,) * len(keep))
    sel = tuple(slice(condition[t + 1], condition[t + 1] + 1) if (t + 1) in condition
                else slice(None) for t in keep)
    full[sel] = out
    return full
