"""Inhomogeneous Markov chains on a finite alphabet.

Positions are 1-based throughout the public API: ``kernels[t - 1]`` carries
the transition from position ``t`` to position ``t + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .contraction import doeblin_coefficient
from .core import Alphabet, SpecError, as_probvec, check_kernel, tv_norm


@dataclass(frozen=True)
class ChainSpec:
    alphabet: Alphabet
    p0: np.ndarray
    kernels: tuple[np.ndarray, ...]

    def __post_init__(self):
        k = self.alphabet.size
        p0 = as_probvec(self.p0, name="p0")
        if p0.shape != (k,):
            raise SpecError(f"p0 has {p0.size} entries, alphabet has {k}")
        kernels, seen = [], {}
        for t, K in enumerate(self.kernels):
            if id(K) in seen:  # repeated kernel: keep one shared validated copy
                kernels.append(seen[id(K)])
                continue
            raw = K
            K = check_kernel(K, name=f"kernels[{t}]", labels=self.alphabet.symbols)
            if K.shape != (k, k):
                raise SpecError(f"kernels[{t}] has shape {K.shape}, expected {(k, k)}")
            seen[id(raw)] = K
            kernels.append(K)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "kernels", tuple(kernels))

    @property
    def n(self) -> int:
        return len(self.kernels) + 1

    @classmethod
    def homogeneous(cls, alphabet: Alphabet, p0, kernel, n: int) -> "ChainSpec":
        if n < 1:
            raise SpecError(f"n must be >= 1, got {n}")
        return cls(alphabet, p0, (kernel,) * (n - 1))


def _check_pair(n: int, i: int, j: int) -> None:
    if not (1 <= i < j <= n):
        raise SpecError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")


def chain_density(spec: ChainSpec, x: Sequence[int]) -> float:
    """``p0(x_1) * prod_t p_t(x_{t+1} | x_t)`` for a sequence of symbol indices."""
    if len(x) != spec.n:
        raise SpecError(f"sequence has length {len(x)}, chain has n={spec.n}")
    p = spec.p0[x[0]]
    for t, K in enumerate(spec.kernels):
        p = p * K[x[t + 1], x[t]]
    return float(p)


def chain_theta(spec: ChainSpec, i: int) -> float:
    """Contraction coefficient of the i-th transition, ``1 <= i < n``."""
    if not (1 <= i < spec.n):
        raise SpecError(f"transition index {i} out of range 1..{spec.n - 1}")
    return doeblin_coefficient(spec.kernels[i - 1])


def theta_product(thetas: Sequence[float]) -> float:
    out = 1.0
    for th in thetas:
        out *= th
    return out


def chain_eta_bound(spec: ChainSpec, i: int, j: int) -> float:
    """``theta_i * theta_{i+1} * ... * theta_{j-1}``."""
    _check_pair(spec.n, i, j)
    return theta_product(chain_theta(spec, t) for t in range(i, j))


def chain_marginals(spec: ChainSpec) -> np.ndarray:
    """Row ``t - 1`` holds the law of ``X_t``."""
    out = np.empty((spec.n, spec.alphabet.size))
    out[0] = spec.p0
    for t, K in enumerate(spec.kernels):
        out[t + 1] = K @ out[t]
    return out


def chain_eta_exact(spec: ChainSpec, i: int, j: int, *, support_only: bool = False) -> float:
    """Exact eta-mixing coefficient by propagating column differences.

    For each symbol pair ``(w, w')`` the balanced vector
    ``p_i(.|w) - p_i(.|w')`` is pushed through kernels ``i+1 .. j-1``; the TV
    norm of the result is the conditional-law distance of ``X_j..X_n``,
    independent of the prefix before position ``i``. The maximum over pairs is
    returned.

    With ``support_only`` the maximum ranges only over symbols ``w`` that
    ``X_i`` hits with positive probability, which is what the definition
    (with zero-probability conditionings excluded) evaluates to.
    """
    _check_pair(spec.n, i, j)
    k = spec.alphabet.size
    symbols = range(k)
    if support_only:
        symbols = np.flatnonzero(chain_marginals(spec)[i - 1] > 1e-15)
    K = spec.kernels[i - 1]
    best = 0.0
    for a in symbols:
        for b in symbols:
            if b <= a:
                continue
            z = K[:, a] - K[:, b]
            for t in range(i, j - 1):
                z = spec.kernels[t] @ z
            best = max(best, tv_norm(z))
    return best
