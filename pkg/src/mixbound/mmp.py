"""Markov marginal processes: the observed coordinate of a Markov chain on
(observed, hidden) pairs.

Pair states are flattened observed-major: ``pair = obs * |hidden| + hid``.
Kernels are column-stochastic over pairs, ``K[to_pair, from_pair]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain import ChainSpec, theta_product
from .contraction import doeblin_coefficient
from .core import Alphabet, SpecError, as_probvec, check_kernel

#: Prefix probabilities at or below this are treated as impossible.
ZERO_PROB = 1e-15


@dataclass(frozen=True)
class MmpSpec:
    obs_alphabet: Alphabet
    hid_alphabet: Alphabet
    p0: np.ndarray
    kernels: tuple[np.ndarray, ...]

    def __post_init__(self):
        m = self.n_pairs
        p0 = as_probvec(np.ravel(self.p0), name="p0")
        if p0.shape != (m,):
            raise SpecError(f"p0 has {p0.size} entries, pair alphabet has {m}")
        labels = [(o, h) for o in self.obs_alphabet.symbols for h in self.hid_alphabet.symbols]
        kernels, seen = [], {}
        for t, K in enumerate(self.kernels):
            if id(K) in seen:  # repeated kernel: keep one shared validated copy
                kernels.append(seen[id(K)])
                continue
            raw = K
            K = check_kernel(K, name=f"kernels[{t}]", labels=labels)
            if K.shape != (m, m):
                raise SpecError(f"kernels[{t}] has shape {K.shape}, expected {(m, m)}")
            seen[id(raw)] = K
            kernels.append(K)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "kernels", tuple(kernels))

    @property
    def n(self) -> int:
        return len(self.kernels) + 1

    @property
    def n_pairs(self) -> int:
        return self.obs_alphabet.size * self.hid_alphabet.size

    def pair_chain(self) -> ChainSpec:
        """The underlying Markov chain on pair states."""
        return ChainSpec(Alphabet(range(self.n_pairs)), self.p0, self.kernels)


def _check_pair(n: int, i: int, j: int) -> None:
    if not (1 <= i < j <= n):
        raise SpecError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")


def _forward(spec: MmpSpec, xo: Sequence[int]) -> np.ndarray:
    """Unnormalized hidden-state weights at the last position of ``xo``."""
    h = spec.hid_alphabet.size
    v = spec.p0[xo[0] * h:(xo[0] + 1) * h]
    for t in range(1, len(xo)):
        K = spec.kernels[t - 1]
        v = K[xo[t] * h:(xo[t] + 1) * h, xo[t - 1] * h:(xo[t - 1] + 1) * h] @ v
        top = v.max()
        if 0 < top < 1e-300:
            raise ArithmeticError(
                f"forward weights underflow at position {t + 1} (max {top:.3g})")
    return v


def mmp_density(spec: MmpSpec, xo: Sequence[int]) -> float:
    """Probability of the observed sequence ``xo`` (forward recursion)."""
    if len(xo) != spec.n:
        raise SpecError(f"sequence has length {len(xo)}, process has n={spec.n}")
    return float(_forward(spec, xo).sum())


def mmp_theta(spec: MmpSpec, i: int) -> float:
    """Contraction coefficient of ``K_i`` over all pairs of conditioning pairs."""
    if not (1 <= i < spec.n):
        raise SpecError(f"transition index {i} out of range 1..{spec.n - 1}")
    return doeblin_coefficient(spec.kernels[i - 1])


def mmp_eta_bound(spec: MmpSpec, i: int, j: int) -> float:
    """``theta_i * ... * theta_{j-1}``, an upper bound on the observed
    process's eta-mixing coefficient."""
    _check_pair(spec.n, i, j)
    return theta_product(mmp_theta(spec, t) for t in range(i, j))


def mmp_marginals(spec: MmpSpec) -> np.ndarray:
    """Row ``t - 1`` holds the law of the observed symbol at position ``t``."""
    pair = spec.pair_chain()
    out = np.empty((spec.n, spec.obs_alphabet.size))
    law = pair.p0
    for t in range(spec.n):
        if t:
            law = spec.kernels[t - 1] @ law
        out[t] = law.reshape(spec.obs_alphabet.size, spec.hid_alphabet.size).sum(axis=1)
    return out


def mmp_h_vector(spec: MmpSpec, prefix: Sequence[int], w: int, w2: int) -> np.ndarray | None:
    """Difference of the pair-state laws at position ``i + 1`` given the observed
    prefixes ``prefix + (w,)`` and ``prefix + (w2,)``, where ``i = len(prefix) + 1``.

    Each law is a convex combination of ``K_i`` columns with conditioning
    observed symbol fixed, weighted by the hidden-state posterior at ``i``.
    Returns None when either conditioning prefix has probability
    <= ``ZERO_PROB``.
    """
    i = len(prefix) + 1
    if not (1 <= i < spec.n):
        raise SpecError(f"prefix length {len(prefix)} leaves no transition")
    h = spec.hid_alphabet.size
    K = spec.kernels[i - 1]
    out = np.zeros(spec.n_pairs)
    for sign, sym in ((1.0, w), (-1.0, w2)):
        post = _forward(spec, tuple(prefix) + (sym,))
        mass = post.sum()
        if mass <= ZERO_PROB:
            return None
        out += sign * (K[:, sym * h:(sym + 1) * h] @ (post / mass))
    return out
