"""Chain-graph random fields given by nonnegative pairwise potentials.

``potentials[t - 1][a, b]`` is the potential between positions ``t`` and
``t + 1`` evaluated at ``(x_t, x_{t+1}) = (a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain import ChainSpec
from .core import Alphabet, SpecError


@dataclass(frozen=True)
class UndirectedChainSpec:
    alphabet: Alphabet
    n: int
    potentials: tuple[np.ndarray, ...]

    def __post_init__(self):
        k = self.alphabet.size
        if self.n < 1:
            raise SpecError(f"n must be >= 1, got {self.n}")
        if len(self.potentials) != self.n - 1:
            raise SpecError(f"expected {self.n - 1} potentials, got {len(self.potentials)}")
        pots = []
        for t, psi in enumerate(self.potentials):
            psi = np.array(psi, dtype=float)
            if psi.shape != (k, k):
                raise SpecError(f"potentials[{t}] has shape {psi.shape}, expected {(k, k)}")
            if not np.all(np.isfinite(psi)) or np.any(psi < 0):
                raise SpecError(f"potentials[{t}] must be finite and nonnegative")
            if not np.any(psi > 0):
                raise SpecError(f"potentials[{t}] is identically zero")
            pots.append(psi)
        object.__setattr__(self, "potentials", tuple(pots))


def _suffix_masses(spec: UndirectedChainSpec) -> list[np.ndarray]:
    """``b[t][x]``: total potential mass of all continuations from ``X_{t+1} = x``
    (0-based list over positions, last entry all ones)."""
    k = spec.alphabet.size
    b = [np.ones(k)]
    for psi in reversed(spec.potentials):
        b.append(psi @ b[-1])
    b.reverse()
    return b


def partition_function(spec: UndirectedChainSpec) -> float:
    return float(_suffix_masses(spec)[0].sum())


def field_density(spec: UndirectedChainSpec, x: Sequence[int]) -> float:
    """Normalized potential product at ``x``; the normalizer comes from
    transfer-matrix accumulation."""
    if len(x) != spec.n:
        raise SpecError(f"sequence has length {len(x)}, field has n={spec.n}")
    Z = partition_function(spec)
    if Z <= 0:
        raise SpecError("potentials are not normalizable (Z = 0)")
    w = 1.0
    for t, psi in enumerate(spec.potentials):
        w *= psi[x[t], x[t + 1]]
    return float(w / Z)


def derive_kernels(spec: UndirectedChainSpec) -> ChainSpec:
    """The directed chain with the same joint law.

    ``p_t(x | y) = psi_t(y, x) b_{t+1}(x) / b_t(y)`` where ``b_t`` is the
    suffix mass; the prefix factor depends on ``y`` only and cancels.
    """
    b = _suffix_masses(spec)
    Z = float(b[0].sum())
    if Z <= 0:
        raise SpecError("potentials are not normalizable (Z = 0)")
    kernels = []
    for t, psi in enumerate(spec.potentials):
        num = psi * b[t + 1][None, :]  # [y, x]
        dead = np.flatnonzero(b[t] <= 0)
        if len(dead):
            y = spec.alphabet.label(int(dead[0]))
            raise SpecError(
                f"conditioning state {y!r} at position {t + 1} has zero total mass; "
                f"kernel column undefined")
        kernels.append((num / b[t][:, None]).T)
    return ChainSpec(spec.alphabet, b[0] / Z, tuple(kernels))


def potential_ratio_bound(R: float, r: float) -> float:
    """``(R - r) / (R + r)``; 1 when ``r = 0 < R``."""
    if R < r or r < 0:
        raise SpecError(f"need 0 <= r <= R, got r={r}, R={R}")
    if R == 0:
        raise SpecError("degenerate potential: R = r = 0")
    return (R - r) / (R + r)


def undirected_theta_bound(spec: UndirectedChainSpec, i: int) -> float:
    """Upper bound on the i-th contraction coefficient from the potential range."""
    if not (1 <= i < spec.n):
        raise SpecError(f"transition index {i} out of range 1..{spec.n - 1}")
    psi = spec.potentials[i - 1]
    return potential_ratio_bound(float(psi.max()), float(psi.min()))


def reweighted_tv(a, b, g) -> float:
    """Half-L1 distance between the normalized vectors ``a*g`` and ``b*g``."""
    a, b, g = (np.asarray(v, dtype=float) for v in (a, b, g))
    p = a * g
    q = b * g
    return 0.5 * float(np.abs(p / p.sum() - q / q.sum()).sum())
