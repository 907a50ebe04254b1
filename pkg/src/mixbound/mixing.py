"""Mixing matrices built from eta coefficients, their operator norms, and the
four concentration envelopes.

Every envelope returns the raw formula value (possibly >= 1); display code
caps at 1 and marks such values vacuous.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import SpecError

ENVELOPES = ("mcdiarmid", "marton", "samson", "kontram")


@dataclass(frozen=True)
class EtaMatrix:
    """Strictly upper-triangular eta values, 1-based ``(i, j)`` stored at ``values[i-1, j-1]``.

    ``exact[i-1, j-1]`` records whether the entry is an exact coefficient
    (True) or an upper bound (False).
    """

    values: np.ndarray
    exact: np.ndarray = field(default=None)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise SpecError(f"eta matrix must be square, got {v.shape}")
        v = np.triu(v, 1)
        iu = np.triu_indices(v.shape[0], 1)
        bad = np.flatnonzero((v[iu] < 0) | (v[iu] > 1 + 1e-12))
        if len(bad):
            i, j = iu[0][bad[0]] + 1, iu[1][bad[0]] + 1
            raise SpecError(f"eta[{i},{j}] = {float(v[i - 1, j - 1])!r} lies outside [0, 1]")
        v = np.clip(v, 0.0, 1.0)
        ex = np.zeros(v.shape, bool) if self.exact is None else np.asarray(self.exact, bool)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "exact", ex)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_function(cls, n: int, fn, *, exact: bool = False) -> "EtaMatrix":
        v = np.zeros((n, n))
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                v[i - 1, j - 1] = fn(i, j)
        return cls(v, np.triu(np.full((n, n), exact), 1))


@dataclass(frozen=True)
class MixingMatrices:
    delta: np.ndarray
    gamma: np.ndarray


def build_matrices(eta: EtaMatrix) -> MixingMatrices:
    """Unit-diagonal upper-triangular Delta (entries eta) and Gamma (entries sqrt(eta))."""
    eye = np.eye(eta.n)
    return MixingMatrices(eye + eta.values, eye + np.sqrt(eta.values))


def delta_inf_norm(m: MixingMatrices) -> float:
    """Largest row sum of Delta (its entries are nonnegative)."""
    return float(m.delta.sum(axis=1).max())


class Gamma2Norm(NamedTuple):
    value: float
    gershgorin_upper: float
    iterations: int
    converged: bool


def gamma_2_norm(m: MixingMatrices | np.ndarray, tol: float = 1e-10,
                 max_iter: int = 10_000) -> Gamma2Norm:
    """Spectral norm of Gamma by power iteration on ``Gamma^T Gamma``.

    Starts from the all-ones vector and stops once successive Rayleigh
    quotients differ by less than ``tol``. Also returns the square root of
    the largest row sum of ``Gamma^T Gamma`` (a Gershgorin upper bound).
    """
    if tol <= 0:
        raise SpecError("tol must be positive")
    G = m.gamma if isinstance(m, MixingMatrices) else np.asarray(m, dtype=float)
    A = G.T @ G
    gersh = math.sqrt(float(np.abs(A).sum(axis=1).max()))
    x = np.ones(A.shape[0]) / math.sqrt(A.shape[0])
    lam = float(x @ A @ x)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        y = A @ x
        x = y / np.linalg.norm(y)
        new = float(x @ A @ x)
        if abs(new - lam) < tol:
            lam = new
            converged = True
            break
        lam = new
    if not converged:
        warnings.warn(f"power iteration did not converge in {max_iter} steps", RuntimeWarning)
    return Gamma2Norm(math.sqrt(lam), gersh, it, converged)


def envelope_mcdiarmid(t: float, n: int) -> float:
    """``2 exp(-2 n t^2)``: product measures, Lip(f) <= 1/n under Hamming."""
    return 2.0 * math.exp(-2.0 * n * t * t)


def marton_threshold(n: int) -> float:
    return math.sqrt(math.log(2.0) / (2.0 * n))


def envelope_marton(t: float, n: int, theta: float) -> float:
    """``2 exp(-2n (t(1-theta) - sqrt(log 2 / 2n))^2)`` past its threshold, else 2.

    Deviation is measured from a median of f. Chains with contraction < 1.
    """
    if not (0.0 <= theta < 1.0):
        raise SpecError(f"theta must lie in [0, 1), got {theta!r}")
    s = t * (1.0 - theta) - marton_threshold(n)
    if s < 0:
        return 2.0
    return 2.0 * math.exp(-2.0 * n * s * s)


def envelope_samson(t: float, gamma2: float) -> float:
    """``2 exp(-t^2 / (2 ||Gamma||_2^2))``: convex f on [0,1]^n, Lip(f) <= 1 in l2."""
    return 2.0 * math.exp(-t * t / (2.0 * gamma2 * gamma2))


def envelope_kontram(t: float, delta_inf: float) -> float:
    """``2 exp(-t^2 / (2 ||Delta||_inf^2))``: Lip(f) <= n^{-1/2} under Hamming."""
    return 2.0 * math.exp(-t * t / (2.0 * delta_inf * delta_inf))


@dataclass(frozen=True)
class EnvelopeTable:
    t: np.ndarray
    raw: dict[str, np.ndarray]

    @property
    def capped(self) -> dict[str, np.ndarray]:
        return {k: np.minimum(v, 1.0) for k, v in self.raw.items()}

    def vacuous(self, name: str) -> np.ndarray:
        return self.raw[name] >= 1.0


def envelope_table(t_grid: Sequence[float], *, n: int | None = None, theta: float | None = None,
                   gamma2: float | None = None, delta_inf: float | None = None,
                   which: Sequence[str] = ENVELOPES) -> EnvelopeTable:
    """Evaluate the selected envelopes over ``t_grid``; each needs its own inputs
    (mcdiarmid: n; marton: n, theta; samson: gamma2; kontram: delta_inf)."""
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0):
        raise SpecError("t grid must be nonnegative")
    need = {"mcdiarmid": ("n",), "marton": ("n", "theta"), "samson": ("gamma2",),
            "kontram": ("delta_inf",)}
    given = {"n": n, "theta": theta, "gamma2": gamma2, "delta_inf": delta_inf}
    raw = {}
    for name in which:
        if name not in need:
            raise SpecError(f"unknown envelope {name!r}; choose from {ENVELOPES}")
        missing = [p for p in need[name] if given[p] is None]
        if missing:
            raise SpecError(f"envelope {name!r} requires {', '.join(missing)}")
        if name == "mcdiarmid":
            vals = [envelope_mcdiarmid(x, n) for x in t]
        elif name == "marton":
            vals = [envelope_marton(x, n, theta) for x in t]
        elif name == "samson":
            vals = [envelope_samson(x, gamma2) for x in t]
        else:
            vals = [envelope_kontram(x, delta_inf) for x in t]
        raw[name] = np.array(vals)
    return EnvelopeTable(t, raw)
