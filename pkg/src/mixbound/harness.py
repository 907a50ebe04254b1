"""Seeded trajectory sampling and Monte Carlo checks of concentration envelopes.

Every trajectory draws its uniforms from its own counter-based Philox stream
keyed by ``seed`` with the trajectory index in the counter, so a trajectory
does not depend on how many others are sampled or in which order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain import ChainSpec
from .core import SpecError
from .mixing import envelope_kontram, envelope_mcdiarmid, envelope_samson
from .mmp import MmpSpec
from .oracle import thread_count
from .process import ProcessSpec, local_thetas, marginals, observed_alphabet
from .tree import TreeSpec
from .undirected import UndirectedChainSpec, derive_kernels

F_KINDS = ("hamming/n", "hamming/sqrt_n")
#: envelope -> the f normalization its Lipschitz hypothesis calls for
ENVELOPE_F_KIND = {"mcdiarmid": "hamming/n", "kontram": "hamming/sqrt_n",
                   "samson": "hamming/sqrt_n"}
_MASK64 = (1 << 64) - 1


def trajectory_uniforms(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """Uniforms for trajectories ``start .. start+count-1``, ``width`` per trajectory."""
    out = np.empty((count, width))
    key = seed & _MASK64
    for r in range(count):
        bitgen = np.random.Philox(key=key, counter=[0, 0, 0, start + r])
        out[r] = np.random.Generator(bitgen).random(width)
    return out


def _uniforms(seed: int, count: int, width: int, threads: int | None) -> np.ndarray:
    workers = threads or thread_count()
    if workers <= 1 or count < 2048:
        return trajectory_uniforms(seed, 0, count, width)
    edges = np.linspace(0, count, workers + 1).astype(int)
    with ThreadPoolExecutor(workers) as pool:
        parts = pool.map(lambda ab: trajectory_uniforms(seed, ab[0], ab[1] - ab[0], width),
                         zip(edges[:-1], edges[1:]))
        return np.vstack(list(parts))


def _draw(cdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF draws: ``cdf_rows[r]`` is the CDF used for ``u[r]``."""
    k = cdf_rows.shape[1]
    return np.minimum((u[:, None] >= cdf_rows).sum(axis=1), k - 1)


def _sample_chain(p0, kernels, u: np.ndarray) -> np.ndarray:
    count, n = u.shape
    x = np.empty((count, n), dtype=np.int64)
    x[:, 0] = _draw(np.broadcast_to(np.cumsum(p0), (count, len(p0))), u[:, 0])
    for t, K in enumerate(kernels):
        cdf = np.cumsum(K, axis=0).T  # row y = CDF of the column for source y
        x[:, t + 1] = _draw(cdf[x[:, t]], u[:, t + 1])
    return x


def sample(spec: ProcessSpec, seed: int, count: int, *, threads: int | None = None) -> np.ndarray:
    """``count`` trajectories (symbol indices) by ancestral sampling.

    For a Markov marginal process the hidden coordinates are drawn and then
    dropped; tree trajectories are in node order.
    """
    if count < 1:
        raise SpecError(f"count must be >= 1, got {count}")
    n = spec.n
    u = _uniforms(seed, count, n, threads)
    if isinstance(spec, ChainSpec):
        return _sample_chain(spec.p0, spec.kernels, u)
    if isinstance(spec, UndirectedChainSpec):
        d = derive_kernels(spec)
        return _sample_chain(d.p0, d.kernels, u)
    if isinstance(spec, MmpSpec):
        pairs = _sample_chain(spec.p0, spec.kernels, u)
        return pairs // spec.hid_alphabet.size
    if isinstance(spec, TreeSpec):
        x = np.empty((count, n), dtype=np.int64)
        x[:, 0] = _draw(np.broadcast_to(np.cumsum(spec.p0), (count, len(spec.p0))), u[:, 0])
        for (a, b) in spec.topology.edges:
            cdf = np.cumsum(spec.edge_kernels[(a, b)], axis=0).T
            x[:, b - 1] = _draw(cdf[x[:, a - 1]], u[:, b - 1])
        return x
    raise TypeError(f"unsupported spec type {type(spec).__name__}")


@dataclass(frozen=True)
class SampleRun:
    spec: ProcessSpec
    seed: int
    count: int
    f_kind: str
    reference: tuple[int, ...]

    def __post_init__(self):
        if self.count < 1:
            raise SpecError(f"count must be >= 1, got {self.count}")
        if self.f_kind not in F_KINDS:
            raise SpecError(f"unknown f_kind {self.f_kind!r}; choose from {F_KINDS}")
        if len(self.reference) != self.spec.n:
            raise SpecError(f"reference has length {len(self.reference)}, need {self.spec.n}")
        k = observed_alphabet(self.spec).size
        if any(not (0 <= r < k) for r in self.reference):
            raise SpecError("reference contains symbol indices outside the alphabet")

    @property
    def scale(self) -> float:
        n = self.spec.n
        return 1.0 / n if self.f_kind == "hamming/n" else 1.0 / math.sqrt(n)

    def f(self, x: np.ndarray) -> np.ndarray:
        return (x != np.asarray(self.reference)).sum(axis=1) * self.scale

    def exact_mean(self) -> float:
        """``E f`` from the single-site marginals (f is a sum over sites)."""
        m = marginals(self.spec)
        hit = m[np.arange(self.spec.n), list(self.reference)]
        return float((1.0 - hit).sum() * self.scale)


@dataclass(frozen=True)
class TailReport:
    envelope: str
    t: np.ndarray
    empirical: np.ndarray
    bound: np.ndarray
    slack: np.ndarray
    mean: float
    count: int

    @property
    def verdicts(self) -> np.ndarray:
        return self.empirical <= np.minimum(self.bound, 1.0) + self.slack

    @property
    def passed(self) -> bool:
        return bool(self.verdicts.all())

    @property
    def violations(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(~self.verdicts)]


class HypothesisMismatch(SpecError):
    """The selected envelope's hypotheses do not cover the run."""


def verify_envelope(run: SampleRun, envelope: str, t_grid: Sequence[float], *,
                    delta_inf: float | None = None, gamma2: float | None = None,
                    threads: int | None = None) -> TailReport:
    """Compare empirical ``P(|f - E f| > t)`` against an envelope over ``t_grid``.

    ``E f`` is computed exactly. A grid point passes when the empirical
    frequency is at most the (capped) envelope plus a 3-sigma binomial slack,
    using the capped envelope as the Bernoulli parameter.
    """
    if envelope not in ENVELOPE_F_KIND:
        raise HypothesisMismatch(f"envelope {envelope!r} cannot be checked by sampling; "
                                 f"choose from {sorted(ENVELOPE_F_KIND)}")
    if ENVELOPE_F_KIND[envelope] != run.f_kind:
        raise HypothesisMismatch(f"envelope {envelope!r} needs f_kind "
                                 f"{ENVELOPE_F_KIND[envelope]!r}, run has {run.f_kind!r}")
    if envelope == "mcdiarmid" and any(th > 1e-12 for th in local_thetas(run.spec)):
        raise HypothesisMismatch("mcdiarmid envelope requires a product measure")
    if envelope == "samson" and observed_alphabet(run.spec).size != 2:
        # Hamming distance on {0,1}^n is convex and l2-Lipschitz after 1/sqrt(n) scaling
        raise HypothesisMismatch("samson envelope needs a binary alphabet embedded in [0,1]")
    if envelope == "kontram" and delta_inf is None:
        raise HypothesisMismatch("kontram envelope requires delta_inf")
    if envelope == "samson" and gamma2 is None:
        raise HypothesisMismatch("samson envelope requires gamma2")

    t = np.asarray(t_grid, dtype=float)
    x = sample(run.spec, run.seed, run.count, threads=threads)
    dev = np.abs(run.f(x) - run.exact_mean())
    dev.sort()
    exceed = run.count - np.searchsorted(dev, t, side="right")
    empirical = exceed / run.count
    if envelope == "mcdiarmid":
        bound = np.array([envelope_mcdiarmid(s, run.spec.n) for s in t])
    elif envelope == "kontram":
        bound = np.array([envelope_kontram(s, delta_inf) for s in t])
    else:
        bound = np.array([envelope_samson(s, gamma2) for s in t])
    p = np.minimum(bound, 1.0)
    slack = 3.0 * np.sqrt(p * (1.0 - p) / run.count)
    return TailReport(envelope, t, empirical, bound, slack, run.exact_mean(), run.count)
