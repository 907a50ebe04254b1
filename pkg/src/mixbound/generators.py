"""Random and reference process specs for tests, suites and demos."""

from __future__ import annotations

import numpy as np

from .chain import ChainSpec
from .core import Alphabet, SpecError
from .mmp import MmpSpec
from .tree import TreeSpec, TreeTopology, canonical_renumbering
from .undirected import UndirectedChainSpec

FAMILIES = ("chain", "undirected_chain", "tree", "mmp")


def random_kernel(rng: np.random.Generator, k: int, concentration: float = 1.0) -> np.ndarray:
    """Column-stochastic ``k x k`` matrix with Dirichlet columns."""
    return rng.dirichlet(np.full(k, concentration), size=k).T


def random_chain(rng: np.random.Generator, n: int, k: int) -> ChainSpec:
    return ChainSpec(Alphabet.of_size(k), rng.dirichlet(np.ones(k)),
                     tuple(random_kernel(rng, k) for _ in range(n - 1)))


def random_undirected(rng: np.random.Generator, n: int, k: int,
                      low: float = 0.05, high: float = 5.0) -> UndirectedChainSpec:
    """Strictly positive potentials, log-uniform on ``[low, high]``."""
    pots = tuple(np.exp(rng.uniform(np.log(low), np.log(high), size=(k, k)))
                 for _ in range(n - 1))
    return UndirectedChainSpec(Alphabet.of_size(k), n, pots)


def random_tree_edges(rng: np.random.Generator, n: int) -> tuple[tuple[int, int], ...]:
    """Uniform random recursive tree, renumbered breadth-first."""
    edges = [(int(rng.integers(1, v)), v) for v in range(2, n + 1)]
    new_edges, _ = canonical_renumbering(n, edges)
    return new_edges


def random_tree(rng: np.random.Generator, n: int, k: int) -> TreeSpec:
    edges = random_tree_edges(rng, n)
    kernels = {e: random_kernel(rng, k) for e in edges}
    return TreeSpec(TreeTopology(n, edges), Alphabet.of_size(k), rng.dirichlet(np.ones(k)),
                    kernels)


def random_mmp(rng: np.random.Generator, n: int, ko: int, kh: int) -> MmpSpec:
    m = ko * kh
    return MmpSpec(Alphabet.of_size(ko), Alphabet.of_size(kh), rng.dirichlet(np.ones(m)),
                   tuple(random_kernel(rng, m) for _ in range(n - 1)))


def random_spec(family: str, rng: np.random.Generator, *, max_n: int | None = None,
                max_k: int | None = None):
    """One random instance at oracle-friendly sizes for ``family``."""
    if family == "chain":
        return random_chain(rng, int(rng.integers(2, (max_n or 6) + 1)),
                            int(rng.integers(2, (max_k or 3) + 1)))
    if family == "undirected_chain":
        return random_undirected(rng, int(rng.integers(2, (max_n or 6) + 1)),
                                 int(rng.integers(2, (max_k or 4) + 1)))
    if family == "tree":
        return random_tree(rng, int(rng.integers(2, (max_n or 7) + 1)),
                           int(rng.integers(2, (max_k or 3) + 1)))
    if family == "mmp":
        k = max_k or 2
        return random_mmp(rng, int(rng.integers(2, (max_n or 5) + 1)), k, k)
    raise SpecError(f"unknown family {family!r}; choose from {FAMILIES}")


def binary_symmetric_chain(n: int, theta: float, p0=(0.5, 0.5)) -> ChainSpec:
    """Two-state chain that flips with probability ``(1 - theta) / 2``.

    Its contraction coefficient is ``theta`` at every step.
    """
    if not (0.0 <= theta <= 1.0):
        raise SpecError(f"theta must lie in [0, 1], got {theta!r}")
    stay = (1.0 + theta) / 2.0
    K = np.array([[stay, 1 - stay], [1 - stay, stay]])
    return ChainSpec.homogeneous(Alphabet.of_size(2), np.asarray(p0, float), K, n)


def product_chain(n: int, p) -> ChainSpec:
    """I.i.d. coordinates with law ``p``, written as a chain with rank-one kernels."""
    p = np.asarray(p, dtype=float)
    K = np.tile(p[:, None], (1, p.size))
    return ChainSpec.homogeneous(Alphabet.of_size(p.size), p, K, n)


def copy_chain(n: int, k: int = 2) -> ChainSpec:
    """Uniform first symbol copied to every later site (theta = 1 everywhere)."""
    return ChainSpec.homogeneous(Alphabet.of_size(k), np.full(k, 1.0 / k), np.eye(k), n)


def path_tree(chain: ChainSpec) -> TreeSpec:
    """The chain viewed as a tree ``1 -> 2 -> ... -> n``."""
    edges = tuple((t, t + 1) for t in range(1, chain.n))
    return TreeSpec(TreeTopology(chain.n, edges), chain.alphabet, chain.p0,
                    {e: K for e, K in zip(edges, chain.kernels)})


def trivial_hidden(chain: ChainSpec) -> MmpSpec:
    """Markov marginal process with a one-symbol hidden alphabet."""
    return MmpSpec(chain.alphabet, Alphabet.of_size(1), chain.p0, chain.kernels)
