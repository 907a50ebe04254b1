"""Dispatch helpers over the four process families."""

from __future__ import annotations

from typing import Union

import numpy as np

from .chain import ChainSpec, chain_eta_bound, chain_marginals, chain_theta
from .core import Alphabet
from .mmp import MmpSpec, mmp_eta_bound, mmp_marginals, mmp_theta
from .tree import TreeSpec, tree_eta_bound_levels, tree_marginals, tree_theta
from .undirected import UndirectedChainSpec, derive_kernels

ProcessSpec = Union[ChainSpec, UndirectedChainSpec, TreeSpec, MmpSpec]

TYPE_TAGS = {ChainSpec: "chain", UndirectedChainSpec: "undirected_chain",
             TreeSpec: "tree", MmpSpec: "mmp"}


def type_tag(spec: ProcessSpec) -> str:
    return TYPE_TAGS[type(spec)]


def observed_alphabet(spec: ProcessSpec) -> Alphabet:
    return spec.obs_alphabet if isinstance(spec, MmpSpec) else spec.alphabet


def local_thetas(spec: ProcessSpec) -> list[float]:
    """Contraction coefficients in position order (per edge, for trees)."""
    if isinstance(spec, ChainSpec):
        return [chain_theta(spec, i) for i in range(1, spec.n)]
    if isinstance(spec, UndirectedChainSpec):
        d = derive_kernels(spec)
        return [chain_theta(d, i) for i in range(1, d.n)]
    if isinstance(spec, TreeSpec):
        return [tree_theta(spec, u, v) for u, v in spec.topology.edges]
    return [mmp_theta(spec, i) for i in range(1, spec.n)]


def eta_bound(spec: ProcessSpec, i: int, j: int) -> float:
    """The family's eta upper bound (the level-product bound for trees)."""
    if isinstance(spec, ChainSpec):
        return chain_eta_bound(spec, i, j)
    if isinstance(spec, UndirectedChainSpec):
        return chain_eta_bound(derive_kernels(spec), i, j)
    if isinstance(spec, TreeSpec):
        return tree_eta_bound_levels(spec, i, j)
    return mmp_eta_bound(spec, i, j)


def marginals(spec: ProcessSpec) -> np.ndarray:
    """Single-site laws of the (observed) process, one row per position."""
    if isinstance(spec, ChainSpec):
        return chain_marginals(spec)
    if isinstance(spec, UndirectedChainSpec):
        return chain_marginals(derive_kernels(spec))
    if isinstance(spec, TreeSpec):
        return tree_marginals(spec)
    return mmp_marginals(spec)
