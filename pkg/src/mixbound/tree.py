"""Markov tree processes: topology bookkeeping, tree measures, and eta bounds.

Nodes are numbered ``1..n`` in breadth-first order (shallower nodes get
smaller numbers) with the root as node 1. Edges are ``(parent, child)``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .contraction import alpha, doeblin_coefficient
from .core import Alphabet, SpecError, as_probvec, check_kernel


@dataclass(frozen=True)
class LevelDecomposition:
    levels: tuple[tuple[int, ...], ...]
    depth_of: Mapping[int, int]
    is_breadth_first: bool
    #: old label -> new label, when the input needed canonical renumbering
    renumbering: Mapping[int, int] | None = None

    @property
    def width(self) -> int:
        return max(len(lv) for lv in self.levels)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


def _structure(n: int, edges: Sequence[tuple[int, int]]):
    """Validate a rooted directed tree on nodes 1..n; return (root, children, depth)."""
    if n < 1:
        raise SpecError(f"tree needs at least one node, got n={n}")
    parent: dict[int, int] = {}
    children: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for u, v in edges:
        for node in (u, v):
            if not (1 <= node <= n):
                raise SpecError(f"edge ({u}, {v}) references node outside 1..{n}")
        if u == v:
            raise SpecError(f"self-loop at node {u}")
        if v in parent:
            raise SpecError(f"node {v} has multiple parents ({parent[v]} and {u})")
        parent[v] = u
        children[u].append(v)
    roots = [v for v in range(1, n + 1) if v not in parent]
    if len(roots) != 1:
        # n - 1 edges with unique parents always leave exactly one root unless
        # there is a cycle; more roots means too few edges
        kind = "disconnected" if len(roots) > 1 else "cyclic"
        raise SpecError(f"not a tree: graph is {kind} (roots: {roots})")
    root = roots[0]
    depth = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in children[u]:
            depth[v] = depth[u] + 1
            queue.append(v)
    if len(depth) != n:
        missing = sorted(set(range(1, n + 1)) - set(depth))
        raise SpecError(f"not a tree: nodes {missing} unreachable from root {root} (cycle)")
    return root, children, depth


@dataclass(frozen=True)
class TreeTopology:
    n: int
    edges: tuple[tuple[int, int], ...]
    root: int = 1

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        root, _, depth = _structure(self.n, edges)
        if root != self.root:
            raise SpecError(f"root is node {root}, expected {self.root}")

    @property
    def parent(self) -> dict[int, int]:
        return {v: u for u, v in self.edges}

    @property
    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for u, v in self.edges:
            out[u].append(v)
        return out

    def subtree(self, u: int) -> set[int]:
        ch = self.children
        out = {u}
        stack = [u]
        while stack:
            for v in ch[stack.pop()]:
                out.add(v)
                stack.append(v)
        return out


def canonical_renumbering(n: int, edges: Sequence[tuple[int, int]]):
    """Breadth-first renumbering: levels in order, within a level by the new
    number of the parent, then by input edge order. Returns ``(edges, mapping)``
    with ``mapping[old] = new`` and the root mapped to 1."""
    root, children, _ = _structure(n, edges)
    mapping = {root: 1}
    queue = deque([root])
    nxt = 2
    while queue:
        u = queue.popleft()
        for v in children[u]:
            mapping[v] = nxt
            nxt += 1
            queue.append(v)
    new_edges = tuple(sorted((mapping[u], mapping[v]) for u, v in edges))
    return new_edges, mapping


def analyze_topology(t: TreeTopology | tuple[int, Sequence[tuple[int, int]]]) -> LevelDecomposition:
    """Levels, width and depth; flags (and supplies) a canonical renumbering
    when the numbering is not breadth-first."""
    if isinstance(t, TreeTopology):
        n, edges = t.n, t.edges
    else:
        n, edges = t
    root, _, depth = _structure(n, edges)
    bf = root == 1 and all(
        depth[u] <= depth[v] for u in range(1, n + 1) for v in range(u + 1, n + 1))
    renum = None
    if not bf:
        edges, renum = canonical_renumbering(n, edges)
        depth = {renum[v]: d for v, d in depth.items()}
    nlev = max(depth.values()) + 1
    levels = [[] for _ in range(nlev)]
    for v in sorted(depth):
        levels[depth[v]].append(v)
    return LevelDecomposition(tuple(tuple(lv) for lv in levels), dict(depth), bf, renum)


@dataclass(frozen=True)
class TreeSpec:
    topology: TreeTopology
    alphabet: Alphabet
    p0: np.ndarray
    edge_kernels: Mapping[tuple[int, int], np.ndarray]
    levels: LevelDecomposition = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = self.alphabet.size
        p0 = as_probvec(self.p0, name="p0")
        if p0.shape != (k,):
            raise SpecError(f"p0 has {p0.size} entries, alphabet has {k}")
        lev = analyze_topology(self.topology)
        if not lev.is_breadth_first:
            raise SpecError("tree numbering is not breadth-first; renumber with "
                            "canonical_renumbering first")
        kernels = {}
        for e in self.topology.edges:
            if e not in self.edge_kernels:
                raise SpecError(f"no kernel for edge {e}")
            K = check_kernel(self.edge_kernels[e], name=f"kernel{e}",
                             labels=self.alphabet.symbols)
            if K.shape != (k, k):
                raise SpecError(f"kernel{e} has shape {K.shape}, expected {(k, k)}")
            kernels[e] = K
        extra = set(self.edge_kernels) - set(kernels)
        if extra:
            raise SpecError(f"kernels given for non-edges {sorted(extra)}")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "edge_kernels", kernels)
        object.__setattr__(self, "levels", lev)

    @property
    def n(self) -> int:
        return self.topology.n


def tree_density(spec: TreeSpec, x: Sequence[int]) -> float:
    """``p0(x_1) * prod over edges p_uv(x_v | x_u)``."""
    if len(x) != spec.n:
        raise SpecError(f"configuration has length {len(x)}, tree has n={spec.n}")
    p = spec.p0[x[0]]
    for (u, v) in spec.topology.edges:
        p = p * spec.edge_kernels[(u, v)][x[v - 1], x[u - 1]]
    return float(p)


def tree_marginals(spec: TreeSpec) -> np.ndarray:
    """Row ``v - 1`` holds the law of ``X_v``."""
    out = np.empty((spec.n, spec.alphabet.size))
    out[0] = spec.p0
    for (u, v) in spec.topology.edges:  # sorted, parents precede children
        out[v - 1] = spec.edge_kernels[(u, v)] @ out[u - 1]
    return out


def tree_theta(spec: TreeSpec, u: int, v: int) -> float:
    if (u, v) not in spec.edge_kernels:
        raise SpecError(f"({u}, {v}) is not an edge")
    return doeblin_coefficient(spec.edge_kernels[(u, v)])


def _check_pair(n: int, i: int, j: int) -> None:
    if not (1 <= i < j <= n):
        raise SpecError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")


def j_zero(t: TreeTopology, i: int, j: int) -> int | None:
    """Smallest node ``>= j`` in the subtree rooted at ``i``, or None."""
    _check_pair(t.n, i, j)
    later = [v for v in t.subtree(i) if v >= j]
    return min(later) if later else None


def tree_eta_bound_levels(spec: TreeSpec, i: int, j: int) -> float:
    """Product over depths ``dep(i)+1 .. dep(j0)`` of ``alpha`` over the
    contraction coefficients of edges entering subtree nodes at that depth."""
    _check_pair(spec.n, i, j)
    j0 = j_zero(spec.topology, i, j)
    if j0 is None:
        return 0.0
    depth = spec.levels.depth_of
    sub = spec.topology.subtree(i)
    parent = spec.topology.parent
    out = 1.0
    for d in range(depth[i] + 1, depth[j0] + 1):
        thetas = [tree_theta(spec, parent[v], v) for v in spec.levels.levels[d] if v in sub]
        out *= alpha(thetas)
    return out


def max_theta(spec: TreeSpec) -> float:
    return max((tree_theta(spec, u, v) for u, v in spec.topology.edges), default=0.0)


def simple_tree_bound(theta: float, L: int, gap: int) -> float:
    """``(1 - (1 - theta)**L) ** floor(gap / L)``."""
    if not (0.0 <= theta < 1.0):
        raise SpecError(f"theta must lie in [0, 1), got {theta!r}")
    if L < 1:
        raise SpecError(f"L must be >= 1, got {L}")
    return (1.0 - (1.0 - theta) ** L) ** (gap // L)


def tree_eta_bound_simple(spec: TreeSpec, i: int, j: int, theta: float | None = None,
                          L: int | None = None) -> float:
    """Width/contraction bound; ``theta`` and ``L`` default to the largest edge
    coefficient and the tree width and may be replaced by looser constants."""
    _check_pair(spec.n, i, j)
    th = max_theta(spec) if theta is None else theta
    width = spec.levels.width if L is None else L
    if th < max_theta(spec) - 1e-15:
        raise SpecError(f"theta={th} is below the largest edge coefficient")
    if width < spec.levels.width:
        raise SpecError(f"L={width} is below the tree width {spec.levels.width}")
    return simple_tree_bound(th, width, j - i)


def theta_tilde(theta: float, L: int) -> float:
    """``(1 - (1 - theta)**L) ** (1 / (2L - 1))``."""
    if not (0.0 <= theta < 1.0):
        raise SpecError(f"theta must lie in [0, 1), got {theta!r}")
    if L < 1:
        raise SpecError(f"L must be >= 1, got {L}")
    return (1.0 - (1.0 - theta) ** L) ** (1.0 / (2 * L - 1))


def tree_delta_bound(theta: float, L: int) -> float:
    """Dimension-free bound ``L - 1 + 1 / (1 - theta_tilde)`` on the row sums of Delta."""
    return L - 1 + 1.0 / (1.0 - theta_tilde(theta, L))


def linear_growth_eta_bound(level_sizes: Sequence[int], level_thetas: Sequence[float],
                            c: float, beta: float, depth_i: int, gap: int) -> float:
    """Bound for trees whose levels grow at most linearly.

    ``level_sizes[d - 1]`` and ``level_thetas[d - 1]`` describe depth ``d >= 1``:
    the number of nodes there and the largest coefficient of an edge entering
    it. Requires ``size_d <= c*d`` and ``c*d*theta_d <= beta`` at every listed
    depth; returns ``beta ** (sqrt(2*gap/c) - depth_i - 1)`` clamped to 1.
    """
    if c <= 0:
        raise SpecError(f"c must be positive, got {c}")
    if len(level_sizes) != len(level_thetas):
        raise SpecError("level_sizes and level_thetas differ in length")
    for d, (size, th) in enumerate(zip(level_sizes, level_thetas), start=1):
        if size > c * d:
            raise SpecError(f"level {d} has {size} nodes > c*d = {c * d}")
        if c * d * th > beta + 1e-15:
            raise SpecError(f"level {d}: c*d*theta = {c * d * th} exceeds beta = {beta}")
    if beta < 0:
        raise SpecError(f"beta must be nonnegative, got {beta}")
    expo = math.sqrt(2.0 * gap / c) - depth_i - 1
    if expo <= 0 or beta >= 1:
        return 1.0
    return min(1.0, beta ** expo)


def tree_linear_growth_bound(spec: TreeSpec, i: int, j: int, c: float, beta: float) -> float:
    """:func:`linear_growth_eta_bound` with level data read off ``spec``."""
    _check_pair(spec.n, i, j)
    parent = spec.topology.parent
    levels = spec.levels.levels[1:]
    sizes = [len(lv) for lv in levels]
    thetas = [max(tree_theta(spec, parent[v], v) for v in lv) for lv in levels]
    return linear_growth_eta_bound(sizes, thetas, c, beta, spec.levels.depth_of[i], j - i)
