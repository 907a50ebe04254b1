"""Property checks behind ``mixbound verify``: oracle dominance and the
family-specific identities, on one spec or on a seeded random suite."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .chain import ChainSpec, chain_eta_exact, chain_theta
from .core import tv_norm
from .generators import random_spec
from .oracle import DEFAULT_CAP, JointTable, enumerate_joint, eta_witness
from .process import ProcessSpec, eta_bound, observed_alphabet
from .specio import spec_to_document
from .tree import TreeSpec, max_theta, tree_eta_bound_simple
from .undirected import UndirectedChainSpec, derive_kernels, undirected_theta_bound

BOUND_TOL = 1e-12
EXACT_TOL = 1e-10


@dataclass
class PropertyResult:
    name: str
    passed: bool = True
    checked: int = 0
    counterexample: dict[str, Any] | None = None

    def fail(self, info: dict[str, Any]) -> None:
        if self.passed:
            self.passed = False
            self.counterexample = info

    def merge(self, other: "PropertyResult", context: dict[str, Any]) -> None:
        self.checked += other.checked
        if not other.passed and self.passed:
            self.fail({**context, **(other.counterexample or {})})


def _pairs(n: int):
    return [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]


def check_dominance(spec: ProcessSpec, table: JointTable, *, negate_bound: bool = False
                    ) -> PropertyResult:
    """Oracle eta never exceeds the family bound (+1e-12)."""
    res = PropertyResult("eta_dominance")
    labels = observed_alphabet(spec)
    sign = -1.0 if negate_bound else 1.0
    for i, j in _pairs(spec.n):
        w = eta_witness(table, i, j)
        b = sign * eta_bound(spec, i, j)
        res.checked += 1
        if w.value > b + BOUND_TOL:
            res.fail({"i": i, "j": j, "exact": w.value, "bound": b,
                      "prefix": list(labels.decode(w.prefix or ())),
                      "w": None if w.w is None else labels.label(w.w),
                      "w_prime": None if w.w2 is None else labels.label(w.w2)})
    return res


def check_chain_exact(spec: ChainSpec, table: JointTable) -> PropertyResult:
    """Closed-form exact eta of a chain equals the oracle (1e-10)."""
    res = PropertyResult("chain_exact_matches_oracle")
    for i, j in _pairs(spec.n):
        got = chain_eta_exact(spec, i, j, support_only=True)
        want = eta_witness(table, i, j).value
        res.checked += 1
        if abs(got - want) > EXACT_TOL:
            res.fail({"i": i, "j": j, "closed_form": got, "oracle": want})
    return res


def check_tree_hierarchy(spec: TreeSpec, table: JointTable) -> PropertyResult:
    """oracle <= level-product bound <= width bound (each +1e-12)."""
    res = PropertyResult("tree_hierarchy")
    simple_ok = max_theta(spec) < 1.0
    for i, j in _pairs(spec.n):
        ex = eta_witness(table, i, j).value
        lev = eta_bound(spec, i, j)
        simple = tree_eta_bound_simple(spec, i, j) if simple_ok else 1.0
        res.checked += 1
        if not (ex <= lev + BOUND_TOL and lev <= simple + BOUND_TOL):
            res.fail({"i": i, "j": j, "exact": ex, "level_bound": lev, "simple_bound": simple})
    return res


def check_undirected(spec: UndirectedChainSpec, table: JointTable) -> list[PropertyResult]:
    """Derived kernels respect the potential-range bound and reproduce the field."""
    theta = PropertyResult("potential_theta_bound")
    d = derive_kernels(spec)
    for i in range(1, spec.n):
        th, bd = chain_theta(d, i), undirected_theta_bound(spec, i)
        theta.checked += 1
        if th > bd + BOUND_TOL:
            theta.fail({"i": i, "theta": th, "bound": bd})
    dens = PropertyResult("derived_density_matches_field", checked=1)
    derived = enumerate_joint(d, cap=table.probs.size)
    tv = tv_norm(derived.probs - table.probs)
    if tv > EXACT_TOL:
        dens.fail({"tv_distance": tv})
    return [theta, dens]


def property_suite(spec: ProcessSpec, *, cap: int = DEFAULT_CAP,
                   negate_bound: bool = False) -> list[PropertyResult]:
    """All oracle-backed checks that apply to ``spec``."""
    table = enumerate_joint(spec, cap)
    out = [check_dominance(spec, table, negate_bound=negate_bound)]
    if isinstance(spec, ChainSpec):
        out.append(check_chain_exact(spec, table))
    elif isinstance(spec, TreeSpec):
        out.append(check_tree_hierarchy(spec, table))
    elif isinstance(spec, UndirectedChainSpec):
        out += check_undirected(spec, table)
    return out


@dataclass
class SuiteResult:
    family: str
    trials: int
    seed: int
    properties: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)


def random_suite(family: str, trials: int, seed: int, *, negate_bound: bool = False,
                 cap: int = DEFAULT_CAP) -> SuiteResult:
    """Run :func:`property_suite` on ``trials`` seeded random specs of ``family``.

    Each failing property keeps its first counterexample together with the
    trial number and the offending spec document.
    """
    rng = np.random.default_rng(seed)
    merged: dict[str, PropertyResult] = {}
    for trial in range(trials):
        spec = random_spec(family, rng)
        for res in property_suite(spec, cap=cap, negate_bound=negate_bound):
            agg = merged.setdefault(res.name, PropertyResult(res.name))
            ctx = {"trial": trial, "spec": spec_to_document(spec)} if not res.passed else {}
            agg.merge(res, ctx)
    return SuiteResult(family, trials, seed, list(merged.values()))
