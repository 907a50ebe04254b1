"""Analysis reports and their byte-stable JSON encoding.

Floats are written with 17 significant digits, which round-trips every
double, and dict keys keep insertion order; re-encoding a parsed report
therefore reproduces it byte for byte.
"""

from __future__ import annotations

import json
import math
import time
from typing import Any, Sequence

import numpy as np

from .chain import ChainSpec
from .core import INTERNAL_TOL
from .mixing import (EtaMatrix, build_matrices, delta_inf_norm, envelope_table,
                     gamma_2_norm)
from .mmp import MmpSpec
from .oracle import DEFAULT_CAP, enumerate_joint, exact_eta_matrix
from .process import ProcessSpec, eta_bound, local_thetas, observed_alphabet, type_tag
from .tree import TreeSpec, max_theta, tree_delta_bound, tree_eta_bound_simple
from .undirected import UndirectedChainSpec, undirected_theta_bound

REPORT_VERSION = "1"
DEFAULT_T_GRID = tuple(np.round(np.arange(0, 21) * 0.25, 12))


class NumericValidationError(ArithmeticError):
    """A computed quantity violated an invariant the report must satisfy."""


def _rows(m: np.ndarray) -> list[list[float]]:
    """Strict upper triangle as rows: row ``i`` lists entries ``(i, i+1 .. n)``."""
    n = m.shape[0]
    return [[float(m[i, j]) for j in range(i + 1, n)] for i in range(n - 1)]


def bound_matrix(spec: ProcessSpec) -> EtaMatrix:
    return EtaMatrix.from_function(spec.n, lambda i, j: eta_bound(spec, i, j))


def _norms(eta: EtaMatrix) -> dict:
    m = build_matrices(eta)
    g = gamma_2_norm(m)
    return {"delta_inf": delta_inf_norm(m), "gamma_2": g.value,
            "gamma_2_gershgorin_upper": g.gershgorin_upper, "gamma_2_converged": g.converged}


def envelope_inputs(spec: ProcessSpec, thetas: Sequence[float], norms: dict) -> dict:
    """Envelope parameters, each present only when its hypotheses apply."""
    inputs: dict[str, Any] = {"n": spec.n}
    product = all(th <= INTERNAL_TOL for th in thetas)
    is_chain = isinstance(spec, (ChainSpec, UndirectedChainSpec)) or (
        isinstance(spec, TreeSpec) and spec.levels.width == 1)
    which = ["mcdiarmid"] if product else []
    th_max = max(thetas, default=0.0)
    if is_chain and th_max < 1.0:
        inputs["theta"] = th_max
        which.append("marton")
    if observed_alphabet(spec).size == 2:
        which.append("samson")
    which.append("kontram")
    inputs["gamma_2"] = norms["gamma_2"]
    inputs["delta_inf"] = norms["delta_inf"]
    inputs["which"] = which
    return inputs


def _envelopes(t_grid: Sequence[float], inputs: dict) -> dict:
    tab = envelope_table(t_grid, n=inputs["n"], theta=inputs.get("theta"),
                         gamma2=inputs["gamma_2"], delta_inf=inputs["delta_inf"],
                         which=inputs["which"])
    return {"t": [float(x) for x in tab.t],
            "values": {k: [float(x) for x in v] for k, v in tab.raw.items()},
            "vacuous": {k: [bool(x) for x in tab.vacuous(k)] for k in tab.raw}}


def analyze(spec: ProcessSpec, *, exact: bool = False, cap: int = DEFAULT_CAP,
            t_grid: Sequence[float] | None = None, spec_sha256: str | None = None,
            renumbering: dict[int, int] | None = None, threads: int | None = None) -> dict:
    """Full report for ``spec``: coefficients, eta bounds, norms and envelopes.

    With ``exact`` the oracle's coefficients are added (subject to ``cap``)
    and checked against the bounds; a violation raises
    :class:`NumericValidationError`.
    """
    start = time.perf_counter()
    n = spec.n
    thetas = local_thetas(spec)
    bounds = bound_matrix(spec)
    norms = _norms(bounds)

    rep: dict[str, Any] = {"report_version": REPORT_VERSION, "type": type_tag(spec),
                           "spec_sha256": spec_sha256, "n": n,
                           "alphabet": list(observed_alphabet(spec).symbols)}
    if renumbering is not None:
        rep["renumbering"] = {str(k): v for k, v in sorted(renumbering.items())}
    rep["theta"] = [float(x) for x in thetas]
    if isinstance(spec, UndirectedChainSpec):
        rep["theta_potential_bound"] = [undirected_theta_bound(spec, i) for i in range(1, n)]
    if isinstance(spec, TreeSpec):
        rep["tree"] = _tree_section(spec)
    if isinstance(spec, MmpSpec):
        rep["hidden_alphabet"] = list(spec.hid_alphabet.symbols)
    rep["eta_bound"] = _rows(bounds.values)
    rep["norms"] = norms

    if exact:
        table = enumerate_joint(spec, cap)
        ex = exact_eta_matrix(table, threads=threads)
        gap = ex.values - bounds.values
        if gap.max(initial=0.0) > 1e-12:
            i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
            raise NumericValidationError(
                f"exact eta[{i + 1},{j + 1}] = {float(ex.values[i, j])!r} exceeds its bound "
                f"{float(bounds.values[i, j])!r}")
        rep["eta_exact"] = _rows(ex.values)
        rep["norms_exact"] = _norms(ex)

    inputs = envelope_inputs(spec, thetas, norms)
    rep["envelope_inputs"] = {k: v for k, v in inputs.items()}
    rep["envelopes"] = _envelopes(DEFAULT_T_GRID if t_grid is None else t_grid, inputs)
    rep["timing"] = {"elapsed_seconds": time.perf_counter() - start}
    return rep


def _tree_section(spec: TreeSpec) -> dict:
    lev = spec.levels
    th = max_theta(spec)
    out: dict[str, Any] = {"edges": [[u, v] for u, v in spec.topology.edges],
                           "levels": [list(lv) for lv in lev.levels],
                           "width": lev.width, "depth": lev.depth, "theta_max": th}
    if th < 1.0 and spec.n > 1:
        simple = EtaMatrix.from_function(spec.n, lambda i, j: tree_eta_bound_simple(spec, i, j))
        out["eta_bound_simple"] = _rows(simple.values)
        out["delta_inf_dimension_free"] = tree_delta_bound(th, lev.width)
    return out


# -- encoding ---------------------------------------------------------------

def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise NumericValidationError(f"non-finite value {x!r} cannot be reported")
    s = "%.17g" % x
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _scalar(x) -> str | None:
    if x is None or isinstance(x, (bool, np.bool_)):
        return json.dumps(None if x is None else bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_float(float(x))
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    return None


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text; lists of scalars stay on one line."""

    def enc(o, level: int) -> str:
        s = _scalar(o)
        if s is not None:
            return s
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{_scalar(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            o = list(o)
            if not o:
                return "[]"
            flat = [_scalar(v) for v in o]
            if all(v is not None for v in flat):
                return "[" + ", ".join(flat) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot encode {type(o).__name__}")

    return enc(obj, 0) + "\n"


def render_text(rep: dict) -> str:
    """Human-readable summary of a report."""
    lines = [f"type: {rep['type']}   n = {rep['n']}   alphabet = {rep['alphabet']}"]
    if rep.get("spec_sha256"):
        lines.append(f"spec sha256: {rep['spec_sha256']}")
    if "renumbering" in rep:
        lines.append("renumbered breadth-first (old -> new): " +
                     ", ".join(f"{k}->{v}" for k, v in rep["renumbering"].items()))
    lines.append("theta: " + " ".join(f"{x:.6g}" for x in rep["theta"]))
    if "theta_potential_bound" in rep:
        lines.append("theta bound from potentials: " +
                     " ".join(f"{x:.6g}" for x in rep["theta_potential_bound"]))
    if "tree" in rep:
        tr = rep["tree"]
        lines.append(f"tree: width {tr['width']}, depth {tr['depth']}, levels {tr['levels']}")
        if "delta_inf_dimension_free" in tr:
            lines.append(f"dimension-free row-sum bound: {tr['delta_inf_dimension_free']:.6g}")
    lines.append("eta bound (row i lists j = i+1..n):")
    lines += [f"  {i + 1:3d}: " + " ".join(f"{x:.6f}" for x in row)
              for i, row in enumerate(rep["eta_bound"])]
    if "eta_exact" in rep:
        lines.append("eta exact:")
        lines += [f"  {i + 1:3d}: " + " ".join(f"{x:.6f}" for x in row)
                  for i, row in enumerate(rep["eta_exact"])]
    nm = rep["norms"]
    lines.append(f"||Delta||_inf = {nm['delta_inf']:.10g}   ||Gamma||_2 = {nm['gamma_2']:.10g}"
                 f"   (Gershgorin <= {nm['gamma_2_gershgorin_upper']:.10g})")
    if "norms_exact" in rep:
        ne = rep["norms_exact"]
        lines.append(f"exact: ||Delta||_inf = {ne['delta_inf']:.10g}   "
                     f"||Gamma||_2 = {ne['gamma_2']:.10g}")
    lines.append(render_envelopes(rep["envelopes"]))
    return "\n".join(lines) + "\n"


def render_envelopes(env: dict) -> str:
    """Aligned table of capped envelope values; ``(vacuous)`` marks raw values >= 1."""
    names = list(env["values"])
    width = 20
    head = f"{'t':>10}" + "".join(f"{nm:>{width}}" for nm in names)
    rows = [head]
    for r, t in enumerate(env["t"]):
        cells = []
        for nm in names:
            v = env["values"][nm][r]
            cells.append("1 (vacuous)" if env["vacuous"][nm][r] else f"{v:.10g}")
        rows.append(f"{t:>10.6g}" + "".join(f"{c:>{width}}" for c in cells))
    return "\n".join(rows)
