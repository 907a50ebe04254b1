"""Acceptance criteria, each at its stated tolerance and time budget.

Every criterion collects all of its failures rather than stopping at the
first, then records one PASS/FAIL line. The lines appear in pytest's
terminal summary, or on stdout when this file is run as a script.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from mixbound.chain import chain_eta_bound, chain_eta_exact
from mixbound.checks import (check_chain_exact, check_dominance, check_tree_hierarchy,
                             check_undirected)
from mixbound.cli import main
from mixbound.contraction import alpha, product_tv_bound
from mixbound.core import Alphabet, tv_norm
from mixbound.generators import (binary_symmetric_chain, path_tree, product_chain, random_chain,
                                 random_spec, trivial_hidden)
from mixbound.harness import SampleRun, verify_envelope
from mixbound.mixing import EtaMatrix, build_matrices, delta_inf_norm, gamma_2_norm
from mixbound.oracle import enumerate_joint, exact_eta_matrix
from mixbound.process import eta_bound
from mixbound.report import analyze, bound_matrix, dumps
from mixbound.tree import TreeSpec, TreeTopology, tree_eta_bound_levels, tree_eta_bound_simple

SEED = 20240611


def _pairs(n):
    return [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]


def _failed(results, label):
    return [f"{label}: {r.name} {r.counterexample}" for r in results if not r.passed]


def crit_chain():
    rng = np.random.default_rng(SEED + 1)
    errs = []
    for trial in range(200):
        c = random_spec("chain", rng)
        table = enumerate_joint(c)
        errs += _failed([check_dominance(c, table), check_chain_exact(c, table)],
                        f"chain {trial}")
    return errs, "200 chains, n<=6, |S|<=3"


def crit_binary():
    rng = np.random.default_rng(SEED + 2)
    errs = []
    for trial in range(100):
        c = random_chain(rng, int(rng.integers(2, 9)), 2)
        for i, j in _pairs(c.n):
            ex, bd = chain_eta_exact(c, i, j), chain_eta_bound(c, i, j)
            if abs(ex - bd) > 1e-12:
                errs.append(f"chain {trial} ({i},{j}): exact {ex!r} bound {bd!r}")
    return errs, "100 two-state chains, n<=8"


def crit_undirected():
    rng = np.random.default_rng(SEED + 3)
    errs = []
    for trial in range(200):
        u = random_spec("undirected_chain", rng)
        errs += _failed(check_undirected(u, enumerate_joint(u)), f"field {trial}")
    return errs, "200 potential chains, n<=6, |S|<=4"


HALF = np.array([[0.75, 0.25], [0.25, 0.75]])
BIN7 = ((1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7))


def crit_tree():
    rng = np.random.default_rng(SEED + 4)
    errs = []
    for trial in range(100):
        t = random_spec("tree", rng)
        errs += _failed([check_tree_hierarchy(t, enumerate_joint(t))], f"tree {trial}")
    for trial in range(100):
        c = random_spec("chain", rng)
        p = path_tree(c)
        tc, tp = enumerate_joint(c), enumerate_joint(p)
        if not np.array_equal(tc.probs, tp.probs):
            errs.append(f"path {trial}: joint tables differ")
        if not np.array_equal(exact_eta_matrix(tc).values, exact_eta_matrix(tp).values):
            errs.append(f"path {trial}: exact eta differs")
        if any(eta_bound(c, i, j) != eta_bound(p, i, j) for i, j in _pairs(c.n)):
            errs.append(f"path {trial}: eta bound differs")
    b = TreeSpec(TreeTopology(7, BIN7), Alphabet.of_size(2), [0.5, 0.5], {e: HALF for e in BIN7})
    if tree_eta_bound_levels(b, 1, 5) != 0.703125:
        errs.append(f"worked level bound {tree_eta_bound_levels(b, 1, 5)!r} != 0.703125")
    if tree_eta_bound_simple(b, 1, 5) != 0.9375:
        errs.append(f"worked simple bound {tree_eta_bound_simple(b, 1, 5)!r} != 0.9375")
    return errs, "100 trees n<=7 + 100 path trees + worked values"


def crit_mmp():
    rng = np.random.default_rng(SEED + 5)
    errs = []
    for trial in range(100):
        m = random_spec("mmp", rng)
        errs += _failed([check_dominance(m, enumerate_joint(m))], f"mmp {trial}")
    for trial in range(50):
        c = random_spec("chain", rng)
        h = trivial_hidden(c)
        tc, th = enumerate_joint(c), enumerate_joint(h)
        if not np.array_equal(tc.probs, th.probs):
            errs.append(f"reduction {trial}: joint tables differ")
        if not np.array_equal(exact_eta_matrix(tc).values, exact_eta_matrix(th).values):
            errs.append(f"reduction {trial}: exact eta differs")
        if any(eta_bound(c, i, j) != eta_bound(h, i, j) for i, j in _pairs(c.n)):
            errs.append(f"reduction {trial}: eta bound differs")
    return errs, "100 MMPs n<=5 + 50 one-hidden-symbol reductions"


def crit_alpha():
    rng = np.random.default_rng(SEED + 6)
    errs = []
    cases = 10_000
    for c in range(cases):
        k = int(rng.integers(1, 8))
        xs = list(rng.uniform(0, 1, k))
        if rng.random() < 0.2:
            xs[int(rng.integers(k))] = float(rng.choice([0.0, 1.0]))
        a = alpha(xs)
        perm = list(rng.permutation(xs))
        if alpha(perm) != a:
            errs.append(f"case {c} (a) permutation: {xs}")
        if not (0.0 <= a <= 1.0):
            errs.append(f"case {c} (b) range: {xs}")
        r = int(rng.integers(k))
        up = list(xs)
        up[r] = float(rng.uniform(xs[r], 1.0))
        if alpha(up) < a - 1e-15:
            errs.append(f"case {c} (b) monotone: {xs}")
        sub = [x for x in xs if rng.random() < 0.5]
        if alpha(sub) > a + 1e-15:
            errs.append(f"case {c} (c) subset: {sub} of {xs}")
        x = xs[0]
        if abs(alpha([x] * k) - (1 - (1 - x) ** k)) > 1e-14:
            errs.append(f"case {c} (d) equal arguments: {x}, k={k}")
        if alpha(xs + [1.0]) != 1.0:
            errs.append(f"case {c} (e) absorbing one: {xs}")
        if a > sum(xs) + 1e-15:
            errs.append(f"case {c} (f) subadditive: {xs}")
    for c in range(cases):
        k = int(rng.integers(2, 5))
        p, p2, q, q2 = rng.dirichlet(np.ones(k) * rng.choice([0.2, 1.0, 5.0]), size=4)
        lhs = tv_norm(np.outer(p, q) - np.outer(p2, q2))
        rhs = product_tv_bound(tv_norm(p - p2), tv_norm(q - q2))
        if lhs > rhs + 1e-12:
            errs.append(f"quadruple {c}: {lhs!r} > {rhs!r}")
    enumerated = 0
    for k, m in itertools.product((2, 3), (1, 2, 3)):
        for _ in range(100):
            ps, qs = rng.dirichlet(np.ones(k), size=m), rng.dirichlet(np.ones(k), size=m)
            P = Q = np.ones(1)
            for a_, b_ in zip(ps, qs):
                P, Q = np.kron(P, a_), np.kron(Q, b_)
            bound = alpha([tv_norm(a_ - b_) for a_, b_ in zip(ps, qs)])
            enumerated += 1
            if tv_norm(P - Q) > bound + 1e-12:
                errs.append(f"product k={k} m={m}: {tv_norm(P - Q)!r} > {bound!r}")
    return errs, f"{cases} alpha cases, {cases} quadruples, {enumerated} enumerated products"


def _gamma2_closed_form(b):
    tr = 2 + b * b
    return math.sqrt((tr + math.sqrt(tr * tr - 4)) / 2)


def crit_norms():
    rng = np.random.default_rng(SEED + 7)
    errs = []
    for c, b in enumerate(rng.uniform(0, 1, 1000)):
        g = gamma_2_norm(build_matrices(EtaMatrix(np.array([[0.0, b * b], [0.0, 0.0]]))))
        if abs(g.value - _gamma2_closed_form(b)) > 1e-8:
            errs.append(f"2x2 case {c}: {g.value!r} vs {_gamma2_closed_form(b)!r}")
        if g.value > g.gershgorin_upper:
            errs.append(f"2x2 case {c}: above Gershgorin")
    for c in range(1000):
        n = int(rng.integers(2, 12))
        g = gamma_2_norm(build_matrices(EtaMatrix(np.triu(rng.uniform(0, 1, (n, n)), 1))))
        if g.value > g.gershgorin_upper:
            errs.append(f"n={n} case {c}: {g.value!r} > {g.gershgorin_upper!r}")
    for L in range(1, 11):
        k = np.arange(L, 1001)
        bad = k[k // L < k / (2 * L - 1)]
        if bad.size:
            errs.append(f"floor bound fails for L={L} at k={bad[:5].tolist()}")
    return errs, "1000 closed-form cases, 1000 random Gershgorin cases, L<=10, L<=k<=1000"


def crit_monte_carlo():
    errs = []
    count = 100_000
    prod = product_chain(20, [0.3, 0.7])
    run = SampleRun(prod, SEED, count, "hamming/n", (0,) * 20)
    rep = verify_envelope(run, "mcdiarmid", np.linspace(0, 0.6, 40))
    if not rep.passed:
        errs.append(f"mcdiarmid violations at t = {rep.t[rep.violations].tolist()}")
    chain = binary_symmetric_chain(50, 0.7)
    dinf = delta_inf_norm(build_matrices(bound_matrix(chain)))
    run = SampleRun(chain, SEED + 1, count, "hamming/sqrt_n", (0,) * 50)
    rep2 = verify_envelope(run, "kontram", np.linspace(0, 3 * dinf, 40), delta_inf=dinf)
    if not rep2.passed:
        errs.append(f"kontram violations at t = {rep2.t[rep2.violations].tolist()}")
    return errs, (f"1e5 trajectories each; product n=20 max excess "
                  f"{float(np.max(rep.empirical - np.minimum(rep.bound, 1))):.3g}, "
                  f"theta=0.7 chain n=50 max excess "
                  f"{float(np.max(rep2.empirical - np.minimum(rep2.bound, 1))):.3g}")


BAD_SPEC = {"format_version": "1", "type": "chain", "alphabet": ["a", "b"], "p0": [0.5, 0.5],
            "kernels": [[[0.75, 0.25], [0.25, 0.75]], [[0.75, 0.25], [0.23, 0.75]]]}


def crit_cli(tmpdir, capture):
    errs = []
    bad = tmpdir / "bad.json"
    bad.write_text(json.dumps(BAD_SPEC))
    code, out, err = capture(["analyze", str(bad)])
    lines = err.strip().splitlines()
    if code != 4:
        errs.append(f"schema-invalid spec exited {code}, expected 4")
    if len(lines) != 1 or "where=kernels[1]" not in err or "column=b" not in err:
        errs.append(f"diagnostic does not name the kernel column: {err!r}")
    good = dict(BAD_SPEC, kernels=[{"kernel": BAD_SPEC["kernels"][0], "repeat": 3}])
    spec_path = tmpdir / "good.json"
    spec_path.write_text(json.dumps(good))
    out_path = tmpdir / "report.json"
    code, _, _ = capture(["analyze", str(spec_path), "--exact", "--format", "machine",
                          "--out", str(out_path)])
    text = out_path.read_text() if code == 0 else ""
    if code != 0 or dumps(json.loads(text)) != text:
        errs.append(f"report did not round-trip byte-stably (exit {code})")
    rng = np.random.default_rng(SEED + 9)
    for family in ("chain", "undirected_chain", "tree", "mmp"):
        rep = analyze(random_spec(family, rng), exact=True)
        s = dumps(rep)
        if dumps(json.loads(s)) != s:
            errs.append(f"{family} report did not round-trip")
    return errs, "exit code, diagnostic, CLI and library round trips"


CRITERIA = [
    (1, "chain dominance & exactness", crit_chain, 60),
    (2, "binary-chain tightness", crit_binary, 5),
    (3, "undirected bound", crit_undirected, 60),
    (4, "tree hierarchy", crit_tree, 120),
    (5, "MMP dominance", crit_mmp, 120),
    (6, "alpha and tensorization suites", crit_alpha, 10),
    (7, "norm machinery", crit_norms, 5),
    (8, "Monte Carlo envelope soundness", crit_monte_carlo, 120),
    (9, "CLI contract", crit_cli, None),
]


def run_criterion(num, title, fn, budget, *args):
    start = time.perf_counter()
    errs, detail = fn(*args)
    elapsed = time.perf_counter() - start
    if budget is not None and elapsed > budget:
        errs = errs + [f"runtime {elapsed:.1f} s exceeds {budget} s"]
    limit = f" <= {budget} s" if budget is not None else ""
    verdict = "PASS" if not errs else "FAIL"
    line = f"{verdict} criterion {num}: {title} ({detail}; {elapsed:.2f} s{limit})"
    return line, errs


@pytest.mark.parametrize("num, title, fn, budget", CRITERIA, ids=[str(c[0]) for c in CRITERIA])
def test_acceptance(num, title, fn, budget, acceptance_log, tmp_path, capsys):
    args = ()
    if fn is crit_cli:
        def capture(argv):
            code = main(argv)
            out, err = capsys.readouterr()
            return code, out, err
        args = (tmp_path, capture)
    line, errs = run_criterion(num, title, fn, budget, *args)
    acceptance_log[num] = line
    with capsys.disabled():
        print("\n" + line)
    assert not errs, "\n".join(errs[:20])


if __name__ == "__main__":
    import contextlib
    import io
    import sys
    import tempfile
    from pathlib import Path

    def capture(argv):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(argv)
        return code, out.getvalue(), err.getvalue()

    failed = 0
    with tempfile.TemporaryDirectory() as tmp:
        for num, title, fn, budget in CRITERIA:
            args = (Path(tmp), capture) if fn is crit_cli else ()
            line, errs = run_criterion(num, title, fn, budget, *args)
            print(line)
            for e in errs[:5]:
                print("    " + e)
            failed += bool(errs)
    sys.exit(1 if failed else 0)
