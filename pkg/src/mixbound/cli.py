"""Command-line interface: ``mixbound {analyze,verify,envelope,sample}``.

Exit codes:
  0  success
  1  a verified property failed
  2  schema, usage or grid error
  3  exact enumeration would exceed ``--max-exact-states``
  4  numeric validation failure (e.g. a kernel column not summing to 1)

Errors are reported as a single ``key=value`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import CapExceededError, SpecError, StochasticityError
from .checks import property_suite, random_suite
from .generators import FAMILIES
from .harness import SampleRun, sample, verify_envelope
from .mixing import ENVELOPES, build_matrices, delta_inf_norm, envelope_table, gamma_2_norm
from .oracle import DEFAULT_CAP
from .process import local_thetas, observed_alphabet
from .report import (analyze, bound_matrix, dumps, envelope_inputs, render_envelopes,
                     render_text)
from .specio import load_spec

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_CAP, EXIT_NUMERIC = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, **fields: Any):
        super().__init__(message)
        self.code, self.kind, self.fields = code, kind, fields


def diagnostic(code: int, kind: str, message: str, **fields: Any) -> str:
    """``mixbound: error code=.. kind=.. [field=..] message="..."`` on one line."""
    parts = [f"code={code}", f"kind={kind}"]
    parts += [f"{k}={json.dumps(v) if isinstance(v, str) and ' ' in v else v}"
              for k, v in fields.items() if v is not None]
    parts.append("message=" + json.dumps(message))
    return "mixbound: error " + " ".join(parts)


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included when it lies on the grid."""
    try:
        a, b, c = (float(x) for x in text.split(":"))
    except ValueError:
        raise CliError(EXIT_SCHEMA, "grid", f"malformed grid {text!r}; expected start:stop:step")
    if not all(math.isfinite(x) for x in (a, b, c)) or c <= 0 or b < a or a < 0:
        raise CliError(EXIT_SCHEMA, "grid",
                       f"bad grid {text!r}: need 0 <= start <= stop and step > 0")
    count = int(math.floor((b - a) / c + 1e-9)) + 1
    if count > 1_000_000:
        raise CliError(EXIT_SCHEMA, "grid", f"grid {text!r} has {count} points")
    return [round(a + r * c, 12) for r in range(count)]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_SCHEMA, "usage", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mixbound", description="Eta-mixing bounds and concentration envelopes "
                "for Markov chains, chain fields, Markov trees and Markov marginal processes.",
                epilog="exit codes: 0 ok, 1 property failed, 2 schema/usage/grid error, "
                       "3 enumeration cap exceeded, 4 numeric validation failure")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, spec_required=True):
        if spec_required:
            sp.add_argument("spec", help="JSON spec file")
        else:
            sp.add_argument("spec", nargs="?", help="JSON spec file")
        sp.add_argument("--out", help="write the output here instead of stdout")
        sp.add_argument("--format", choices=("text", "machine"), default="text")

    a = sub.add_parser("analyze", help="thetas, eta bounds, norms and envelopes")
    common(a)
    a.add_argument("--exact", action="store_true", help="add oracle eta values")
    a.add_argument("--max-exact-states", type=int, default=DEFAULT_CAP)
    a.add_argument("--t-grid", default=None)

    v = sub.add_parser("verify", help="check bounds against the oracle and by sampling")
    common(v, spec_required=False)
    v.add_argument("--random", choices=FAMILIES, help="run a seeded random suite instead")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=20_000,
                   help="Monte Carlo trajectories for the envelope check (0 skips it)")
    v.add_argument("--max-exact-states", type=int, default=DEFAULT_CAP)
    v.add_argument("--t-grid", default=None)
    v.add_argument("--negate-bound", action="store_true", help=argparse.SUPPRESS)

    e = sub.add_parser("envelope", help="tabulate concentration envelopes")
    common(e, spec_required=False)
    e.add_argument("--t-grid", default="0:2:0.25")
    e.add_argument("--which", default=None,
                   help=f"comma-separated subset of {','.join(ENVELOPES)}")
    e.add_argument("--n", type=int)
    e.add_argument("--theta", type=float)
    e.add_argument("--delta-inf", type=float)
    e.add_argument("--gamma2", type=float)

    s = sub.add_parser("sample", help="draw seeded trajectories")
    common(s)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        return load_spec(path)
    except OSError as exc:
        raise CliError(EXIT_SCHEMA, "io", f"cannot read {path}: {exc.strerror}")


def cmd_analyze(args) -> int:
    spec, renum, sha = _load(args.spec)
    grid = parse_grid(args.t_grid) if args.t_grid else None
    rep = analyze(spec, exact=args.exact, cap=args.max_exact_states, t_grid=grid,
                  spec_sha256=sha, renumbering=renum)
    _emit(dumps(rep) if args.format == "machine" else render_text(rep), args.out)
    return EXIT_OK


def _property_lines(props) -> list[str]:
    lines = []
    for pr in props:
        lines.append(f"{'PASS' if pr.passed else 'FAIL'} {pr.name} ({pr.checked} checks)")
        if not pr.passed:
            lines.append("  counterexample: " + json.dumps(pr.counterexample, sort_keys=False))
    return lines


def cmd_verify(args) -> int:
    if args.random:
        if args.spec:
            raise CliError(EXIT_SCHEMA, "usage", "give either a spec file or --random, not both")
        if args.trials < 1:
            raise CliError(EXIT_SCHEMA, "usage", "--trials must be >= 1")
        res = random_suite(args.random, args.trials, args.seed, negate_bound=args.negate_bound,
                           cap=args.max_exact_states)
        props, header = res.properties, f"random {res.family} suite: trials={res.trials} " \
                                         f"seed={res.seed}"
        envelope = None
    else:
        if not args.spec:
            raise CliError(EXIT_SCHEMA, "usage", "verify needs a spec file or --random FAMILY")
        spec, _, sha = _load(args.spec)
        props = property_suite(spec, cap=args.max_exact_states, negate_bound=args.negate_bound)
        header = f"spec {args.spec} (sha256 {sha[:12]})"
        envelope = _envelope_check(spec, args) if args.samples > 0 else None
    passed = all(p.passed for p in props) and (envelope is None or envelope["passed"])
    if args.format == "machine":
        doc = {"passed": passed,
               "properties": [{"name": p.name, "passed": p.passed, "checked": p.checked,
                               "counterexample": p.counterexample} for p in props]}
        if envelope is not None:
            doc["envelope"] = envelope
        _emit(dumps(doc), args.out)
    else:
        lines = [header] + _property_lines(props)
        if envelope is not None:
            verdict = "PASS" if envelope["passed"] else "FAIL"
            lines.append(f"{verdict} envelope_kontram ({envelope['count']} trajectories, "
                         f"{len(envelope['t'])} grid points)")
            if not envelope["passed"]:
                lines.append("  violations at t = " + ", ".join(
                    f"{envelope['t'][r]:.6g}" for r in envelope["violations"]))
        lines.append("PASS" if passed else "FAIL")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if passed else EXIT_FAIL


def _envelope_check(spec, args) -> dict:
    """Sample ``f = Hamming distance to the all-first-symbol word / sqrt(n)``
    and compare its tails with the bound-based ||Delta||_inf envelope."""
    dinf = delta_inf_norm(build_matrices(bound_matrix(spec)))
    grid = parse_grid(args.t_grid) if args.t_grid else list(np.linspace(0, 3 * dinf, 16))
    run = SampleRun(spec, args.seed, args.samples, "hamming/sqrt_n", (0,) * spec.n)
    rep = verify_envelope(run, "kontram", grid, delta_inf=dinf)
    return {"passed": rep.passed, "count": rep.count, "delta_inf": dinf,
            "t": [float(x) for x in rep.t], "empirical": [float(x) for x in rep.empirical],
            "bound": [float(x) for x in rep.bound], "violations": rep.violations}


def cmd_envelope(args) -> int:
    grid = parse_grid(args.t_grid)
    params: dict[str, Any] = {"n": args.n, "theta": args.theta,
                              "delta_inf": args.delta_inf, "gamma2": args.gamma2}
    applicable = None
    if args.spec:
        spec, _, _ = _load(args.spec)
        m = build_matrices(bound_matrix(spec))
        norms = {"delta_inf": delta_inf_norm(m), "gamma_2": gamma_2_norm(m).value}
        inputs = envelope_inputs(spec, local_thetas(spec), norms)
        applicable = inputs["which"]
        derived = {"n": spec.n, "theta": inputs.get("theta"), "delta_inf": norms["delta_inf"],
                   "gamma2": norms["gamma_2"]}
        params = {k: (v if v is not None else derived[k]) for k, v in params.items()}
    if args.which:
        which = [w.strip() for w in args.which.split(",") if w.strip()]
    elif applicable is not None:
        which = applicable
    else:
        which = [w for w, need in (("mcdiarmid", ("n",)), ("marton", ("n", "theta")),
                                   ("samson", ("gamma2",)), ("kontram", ("delta_inf",)))
                 if all(params[x] is not None for x in need)]
        if not which:
            raise CliError(EXIT_SCHEMA, "usage", "no envelope has its inputs; give a spec "
                           "or --n/--theta/--delta-inf/--gamma2")
    tab = envelope_table(grid, which=which, **params)
    env = {"t": [float(x) for x in tab.t],
           "values": {k: [float(x) for x in v] for k, v in tab.raw.items()},
           "vacuous": {k: [bool(x) for x in tab.vacuous(k)] for k in tab.raw}}
    if args.format == "machine":
        doc = {"inputs": {k: v for k, v in params.items() if v is not None}, "envelopes": env}
        _emit(dumps(doc), args.out)
    else:
        _emit(render_envelopes(env) + "\n", args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    spec, _, _ = _load(args.spec)
    if args.count < 1:
        raise CliError(EXIT_SCHEMA, "usage", "--count must be >= 1")
    A = observed_alphabet(spec)
    x = sample(spec, args.seed, args.count)
    rows = [list(A.decode(r)) for r in x]
    if args.format == "machine":
        _emit(dumps({"seed": args.seed, "count": args.count, "trajectories": rows}), args.out)
    else:
        _emit("".join(" ".join(str(s) for s in r) + "\n" for r in rows), args.out)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "verify": cmd_verify, "envelope": cmd_envelope,
            "sample": cmd_sample}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CliError as exc:
        err = (exc.code, exc.kind, str(exc), exc.fields)
    except StochasticityError as exc:
        err = (EXIT_NUMERIC, "stochasticity", str(exc), {"where": exc.where, "column": exc.column})
    except SpecError as exc:
        err = (EXIT_SCHEMA, "schema", str(exc), {})
    except CapExceededError as exc:
        err = (EXIT_CAP, "cap", str(exc), {})
    except ArithmeticError as exc:
        err = (EXIT_NUMERIC, "numeric", str(exc), {})
    code, kind, msg, fields = err
    print(diagnostic(code, kind, msg, **fields), file=sys.stderr)
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
