"""Command-line entry point: ``netdistancing <subcommand> --input NET [options]``.

Exit codes: 0 success (empty findings included), 1 input error,
2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import converged_certificate, random_interior, replicator_descent
from .equilibrium import (
    DEFAULT_TOL,
    StrategyError,
    SupportConditionError,
    as_strategy,
    construct_equilibrium,
    enumerate_nash,
    support_of,
    verify_nash,
)
from .network import Network, NetworkError, complement, load_network, save_network
from .search import (
    RegularSupport,
    check_support_conditions,
    enumerate_maximal_independent_sets,
    enumerate_r_regular_supports,
    find_maximal_r_regular,
)
from .stability import ClassificationMismatch, NotNashError, classify, structural_applies

ORACLE_MAX_N = 14
MATCH_TOL = 1e-9


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (exit code 2)."""


class InputError(ValueError):
    """Bad command-line input (exit code 1)."""


def rational(v: float, max_den: int = 10**6, tol: float = 1e-12) -> str | None:
    """``"p/q"`` when ``v`` is within ``tol`` of a small-denominator rational."""
    f = Fraction(v).limit_denominator(max_den)
    if abs(float(f) - v) > tol:
        return None
    return str(f)


# -- analysis ---------------------------------------------------------------


@dataclass
class AnalysisReport:
    network: dict
    runs: list[dict] = field(default_factory=list)
    oracle: dict | None = None
    options: dict = field(default_factory=dict)

    def equilibria(self) -> list[dict]:
        out = [e for run in self.runs for e in run["equilibria"]]
        return sorted(
            out, key=lambda e: (round(e["lambda"], 12), e["support"]["r"], e["support"]["nodes"])
        )

    def to_dict(self) -> dict:
        table = [
            {
                "r": e["support"]["r"],
                "nodes": e["support"]["nodes"],
                "lambda": e["lambda"],
                "lambda_rational": e["lambda_rational"],
                "class": e["stability"]["class"],
                "best": e["best"],
            }
            for e in self.equilibria()
        ]
        return {
            "network": self.network,
            "options": self.options,
            "runs": self.runs,
            "summary": table,
            "oracle": self.oracle,
        }


def _candidate_supports(net: Network, r: int, exact: bool, seed: int) -> list[RegularSupport]:
    if not exact:
        found = find_maximal_r_regular(net, r, seed=seed)
        return [] if found is None else [found]
    if r == 0:
        mis = enumerate_maximal_independent_sets(net)
        if mis.truncated:
            raise InputError("too many maximal independent sets for --exact")
        return [check_support_conditions(net, s, 0) for s in mis.sets]
    try:
        return enumerate_r_regular_supports(net, r)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _analyze_support(net: Network, support: RegularSupport, tol: float) -> tuple[dict | None, dict | None]:
    """Return ``(equilibrium, None)`` or ``(None, rejection)`` for one support."""
    sd = support.to_dict()
    try:
        built = construct_equilibrium(support, net)
    except SupportConditionError as exc:
        return None, {"support": sd, "reason": str(exc)}
    cert = verify_nash(built.x, net, tol=tol)
    if not cert.is_nash:
        return None, {
            "support": sd,
            "reason": "constructed strategy fails verification",
            "certificate": cert.to_dict(),
        }
    if abs(cert.lambda_star - built.lambda_star) > tol:
        raise InvariantViolation(
            f"support {list(support.nodes)}: formula lambda {built.lambda_star} "
            f"!= pi(x, x) {cert.lambda_star}"
        )
    method = "both" if structural_applies(net, support) else "spectral"
    report = classify(net, cert.x, support, method=method)
    eq = {
        "support": sd,
        "x": [float(v) for v in cert.x],
        "lambda": cert.lambda_star,
        "lambda_rational": rational(cert.lambda_star),
        "eq_residual": cert.eq_residual,
        "ineq_slack": cert.to_dict()["ineq_slack"],
        "sufficient": built.sufficient,
        "stability": report.to_dict(),
        "best": False,
    }
    return eq, None


def analyze(
    net: Network,
    rs: list[int],
    exact: bool = False,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    max_n: int = ORACLE_MAX_N,
) -> AnalysisReport:
    """Search supports for each ``r``, build, verify and classify their equilibria.

    With ``exact`` every maximal r-regular support is enumerated and, when
    ``n <= max_n``, each equilibrium is matched against :func:`enumerate_nash`.
    """
    bad = [r for r in rs if r < 0 or r >= net.n]
    if bad:
        raise InputError(f"infeasible r {bad}: need 0 <= r < n = {net.n}")
    report = AnalysisReport(
        network={"n": net.n, "edges": len(net.edges), "scheme": net.scheme, "diag": net.diag},
        options={"r": list(rs), "exact": exact, "tol": tol, "seed": seed},
    )
    for r in rs:
        run = {"r": r, "equilibria": [], "rejected": []}
        for support in _candidate_supports(net, r, exact, seed):
            eq, rej = _analyze_support(net, support, tol)
            if eq is not None:
                run["equilibria"].append(eq)
            else:
                run["rejected"].append(rej)
        report.runs.append(run)

    found = report.equilibria()
    if found:
        best = found[0]["lambda"]
        for e in found:
            e["best"] = bool(e["lambda"] <= best + tol)

    if exact and net.n <= max_n:
        oracle = enumerate_nash(net, tol=tol, max_n=max_n)
        xs = np.stack([c.x for c in oracle]) if len(oracle) else np.zeros((0, net.n))
        for e in found:
            if not xs.size or np.abs(xs - np.asarray(e["x"])).max(axis=1).min() > MATCH_TOL:
                raise InvariantViolation(
                    f"equilibrium on {e['support']['nodes']} missing from the exact enumeration"
                )
        lams = sorted({round(c.lambda_star, 12) for c in oracle})
        report.oracle = {
            "count": len(oracle),
            "supports_checked": oracle.supports_checked,
            "rank_deficient": oracle.rank_deficient,
            "inconsistent": oracle.inconsistent,
            "matched": len(found),
            "lambda_min": lams[0] if lams else None,
        }
    elif exact:
        report.oracle = {"skipped": f"n = {net.n} > {max_n}"}
    return report


# -- output -----------------------------------------------------------------


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and len(v) > 12:
        return "[" + ", ".join(_fmt(u) for u in v[:12]) + ", ...]"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(u) for u in v) + "]"
    return str(v)


def _text_report(d: dict) -> str:
    net = d["network"]
    lines = [f"network: n={net['n']} edges={net['edges']} scheme={net['scheme']} diag={net['diag']:g}"]
    for run in d["runs"]:
        if not run["equilibria"] and not run["rejected"]:
            lines.append(f"no supports found for r={run['r']}")
            continue
        lines.append(
            f"r={run['r']}: {len(run['equilibria'])} equilibria, {len(run['rejected'])} rejected"
        )
        for rej in run["rejected"]:
            lines.append(f"  rejected {rej['support']['nodes']}: {rej['reason']}")
    if d["summary"]:
        lines.append("")
        lines.append(f"{'r':>3}  {'lambda':>10}  {'exact':>8}  {'class':<15} {'best':<5} support")
        for row in d["summary"]:
            lines.append(
                f"{row['r']:>3}  {row['lambda']:>10.6f}  {row['lambda_rational'] or '-':>8}  "
                f"{row['class']:<15} {'*' if row['best'] else '':<5} {row['nodes']}"
            )
    if d["oracle"] is not None:
        lines.append("")
        lines.append("oracle: " + ", ".join(f"{k}={v}" for k, v in sorted(d["oracle"].items())))
    return "\n".join(lines) + "\n"


def _text_generic(d, indent: str = "") -> str:
    lines = []
    for key in sorted(d):
        v = d[key]
        if isinstance(v, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_text_generic(v, indent + "  ").rstrip("\n"))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{indent}{key}: {len(v)}")
            for item in v:
                lines.append(_text_generic(item, indent + "  - ").rstrip("\n"))
        else:
            lines.append(f"{indent}{key}: {_fmt(v)}")
    return "\n".join(lines) + "\n"


def emit_report(report: AnalysisReport | dict, fmt: str = "json") -> str:
    """Serialize an analysis report (or any result dict) as JSON or text."""
    d = report.to_dict() if isinstance(report, AnalysisReport) else report
    if fmt == "json":
        return to_json(d)
    if isinstance(report, AnalysisReport):
        return _text_report(d)
    return _text_generic(d)


# -- argument helpers -------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _read_strategy(spec: str, n: int) -> np.ndarray:
    """A strategy from a JSON file (list or ``{"x": [...]}``) or ``a,b,c`` with fractions allowed."""
    path = Path(spec)
    if path.exists():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{spec}: line {exc.lineno}: {exc.msg}") from exc
        if isinstance(data, dict):
            data = data.get("x")
        if not isinstance(data, list):
            raise InputError(f"{spec}: expected a list or an object with field 'x'")
        vals = data
    else:
        try:
            vals = [float(Fraction(t)) for t in spec.replace(",", " ").split()]
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot read strategy {spec!r}: not a file or a number list") from None
    try:
        return as_strategy(np.asarray(vals, dtype=float), n)
    except (TypeError, ValueError) as exc:
        raise InputError(f"strategy: {exc}") from exc


def _support_for(net: Network, x: np.ndarray, r: int | None) -> RegularSupport | None:
    s = support_of(x)
    if r is not None:
        return check_support_conditions(net, s, r)
    # infer r when the support is regular
    degs = {len(net.neighbors(i) & set(s)) for i in s}
    if len(degs) == 1:
        return check_support_conditions(net, s, degs.pop())
    return None


# -- subcommands ------------------------------------------------------------


def cmd_complement(net: Network, args) -> dict:
    comp = complement(net)
    if args.output:
        save_network(comp, args.output)
    return comp.to_dict()


def cmd_find(net: Network, args) -> dict:
    if args.r < 0 or args.r >= net.n:
        raise InputError(f"infeasible r={args.r}: need 0 <= r < n = {net.n}")
    supports = _candidate_supports(net, args.r, args.exact, args.seed)
    return {"r": args.r, "exact": args.exact, "supports": [s.to_dict() for s in supports]}


def cmd_equilibrium(net: Network, args) -> dict:
    support = check_support_conditions(net, args.support, args.r)
    built = construct_equilibrium(support, net)
    cert = verify_nash(built.x, net, tol=args.tol)
    return {
        "support": support.to_dict(),
        "lambda_formula": built.lambda_star,
        "lambda_rational": rational(built.lambda_star),
        "sufficient": built.sufficient,
        "certificate": cert.to_dict(),
    }


def cmd_verify(net: Network, args) -> dict:
    x = _read_strategy(args.strategy, net.n)
    cert = verify_nash(x, net, tol=args.tol, game=args.game)
    out = cert.to_dict()
    out["lambda_rational"] = rational(cert.lambda_star)
    out["game"] = args.game
    return out


def cmd_classify(net: Network, args) -> dict:
    x = _read_strategy(args.strategy, net.n)
    support = _support_for(net, x, args.r)
    method = args.method
    if method != "spectral" and (support is None or not structural_applies(net, support)):
        if method == "structural":
            raise InputError("structural rules need an r-regular support with one weight per component")
        method = "spectral"
    report = classify(net, x, support, method=method)
    return {"support": list(support_of(x)), **report.to_dict()}


def cmd_enumerate(net: Network, args) -> dict:
    try:
        res = enumerate_nash(net, tol=args.tol, max_n=args.max_n)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return {
        "count": len(res),
        "supports_checked": res.supports_checked,
        "rank_deficient": res.rank_deficient,
        "inconsistent": res.inconsistent,
        "equilibria": [
            {**c.to_dict(), "lambda_rational": rational(c.lambda_star)} for c in res
        ],
    }


def cmd_simulate(net: Network, args) -> dict:
    if args.x0 == "random":
        x0 = random_interior(net.n, np.random.default_rng(args.seed))
    else:
        x0 = _read_strategy(args.x0, net.n)
    traj = replicator_descent(net, x0, dt=args.dt, max_steps=args.steps, conv_tol=args.conv_tol)
    out = traj.summary()
    out["initial_x"] = [float(v) for v in x0]
    if traj.converged:
        out["certificate"] = converged_certificate(traj, net, tol=args.cert_tol).to_dict()
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "payoff"])
            for t, p in enumerate(traj.payoffs):
                w.writerow([t, repr(float(p))])
    return out


def cmd_analyze(net: Network, args) -> AnalysisReport:
    return analyze(net, args.r, exact=args.exact, tol=args.tol, seed=args.seed, max_n=args.max_n)


# -- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser, sub: bool) -> None:
    # subcommands accept the global flags too; SUPPRESS keeps them from
    # overwriting a value given before the subcommand
    d = (lambda v: argparse.SUPPRESS) if sub else (lambda v: v)
    p.add_argument("--input", "-i", default=d(None), help="network file (JSON or edge list)")
    p.add_argument("--format", choices=("json", "text"), default=d("json"))
    p.add_argument("--tol", type=float, default=d(DEFAULT_TOL), help="verification tolerance")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--diag", type=float, default=d(None), help="override the diagonal coefficient")
    p.add_argument(
        "--weights", type=lambda s: [float(t) for t in s.replace(",", " ").split()],
        default=d(None), help="override node weights, comma separated",
    )
    p.add_argument(
        "--scheme", choices=("unweighted", "additive", "multiplicative"), default=d(None)
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netdistancing", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_common(parser, sub=False)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = subs.add_parser(name, help=help_)
        _add_common(p, sub=True)
        p.set_defaults(func=func)
        return p

    p = add("complement", cmd_complement, "complement network (networking <-> distancing)")
    p.add_argument("--output", "-o", help="also write the complement to this file")

    p = add("find", cmd_find, "search for a maximal r-regular supporting set")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="enumerate all maximal sets")

    p = add("equilibrium", cmd_equilibrium, "construct the equilibrium on a given support")
    p.add_argument("--support", type=_int_list, required=True, help="nodes, e.g. 3,5,9")
    p.add_argument("--r", type=int, required=True)

    p = add("verify", cmd_verify, "check the Nash conditions for a strategy")
    p.add_argument("--strategy", required=True, help="JSON file or list such as 0,1/3,2/3")
    p.add_argument("--game", choices=("distancing", "networking"), default="distancing")

    p = add("classify", cmd_classify, "rigidity / flexibility / fragility of an equilibrium")
    p.add_argument("--strategy", required=True)
    p.add_argument("--method", choices=("structural", "spectral", "both"), default="both")
    p.add_argument("--r", type=int, default=None, help="regularity of the support (inferred if omitted)")

    p = add("enumerate", cmd_enumerate, "all Nash equilibria by support enumeration")
    p.add_argument("--max-n", type=int, default=ORACLE_MAX_N)

    p = add("simulate", cmd_simulate, "replicator descent from a start strategy")
    p.add_argument("--x0", default="random", help="'random', a JSON file or a number list")
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--conv-tol", type=float, default=1e-10)
    p.add_argument("--cert-tol", type=float, default=1e-6)
    p.add_argument("--csv", help="write (step, payoff) rows here")

    p = add("analyze", cmd_analyze, "search, construct, verify and classify for each r")
    p.add_argument("--r", type=_int_list, default=[0], help="list of r values, e.g. 0,1,2")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--max-n", type=int, default=ORACLE_MAX_N, help="oracle size limit")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.input is None:
        parser.error("--input is required")
    try:
        net = load_network(args.input, diag=args.diag, weights=args.weights, scheme=args.scheme)
        result = args.func(net, args)
    except (InvariantViolation, ClassificationMismatch) as exc:
        print(f"netdistancing: invariant violation: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"netdistancing: {exc}", file=sys.stderr)
        return 1
    except (InputError, NetworkError, StrategyError, SupportConditionError, NotNashError) as exc:
        print(f"netdistancing: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(emit_report(result, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
