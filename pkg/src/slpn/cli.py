"""``slpn`` command-line front end.

Results go to stdout (plain text or one JSON object); warnings go to
stderr. Exit codes: 0 success, 1 analysis error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
import warnings

from . import __version__
from .analysis import AnalysisConfig, language_mass, spec_probability, trace_probability
from .automata import load_dfa
from .conformance import load_log, uemsc_report, write_log_csv
from .errors import ParseError, SlpnError
from .markov import DEFAULT_TOLERANCE, solve_state_values
from .net import validate
from .oracle import DEFAULT_EPSILON, DEFAULT_MAX_STEPS, enumerate_bracket, sample_playout
from .probdeclare import check_compliance, load_probdeclare
from .reachability import DEFAULT_MAX_STATES, build_reachability_graph, graph_stats
from .slpnfile import load_slpn, parse_marking_spec


class UsageError(Exception):
    pass


def _default_max_states() -> int:
    env = os.environ.get("SLPN_MAX_STATES")
    if env is None:
        return DEFAULT_MAX_STATES
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SLPN_MAX_STATES must be an integer, got {env!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("net", help=".slpn file")
    p.add_argument("--max-states", type=int, default=None,
                   help="state cap (default: $SLPN_MAX_STATES or %d)" % DEFAULT_MAX_STATES)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--oracle", action="store_true", help="add an enumeration bracket")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--digits", type=int, default=9)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slpn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"slpn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("inspect", parents=[common], help="reachability graph summary")
    p.add_argument("--dot", metavar="FILE", help="write the graph in DOT format")
    p.add_argument("--edges", metavar="FILE", help="write the graph as an edge list")

    p = sub.add_parser("outcome", parents=[common], help="probability of ending in given finals")
    p.add_argument("--final", action="append", required=True, metavar="MARKING",
                   help="place:mult[,place:mult...]; repeat for several")

    p = sub.add_parser("trace-prob", parents=[common], help="probability of one trace")
    p.add_argument("--trace", required=True, help='comma-separated labels, e.g. "a,b"')

    p = sub.add_parser("spec-prob", parents=[common], help="probability of a DFA's language")
    p.add_argument("--dfa", required=True)

    p = sub.add_parser("compliance", parents=[common], help="check a ProbDeclare file")
    p.add_argument("--spec", required=True)

    p = sub.add_parser("uemsc", parents=[common], help="unit Earth Movers' stochastic conformance")
    p.add_argument("--log", required=True)
    p.add_argument("--xes", action="store_true", help="read the log as XES")
    p.add_argument("--trim", action="store_true", help="strip whitespace around labels")

    p = sub.add_parser("sample", parents=[common], help="seeded play-out to a CSV log")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-len", type=int, default=1000)
    p.add_argument("--out", help="write the log here instead of stdout")
    return parser


def _fmt(x: float, digits: int) -> str:
    return f"{x:.{digits}f}"


def _need_file(path: str) -> None:
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(args.max_states, args.tolerance, args.oracle, args.epsilon, args.max_steps)


def _parse_trace(text: str) -> list[str]:
    if not text.strip():
        return []
    (row,) = list(csv.reader([text]))
    return row


def _bracket_text(res: dict, digits: int) -> list[str]:
    b = res.get("bracket")
    if not b:
        return []
    return [f"bracket [{_fmt(b['lower'], digits)}, {_fmt(b['upper'], digits)}]"]


def cmd_inspect(args, lsp, sts):
    stats = graph_stats(sts)
    mass = language_mass(lsp, _config(args), sts)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(sts.to_dot())
    if args.edges:
        with open(args.edges, "w", encoding="utf-8") as fh:
            fh.write(sts.to_edge_list())
    diags = [str(d) for d in validate(lsp, sts)]
    result = {
        "states": stats.states,
        "edges": stats.edges,
        "final": stats.finals,
        "deadlock": stats.deadlocks,
        "livelock": stats.livelocks,
        "boundedness": stats.verdict(),
        "language_mass": mass,
        "validation": diags,
    }
    d = args.digits
    lines = [
        f"{stats.states} states, {stats.finals} final, {stats.livelocks} livelock, "
        f"language mass {_fmt(mass, d)}",
        f"{stats.edges} edges, {stats.deadlocks} deadlock, {stats.verdict()}",
    ]
    lines += diags
    return result, lines


def cmd_outcome(args, lsp, sts):
    targets = set()
    for spec in args.final:
        try:
            m = parse_marking_spec(spec, set(lsp.net.places))
        except ParseError as exc:
            raise UsageError(f"--final {spec!r}: {exc}") from None
        i = sts.index.get(m)
        if i is None or i not in sts.finals:
            raise SlpnError(f"{m} is not a reachable final marking")
        targets.add(i)
    sol = solve_state_values(sts, targets, args.tolerance)
    result = {"value": float(sol.values[sts.initial]), "residual": sol.residual}
    if args.oracle:
        b = enumerate_bracket(sts, targets, args.epsilon, args.max_steps)
        result["bracket"] = {"lower": b.lower, "upper": b.upper}
    return result, [_fmt(result["value"], args.digits)] + _bracket_text(result, args.digits)


def cmd_trace_prob(args, lsp, sts):
    trace = _parse_trace(args.trace)
    res = trace_probability(lsp, trace, _config(args), sts).as_dict()
    res["trace"] = trace
    return res, [_fmt(res["value"], args.digits)] + _bracket_text(res, args.digits)


def cmd_spec_prob(args, lsp, sts):
    _need_file(args.dfa)
    dfa = load_dfa(args.dfa)
    res = spec_probability(lsp, dfa, _config(args), sts, warn_alphabet=True).as_dict()
    return res, [_fmt(res["value"], args.digits)] + _bracket_text(res, args.digits)


def cmd_compliance(args, lsp, sts):
    _need_file(args.spec)
    spec = load_probdeclare(args.spec)
    report = check_compliance(lsp, spec, _config(args), sts)
    d = args.digits
    lines = []
    for r in report.results:
        verdict = "holds" if r.holds else "violated"
        lines.append(f"{r.name}\t{r.formula} {r.op} {r.threshold}\t{_fmt(r.probability, d)}\t{verdict}")
    lines.append("compliant: " + ("yes" if report.compliant else "no"))
    return report.as_dict(), lines


def cmd_uemsc(args, lsp, sts):
    _need_file(args.log)
    log = load_log(args.log, xes=args.xes or None, trim=args.trim)
    rep = uemsc_report(log, lsp, _config(args))
    d = args.digits
    lines = ["trace\tlog\tmodel\tcontribution"]
    for r in rep.rows:
        lines.append(
            f"<{','.join(r.trace)}>\t{_fmt(r.log_frequency, d)}\t"
            f"{_fmt(r.model_probability, d)}\t{_fmt(r.contribution, d)}"
        )
    lines.append(f"uemsc {_fmt(rep.value, d)}")
    return rep.as_dict(), lines


def cmd_sample(args, lsp, sts):
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    log, truncated = sample_playout(lsp, args.n, args.seed, args.max_len)
    text = write_log_csv(log)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    result = {"sampled": args.n, "truncated": truncated, "distinct": len(log), "seed": args.seed}
    if not args.out:
        result["log"] = text
    print(f"truncated {truncated} of {args.n} runs", file=sys.stderr)
    lines = [] if not args.out else [f"wrote {len(log)} distinct traces to {args.out}"]
    if not args.out:
        lines.append(text.rstrip("\n"))
    return result, lines


COMMANDS = {
    "inspect": cmd_inspect,
    "outcome": cmd_outcome,
    "trace-prob": cmd_trace_prob,
    "spec-prob": cmd_spec_prob,
    "compliance": cmd_compliance,
    "uemsc": cmd_uemsc,
    "sample": cmd_sample,
}

# sample plays the token game directly and needs no graph
_NEEDS_GRAPH = set(COMMANDS) - {"sample"}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if args.max_states is None:
                args.max_states = _default_max_states()
            _need_file(args.net)
            lsp = load_slpn(args.net)
            sts = build_reachability_graph(lsp, args.max_states) if args.command in _NEEDS_GRAPH else None
            result, lines = COMMANDS[args.command](args, lsp, sts)
        except UsageError as exc:
            _flush(caught)
            print(f"slpn {args.command}: error: {exc}", file=sys.stderr)
            return 2
        except (SlpnError, ValueError, OSError) as exc:
            _flush(caught)
            print(f"slpn {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
    diagnostics = _flush(caught)
    if args.format == "json":
        report = {
            "command": args.command,
            "inputs": {k: v for k, v in vars(args).items() if k not in ("command", "format")},
            "results": result,
            "diagnostics": diagnostics,
            "seconds": time.perf_counter() - start,
        }
        print(json.dumps(report, indent=2, default=str))
    else:
        for line in lines:
            print(line)
    return 0


def _flush(caught) -> list[str]:
    out = []
    for w in caught:
        msg = f"{w.category.__name__}: {w.message}"
        out.append(msg)
        print(f"warning: {msg}", file=sys.stderr)
    caught.clear()
    return out


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
