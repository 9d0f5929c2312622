"""Print the worked-example numbers for the bundled nets, next to their exact
rational values."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from slpn import load_slpn, trace_probability
from slpn.probdeclare import check_compliance, load_probdeclare
from slpn.markov import livelock_mass, outcome_probability
from slpn.net import Marking
from slpn.reachability import build_reachability_graph

DATA = Path(__file__).resolve().parent.parent / "data"


@dataclass
class Config:
    data: Path = DATA
    digits: int = 9


def row(label: str, value: float, exact: Fraction | None, digits: int) -> str:
    ref = "" if exact is None else f"  (exact {exact}, diff {abs(value - float(exact)):.1e})"
    return f"{label:<52} {value:.{digits}f}{ref}"


def main(cfg: Config) -> None:
    d = cfg.digits
    fig1a, fig1b = load_slpn(cfg.data / "fig1a.slpn"), load_slpn(cfg.data / "fig1b.slpn")
    print(row("fig1a  <a,b>", trace_probability(fig1a, ["a", "b"]).value, Fraction(2, 3), d))
    print(row("fig1a  <a,c>", trace_probability(fig1a, ["a", "c"]).value, Fraction(1, 3), d))
    print(row("fig1b  <a,c>", trace_probability(fig1b, ["a", "c"]).value, Fraction(3, 4), d))
    print(row("fig1b  <a,d>", trace_probability(fig1b, ["a", "d"]).value, Fraction(1, 4), d))

    order = load_slpn(cfg.data / "order.slpn")
    sts = build_reachability_graph(order)
    print(f"order: {len(sts)} reachable markings, {len(sts.finals)} final")
    for place, exact in (("h", Fraction(1, 11)), ("c", Fraction(7, 11)), ("r", Fraction(3, 11))):
        p = outcome_probability(order, [Marking({place: 1})], sts=sts)
        print(row(f"order  outcome [{place}]", p, exact, d))
    trace = ["open", "finalize", "ack accept", "finalize", "ack reject"]
    print(row("order  " + ",".join(trace), trace_probability(order, trace, sts=sts).value, Fraction(1, 48), d))

    report = check_compliance(order, load_probdeclare(cfg.data / "order.pdecl"), sts=sts)
    for r in report.results:
        print(row(f"order  {r.name}: {r.formula} {r.op} {r.threshold}", r.probability, None, d)
              + ("  holds" if r.holds else "  violated"))

    live = load_slpn(cfg.data / "live.slpn")
    print(row("live   livelock mass", livelock_mass(live), Fraction(1, 3), d))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", type=Path, default=DATA)
    ap.add_argument("--digits", type=int, default=9)
    main(Config(**vars(ap.parse_args())))
