"""Cross-check the linear-solve trace probabilities against the best-first
enumeration bracket on random bounded nets."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from slpn.analysis import trace_probability
from slpn.automata import product, silence, trace_dfa
from slpn.generators import NetShape, random_bounded_lsp, random_trace
from slpn.oracle import enumerate_bracket


@dataclass
class Config:
    nets: int = 50
    traces: int = 5
    seed: int = 2024
    epsilon: float = 1e-7
    max_steps: int = 20_000
    max_places: int = 10
    max_transitions: int = 12


def main(cfg: Config) -> int:
    rng = np.random.default_rng(cfg.seed)
    shape = NetShape(max_places=cfg.max_places, max_transitions=cfg.max_transitions)
    outside, widths, start = 0, [], time.perf_counter()
    for _ in range(cfg.nets):
        lsp, sts = random_bounded_lsp(rng, shape)
        for _ in range(cfg.traces):
            trace = random_trace(rng, lsp.net.alphabet, 4)
            v = trace_probability(lsp, trace, sts=sts).value
            prod = product(sts, silence(trace_dfa(trace)))
            b = enumerate_bracket(prod, prod.finals, cfg.epsilon, cfg.max_steps)
            widths.append(b.width)
            if not b.lower - 1e-9 <= v <= b.upper + 1e-9:
                outside += 1
                print(f"outside: {trace} value {v} bracket [{b.lower}, {b.upper}]")
    w = np.array(widths)
    print(f"{len(w)} checks, {outside} outside, "
          f"median width {np.median(w):.2e}, max width {w.max():.2e}, "
          f"{time.perf_counter() - start:.1f}s")
    return 1 if outside else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in Config.__dataclass_fields__.items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(default.default), default=default.default)
    raise SystemExit(main(Config(**vars(ap.parse_args()))))
