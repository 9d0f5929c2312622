"""Brute-force cross-checks: probability-ordered run enumeration and play-out."""

from __future__ import annotations

import heapq
import itertools
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .conformance import StochasticLog
from .net import LSP, Marking, enabled_distribution
from .reachability import StochasticTransitionSystem

DEFAULT_EPSILON = 1e-9
DEFAULT_MAX_STEPS = 10_000_000


@dataclass(frozen=True)
class ProbabilityBracket:
    lower: float
    residual: float
    expansions: int = 0

    @property
    def upper(self) -> float:
        return min(1.0, self.lower + self.residual)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, slack: float = 1e-9) -> bool:
        return self.lower - slack <= value <= self.upper + slack


def enumerate_bracket(
    sts: StochasticTransitionSystem,
    targets: Iterable[int],
    epsilon: float = DEFAULT_EPSILON,
    max_steps: int = DEFAULT_MAX_STEPS,
    merge_states: bool = True,
) -> ProbabilityBracket:
    """Expand partial runs most-probable first until the unresolved mass
    drops below ``epsilon`` or ``max_steps`` expansions have been made.

    Mass reaching a target is added to ``lower``; mass stuck in a
    non-target dead end, or lost to edges missing from a sub-stochastic
    state, leaves the residual.

    With ``merge_states`` (the default) the frontier keeps one entry per
    state holding the summed mass of all partial runs ending there. With it
    off, every frontier entry is a distinct walk, a literal truncation of
    the run sum; that blows up on nets with nested silent cycles.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    targets = frozenset(targets)
    counter = itertools.count()
    frontier = [(-1.0, next(counter), sts.initial)]
    pending = {sts.initial: 1.0} if merge_states else None
    lower = 0.0
    residual = 1.0
    steps = 0
    while frontier and residual >= epsilon and steps < max_steps:
        negp, _, s = heapq.heappop(frontier)
        if pending is not None:
            p = pending.pop(s, 0.0)
            if p == 0.0:
                continue  # stale entry
        else:
            p = -negp
        steps += 1
        if s in targets:
            lower += p
            residual -= p
            continue
        kept = 0.0
        for e in sts.outgoing[s]:
            q = p * e.probability
            if q <= 0.0:
                continue
            kept += q
            if pending is not None:
                q = pending.get(e.target, 0.0) + q
                pending[e.target] = q
            heapq.heappush(frontier, (-q, next(counter), e.target))
        # dead ends and rejected moves: this mass can never reach a target
        residual -= p - kept
    if pending is not None:
        left = sum(pending.values())
    else:
        left = sum(-f[0] for f in frontier)
    residual = max(0.0, min(residual, left)) if left else 0.0
    return ProbabilityBracket(min(lower, 1.0), residual, steps)


def sample_playout(
    lsp: LSP, n: int, seed: int, max_len: int = 1000
) -> tuple[StochasticLog, int]:
    """Play the token game ``n`` times with numpy's PCG64 seeded by ``seed``.

    Returns the log of completed traces and the number of runs cut off after
    ``max_len`` firings, which are left out of the log. A run that halts in
    a deadlock outside the final markings is dropped and counted the same way.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    net = lsp.net
    finals = lsp.finals
    cache: dict[Marking, tuple[list[str], np.ndarray]] = {}
    counts: dict[tuple[str, ...], int] = {}
    truncated = 0
    for _ in range(n):
        m = lsp.initial
        trace: list[str] = []
        fired = 0
        while True:
            choice = cache.get(m)
            if choice is None:
                dist = enabled_distribution(net, m)
                choice = ([t for t, _ in dist], np.cumsum([p for _, p in dist]))
                cache[m] = choice
            tids, cum = choice
            if not tids:
                complete = finals is None or m in finals
                break
            if fired == max_len:
                complete = False
                break
            k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            tid = tids[min(k, len(tids) - 1)]
            m = (m - net.preset[tid]) + net.postset[tid]
            fired += 1
            t = net.transition(tid)
            if not t.silent:
                trace.append(t.label)
        if complete:
            key = tuple(trace)
            counts[key] = counts.get(key, 0) + 1
        else:
            truncated += 1
    return StochasticLog(counts), truncated
