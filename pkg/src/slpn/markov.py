"""Absorbing Markov chains and reach-probability linear systems.

The value ``x[s]`` of a state is the probability that a walk from ``s``
ends in one of the target states. States that cannot reach a target get
``x = 0`` outright; this covers livelocks, non-target finals, dead ends and
the mass that a product system loses to rejected moves, and leaves a
nonsingular system over the remaining states.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NumericalWarning, SolverError
from .reachability import (
    DEFAULT_MAX_STATES,
    StochasticTransitionSystem,
    build_reachability_graph,
    reaches,
)

DENSE_LIMIT = 2000
DEFAULT_TOLERANCE = 1e-12

Method = Literal["auto", "dense", "sparse", "gauss-seidel"]


@dataclass(frozen=True)
class MarkovChain:
    """Label-free chain. ``sink`` is the extra absorbing state that collects
    missing mass of sub-stochastic systems, or ``None`` if none was needed."""

    n_states: int
    edges: tuple[tuple[int, int, float], ...]
    absorbing: frozenset[int]
    sink: int | None = None

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.n_states, self.n_states))
        for u, v, p in self.edges:
            P[u, v] += p
        return P

    @property
    def transient(self) -> frozenset[int]:
        return frozenset(range(self.n_states)) - self.absorbing


def embed_chain(sts: StochasticTransitionSystem) -> MarkovChain:
    """Drop labels and give every final state a probability-1 self-loop.

    Non-final states whose outgoing mass is below one (dead ends, or product
    states that lost mass to rejected moves) send the missing mass to a
    fresh non-final sink state with its own self-loop, so every row of the
    chain sums to one.
    """
    n = len(sts)
    edges: list[tuple[int, int, float]] = [(e.source, e.target, e.probability) for e in sts.edges]
    edges.extend((s, s, 1.0) for s in sorted(sts.finals))
    missing = []
    for s in range(n):
        if s in sts.finals:
            continue
        gap = 1.0 - sts.out_mass(s)
        if gap > 1e-12:
            missing.append((s, gap))
    sink = None
    if missing:
        sink = n
        edges.extend((s, sink, gap) for s, gap in missing)
        edges.append((sink, sink, 1.0))
        n += 1
    absorbing = set(sts.finals) | ({sink} if sink is not None else set())
    return MarkovChain(n, tuple(edges), frozenset(absorbing), sink)


@dataclass
class LinearSystem:
    """One row per state: ``x = 1`` for targets, ``x = 0`` for zeroed
    states, ``x_s - sum_t p(s,t) x_t = 0`` for the rest."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    targets: frozenset[int]
    zeroed: frozenset[int]

    @property
    def n(self) -> int:
        return self.rhs.shape[0]

    @property
    def free(self) -> list[int]:
        fixed = self.targets | self.zeroed
        return [s for s in range(self.n) if s not in fixed]

    def to_text(self, digits: int = 6) -> str:
        lines = []
        A = self.matrix.tocsr()
        for s in range(self.n):
            if s in self.targets:
                lines.append(f"x_{s} = 1")
            elif s in self.zeroed:
                lines.append(f"x_{s} = 0")
            else:
                row = A.getrow(s)
                terms = [
                    f"{-v:.{digits}g}*x_{c}"
                    for c, v in sorted(zip(row.indices, row.data))
                    if c != s and v != 0
                ]
                lines.append(f"x_{s} = " + (" + ".join(terms) if terms else "0"))
        return "\n".join(lines) + "\n"


def assemble_system(sts: StochasticTransitionSystem, targets: Iterable[int]) -> LinearSystem:
    targets = frozenset(targets)
    n = len(sts)
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target state {t} out of range")
    can_reach = reaches(sts, targets)
    zeroed = frozenset(range(n)) - can_reach
    rows, cols, vals = [], [], []
    rhs = np.zeros(n)
    for s in range(n):
        rows.append(s)
        cols.append(s)
        vals.append(1.0)
        if s in targets:
            rhs[s] = 1.0
        elif s not in zeroed:
            for e in sts.outgoing[s]:
                rows.append(s)
                cols.append(e.target)
                vals.append(-e.probability)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return LinearSystem(A, rhs, targets, zeroed)


@dataclass(frozen=True)
class Solution:
    values: np.ndarray
    residual: float
    method: str
    zeroed: frozenset[int]


def solve_linear(
    system: LinearSystem, tolerance: float = DEFAULT_TOLERANCE, method: Method = "auto"
) -> Solution:
    """Solve the reduced system over the non-fixed states.

    Dense LU with partial pivoting up to ``DENSE_LIMIT`` free states, sparse
    LU above it; ``method="gauss-seidel"`` iterates ``x = Px + b`` instead.
    The reported residual is the infinity norm over the full system.
    """
    n = system.n
    x = np.zeros(n)
    for t in system.targets:
        x[t] = 1.0
    free = system.free
    if free:
        A = system.matrix.tocsr()
        idx = np.asarray(free)
        A_ff = A[idx][:, idx]
        fixed = np.asarray(sorted(system.targets))
        b = -(A[idx][:, fixed] @ np.ones(len(fixed))) if len(fixed) else np.zeros(len(idx))
        if method == "auto":
            method = "dense" if len(free) <= DENSE_LIMIT else "sparse"
        if method == "dense":
            try:
                x_f = np.linalg.solve(A_ff.toarray(), b)
            except np.linalg.LinAlgError as exc:
                raise SolverError(f"singular system: {exc}") from None
        elif method == "sparse":
            x_f = spla.spsolve(A_ff.tocsc(), b)
        elif method == "gauss-seidel":
            x_f = _gauss_seidel(A_ff, b, tolerance)
        else:
            raise ValueError(f"unknown method {method!r}")
        if not np.all(np.isfinite(x_f)):
            raise SolverError("solver produced non-finite values")
        x[idx] = x_f
    residual = float(np.max(np.abs(system.matrix @ x - system.rhs))) if n else 0.0
    worst = max(float(np.max(-x, initial=0.0)), float(np.max(x - 1.0, initial=0.0)))
    if worst > 1e-6:
        warnings.warn(
            f"solution leaves [0, 1] by {worst:.3g}; clamping", NumericalWarning, stacklevel=2
        )
    x = np.clip(x, 0.0, 1.0)
    return Solution(x, residual, method, system.zeroed)


def _gauss_seidel(A: sp.csr_matrix, b: np.ndarray, tolerance: float, max_sweeps: int = 10**6):
    # rows are x_i - sum_j p_ij x_j = b_i with unit diagonal except self-loops
    A = A.tocsr()
    n = len(b)
    diag = A.diagonal()
    indptr, indices, data = A.indptr, A.indices, A.data
    x = np.zeros(n)
    for _ in range(max_sweeps):
        delta = 0.0
        for i in range(n):
            acc = b[i]
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                if j != i:
                    acc -= data[k] * x[j]
            new = acc / diag[i]
            d = abs(new - x[i])
            if d > delta:
                delta = d
            x[i] = new
        if delta < tolerance:
            return x
    raise SolverError(f"Gauss-Seidel did not converge in {max_sweeps} sweeps")


def solve_state_values(
    sts: StochasticTransitionSystem,
    targets: Iterable[int] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    method: Method = "auto",
) -> Solution:
    targets = sts.finals if targets is None else frozenset(targets)
    return solve_linear(assemble_system(sts, targets), tolerance, method)


def state_values(
    sts: StochasticTransitionSystem,
    targets: Iterable[int] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> np.ndarray:
    """Probability, per state, of eventually reaching ``targets`` (default: all finals)."""
    return solve_state_values(sts, targets, tolerance).values


def _final_indices(sts: StochasticTransitionSystem, markings) -> frozenset[int]:
    out = set()
    for m in markings:
        i = sts.index.get(m)
        if i is None or i not in sts.finals:
            raise ValueError(f"{m} is not a reachable final marking")
        out.add(i)
    return frozenset(out)


def outcome_probability(
    lsp,
    targets,
    max_states: int = DEFAULT_MAX_STATES,
    tolerance: float = DEFAULT_TOLERANCE,
    sts: StochasticTransitionSystem | None = None,
) -> float:
    """Probability of terminating in one of the given final markings."""
    targets = list(targets)
    if not targets:
        raise ValueError("outcome probability needs at least one target marking")
    sts = sts or build_reachability_graph(lsp, max_states)
    idx = _final_indices(sts, targets)
    return float(state_values(sts, idx, tolerance)[sts.initial])


def livelock_mass(
    lsp,
    max_states: int = DEFAULT_MAX_STATES,
    tolerance: float = DEFAULT_TOLERANCE,
    sts: StochasticTransitionSystem | None = None,
) -> float:
    """Probability of never reaching a final marking."""
    sts = sts or build_reachability_graph(lsp, max_states)
    if not sts.finals:
        return 1.0
    total = float(state_values(sts, sts.finals, tolerance)[sts.initial])
    return max(0.0, 1.0 - total)


def absorption_by_iteration(chain: MarkovChain, targets: Iterable[int], steps: int = 10_000):
    """Value iteration ``x <- P x`` from the target indicator.

    Independent of the linear solve; converges from below to the minimal
    solution, i.e. the reach probabilities.
    """
    P = sp.csr_matrix(
        ([p for _, _, p in chain.edges], ([u for u, _, _ in chain.edges], [v for _, v, _ in chain.edges])),
        shape=(chain.n_states, chain.n_states),
    )
    x = np.zeros(chain.n_states)
    tgt = np.asarray(sorted(targets), dtype=int)
    x[tgt] = 1.0
    for _ in range(steps):
        x = P @ x
        x[tgt] = 1.0
    return x
