"""Independent exact-arithmetic reference implementations for tests.

Nothing here imports the solver or graph code under test: the token game,
the graph, and the linear solve are redone from scratch over Fractions.
"""

from collections import deque
from fractions import Fraction

TAU = "tau"


def _weight(w):
    return Fraction(w).limit_denominator(10**6)


def exact_graph(lsp):
    net = lsp.net
    pre = {t.id: {} for t in net.transitions}
    post = {t.id: {} for t in net.transitions}
    for src, dst in net.arcs:
        if dst in pre:
            pre[dst][src] = pre[dst].get(src, 0) + 1
        else:
            post[src][dst] = post[src].get(dst, 0) + 1

    def key(m):
        return tuple(sorted((p, n) for p, n in m.items() if n))

    start = key(dict(lsp.initial.items()))
    states, index, edges = [start], {start: 0}, []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        m = dict(states[i])
        cands = [t for t in net.transitions if all(m.get(p, 0) >= n for p, n in pre[t.id].items())]
        if any(t.kind == "immediate" for t in cands):
            cands = [t for t in cands if t.kind == "immediate"]
        total = sum(_weight(t.weight) for t in cands)
        for t in cands:
            m2 = dict(m)
            for p, n in pre[t.id].items():
                m2[p] -= n
            for p, n in post[t.id].items():
                m2[p] = m2.get(p, 0) + n
            k = key(m2)
            if k not in index:
                index[k] = len(states)
                states.append(k)
                queue.append(index[k])
            edges.append((i, t.label, index[k], _weight(t.weight) / total))
    dead = {i for i in range(len(states)) if not any(e[0] == i for e in edges)}
    if lsp.finals is None:
        finals = dead
    else:
        finals = {index[key(dict(m.items()))] for m in lsp.finals if key(dict(m.items())) in index}
    return states, edges, finals


def exact_reach(n, edges, targets):
    """Least solution of x = Px with x = 1 on targets, over Fractions."""
    targets = set(targets)
    preds = [[] for _ in range(n)]
    for u, _, v, _ in edges:
        preds[v].append(u)
    good, stack = set(targets), list(targets)
    while stack:
        v = stack.pop()
        for u in preds[v]:
            if u not in good:
                good.add(u)
                stack.append(u)
    free = [s for s in range(n) if s in good and s not in targets]
    col = {s: j for j, s in enumerate(free)}
    rows = []
    for s in free:
        row = [Fraction(0)] * (len(free) + 1)
        row[col[s]] += 1
        for u, _, v, p in edges:
            if u != s:
                continue
            if v in targets:
                row[-1] += p
            elif v in col:
                row[col[v]] -= p
        rows.append(row)
    m = len(free)
    for c in range(m):
        piv = next(r for r in range(c, m) if rows[r][c] != 0)
        rows[c], rows[piv] = rows[piv], rows[c]
        for r in range(m):
            if r != c and rows[r][c] != 0:
                f = rows[r][c] / rows[c][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    x = [Fraction(0)] * n
    for t in targets:
        x[t] = Fraction(1)
    for s in free:
        x[s] = rows[col[s]][-1] / rows[col[s]][col[s]]
    return x


def exact_outcome(lsp, target_markings=None):
    states, edges, finals = exact_graph(lsp)
    if target_markings is None:
        targets = finals
    else:
        keys = {tuple(sorted(m.items())) for m in target_markings}
        targets = {i for i in finals if states[i] in keys}
    return exact_reach(len(states), edges, targets)[0]


def exact_trace_probability(lsp, trace):
    states, edges, finals = exact_graph(lsp)
    trace = tuple(trace)
    pairs, index, pedges = [(0, 0)], {(0, 0): 0}, []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        s, k = pairs[i]
        for u, label, v, p in edges:
            if u != s:
                continue
            if label == TAU:
                nxt = (v, k)
            elif k < len(trace) and trace[k] == label:
                nxt = (v, k + 1)
            else:
                continue
            if nxt not in index:
                index[nxt] = len(pairs)
                pairs.append(nxt)
                queue.append(index[nxt])
            pedges.append((i, label, index[nxt], p))
    targets = {i for i, (s, k) in enumerate(pairs) if s in finals and k == len(trace)}
    return exact_reach(len(pairs), pedges, targets)[0]
