"""Deterministic two-player parity games (Zielonka) and the random-vertex gadget.

Used by the almost-sure solver to propose a candidate winning set with
strategies for both players; the caller certifies the proposal on the
stochastic game itself, so nothing here is trusted on its own.
"""
import sys


def attractor(nodes, owner, succ, target, player):
    """Attractor of ``player`` to ``target`` inside ``nodes`` with a strategy."""
    attr = set(target)
    strategy = {}
    preds = {}
    count = {}
    for v in nodes:
        out = [w for w in succ[v] if w in nodes]
        count[v] = len(out)
        for w in out:
            preds.setdefault(w, []).append(v)
    queue = list(attr)
    while queue:
        w = queue.pop()
        for v in preds.get(w, ()):
            if v in attr:
                continue
            if owner[v] == player:
                attr.add(v)
                strategy[v] = w
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strategy


def zielonka(owner, succ, priority, nodes=None):
    """Solve a min-parity game; player 1 wants the least recurring priority even.

    Returns ``(win1, win2, strategy1, strategy2)`` with positional strategies
    given as successor maps.
    """
    nodes = set(owner if nodes is None else nodes)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10000))
    try:
        return _solve(frozenset(nodes), owner, succ, priority)
    finally:
        sys.setrecursionlimit(limit)


def _solve(nodes, owner, succ, priority):
    if not nodes:
        return set(), set(), {}, {}
    p = min(priority[v] for v in nodes)
    x = 1 if p % 2 == 0 else 2
    y = 3 - x
    top = {v for v in nodes if priority[v] == p}
    a, a_strat = attractor(nodes, owner, succ, top, x)
    sub = _solve(nodes - a, owner, succ, priority)
    win = {1: sub[0], 2: sub[1]}
    strat = {1: sub[2], 2: sub[3]}
    if not win[y]:
        sx = dict(strat[x])
        sx.update(a_strat)
        for v in top:
            if owner[v] == x:
                sx[v] = next(w for w in succ[v] if w in nodes)
        res = {x: (set(nodes), sx), y: (set(), {})}
        return res[1][0], res[2][0], res[1][1], res[2][1]
    b, b_strat = attractor(nodes, owner, succ, win[y], y)
    sub2 = _solve(nodes - b, owner, succ, priority)
    win2 = {1: sub2[0], 2: sub2[1]}
    strat2 = {1: sub2[2], 2: sub2[3]}
    sy = dict(strat2[y])
    sy.update(b_strat)
    sy.update(strat[y])
    res = {x: (win2[x], strat2[x]), y: (win2[y] | b, sy)}
    return res[1][0], res[2][0], res[1][1], res[2][1]


def gadget_game(g):
    """Deterministic parity game approximating the almost-sure region of ``g``.

    Point-mass actions become plain edges, so for deterministic games the
    result is exact.  A random choice of an action ``(s, a)`` becomes a
    player-2 node that either lets player 1 pick the successor at the
    priority of ``s`` or picks it itself at the next more significant even
    priority.  This is only a heuristic proposal for stochastic games;
    priorities are shifted by two to stay non-negative.  Returns
    ``(owner, succ, priority, edge_action)`` where
    ``edge_action[(node, successor)]`` names the game action.
    """
    owner, succ, priority, edge_action = {}, {}, {}, {}
    for s in g.owner:
        node = ("s", s)
        p = g.priority[s] + 2
        owner[node] = g.owner[s]
        priority[node] = p
        out = []
        for a, dist in g.actions[s].items():
            if len(dist) == 1:
                (t,) = dist
                nxt = ("s", t)
            else:
                nxt = ("r", s, a)
                targets = [("s", t) for t in dist]
                owner[nxt] = 2
                priority[nxt] = p
                succ[nxt] = [("p1", s, a), ("p2", s, a)]
                owner[("p1", s, a)] = 1
                priority[("p1", s, a)] = p
                succ[("p1", s, a)] = targets
                owner[("p2", s, a)] = 2
                priority[("p2", s, a)] = p - 1 if p % 2 else p - 2
                succ[("p2", s, a)] = targets
            if nxt not in out:
                out.append(nxt)
                edge_action[(node, nxt)] = a
        succ[node] = out
    return owner, succ, priority, edge_action


def gadget_solution(g):
    """Candidate almost-sure set and memoryless strategies for both players."""
    owner, succ, priority, edge_action = gadget_game(g)
    win1, _, s1, s2 = zielonka(owner, succ, priority)
    win = {s for s in g.owner if ("s", s) in win1}
    sigma, tau = {}, {}
    for s in g.owner:
        node = ("s", s)
        strat = s1 if g.owner[s] == 1 else s2
        nxt = strat.get(node)
        a = edge_action.get((node, nxt), next(iter(g.actions[s])))
        (sigma if g.owner[s] == 1 else tau)[s] = a
    return win, sigma, tau
