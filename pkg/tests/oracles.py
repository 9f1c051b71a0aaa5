"""Independent reference implementations used only by the tests.

Nothing here imports the package solvers: Markov chains are solved with
sympy, games by enumerating memoryless strategies, and deterministic parity
games with Zielonka's recursive algorithm.
"""
from fractions import Fraction
import itertools

import sympy


def _sccs(succ):
    """Tarjan's algorithm (iterative)."""
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = [0]
    for root in succ:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def chain_values(trans, priority):
    """Parity probability of each state of a Markov chain.

    ``trans[s]`` is a ``{t: p}`` dict.  Even bottom SCCs are absorbing
    targets; the absorption probabilities come from a sympy linear solve.
    """
    succ = {s: list(d) for s, d in trans.items()}
    good, bottom = set(), set()
    for comp in _sccs(succ):
        if all(t in comp for s in comp for t in succ[s]):
            bottom |= comp
            if min(priority[s] for s in comp) % 2 == 0:
                good |= comp
    rest = [s for s in trans if s not in bottom]
    pos = {s: i for i, s in enumerate(rest)}
    values = {s: sympy.Integer(1 if s in good else 0) for s in bottom}
    if rest:
        a = sympy.zeros(len(rest), len(rest))
        b = sympy.zeros(len(rest), 1)
        for s in rest:
            i = pos[s]
            a[i, i] += 1
            for t, p in trans[s].items():
                p = sympy.Rational(p.numerator, p.denominator)
                if t in pos:
                    a[i, pos[t]] -= p
                elif t in good:
                    b[i] += p
        x = a.LUsolve(b)
        for s in rest:
            values[s] = x[pos[s]]
    return {s: Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1]))
            for s, v in values.items()}


def strategies(actions, states):
    states = list(states)
    for combo in itertools.product(*(list(actions[s]) for s in states)):
        yield dict(zip(states, combo))


def _chain(actions, choice):
    return {s: actions[s][choice[s]] for s in actions}


def mdp_values(actions, priority, maximize):
    """Optimal parity values by enumerating memoryless policies."""
    best = None
    for pol in strategies(actions, actions):
        v = chain_values(_chain(actions, pol), priority)
        if best is None:
            best = v
        else:
            pick = max if maximize else min
            best = {s: pick(best[s], v[s]) for s in best}
    return best


def game_table(g):
    """Chain values for every pair of memoryless strategies."""
    p1 = [s for s in g.owner if g.owner[s] == 1]
    p2 = [s for s in g.owner if g.owner[s] == 2]
    sigmas = list(strategies(g.actions, p1))
    taus = list(strategies(g.actions, p2))
    table = {}
    for i, sig in enumerate(sigmas):
        for j, tau in enumerate(taus):
            choice = dict(sig)
            choice.update(tau)
            table[(i, j)] = chain_values(_chain(g.actions, choice), g.priority)
    return sigmas, taus, table


def game_values(g):
    """Max-min over pure memoryless strategies, checked against min-max."""
    sigmas, taus, table = game_table(g)
    out = {}
    for s in g.owner:
        maxmin = max(min(table[(i, j)][s] for j in range(len(taus)))
                     for i in range(len(sigmas)))
        minmax = min(max(table[(i, j)][s] for i in range(len(sigmas)))
                     for j in range(len(taus)))
        assert maxmin == minmax, "no pure saddle point at %r" % (s,)
        out[s] = maxmin
    return out


def game_sure_set(g):
    """States where some memoryless player-1 strategy wins against every
    memoryless player-2 strategy with probability 1."""
    sigmas, taus, table = game_table(g)
    win = set()
    for i in range(len(sigmas)):
        win |= {s for s in g.owner if all(table[(i, j)][s] == 1 for j in range(len(taus)))}
    return win


def zielonka(owner, succ, priority):
    """Winning region of player 1 (even) in a min-parity game."""
    nodes = set(owner)
    return _zielonka(nodes, owner, succ, priority)[0]


def _attractor(nodes, owner, succ, target, player):
    attr = set(target)
    changed = True
    while changed:
        changed = False
        for v in nodes - attr:
            out = [w for w in succ[v] if w in nodes]
            if owner[v] == player:
                ok = any(w in attr for w in out)
            else:
                ok = all(w in attr for w in out)
            if ok:
                attr.add(v)
                changed = True
    return attr


def _zielonka(nodes, owner, succ, priority):
    if not nodes:
        return set(), set()
    p = min(priority[v] for v in nodes)
    player = 1 if p % 2 == 0 else 2
    other = 3 - player
    top = {v for v in nodes if priority[v] == p}
    a = _attractor(nodes, owner, succ, top, player)
    w = _zielonka(nodes - a, owner, succ, priority)
    w_other = w[other - 1]
    if not w_other:
        res = [None, None]
        res[player - 1] = set(nodes)
        res[other - 1] = set()
        return tuple(res)
    b = _attractor(nodes, owner, succ, w_other, other)
    w2 = _zielonka(nodes - b, owner, succ, priority)
    res = [None, None]
    res[player - 1] = set(w2[player - 1])
    res[other - 1] = set(w2[other - 1]) | b
    return tuple(res)


def collapsed_winner(game, obs, initial, depth=50):
    """Does some strategy choosing by collapsed observation history win surely?

    Only for deterministic games whose plays reach an absorbing state
    within ``depth`` steps; a play wins iff that state has even priority.
    Player 1's choice is a partial map from collapsed histories to actions,
    extended by backtracking while all player-2 branches are followed.
    """
    def absorbing(s):
        return all(set(d) == {s} for d in game.actions[s].values())

    def step(s, a):
        (t,) = game.actions[s][a]
        return t

    def collapse(play):
        out = []
        for s in play:
            if not out or out[-1] != obs[s]:
                out.append(obs[s])
        return tuple(out)

    def solve(pending, choice):
        if not pending:
            return True
        play, rest = pending[0], pending[1:]
        s = play[-1]
        if absorbing(s):
            return game.priority[s] % 2 == 0 and solve(rest, choice)
        if len(play) > depth:
            raise ValueError("play longer than the depth bound")
        if game.owner[s] == 2:
            more = [play + (step(s, a),) for a in game.actions[s]]
            return solve(more + rest, choice)
        h = collapse(play)
        options = [choice[h]] if h in choice else list(game.actions[s])
        for a in options:
            if a not in game.actions[s]:
                continue
            new = dict(choice)
            new[h] = a
            if solve([play + (step(s, a),)] + rest, new):
                return True
        return False

    return solve([(initial,)], {})


def stutter_winner(game, obs, initial, depth=50):
    """Like :func:`collapsed_winner` but choices may see block lengths.

    The key is the full observation sequence, with the extra rule that the
    action cannot change while the observation repeats.
    """
    def absorbing(s):
        return all(set(d) == {s} for d in game.actions[s].values())

    def step(s, a):
        (t,) = game.actions[s][a]
        return t

    def solve(pending, choice):
        if not pending:
            return True
        (play, last), rest = pending[0], pending[1:]
        s = play[-1]
        if absorbing(s):
            return game.priority[s] % 2 == 0 and solve(rest, choice)
        if len(play) > depth:
            raise ValueError("play longer than the depth bound")
        if game.owner[s] == 2:
            more = [(play + (step(s, a),), None if obs[step(s, a)] != obs[s] else last)
                    for a in game.actions[s]]
            return solve(more + rest, choice)
        h = tuple(obs[x] for x in play)
        if h in choice:
            options = [choice[h]]
        elif last is not None:
            options = [last]
        else:
            options = list(game.actions[s])
        for a in options:
            if a not in game.actions[s]:
                continue
            new = dict(choice)
            new[h] = a
            t = step(s, a)
            if solve([(play + (t,), a if obs[t] == obs[s] else None)] + rest, new):
                return True
        return False

    return solve([((initial,), None)], {})
