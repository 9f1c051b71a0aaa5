"""Perfect-information stochastic parity games and MDPs, solved exactly.

Conventions: player 1 wants the minimal priority seen infinitely often to be
even, player 2 wants it odd.  An :class:`Mdp` is a game in which only one
player (its ``controller``) has choices; every solver returns values and
witnesses for the parity objective of player 1.
"""
from dataclasses import dataclass
from fractions import Fraction
from collections import deque
import itertools
import logging


from .core import CompSynthError, distribution_problems
from .linalg import solve_sparse
from .parity import gadget_solution

logger = logging.getLogger(__name__)

ONE = Fraction(1)
ZERO = Fraction(0)


class DisabledAction(CompSynthError):
    pass


@dataclass(frozen=True)
class StochasticGame:
    """Turn-based stochastic game.

    ``owner[s]`` is 1 or 2; ``actions[s][a]`` is the successor distribution
    of action ``a`` at ``s`` (only enabled actions appear); ``priority[s]``
    is the index function.  Iteration order of the dicts is the
    deterministic order used for tie-breaking everywhere.
    """
    owner: dict
    actions: dict
    priority: dict

    @property
    def states(self):
        return tuple(self.owner)

    def player_states(self, player):
        return [s for s, p in self.owner.items() if p == player]

    def alphabet(self, player):
        out = {}
        for s in self.player_states(player):
            for a in self.actions[s]:
                out.setdefault(a, None)
        return tuple(out)

    def is_deterministic(self):
        return all(len(d) == 1 for acts in self.actions.values() for d in acts.values())


def validate_game(g):
    report = []
    for s in g.owner:
        if g.owner[s] not in (1, 2):
            report.append("state %r has owner %r" % (s, g.owner[s]))
        if s not in g.priority:
            report.append("state %r has no priority" % (s,))
        acts = g.actions.get(s)
        if not acts:
            report.append("state %r has no enabled action" % (s,))
            continue
        for a, dist in acts.items():
            for t in dist:
                if t not in g.owner:
                    report.append("(%r, %r) leads to unknown state %r" % (s, a, t))
            report += ["%s at (%r, %r)" % (m, s, a) for m in distribution_problems(dist)]
    if set(g.actions) - set(g.owner):
        report.append("actions given for unknown states")
    return report


@dataclass(frozen=True)
class Mdp:
    """Markov decision process; ``controller`` 1 maximizes, 2 minimizes."""
    actions: dict
    priority: dict
    controller: int = 2

    @property
    def states(self):
        return tuple(self.actions)


@dataclass(frozen=True)
class StrategyTransducer:
    """Finite-memory strategy ``<Mem, m0, update, next>``.

    The memory is updated on every visited state, ``m' = update(m, s)``,
    and the action at a player-1 state is ``next(m')``.  When
    ``observation`` is given the update table is keyed by
    ``(m, observation[s])`` instead of ``(m, s)``.
    """
    memory: tuple
    initial: object
    update: dict
    next_action: dict
    observation: dict = None

    def step(self, m, s):
        if self.observation is not None:
            return self.update[(m, self.observation[s])]
        return self.update[(m, s)]

    def start(self, s):
        return self.step(self.initial, s)


def memoryless_transducer(sigma, states):
    """Encode a memoryless strategy as a transducer whose memory is the last state."""
    states = tuple(states)
    start = ("start",)
    memory = (start,) + states
    update = {(m, s): s for m in memory for s in states}
    return StrategyTransducer(memory, start, update, {s: sigma[s] for s in states if s in sigma})


# ---------------------------------------------------------------------------
# graph primitives

def _support(actions, s, a):
    return actions[s][a].keys()


def strongly_connected_components(succ):
    """Iterative Tarjan over ``succ: node -> iterable of nodes`` (all keys)."""
    index, low, on_stack = {}, {}, set()
    stack, out = [], []
    counter = 0
    for root in succ:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ[root]))]
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    if low[v] < low[u]:
                        low[u] = low[v]
                if low[v] == index[v]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.add(w)
                        if w == v:
                            break
                    out.append(comp)
    return out


def end_components(actions, states=None):
    """Maximal end components of the sub-MDP induced by ``states``.

    Returns a list of ``(frozenset_of_states, {state: [actions]})`` where
    every listed action keeps the play inside the component.
    """
    current = set(actions if states is None else states)
    avail = {s: [a for a in actions[s] if all(t in current for t in actions[s][a])]
             for s in current}
    while True:
        changed = True
        while changed:
            changed = False
            for s in list(current):
                if not avail[s]:
                    current.discard(s)
                    del avail[s]
                    changed = True
            if changed:
                for s in current:
                    keep = [a for a in avail[s] if all(t in current for t in actions[s][a])]
                    if len(keep) != len(avail[s]):
                        avail[s] = keep
        succ = {s: {t for a in avail[s] for t in actions[s][a]} for s in current}
        comp_of = {}
        comps = []
        for k, comp in enumerate(strongly_connected_components(succ)):
            comps.append(comp)
            for s in comp:
                comp_of[s] = k
        refined = False
        for s in current:
            keep = [a for a in avail[s] if all(comp_of[t] == comp_of[s] for t in actions[s][a])]
            if len(keep) != len(avail[s]):
                avail[s] = keep
                refined = True
        if not refined:
            break
    order = {s: i for i, s in enumerate(actions)}
    out = []
    for comp in comps:
        members = sorted(comp, key=order.__getitem__)
        out.append((frozenset(comp), {s: avail[s] for s in members}))
    out.sort(key=lambda ec: min(order[s] for s in ec[0]))
    return out


def _winning_end_components(actions, priority, parity):
    """End components whose minimal priority has the given parity.

    For each priority ``p`` of that parity, the MECs of the sub-MDP of
    states with priority >= ``p`` that contain a priority-``p`` state.
    The union is the set the controller must reach to win.
    """
    found = []
    for p in sorted({priority[s] for s in actions}):
        if p % 2 != parity:
            continue
        sub = [s for s in actions if priority[s] >= p]
        for ec, acts in end_components(actions, sub):
            if any(priority[s] == p for s in ec):
                found.append((p, ec, acts))
    return found


def _cycling_strategy(actions, priority, ecs):
    """Stay inside winning end components, visiting their best priority."""
    choice = {}
    for p, ec, acts in ecs:
        targets = [s for s in acts if priority[s] == p]
        rank = {s: 0 for s in targets}
        local = {s: acts[s][0] for s in targets}
        frontier = list(targets)
        while frontier:
            nxt = []
            for s in acts:
                if s in rank:
                    continue
                for a in acts[s]:
                    if any(t in rank for t in actions[s][a]):
                        rank[s] = len(rank)
                        local[s] = a
                        nxt.append(s)
                        break
            frontier = nxt
        for s in acts:
            choice.setdefault(s, local[s])
    return choice


def _positive_attractor(actions, target, forcing_states=()):
    """States from which the chooser reaches ``target`` with positive probability.

    States in ``forcing_states`` belong to the opponent: there, *every*
    enabled action must hit the attractor.  Returns ``(set, choice)``.
    """
    forcing = set(forcing_states)
    attr = set(target)
    choice = {}
    changed = True
    while changed:
        changed = False
        for s in actions:
            if s in attr:
                continue
            hits = [a for a in actions[s] if any(t in attr for t in actions[s][a])]
            if s in forcing:
                ok = len(hits) == len(actions[s])
            else:
                ok = bool(hits)
            if ok:
                attr.add(s)
                choice[s] = hits[0]
                changed = True
    return attr, choice


def _almost_sure_reach(actions, target):
    """States from which the controller reaches ``target`` with probability 1."""
    zone = set(actions)
    target = set(target)
    while True:
        attr = set(target & zone)
        choice = {}
        changed = True
        while changed:
            changed = False
            for s in actions:
                if s in attr or s not in zone:
                    continue
                for a in actions[s]:
                    supp = actions[s][a]
                    if all(t in zone for t in supp) and any(t in attr for t in supp):
                        attr.add(s)
                        choice[s] = a
                        changed = True
                        break
        if attr == zone:
            return zone, choice
        zone = attr


def _first_actions(actions):
    return {s: next(iter(acts)) for s, acts in actions.items()}


def mdp_almost_sure_parity(m):
    """Graph-based qualitative analysis of an MDP with a parity objective.

    For a maximizing controller the winning set holds the states from which
    some strategy wins with probability 1 and the witness is such a
    strategy.  For a minimizing controller the winning set holds the states
    where *every* strategy yields probability 1, and the witness is a
    strategy that spoils the objective from all other states.
    """
    actions, priority = m.actions, m.priority
    if m.controller == 1:
        ecs = _winning_end_components(actions, priority, 0)
        target = set().union(*(ec for _, ec, _ in ecs)) if ecs else set()
        win, reach = _almost_sure_reach(actions, target)
    else:
        ecs = _winning_end_components(actions, priority, 1)
        bad = set().union(*(ec for _, ec, _ in ecs)) if ecs else set()
        lose, reach = _positive_attractor(actions, bad)
        win = set(actions) - lose
    witness = _first_actions(actions)
    witness.update(reach)
    witness.update(_cycling_strategy(actions, priority, ecs))
    return win, witness


# ---------------------------------------------------------------------------
# quantitative analysis

def _chain_reach(actions, policy, target):
    """Probability of reaching ``target`` in the chain fixed by ``policy``."""
    target = set(target)
    can = set(target)
    preds = {}
    for s in actions:
        for t in actions[s][policy[s]] if s not in target else ():
            preds.setdefault(t, []).append(s)
    stack = list(target)
    while stack:
        t = stack.pop()
        for s in preds.get(t, ()):
            if s not in can:
                can.add(s)
                stack.append(s)
    unknown = [s for s in actions if s in can and s not in target]
    index = {s: i for i, s in enumerate(unknown)}
    rows, rhs = [], []
    for s in unknown:
        row = {index[s]: ONE}
        b = ZERO
        for t, p in actions[s][policy[s]].items():
            if t in target:
                b += p
            elif t in index:
                row[index[t]] = row.get(index[t], ZERO) - p
        rows.append(row)
        rhs.append(b)
    sol = solve_sparse(rows, rhs, len(unknown)) if unknown else []
    values = {s: ZERO for s in actions}
    for s in target:
        values[s] = ONE
    for s, v in zip(unknown, sol):
        values[s] = v
    return values


def _q(dist, values):
    return sum((p * values[t] for t, p in dist.items()), ZERO)


def max_reach(actions, target):
    """Maximal reachability probabilities by policy iteration.

    Starts from the positive-attractor policy; switches only on strict
    improvement, preferring the earliest action among equally good ones.
    Returns ``(values, policy)``; the policy attains the values.
    """
    target = set(target)
    reach, choice = _positive_attractor(actions, target)
    policy = _first_actions(actions)
    policy.update(choice)
    while True:
        values = _chain_reach(actions, policy, target)
        changed = False
        for s in actions:
            if s in target or s not in reach:
                continue
            best_a, best_q = policy[s], values[s]
            for a, dist in actions[s].items():
                q = _q(dist, values)
                if q > best_q:
                    best_a, best_q = a, q
            if best_a != policy[s]:
                policy[s] = best_a
                changed = True
        if not changed:
            return values, policy


def mdp_parity_value(m):
    """Exact parity values of an MDP with a memoryless optimal witness.

    The controller's winning end components are computed first; the value
    is then the optimal probability of reaching them (for a minimizing
    controller: one minus its optimal probability of reaching end
    components where odd wins).
    """
    actions, priority = m.actions, m.priority
    parity = 0 if m.controller == 1 else 1
    ecs = _winning_end_components(actions, priority, parity)
    target = set().union(*(ec for _, ec, _ in ecs)) if ecs else set()
    reach, policy = max_reach(actions, target)
    if m.controller == 1:
        values = reach
    else:
        values = {s: ONE - v for s, v in reach.items()}
    witness = dict(policy)
    witness.update(_cycling_strategy(actions, priority, ecs))
    sure, _ = mdp_almost_sure_parity(m)
    if {s for s, v in values.items() if v == ONE} != sure:
        raise RuntimeError("quantitative and qualitative MDP analyses disagree")
    return values, witness


def chain_parity_values(actions, priority):
    """Parity probabilities of a Markov chain (every state has one action)."""
    for s, acts in actions.items():
        if len(acts) != 1:
            raise ValueError("state %r has %d actions; not a Markov chain" % (s, len(acts)))
    values, _ = mdp_parity_value(Mdp(actions, priority, 1))
    return values


# ---------------------------------------------------------------------------
# fixing strategies

def fix_player1(g, sigma):
    """MDP left for player 2 once player 1 plays the memoryless ``sigma``."""
    actions = {}
    for s, acts in g.actions.items():
        if g.owner[s] == 1:
            a = sigma[s]
            if a not in acts:
                raise DisabledAction("action %r not enabled at %r" % (a, s))
            actions[s] = {a: acts[a]}
        else:
            actions[s] = acts
    return Mdp(actions, g.priority, 2)


def fix_player2(g, tau):
    """MDP left for player 1 once player 2 plays the memoryless ``tau``."""
    actions = {}
    for s, acts in g.actions.items():
        if g.owner[s] == 2:
            a = tau[s]
            if a not in acts:
                raise DisabledAction("action %r not enabled at %r" % (a, s))
            actions[s] = {a: acts[a]}
        else:
            actions[s] = acts
    return Mdp(actions, g.priority, 1)


def apply_strategy(g, sigma, initial=None):
    """Product of ``g`` with a player-1 strategy, as a player-2 MDP.

    ``sigma`` is a :class:`StrategyTransducer` or a memoryless dict.  A dict
    yields an MDP over the states of ``g``; a transducer yields one over
    pairs ``(s, m)`` where ``m`` is the memory after reading ``s``.  With
    ``initial`` only the part reachable from that game state is built,
    otherwise the full product ``S x Mem``.
    """
    if not isinstance(sigma, StrategyTransducer):
        return fix_player1(g, sigma)
    if initial is None:
        todo = deque((s, m) for s in g.owner for m in sigma.memory)
    else:
        todo = deque([(initial, sigma.start(initial))])
    seen = set(todo)
    actions = {}
    priority = {}
    while todo:
        node = todo.popleft()
        s, m = node
        priority[node] = g.priority[s]
        if g.owner[s] == 1:
            a = sigma.next_action.get(m)
            if a not in g.actions[s]:
                raise DisabledAction("strategy plays %r at %r (memory %r); not enabled"
                                     % (a, s, m))
            chosen = {a: g.actions[s][a]}
        else:
            chosen = g.actions[s]
        lifted = {}
        for a, dist in chosen.items():
            out = {}
            for t, p in dist.items():
                nxt = (t, sigma.step(m, t))
                out[nxt] = out.get(nxt, ZERO) + p
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
            lifted[a] = out
        actions[node] = lifted
    return Mdp(actions, priority, 2)


def _restrict(choice, states):
    return {s: choice[s] for s in states}


# ---------------------------------------------------------------------------
# qualitative games

#: above this many candidate strategies the exhaustive fallback refuses to run
ENUMERATION_LIMIT = 200000


def _strategies(g, player, base, free):
    """All memoryless strategies agreeing with ``base`` outside ``free``."""
    free = [s for s in g.player_states(player) if s in free]
    for combo in itertools.product(*(list(g.actions[s]) for s in free)):
        sigma = dict(base)
        sigma.update(zip(free, combo))
        yield sigma


def _count(g, free):
    n = 1
    for s in free:
        n *= len(g.actions[s])
    return n


def _sure_against(g, sigma):
    win, spoiler = mdp_almost_sure_parity(fix_player1(g, sigma))
    return win, _restrict(spoiler, g.player_states(2))


def almost_sure_parity(g):
    """Almost-sure winning set of player 1 with a memoryless witness.

    A candidate ``(W, sigma, tau)`` is first read off a deterministic parity
    game (:func:`parity.gadget_solution`).  It is accepted when ``sigma``
    wins almost surely exactly on ``W`` and player 1 wins almost surely
    against ``tau`` nowhere else.  Otherwise strategy improvement takes
    over: the current ``sigma`` wins a set ``W`` closed under ``sigma``, a
    candidate is accepted only if it wins a strict superset, and the same
    two-sided certificate ends the search.
    """
    p1 = g.player_states(1)
    guess, sigma, tau = gadget_solution(g)
    win, spoiler = _sure_against(g, sigma)
    if win == guess:
        best, _ = mdp_almost_sure_parity(fix_player2(g, tau))
        if best == win:
            return win, sigma
    logger.info("parity-game proposal not certified; running strategy improvement")
    spoilers = [tau, spoiler]
    while True:
        certified = False
        for t in spoilers:
            best, response = mdp_almost_sure_parity(fix_player2(g, t))
            if best == win:
                certified = True
                break
        if certified:
            return win, sigma
        spoilers = spoilers[-1:]
        improved = None
        candidates = []
        hybrid = dict(sigma)
        hybrid.update({s: response[s] for s in p1 if s not in win})
        candidates.append(hybrid)
        for s in p1:
            if s in win:
                continue
            for a in g.actions[s]:
                if a != sigma[s]:
                    cand = dict(sigma)
                    cand[s] = a
                    candidates.append(cand)
        for cand in candidates:
            w, t = _sure_against(g, cand)
            spoilers.append(t)
            if w > win:
                improved = (cand, w, t)
                break
        if improved is None:
            improved = _enumerate_sure(g, sigma, win)
        if improved is None:
            return win, sigma
        sigma, win, tau = improved
        spoilers = [tau]


def _enumerate_sure(g, sigma, win):
    free = [s for s in g.player_states(1) if s not in win]
    n = _count(g, free)
    if n > ENUMERATION_LIMIT:
        raise RuntimeError("almost-sure solver could not certify and %d strategies "
                           "exceed the enumeration limit" % n)
    logger.info("almost-sure solver: enumerating %d strategies", n)
    for cand in _strategies(g, 1, sigma, free):
        w, t = _sure_against(g, cand)
        if w > win:
            return cand, w, t
    return None


# ---------------------------------------------------------------------------
# quantitative games

def _value_against(g, sigma):
    values, spoiler = mdp_parity_value(fix_player1(g, sigma))
    return values, _restrict(spoiler, g.player_states(2))


def _dominates(new, old):
    return all(new[s] >= old[s] for s in old) and new != old


def _improve_values(g, sigma):
    """Improve ``sigma`` to a memoryless optimum; also return a best response.

    The flag says whether that response already certifies the optimum
    (player 1 gains nothing against it).
    """
    values, tau = _value_against(g, sigma)
    while True:
        upper, response = mdp_parity_value(fix_player2(g, tau))
        if upper == values:
            return values, sigma, tau, True
        found = None
        for cand in _value_candidates(g, sigma, values, upper, response):
            v, t = _value_against(g, cand)
            if _dominates(v, values):
                found = (cand, v, t)
                break
        if found is None:
            found = _enumerate_values(g, sigma, values)
        if found is None:
            return values, sigma, tau, False
        sigma, values, tau = found


def dual_game(g):
    """Same arena with the players swapped and every priority moved up by one."""
    return StochasticGame({s: 3 - p for s, p in g.owner.items()}, g.actions,
                          {s: p + 1 for s, p in g.priority.items()})


def parity_value(g):
    """Exact values with memoryless optimal strategies for both players.

    Returns ``(values, sigma, tau)``.  Player 1's strategy is improved until
    no memoryless strategy dominates it.  A best response to it is not
    always optimal for player 2, so when it leaves player 1 room to gain,
    ``tau`` comes from the same procedure run on the dual game.  The pair
    is then checked to be a saddle point.
    """
    sure, sigma = almost_sure_parity(g)
    values, sigma, tau, certified = _improve_values(g, sigma)
    if not certified:
        dual = dual_game(g)
        _, start = almost_sure_parity(dual)
        dual_values, tau, _, _ = _improve_values(dual, start)
        if any(dual_values[s] != ONE - v for s, v in values.items()):
            raise RuntimeError("game and dual game values do not sum to one")
        upper, _ = mdp_parity_value(fix_player2(g, tau))
        if upper != values:
            raise RuntimeError("dual strategy does not hold player 1 to the value")
    if {s for s, v in values.items() if v == ONE} != sure:
        raise RuntimeError("value-1 states disagree with the almost-sure solver")
    check = chain_parity_values(fix_player2(fix_player1_game(g, sigma), tau).actions,
                                g.priority)
    if check != values:
        raise RuntimeError("strategy pair does not reproduce the reported values")
    return values, sigma, tau


def fix_player1_game(g, sigma):
    """``g`` with player 1's choices pruned to ``sigma`` (still a game)."""
    actions = dict(g.actions)
    for s in g.player_states(1):
        actions[s] = {sigma[s]: g.actions[s][sigma[s]]}
    return StochasticGame(g.owner, actions, g.priority)


def _value_candidates(g, sigma, values, upper, response):
    p1 = g.player_states(1)
    switch = dict(sigma)
    profitable = []
    for s in p1:
        best_a, best_q = sigma[s], values[s]
        for a, dist in g.actions[s].items():
            q = _q(dist, values)
            if q > best_q:
                best_a, best_q = a, q
        if best_a != sigma[s]:
            switch[s] = best_a
            profitable.append((s, best_a))
    if profitable:
        yield switch
    hybrid = dict(sigma)
    hybrid.update({s: response[s] for s in p1 if upper[s] > values[s]})
    yield hybrid
    for s, a in profitable:
        cand = dict(sigma)
        cand[s] = a
        yield cand
    for s in p1:
        for a in g.actions[s]:
            if a != sigma[s]:
                cand = dict(sigma)
                cand[s] = a
                yield cand


def _enumerate_values(g, sigma, values):
    p1 = g.player_states(1)
    n = _count(g, p1)
    if n > ENUMERATION_LIMIT:
        raise RuntimeError("value solver could not certify and %d strategies "
                           "exceed the enumeration limit" % n)
    logger.info("value solver: enumerating %d strategies", n)
    for cand in _strategies(g, 1, sigma, p1):
        v, t = _value_against(g, cand)
        if _dominates(v, values):
            return cand, v, t
    return None
