"""Partial-observation games, strategy classes and the stuttering reductions.

Player 1 sees only ``obs[s]``.  The reductions turn the question "is there
a finite-memory almost-sure winning collapsed-stutter-invariant strategy"
into the same question for plain observation-based strategies, which
:func:`bounded_memory_search` answers up to a memory bound.
"""
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import logging

from .core import CompSynthError
from .games import (Mdp, StochasticGame, StrategyTransducer, almost_sure_parity, apply_strategy,
                    mdp_almost_sure_parity)

logger = logging.getLogger(__name__)

BOTTOM = "⊥"
STALL = "♯"
#: player-2 action leaving a barred state when the game has no player-2 actions
GO = "go"


class ContainsBottom(CompSynthError):
    pass


class BoundTooLargeForEnumeration(CompSynthError):
    pass


class StrategyClass(Enum):
    OBSERVATION_BASED = "observation-based"
    STUTTER_INVARIANT = "stutter-invariant"
    COLLAPSED_STUTTER_INVARIANT = "collapsed-stutter-invariant"


@dataclass(frozen=True)
class ObservedGame:
    game: StochasticGame
    obs: dict
    initial: object

    @property
    def observations(self):
        out = {}
        for s in self.game.owner:
            out.setdefault(self.obs[s], None)
        return tuple(out)


def validate_observed(og):
    report = []
    missing = [s for s in og.game.owner if s not in og.obs]
    if missing:
        report.append("observation missing for %r" % (missing,))
    if og.initial not in og.game.owner:
        report.append("initial state %r unknown" % (og.initial,))
    return report


def collapse(play, og):
    """Observation sequence of ``play`` with consecutive repetitions merged."""
    out = []
    for s in play:
        o = og.obs[s]
        if not out or out[-1] != o:
            out.append(o)
    return tuple(out)


# ---------------------------------------------------------------------------
# reductions

@dataclass(frozen=True)
class Barred:
    """Stored-action tag ``x̄`` of a state where player 2 may linger."""
    x: object

    def __repr__(self):
        return "bar(%r)" % (self.x,)


def _reduce(og, alpha, stall):
    g = og.game
    alpha = g.priority if alpha is None else alpha
    a1 = g.alphabet(1)
    a2 = g.alphabet(2) or (GO,)
    tags = list(a1) + [None]
    # barred states carry priority 0 and must be the least significant even
    # priority, so the original ones move below it by an even offset
    top = max(alpha.values(), default=0)
    shift = top + 2 - top % 2
    obs_of = {s: og.obs[s] for s in g.owner}

    def tag_after(s, t, x):
        return Barred(x) if obs_of[t] == obs_of[s] else Barred(None)

    owner, actions, priority, obs = {}, {}, {}, {}
    for s in g.owner:
        for x in tags:
            node = (s, x)
            owner[node] = g.owner[s]
            priority[node] = alpha[s] - shift
            obs[node] = obs_of[s]
            acts = {}
            for a, dist in g.actions[s].items():
                if g.owner[s] == 1 and x is not None and a != x:
                    acts[a] = {BOTTOM: Fraction(1)}
                    continue
                keep = a if g.owner[s] == 1 else x
                out = {}
                for t, p in dist.items():
                    nxt = (t, tag_after(s, t, keep))
                    out[nxt] = out.get(nxt, 0) + p
                acts[a] = out
            actions[node] = acts
        for x in tags:
            node = (s, Barred(x))
            owner[node] = 2
            priority[node] = 0
            obs[node] = obs_of[s]
            acts = {a: {(s, x): Fraction(1)} for a in a2}
            if stall:
                acts[STALL] = {node: Fraction(1)}
            actions[node] = acts
    fresh = BOTTOM
    while fresh in set(obs_of.values()):
        fresh += "'"
    owner[BOTTOM] = 1
    actions[BOTTOM] = {a: {BOTTOM: Fraction(1)} for a in (a1 or ("-",))}
    priority[BOTTOM] = 1
    obs[BOTTOM] = fresh
    game = StochasticGame(owner, actions, priority)
    return ObservedGame(game, obs, (og.initial, Barred(None)))


def reduce_collapsed(og, alpha=None):
    """Observation-based game equivalent to collapsed-stutter-invariant play.

    States ``(s, a)`` remember the action player 1 must repeat while the
    observation stays the same (``None`` stands for "no stored action");
    after every move the play enters a barred copy ``(s, Barred(x))`` where
    player 2 may stall with :data:`STALL` for as long as it likes.
    Playing anything but the stored action leads to :data:`BOTTOM`.

    Barred states have priority 0 and :data:`BOTTOM` priority 1.  With the
    least recurring priority deciding the winner, 0 may only win when the
    play stays barred forever, so unbarred copies get ``alpha(s) - shift``
    for the least even ``shift`` above every original priority.  This keeps
    the parity of every play that leaves barred states infinitely often.
    """
    return _reduce(og, alpha, stall=True)


def reduce_stutter(og, alpha=None):
    """Like :func:`reduce_collapsed` but barred states cannot be stalled in."""
    return _reduce(og, alpha, stall=False)


def lower_bound_gadget(og):
    """Route every transition through a dummy state with a fresh observation.

    One dummy per target state; its priority is the target's, so the
    minimal recurring priority is unchanged, and consecutive observations
    of any play differ.
    """
    g = og.game
    fresh = "•"
    while fresh in set(og.obs.values()):
        fresh += "'"
    owner, actions, priority, obs = dict(g.owner), {}, dict(g.priority), dict(og.obs)
    for s, acts in g.actions.items():
        actions[s] = {a: {("via", t): p for t, p in dist.items()} for a, dist in acts.items()}
    for t in g.owner:
        d = ("via", t)
        owner[d] = 2
        actions[d] = {"-": {t: Fraction(1)}}
        priority[d] = g.priority[t]
        obs[d] = fresh
    return ObservedGame(StochasticGame(owner, actions, priority), obs, og.initial)


def project_play(play):
    """Map a play of a reduced game back to the original game."""
    out = []
    for node in play:
        if node == BOTTOM:
            raise ContainsBottom("play reaches the losing sink")
        s, x = node
        if isinstance(x, Barred):
            continue
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# strategy classes

def classify_strategy(sigma, og):
    """Strategy classes ``sigma`` belongs to, decided on pairs of histories.

    Each class is a condition "equivalent histories ending in player-1
    states get the same action".  Histories follow the game's moves (any
    action, any successor of positive probability) from the initial
    state; the check explores the finite product of two copies of game
    and transducer reading equivalent histories.
    """
    moves = _Moves(sigma, og)
    out = set()
    if _pairs_agree(moves, og, stutter=False):
        out.add(StrategyClass.OBSERVATION_BASED)
        if _stutter_ok(moves, og):
            out.add(StrategyClass.STUTTER_INVARIANT)
    if _pairs_agree(moves, og, stutter=True):
        out.add(StrategyClass.COLLAPSED_STUTTER_INVARIANT)
    return out


class _Moves:
    """``(s, m) -> [(t, m')]``: one game move and the memory after reading ``t``."""

    def __init__(self, sigma, og):
        self.sigma = sigma
        self.succ = {}
        for s, acts in og.game.actions.items():
            out = []
            for dist in acts.values():
                for t in dist:
                    if t not in out:
                        out.append(t)
            self.succ[s] = out
        self.cache = {}

    def __call__(self, s, m):
        key = (s, m)
        if key not in self.cache:
            self.cache[key] = [(t, self.sigma.step(m, t)) for t in self.succ[s]]
        return self.cache[key]


def _pairs_agree(moves, og, stutter):
    """Histories with equal observation sequences (or equal collapses when
    ``stutter``) ending in player-1 states must get equal actions.

    A configuration ``(s1, m1, s2, m2)`` holds the last state and memory of
    each history; both last states carry the same observation.
    """
    nxt = moves.sigma.next_action
    owner, obs = og.game.owner, og.obs
    start = (og.initial, moves.sigma.start(og.initial))
    seen = {start + start}
    todo = deque(seen)

    def push(cfg):
        if cfg not in seen:
            seen.add(cfg)
            todo.append(cfg)

    while todo:
        s1, m1, s2, m2 = todo.popleft()
        if owner[s1] == 1 and owner[s2] == 1 and nxt.get(m1) != nxt.get(m2):
            return False
        step1, step2 = moves(s1, m1), moves(s2, m2)
        for t1, n1 in step1:
            for t2, n2 in step2:
                if obs[t1] == obs[t2]:
                    push((t1, n1, t2, n2))
        if stutter:
            o = obs[s1]
            for t1, n1 in step1:
                if obs[t1] == o:
                    push((t1, n1, s2, m2))
            for t2, n2 in step2:
                if obs[t2] == o:
                    push((s1, m1, t2, n2))
    return True


def _stutter_ok(moves, og):
    """A player-1 move to a player-1 state with the same observation keeps the action."""
    nxt = moves.sigma.next_action
    owner, obs = og.game.owner, og.obs
    start = (og.initial, moves.sigma.start(og.initial))
    seen = {start}
    todo = deque(seen)
    while todo:
        s, m = todo.popleft()
        for t, n in moves(s, m):
            if (owner[s] == 1 and owner[t] == 1 and obs[s] == obs[t]
                    and nxt.get(n) != nxt.get(m)):
                return False
            if (t, n) not in seen:
                seen.add((t, n))
                todo.append((t, n))
    return True


# ---------------------------------------------------------------------------
# bounded-memory search

@dataclass
class SearchResult:
    """Outcome of :func:`bounded_memory_search`.

    ``strategy`` is ``None`` when no observation-based strategy with at
    most ``memory_bound`` cells wins; this says nothing about larger
    memories.
    """
    strategy: StrategyTransducer
    memory_bound: int
    nodes: int
    complete_up_to_bound: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def found(self):
        return self.strategy is not None


DEFAULT_NODE_LIMIT = 2_000_000


def bounded_memory_search(og, mem_bound, node_limit=DEFAULT_NODE_LIMIT):
    """First almost-sure winning observation-based strategy with small memory.

    Transducers have cells ``0..n-1`` (``n <= mem_bound``), start in cell 0
    and update on observations.  Tables are filled lazily, only where the
    product with the game reaches, in a fixed order; fresh cells are
    numbered in order of first use, so each transducer is met once up to
    renaming.  A partial table is pruned when player 1 fails to win
    almost surely even if every unexplored product state were a win.
    """
    if mem_bound < 1:
        raise ValueError("memory bound must be at least 1")
    g = og.game
    obs = og.obs
    p1_actions = g.alphabet(1)
    search = _Search(g, obs, og.initial, mem_bound, node_limit)
    found = search.run()
    result = SearchResult(None, mem_bound, search.nodes,
                          meta={"settled_states": len(search.settled),
                                "lost_states": len(search.hopeless)})
    if found is not None:
        update, nxt, used = found
        cells = tuple(range(used))
        full_update = {(m, o): update.get((m, o), m) for m in cells for o in og.observations}
        default = p1_actions[0] if p1_actions else None
        full_next = {m: nxt.get(m, default) for m in cells}
        sigma = StrategyTransducer(cells, 0, full_update, full_next, dict(obs))
        win, _ = mdp_almost_sure_parity(apply_strategy(g, sigma, initial=og.initial))
        if (og.initial, sigma.start(og.initial)) not in win:
            raise RuntimeError("search returned a strategy that does not win almost surely")
        result.strategy = sigma
    return result


def _settled(g):
    """States from which player 1's choices no longer matter.

    A player-1 state matters unless it enables every player-1 action with
    one common distribution; settled states reach no state that matters,
    so the product there needs no memory.
    """
    everything = set(g.alphabet(1))
    matters = set()
    for s in g.player_states(1):
        dists = list(g.actions[s].values())
        if set(g.actions[s]) != everything or any(d != dists[0] for d in dists):
            matters.add(s)
    preds = {}
    for s, acts in g.actions.items():
        for dist in acts.values():
            for t in dist:
                preds.setdefault(t, set()).add(s)
    todo = list(matters)
    while todo:
        t = todo.pop()
        for s in preds.get(t, ()):
            if s not in matters:
                matters.add(s)
                todo.append(s)
    return set(g.owner) - matters


def _settled_wins(g, settled):
    """Settled states won almost surely (player 1's choice is immaterial)."""
    acts = {}
    for s in settled:
        acts[s] = g.actions[s] if g.owner[s] == 2 else dict([next(iter(g.actions[s].items()))])
    win, _ = mdp_almost_sure_parity(Mdp(acts, {s: g.priority[s] for s in settled}, 2))
    return win


def _has_cycle(actions):
    """Cycle among product states with memory (settled ones are solved)."""
    color = {}
    for root in actions:
        if root[1] is None or root in color:
            continue
        color[root] = 1
        stack = [(root, iter([t for d in actions[root].values() for t in d]))]
        while stack:
            node, it = stack[-1]
            for t in it:
                if t[1] is None or t not in actions:
                    continue
                c = color.get(t)
                if c == 1:
                    return True
                if c is None:
                    color[t] = 1
                    stack.append((t, iter([u for d in actions[t].values() for u in d])))
                    break
            else:
                color[node] = 2
                stack.pop()
    return False


class _Search:
    """DFS over partial transducer tables on an integer copy of the game.

    Only supports matter for almost-sure analysis, so probabilities are
    replaced by 1 in the product.
    """

    def __init__(self, g, obs, initial, bound, node_limit):
        self.bound, self.node_limit = bound, node_limit
        self.nodes = 0
        states = list(g.owner)
        num = {s: i for i, s in enumerate(states)}
        obs_num = {}
        for s in states:
            obs_num.setdefault(obs[s], len(obs_num))
        self.obs_values = list(obs_num)
        self.obs = [obs_num[obs[s]] for s in states]
        self.p1 = [g.owner[s] == 1 for s in states]
        self.priority = [g.priority[s] for s in states]
        self.succ = [{a: tuple(num[t] for t in dist) for a, dist in g.actions[s].items()}
                     for s in states]
        self.initial = num[initial]
        low = min(self.priority)
        # unexplored product states are scored as wins, with the most significant even priority
        self.best_even = low - low % 2
        settled = _settled(g)
        self.settled = {num[s] for s in settled}
        self.lost = {num[s] for s in settled - _settled_wins(g, settled)}
        # a state player 1 loses even seeing everything is lost here too
        try:
            full, _ = almost_sure_parity(g)
            self.hopeless = {num[s] for s in states if s not in full}
        except RuntimeError:
            self.hopeless = set(self.lost)

    def run(self):
        found = self._dfs({}, {}, 1)
        if found is None:
            return None
        update, nxt, used = found
        return {(m, self.obs_values[o]): v for (m, o), v in update.items()}, nxt, used

    def _explore(self, update, nxt):
        """Reachable product under partial tables.

        Returns ``(explored, frontier, need)`` where ``need`` is the first
        missing table entry in BFS order, or ``("dead",)`` when a fixed
        action is disabled or a settled losing state is reachable.
        """
        obs, succ, settled = self.obs, self.succ, self.settled
        dead = None, None, ("dead",)
        if self.initial in self.hopeless:
            return dead
        key = (0, obs[self.initial])
        if key not in update:
            return None, None, ("update", key, None)
        start = (self.initial, None if self.initial in settled else update[key])
        order = [start]
        seen = {start}
        actions = {}
        frontier = []
        need = None
        for node in order:
            s, m = node
            if m is None:
                chosen = succ[s] if not self.p1[s] else dict([next(iter(succ[s].items()))])
                lifted = {}
                for a, ts in chosen.items():
                    lifted[a] = out = {}
                    for t in ts:
                        child = (t, None)
                        out[child] = 1
                        if child not in seen:
                            seen.add(child)
                            order.append(child)
                actions[node] = lifted
                continue
            if self.p1[s]:
                if m not in nxt:
                    frontier.append(node)
                    if need is None:
                        need = ("next", m, s)
                    continue
                a = nxt[m]
                if a not in succ[s]:
                    return dead
                chosen = {a: succ[s][a]}
            else:
                chosen = succ[s]
            lifted = {}
            missing = False
            for a, ts in chosen.items():
                lifted[a] = out = {}
                for t in ts:
                    if t in self.hopeless:
                        return dead
                    if t in settled:
                        child = (t, None)
                    else:
                        k = (m, obs[t])
                        if k not in update:
                            missing = True
                            if need is None:
                                need = ("update", k, None)
                            continue
                        child = (t, update[k])
                    out[child] = 1
                    if child not in seen:
                        seen.add(child)
                        order.append(child)
            if missing:
                frontier.append(node)
                continue
            actions[node] = lifted
        return (start, order, actions), frontier, need

    def _wins(self, explored, frontier):
        start, order, actions = explored
        if not _has_cycle(actions):
            # every play ends in a settled winning state or the frontier
            return True
        priority = {node: self.priority[node[0]] for node in order}
        for node in frontier:
            actions[node] = {"frontier": {node: 1}}
            priority[node] = self.best_even
        win, _ = mdp_almost_sure_parity(Mdp(actions, priority, 2))
        return start in win

    def _dfs(self, update, nxt, used):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise BoundTooLargeForEnumeration(
                "search exceeded %d nodes at memory bound %d" % (self.node_limit, self.bound))
        explored, frontier, need = self._explore(update, nxt)
        if need == ("dead",):
            return None
        if explored is not None and not self._wins(explored, frontier):
            return None
        if need is None:
            return dict(update), dict(nxt), used
        kind, k, s = need
        if kind == "update":
            for m2 in range(min(used + 1, self.bound)):
                update[k] = m2
                res = self._dfs(update, nxt, max(used, m2 + 1))
                if res is not None:
                    return res
            del update[k]
        else:
            for a in self.succ[s]:
                nxt[k] = a
                res = self._dfs(update, nxt, used)
                if res is not None:
                    return res
            del nxt[k]
        return None


def separating_example():
    """Small game where stutter-invariant play wins but collapsed play cannot.

    Player 1 must count how often the observation ``oA`` has been seen
    (twice along ``s2 s6``, four times along ``s1 s3 s5``) to steer into
    the winning sink ``s7``; collapsing repeated observations erases that
    count.
    """
    p1 = ("s1", "s2", "s3", "s5", "s6")
    edges = {
        "s0": {"a": "s2", "b": "s1"},
        "s1": {"a": "s3", "b": "s3"},
        "s2": {"b": "s4", "a": "s6"},
        "s3": {"a": "s5", "b": "s7"},
        "s6": {"a": "s4", "b": "s7"},
        "s5": {"b": "s4", "a": "s7"},
        "s4": {"a": "s4", "b": "s4"},
        "s7": {"a": "s7", "b": "s7"},
    }
    owner = {s: 1 if s in p1 else 2 for s in edges}
    actions = {s: {a: {t: Fraction(1)} for a, t in out.items()} for s, out in edges.items()}
    priority = {s: 0 if s == "s7" else 1 for s in edges}
    obs = {"s0": "o0", "s1": "oA", "s2": "oA", "s3": "oA", "s5": "oB", "s6": "oB",
           "s4": "o4", "s7": "o7"}
    return ObservedGame(StochasticGame(owner, actions, priority), obs, "s0")
