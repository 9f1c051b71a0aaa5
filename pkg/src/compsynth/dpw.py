"""Qualitative synthesis against a deterministic parity word monitor.

The library game is multiplied with the monitor.  Player 1 may not see the
monitor state: it observes the component it is in and, at exits, which
exit was taken.  Composers are exactly the collapsed-stutter-invariant
strategies of that game, so the search runs on :func:`pos.reduce_collapsed`
and the winner is turned back into a composer.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .core import (DPW, AlphabetMismatch, CompSynthError, Component, Composer, Library,
                   validate_dpw, validate_library)
from .composition import compose, value_dpw
from .embedded import SynthesisResult
from .games import StochasticGame, StrategyTransducer
from .pos import (DEFAULT_NODE_LIMIT, BoundTooLargeForEnumeration, ObservedGame,
                  StrategyClass, bounded_memory_search, classify_strategy, reduce_collapsed)


class NotCollapsedStutterInvariant(CompSynthError):
    pass


@dataclass(frozen=True)
class DpwProblem:
    library: Library
    monitor: DPW
    mem_bound: int = 2


def validate_problem(p):
    report = validate_library(p.library) + validate_dpw(p.monitor)
    if set(p.library.outputs) - set(p.monitor.alphabet):
        report.append("library outputs %r are not monitor letters"
                      % sorted(map(str, set(p.library.outputs) - set(p.monitor.alphabet))))
    if p.mem_bound < 1:
        report.append("memory bound must be at least 1")
    return report


def observation(lib, q, i):
    """Component index inside a component, ``(q, i)`` at its exits."""
    return (q, i) if q in lib[i].exits.values() else i


def build_product_game(p):
    """Product of the library game with the monitor, from component 0.

    State ``(q, i, r)`` is state ``q`` of component ``i`` with monitor
    state ``r`` not yet advanced by the label of ``q``; every move, letter
    or component choice, advances it by that label.
    """
    lib, a = p.library, p.monitor
    alphabet = set(a.alphabet)
    k = len(lib)
    start = (lib[0].initial, 0, a.initial)
    owner, actions, priority, obs = {}, {}, {}, {}
    todo = [start]
    seen = {start}
    while todo:
        s = todo.pop()
        q, i, r = s
        comp = lib[i]
        letter = comp.labels[q]
        if letter not in alphabet:
            raise AlphabetMismatch("output %r of component %d is not a monitor letter" % (letter, i))
        r2 = a.delta[(r, letter)]
        priority[s] = a.priority[r]
        obs[s] = observation(lib, q, i)
        if q in comp.exits.values():
            owner[s] = 1
            acts = {j: {(lib[j].initial, j, r2): Fraction(1)} for j in range(k)}
        else:
            owner[s] = 2
            acts = {x: {(t, i, r2): pr for t, pr in comp.delta[(q, x)].items()}
                    for x in lib.inputs}
        actions[s] = acts
        for dist in acts.values():
            for t in dist:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    return ObservedGame(StochasticGame(owner, actions, priority), obs, start)


def _idempotent_power(f, cells):
    """``N >= 2`` such that applying ``f`` ``N`` times is idempotent."""
    period = 1
    for x in cells:
        path = {}
        y = x
        while y not in path:
            path[y] = len(path)
            y = f(y)
        period = lcm(period, len(path) - path[y])
    n = max(2, len(cells))
    return period * -(-n // period)


def stutter_free_strategy(sigma, game):
    """Collapsed-stutter-invariant strategy of the product from a winner of its reduction.

    A new observation ``o`` moves the memory ``N`` steps along ``o`` at
    once, ``N`` chosen so that the result is stable under further reads of
    ``o``: it is what ``sigma`` remembers after the opponent of the reduced
    game has repeated ``o`` often enough.  Repeated observations leave the
    memory alone.
    """
    observations = game.observations
    power = {}
    for o in observations:
        f = lambda m, o=o: sigma.update[(m, o)]
        power[o] = _idempotent_power(f, sigma.memory)

    def jump(m, o):
        for _ in range(power[o]):
            m = sigma.update[(m, o)]
        return m

    start = ("start", None)
    memory = [start]
    update = {}
    seen = {start}
    for cell in memory:
        m, last = cell
        for o in observations:
            if o == last:
                nxt = cell
            else:
                nxt = (jump(sigma.initial if cell == start else m, o), o)
            update[(cell, o)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                memory.append(nxt)
    next_action = {cell: sigma.next_action[cell[0]] for cell in memory if cell != start}
    return StrategyTransducer(tuple(memory), start, update, next_action, dict(game.obs))


def composer_from_strategy(sigma, p, game=None):
    """Composer playing as ``sigma`` does on collapsed observation histories.

    Composer states are pairs (memory, component) numbered in order of
    discovery.  A transfer reads the exit observation and then the start
    observation of the chosen component, once each.
    """
    lib = p.library
    game = build_product_game(p) if game is None else game
    if StrategyClass.COLLAPSED_STUTTER_INVARIANT not in classify_strategy(sigma, game):
        raise NotCollapsedStutterInvariant("strategy depends on repeated observations")

    def read(m, last, o):
        # observations the product never produces leave the memory alone
        return m if o == last else sigma.update.get((m, o), m)

    first = observation(lib, lib[0].initial, 0)
    initial = (read(sigma.initial, None, first), 0, first)
    number = {initial: 0}
    order = [initial]
    transfer = {}
    for node in order:
        m, i, last = node
        for d in lib.directions:
            exit_obs = (lib[i].exits[d], i)
            m_exit = read(m, last, exit_obs)
            j = sigma.next_action.get(m_exit)
            if j not in range(len(lib)):
                j = 0  # an exit the product never reaches
            o = observation(lib, lib[j].initial, j)
            nxt = (read(m_exit, exit_obs, o), j, o)
            if nxt not in number:
                number[nxt] = len(order)
                order.append(nxt)
            transfer[(number[node], d)] = number[nxt]
    states = tuple(range(len(order)))
    return Composer(states, 0, transfer, {number[n]: n[1] for n in order})


def synth_dpw_qualitative(p, node_limit=DEFAULT_NODE_LIMIT):
    """Search for a composer whose composition the monitor accepts with probability 1.

    The search is complete only up to ``p.mem_bound`` memory cells on the
    reduced game; ``result.bound`` always says how far it went, and a
    negative answer means "none within the bound".
    """
    game = build_product_game(p)
    reduced = reduce_collapsed(game)
    bound = {"memory_bound": p.mem_bound, "complete": True,
             "verdict": "not realizable within memory %d" % p.mem_bound}
    try:
        found = bounded_memory_search(reduced, p.mem_bound, node_limit)
    except BoundTooLargeForEnumeration as e:
        bound.update(complete=False, verdict="search limit reached", reason=str(e))
        return SynthesisResult(False, bound=bound)
    bound["nodes"] = found.nodes
    if not found.found:
        return SynthesisResult(False, bound=bound)
    sigma = stutter_free_strategy(found.strategy, game)
    composer = composer_from_strategy(sigma, p, game)
    check = value_dpw(compose(composer, p.library), p.monitor)
    if check != 1:
        raise RuntimeError("extracted composer has value %s, expected 1" % check)
    bound["verdict"] = "realizable"
    return SynthesisResult(True, composer, Fraction(1), {"composition_value": check}, bound)


def composer_to_product_strategy(c, p):
    """Strategy of the product game following composer ``c``.

    Memory is the composer state in control; at an exit observation it
    already switches to the transfer target, whose component is the
    action taken there.
    """
    lib = p.library
    game = build_product_game(p)
    update = {}
    for m in c.states:
        for o in game.observations:
            if isinstance(o, tuple):
                q, i = o
                d = next(d for d, x in lib[i].exits.items() if x == q)
                update[(m, o)] = c.transfer[(m, d)] if c.typing[m] == i else m
            else:
                update[(m, o)] = m
    return StrategyTransducer(tuple(c.states), c.initial, update,
                              {m: c.typing[m] for m in c.states}, dict(game.obs))


def embedded_to_dpw(lib, index):
    """Move a library index function into a monitor.

    Every component state gets the distinct output ``(i, q)``; the monitor
    remembers the last output and has that state's priority.  Its initial
    state is left after one step, so its priority is irrelevant.
    """
    outputs = tuple((i, q) for i, c in enumerate(lib.components) for q in c.states)
    comps = tuple(Component(c.inputs, outputs, c.states, c.initial, c.delta, c.exits,
                            {q: (i, q) for q in c.states}, c.name)
                  for i, c in enumerate(lib.components))
    start = "start"
    states = (start,) + outputs
    delta = {(r, x): x for r in states for x in outputs}
    priority = {x: index[x] for x in outputs}
    priority[start] = 0
    return Library(comps, lib.directions), DPW(outputs, states, start, delta, priority)
