"""Synthesis against parity conditions embedded in the components.

The library becomes a perfect-information stochastic game: the
environment (player 2) picks input letters inside components, the composer
(player 1) picks the next component at every exit.  Game state ``(q, i)``
is state ``q`` of component ``i``; :data:`BOTTOM` absorbs choices that the
exit control relation forbids.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import logging
import os

from .core import (CompSynthError, Component, Composer, ExitControlRelation, Library,
                   check_compatibility, validate_library)
from .composition import compose, value_embedded
from .games import (Mdp, StochasticGame, StrategyTransducer, almost_sure_parity,
                    mdp_almost_sure_parity, mdp_parity_value, parity_value)

logger = logging.getLogger(__name__)

BOTTOM = "⊥"
TOP = "⊤"


class InvalidStrategy(CompSynthError):
    pass


class IncompatibleComposer(CompSynthError):
    pass


class NotAlternating(CompSynthError):
    pass


@dataclass(frozen=True)
class EmbeddedProblem:
    """Library, exit control relation and index over ``(component, state)``.

    ``eta`` is ``None`` for the qualitative question (probability 1) and a
    rational threshold in (0, 1) for the quantitative one.
    """
    library: Library
    relation: ExitControlRelation
    index: dict
    eta: Fraction = None

    @classmethod
    def unrestricted(cls, lib, index, eta=None):
        return cls(lib, ExitControlRelation.unrestricted(lib), index, eta)


def validate_problem(p):
    report = validate_library(p.library)
    if not p.relation.is_nonblocking(p.library.directions):
        report.append("exit control relation is blocking")
    for d, j in p.relation.pairs:
        if d not in p.library.directions or not 0 <= j < len(p.library):
            report.append("relation pair (%r, %r) is not over the library" % (d, j))
    for i, c in enumerate(p.library.components):
        for q in c.states:
            if (i, q) not in p.index:
                report.append("index missing for state %r of component %d" % (q, i))
    if p.eta is not None and not 0 < p.eta < 1:
        report.append("threshold %s outside (0, 1)" % p.eta)
    return report


@dataclass
class SynthesisResult:
    """Outcome of a synthesis call.

    ``certificate`` records the independent verification (for example the
    value of the returned composer's composition); ``bound`` carries the
    memory bound for searches that are complete only up to it.
    """
    realizable: bool
    composer: Composer = None
    value: Fraction = None
    certificate: dict = field(default_factory=dict)
    bound: dict = None


def bottom_priority(index):
    top = max(index.values(), default=1)
    return top if top % 2 else top + 1


def start_state(lib, j=0):
    return (lib[j].initial, j)


def build_game(p):
    lib, rel = p.library, p.relation
    k = len(lib)
    owner, actions, priority = {}, {}, {}
    for i, c in enumerate(lib.components):
        exit_dir = {q: d for d, q in c.exits.items()}
        for q in c.states:
            s = (q, i)
            priority[s] = p.index[(i, q)]
            if q in exit_dir:
                d = exit_dir[q]
                owner[s] = 1
                actions[s] = {j: {start_state(lib, j) if rel.allows(d, j) else BOTTOM: Fraction(1)}
                              for j in range(k)}
            else:
                owner[s] = 2
                actions[s] = {a: {(t, i): pr for t, pr in c.delta[(q, a)].items()}
                              for a in lib.inputs}
    owner[BOTTOM] = 2
    actions[BOTTOM] = {a: {BOTTOM: Fraction(1)} for a in lib.inputs}
    priority[BOTTOM] = bottom_priority(p.index)
    return StochasticGame(owner, actions, priority)


def strategy_to_composer(sigma, p):
    """Composer with one instance per component, routing exits as ``sigma`` does."""
    lib = p.library
    transfer = {}
    for i, c in enumerate(lib.components):
        for d, q in c.exits.items():
            j = sigma[(q, i)]
            if not p.relation.allows(d, j):
                raise InvalidStrategy("exit %r of component %d chooses forbidden %r" % (d, i, j))
            transfer[(i, d)] = j
    states = tuple(range(len(lib)))
    return Composer(states, 0, transfer, {i: i for i in states})


def composer_to_strategy(c, p):
    """Finite-memory strategy whose memory is the composer state in control."""
    if not check_compatibility(c, p.relation):
        raise IncompatibleComposer("composer uses a transfer outside the exit relation")
    lib = p.library
    exit_dir = {}
    for i, comp in enumerate(lib.components):
        for d, q in comp.exits.items():
            exit_dir[(q, i)] = d
    states = list(build_game(p).owner)
    update = {}
    for m in c.states:
        for s in states:
            d = exit_dir.get(s)
            update[(m, s)] = m if d is None else c.transfer[(m, d)]
    return StrategyTransducer(tuple(c.states), c.initial, update,
                              {m: c.typing[m] for m in c.states})


def _valid_witness(sigma, p):
    """Replace forbidden exit choices (which only lead to the bottom state)."""
    out = dict(sigma)
    for i, c in enumerate(p.library.components):
        for d, q in c.exits.items():
            if not p.relation.allows(d, out[(q, i)]):
                out[(q, i)] = min(j for x, j in p.relation.pairs if x == d)
    return out


def synth_embedded(p):
    """Decide embedded parity realizability and extract a composer.

    Qualitative problems use the almost-sure solver, quantitative ones the
    exact value solver; either way the returned composer is re-checked on
    its own composition.
    """
    g = build_game(p)
    s0 = start_state(p.library)
    if p.eta is None:
        win, sigma = almost_sure_parity(g)
        if s0 not in win:
            return SynthesisResult(False, certificate={"start_in_winning_set": False})
        target = Fraction(1)
    else:
        values, sigma, _ = parity_value(g)
        target = values[s0]
        if target < p.eta:
            return SynthesisResult(False, value=target,
                                   certificate={"game_value": target})
    composer = strategy_to_composer(_valid_witness(sigma, p), p)
    check = value_embedded(compose(composer, p.library), p.index)
    if check != target:
        raise RuntimeError("composer value %s differs from game value %s" % (check, target))
    return SynthesisResult(True, composer, target,
                           {"game_value": target, "composition_value": check})


def _threads():
    try:
        return max(1, int(os.environ.get("COMPSYNTH_THREADS", "1")))
    except ValueError:
        return 1


def unrestricted_game(lib, index):
    """Game where every exit passes through one player-1 state :data:`TOP`."""
    p = EmbeddedProblem.unrestricted(lib, index)
    g = build_game(p)
    owner, actions, priority = dict(g.owner), dict(g.actions), dict(g.priority)
    for i, c in enumerate(lib.components):
        for q in c.exits.values():
            owner[(q, i)] = 2
            actions[(q, i)] = {"go": {TOP: Fraction(1)}}
    owner[TOP] = 1
    actions[TOP] = {j: {start_state(lib, j): Fraction(1)} for j in range(len(lib))}
    priority[TOP] = max(index.values(), default=0)
    return StochasticGame(owner, actions, priority)


def _solve_choice(g, j, quantitative):
    acts = dict(g.actions)
    acts[TOP] = {j: g.actions[TOP][j]}
    m = Mdp(acts, g.priority, 2)
    if quantitative:
        values, _ = mdp_parity_value(m)
        return values
    win, _ = mdp_almost_sure_parity(m)
    return {s: Fraction(1) if s in win else Fraction(0) for s in acts}


def synth_unrestricted(lib, index, eta=None):
    """Polynomial path for the unrestricted exit relation.

    Only the choice at :data:`TOP` is strategic, so the ``k`` candidate
    routings are solved as MDPs and the best one (lowest index on ties) is
    turned into a composer that sends every exit to the same component.
    """
    g = unrestricted_game(lib, index)
    s0 = start_state(lib)
    quantitative = eta is not None
    choices = range(len(lib))
    n = _threads()
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            results = list(pool.map(lambda j: _solve_choice(g, j, quantitative), choices))
    else:
        results = [_solve_choice(g, j, quantitative) for j in choices]
    best = max(choices, key=lambda j: (results[j][s0], -j))
    value = results[best][s0]
    states = (0,) if best == 0 else (0, best)
    composer = Composer(states, 0, {(m, d): best for m in states for d in lib.directions},
                        {m: m for m in states})
    realizable = value == 1 if eta is None else value >= eta
    cert = {"mdp_values": [r[s0] for r in results], "choice": best}
    if not realizable:
        return SynthesisResult(False, value=value if quantitative else None, certificate=cert)
    check = value_embedded(compose(composer, lib), index)
    if check != value:
        raise RuntimeError("composer value %s differs from MDP value %s" % (check, value))
    cert["composition_value"] = check
    return SynthesisResult(True, composer, value, cert)


def make_alternating(g):
    """Insert a dummy state of the other player on every same-owner edge.

    The dummy has a single action and copies the priority of the edge's
    source, so the minimal priority seen infinitely often is unchanged.
    """
    if not g.is_deterministic():
        raise ValueError("make_alternating expects a deterministic game")
    owner, actions, priority = dict(g.owner), {}, dict(g.priority)
    for s, acts in g.actions.items():
        new = {}
        for a, dist in acts.items():
            (t,) = dist
            if g.owner[t] == g.owner[s]:
                dummy = ("dummy", s, a)
                owner[dummy] = 3 - g.owner[s]
                actions[dummy] = {"-": {t: Fraction(1)}}
                priority[dummy] = g.priority[s]
                new[a] = {dummy: Fraction(1)}
            else:
                new[a] = dist
        actions[s] = new
    return StochasticGame(owner, actions, priority)


def is_alternating(g):
    return all(g.owner[t] != g.owner[s]
               for s, acts in g.actions.items() for d in acts.values() for t in d)


def parity_game_to_library(g, initial):
    """Encode a deterministic parity game as an embedded synthesis problem.

    One component per player-2 state (``initial`` becomes component 0) and
    one direction per player-1 state.  A component reads player 2's move
    from its start state and exits in the direction of the player-1 state
    reached; the exit relation lists player 1's moves.  Player 1 wins
    ``g`` from ``initial`` iff the problem is realizable.
    """
    if not g.is_deterministic():
        raise ValueError("parity_game_to_library expects a deterministic game")
    if not is_alternating(g):
        raise NotAlternating("every edge must change owner; see make_alternating")
    if g.owner[initial] != 2:
        raise ValueError("initial state must belong to player 2")
    p2 = [initial] + [s for s in g.player_states(2) if s != initial]
    p1 = g.player_states(1)
    comp_of = {s: i for i, s in enumerate(p2)}
    inputs = g.alphabet(2)
    names = {s: str(s) for s in g.owner}
    if len(set(names.values())) != len(names):
        names = {s: "s%d" % n for n, s in enumerate(g.owner)}
    outputs = tuple(names[s] for s in g.owner)
    directions = tuple(names[s] for s in p1)
    comps, index = [], {}
    for i, s in enumerate(p2):
        start = ("start", names[s])
        states = (start,) + tuple(("exit", names[t]) for t in p1)
        exits = {names[t]: ("exit", names[t]) for t in p1}
        enabled = g.actions[s]
        fallback = next(iter(enabled))
        delta = {}
        for a in inputs:
            (t,) = enabled.get(a, enabled[fallback])
            delta[(start, a)] = {("exit", names[t]): Fraction(1)}
        labels = {start: names[s]}
        labels.update({("exit", names[t]): names[t] for t in p1})
        comps.append(Component(inputs, outputs, states, start, delta, exits, labels,
                               "M_" + names[s]))
        index[(i, start)] = g.priority[s]
        for t in p1:
            index[(i, ("exit", names[t]))] = g.priority[t]
    pairs = frozenset((names[t], comp_of[u]) for t in p1
                      for dist in g.actions[t].values() for u in dist)
    return EmbeddedProblem(Library(tuple(comps), directions), ExitControlRelation(pairs), index)
