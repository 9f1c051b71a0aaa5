"""Seeded random instances for tests, demos and ``compsynth generate``.

Every generator takes a :class:`random.Random` so that equal seeds give
equal instances.  Probabilities use small denominators to keep exact
arithmetic cheap.
"""
from fractions import Fraction
import random

from .core import DPW, Component, Composer, Library
from .gadget import ProbabilisticAutomaton
from .games import Mdp, StochasticGame


def rng_for(seed):
    return random.Random(seed)


def random_distribution(rng, targets, max_support=2, denominators=(2, 3, 4)):
    """A distribution over a random non-empty subset of ``targets``."""
    k = rng.randint(1, min(max_support, len(targets)))
    support = rng.sample(list(targets), k)
    if k == 1:
        return {support[0]: Fraction(1)}
    den = rng.choice(denominators)
    while den < k:
        den += 1
    cuts = sorted(rng.sample(range(1, den), k - 1))
    weights = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return {t: Fraction(w, den) for t, w in zip(support, weights)}


def random_game(rng, n_states=6, n_actions=3, max_priority=3, stochastic=True,
                max_support=2):
    """Random turn-based game with states ``0..n-1`` and actions ``a0, a1, ...``."""
    states = list(range(n_states))
    owner = {s: rng.choice((1, 2)) for s in states}
    actions = {}
    for s in states:
        k = rng.randint(1, n_actions)
        acts = {}
        for j in range(k):
            if stochastic:
                acts["a%d" % j] = random_distribution(rng, states, max_support)
            else:
                acts["a%d" % j] = {rng.choice(states): Fraction(1)}
        actions[s] = acts
    priority = {s: rng.randint(0, max_priority) for s in states}
    return StochasticGame(owner, actions, priority)


def random_mdp(rng, n_states=8, n_actions=3, max_priority=3, controller=1):
    g = random_game(rng, n_states, n_actions, max_priority)
    return Mdp(g.actions, g.priority, controller)


def random_alternating_parity_game(rng, n_states=8, max_out=3, max_priority=4):
    """Deterministic game whose edges always change owner."""
    states = list(range(n_states))
    owner = {s: 1 + (s % 2) for s in states}
    if n_states == 1:
        owner[0] = 1
    actions = {}
    for s in states:
        others = [t for t in states if owner[t] != owner[s]] or [s]
        k = rng.randint(1, min(max_out, len(others)))
        targets = rng.sample(others, k)
        actions[s] = {"e%d" % j: {t: Fraction(1)} for j, t in enumerate(targets)}
    priority = {s: rng.randint(0, max_priority) for s in states}
    return StochasticGame(owner, actions, priority)


def random_component(rng, n_states, inputs, outputs, directions, name=""):
    """Component with states ``q0..`` whose last ``len(directions)`` are exits."""
    n_states = max(n_states, len(directions) + 1)
    states = tuple("q%d" % i for i in range(n_states))
    exits = {d: states[n_states - len(directions) + i] for i, d in enumerate(directions)}
    exit_set = set(exits.values())
    delta = {}
    for q in states:
        if q in exit_set:
            continue
        for a in inputs:
            delta[(q, a)] = random_distribution(rng, states)
    labels = {q: rng.choice(outputs) for q in states}
    return Component(tuple(inputs), tuple(outputs), states, states[0], delta, exits,
                     labels, name)


def random_library(rng, n_components=3, n_states=4, n_directions=2,
                   inputs=("a", "b"), outputs=("x", "y")):
    directions = tuple("d%d" % i for i in range(n_directions))
    comps = tuple(random_component(rng, rng.randint(n_directions + 1, n_states),
                                   inputs, outputs, directions, "M%d" % i)
                  for i in range(n_components))
    return Library(comps, directions)


def random_index(rng, lib, max_priority=3):
    return {(i, q): rng.randint(0, max_priority)
            for i, c in enumerate(lib.components) for q in c.states}


def random_composer(rng, lib, n_states=3, initial_type=None):
    """Random composer; ``initial_type`` pins the component of the start state."""
    states = tuple(range(n_states))
    typing = {m: rng.randrange(len(lib)) for m in states}
    if initial_type is not None:
        typing[0] = initial_type
    transfer = {(m, d): rng.choice(states) for m in states for d in lib.directions}
    return Composer(states, 0, transfer, typing)


def random_dpw(rng, alphabet, n_states=3, max_priority=3):
    states = tuple("p%d" % i for i in range(n_states))
    delta = {(p, x): rng.choice(states) for p in states for x in alphabet}
    priority = {p: rng.randint(0, max_priority) for p in states}
    return DPW(tuple(alphabet), states, states[0], delta, priority)


def random_pa(rng, n_states=3, n_letters=2, max_priority=3, max_support=2):
    states = tuple("q%d" % i for i in range(n_states))
    alphabet = tuple(range(n_letters))
    delta = {(q, x): random_distribution(rng, states, max_support) for q in states for x in alphabet}
    priority = {q: rng.randint(0, max_priority) for q in states}
    return ProbabilisticAutomaton(alphabet, states, states[0], delta, priority)
