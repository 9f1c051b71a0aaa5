"""Control-flow composition of library components and its value.

Composed states are pairs ``(q, M)``: component state ``q`` inside the
instance named by composer state ``M``.  The environment picks input
letters, so the value of a composed transducer is the minimum, over
environment strategies, of the probability of the parity objective.
"""
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .core import AlphabetMismatch, TypeMismatch
from .games import Mdp, mdp_parity_value


@dataclass(frozen=True)
class ComposedTransducer:
    """Exitless probabilistic transducer; ``instance[s]`` is the component index."""
    inputs: tuple
    outputs: tuple
    states: tuple
    initial: object
    delta: dict
    labels: dict
    instance: dict

    def reachable(self):
        seen = {self.initial}
        order = [self.initial]
        for s in order:
            for a in self.inputs:
                for t in self.delta[(s, a)]:
                    if t not in seen:
                        seen.add(t)
                        order.append(t)
        return order


def compose(c, lib):
    """The composition of ``lib`` under composer ``c``.

    Inside an instance the component's transitions are copied; an exit
    with direction ``d`` moves with probability 1 to the start state of
    the instance ``transfer[(M, d)]``, whatever the input letter.
    """
    for m in c.states:
        j = c.typing.get(m)
        if not isinstance(j, int) or not 0 <= j < len(lib):
            raise TypeMismatch("composer state %r has type %r; library has %d components"
                               % (m, j, len(lib)))
    states, delta, labels, instance = [], {}, {}, {}
    for m in c.states:
        comp = lib[c.typing[m]]
        exit_dir = {q: d for d, q in comp.exits.items()}
        for q in comp.states:
            s = (q, m)
            states.append(s)
            labels[s] = comp.labels[q]
            instance[s] = c.typing[m]
            if q in exit_dir:
                nxt = c.transfer[(m, exit_dir[q])]
                start = (lib[c.typing[nxt]].initial, nxt)
                for a in comp.inputs:
                    delta[(s, a)] = {start: Fraction(1)}
            else:
                for a in comp.inputs:
                    delta[(s, a)] = {(t, m): p for t, p in comp.delta[(q, a)].items()}
    initial = (lib[c.typing[c.initial]].initial, c.initial)
    return ComposedTransducer(tuple(lib.inputs), tuple(lib.outputs), tuple(states),
                              initial, delta, labels, instance)


def lift_index(t, alpha):
    """Priorities of composed states.

    ``alpha`` is keyed either by composed states or, for a library index
    function, by ``(component index, component state)``.
    """
    out = {}
    for s in t.states:
        if s in alpha:
            out[s] = alpha[s]
        else:
            out[s] = alpha[(t.instance[s], s[0])]
    return out


def transducer_mdp(t, priority, states=None):
    """Environment MDP of ``t`` restricted to ``states`` (default: reachable)."""
    states = t.reachable() if states is None else states
    actions = {s: {a: t.delta[(s, a)] for a in t.inputs} for s in states}
    return Mdp(actions, {s: priority[s] for s in states}, 2)


def value_embedded(t, alpha):
    """Exact value of ``t`` for the embedded parity condition ``alpha``."""
    mdp = transducer_mdp(t, lift_index(t, alpha))
    values, _ = mdp_parity_value(mdp)
    return values[t.initial]


def dpw_product(t, a):
    """Synchronous product of ``t`` with the monitor ``a``, as an environment MDP.

    A product state ``(s, p)`` holds the monitor state ``p`` before it
    reads the label of ``s``; its priority is that of ``p``.  Only the
    part reachable from ``(initial, a.initial)`` is built.
    """
    alphabet = set(a.alphabet)
    start = (t.initial, a.initial)
    seen = {start}
    todo = deque([start])
    actions, priority = {}, {}
    while todo:
        s, p = node = todo.popleft()
        letter = t.labels[s]
        if letter not in alphabet:
            raise AlphabetMismatch("output %r of %r is not a monitor letter" % (letter, s))
        p2 = a.delta[(p, letter)]
        priority[node] = a.priority[p]
        acts = {}
        for x in t.inputs:
            dist = {}
            for s2, pr in t.delta[(s, x)].items():
                nxt = (s2, p2)
                dist[nxt] = pr
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
            acts[x] = dist
        actions[node] = acts
    return Mdp(actions, priority, 2), start


def value_dpw(t, a):
    """Exact value of ``t`` against the DPW monitor ``a``."""
    mdp, start = dpw_product(t, a)
    values, _ = mdp_parity_value(mdp)
    return values[start]
