"""Probabilistic automata as one-exit libraries with a checking monitor.

Each letter becomes a component with a single exit, so a composer spells
out an ultimately periodic word.  Inside a component the environment
names the automaton's current state, the component makes the automaton's
move for its letter, and the monitor accepts at once if the environment
lied.  Against the honest environment the composition runs the automaton
on the word, so the composition's value is the word's acceptance
probability.
"""
from dataclasses import dataclass
from fractions import Fraction

from .core import DPW, Component, Composer, Lasso, Library, distribution_problems
from .games import strongly_connected_components
from .linalg import solve

DOLLAR = "$"
TOP = "⊤"
INIT = "init"
EXIT = "ex"
DIRECTION = "d"


@dataclass(frozen=True)
class ProbabilisticAutomaton:
    alphabet: tuple
    states: tuple
    initial: object
    delta: dict
    priority: dict


def validate_pa(a):
    report = []
    if a.initial not in a.states:
        report.append("initial state %r unknown" % (a.initial,))
    if DOLLAR in a.states:
        report.append("state name %r is reserved" % DOLLAR)
    for q in a.states:
        if q not in a.priority:
            report.append("priority missing for %r" % (q,))
        for x in a.alphabet:
            dist = a.delta.get((q, x))
            if dist is None:
                report.append("delta not total: missing (%r, %r)" % (q, x))
                continue
            report.extend("%s at (%r, %r)" % (p, q, x) for p in distribution_problems(dist))
    return report


def pa_to_library(a):
    """One width-1 component per letter.

    Component ``i`` starts in :data:`INIT`, where the input letter (a state
    ``q`` of the automaton) leads to ``(q, 1)``; from there the automaton's
    move on letter ``i`` leads to ``(q', 2)`` whatever the input, and then
    to the exit :data:`EXIT`.
    """
    inputs = tuple(a.states)
    outputs = tuple(a.states) + (DOLLAR,)
    states = (INIT,) + tuple((q, j) for j in (1, 2) for q in a.states) + (EXIT,)
    labels = {INIT: DOLLAR, EXIT: DOLLAR}
    labels.update({(q, j): q for q in a.states for j in (1, 2)})
    comps = []
    for x in a.alphabet:
        delta = {}
        for s in inputs:
            delta[(INIT, s)] = {(s, 1): Fraction(1)}
        for q in a.states:
            move = {(t, 2): Fraction(p) for t, p in a.delta[(q, x)].items()}
            for s in inputs:
                delta[((q, 1), s)] = dict(move)
                delta[((q, 2), s)] = {EXIT: Fraction(1)}
        comps.append(Component(inputs, outputs, states, INIT, delta, {DIRECTION: EXIT},
                               labels, "M_%s" % (x,)))
    return Library(tuple(comps), (DIRECTION,))


def pa_to_dpw(a):
    """Monitor tracking the automaton state named by the environment.

    Phases per component: ``("$", q)`` reads the start's ``$``, ``(q, 0)``
    checks that the environment named ``q``, ``(q, 1)`` reads the move,
    ``(q, 2)`` reads the exit's ``$``.  Anything unexpected goes to the
    accepting sink :data:`TOP`.  Every state about ``q`` has ``q``'s
    priority.
    """
    alphabet = tuple(a.states) + (DOLLAR,)
    states = []
    delta, priority = {}, {}
    for q in a.states:
        for phase in (DOLLAR, 0, 1, 2):
            states.append((q, phase))
            priority[(q, phase)] = a.priority[q]
        for x in alphabet:
            delta[((q, DOLLAR), x)] = (q, 0) if x == DOLLAR else TOP
            delta[((q, 0), x)] = (q, 1) if x == q else TOP
            delta[((q, 1), x)] = TOP if x == DOLLAR else (x, 2)
            delta[((q, 2), x)] = (q, DOLLAR) if x == DOLLAR else TOP
    states.append(TOP)
    priority[TOP] = 0
    for x in alphabet:
        delta[(TOP, x)] = TOP
    return DPW(alphabet, tuple(states), (a.initial, DOLLAR), delta, priority)


def lasso_to_composer(w, alphabet=None):
    """Composer spelling ``w``: a path of prefix states closing into a cycle."""
    index = (lambda x: x) if alphabet is None else tuple(alphabet).index
    letters = w.prefix + w.cycle
    n = len(letters)
    transfer = {(t, DIRECTION): t + 1 if t + 1 < n else len(w.prefix) for t in range(n)}
    return Composer(tuple(range(n)), 0, transfer, {t: index(x) for t, x in enumerate(letters)})


def composer_to_lasso(c, alphabet=None, direction=DIRECTION):
    """The word a one-direction composer spells, read off its rho shape."""
    letter = (lambda i: i) if alphabet is None else (lambda i: tuple(alphabet)[i])
    order = []
    pos = {}
    m = c.initial
    while m not in pos:
        pos[m] = len(order)
        order.append(m)
        m = c.transfer[(m, direction)]
    k = pos[m]
    return Lasso(tuple(letter(c.typing[x]) for x in order[:k]),
                 tuple(letter(c.typing[x]) for x in order[k:]))


def pa_lasso_value(a, w):
    """Exact probability that ``a`` run on ``w`` satisfies its parity condition.

    The prefix is pushed through as a distribution; the periodic part is a
    Markov chain on (state, position in the cycle) whose bottom components
    are accepting iff their least priority is even.
    """
    dist = {a.initial: Fraction(1)}
    for x in w.prefix:
        nxt = {}
        for q, p in dist.items():
            for t, r in a.delta[(q, x)].items():
                nxt[t] = nxt.get(t, 0) + p * Fraction(r)
        dist = nxt
    n = len(w.cycle)
    nodes = [(q, i) for q in a.states for i in range(n)]
    succ = {(q, i): {(t, (i + 1) % n): Fraction(r) for t, r in a.delta[(q, w.cycle[i])].items() if r}
            for q, i in nodes}
    comps = strongly_connected_components({v: list(succ[v]) for v in nodes})
    good = set()
    absorbing = set()
    for comp in comps:
        if all(t in comp for v in comp for t in succ[v]):
            absorbing |= comp
            if min(a.priority[q] for q, _ in comp) % 2 == 0:
                good |= comp
    transient = [v for v in nodes if v not in absorbing]
    col = {v: k for k, v in enumerate(transient)}
    matrix, rhs = [], []
    for v in transient:
        row = [Fraction(0)] * len(transient)
        row[col[v]] += 1
        b = Fraction(0)
        for t, r in succ[v].items():
            if t in col:
                row[col[t]] -= r
            elif t in good:
                b += r
        matrix.append(row)
        rhs.append(b)
    x = solve(matrix, rhs) if transient else []
    value = {v: x[col[v]] for v in transient}
    value.update({v: Fraction(1 if v in good else 0) for v in absorbing})
    return sum(p * value[(q, 0)] for q, p in dist.items())
