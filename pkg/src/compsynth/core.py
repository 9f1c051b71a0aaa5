"""Domain types: probabilistic components, libraries, composers, DPWs, lassos.

All probabilities are :class:`fractions.Fraction` values.  Types are frozen
dataclasses holding plain dicts and tuples; nothing mutates them after
construction.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import itertools

Rational = Fraction

#: output letter carried by exits added by :func:`normalize_width`
DUMMY_OUTPUT = "_"


class CompSynthError(Exception):
    """Base class for errors raised by this package."""


class WidthExceeded(CompSynthError):
    pass


class AlphabetMismatch(CompSynthError):
    pass


class TypeMismatch(CompSynthError):
    pass


def rational(value):
    """Parse ``value`` (int, Fraction or a ``"num/den"`` string) exactly."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted as probabilities: %r" % value)
    return Fraction(value)


def distribution(support):
    """Build a distribution dict, dropping zero entries."""
    out = {}
    for target, p in support.items():
        p = rational(p)
        if p:
            out[target] = out.get(target, 0) + p
    return out


def point(target):
    return {target: Fraction(1)}


def distribution_problems(dist):
    problems = []
    if not dist:
        problems.append("empty distribution")
    for target, p in dist.items():
        if not isinstance(p, Fraction) and not isinstance(p, int):
            problems.append("non-rational probability %r for %r" % (p, target))
        elif not 0 < p <= 1:
            problems.append("probability %s for %r outside (0,1]" % (p, target))
    if dist and sum(dist.values()) != 1:
        problems.append("distribution not stochastic (sums to %s)" % sum(dist.values()))
    return problems


@dataclass(frozen=True)
class Component:
    """A probabilistic transducer with exits.

    ``delta`` maps ``(state, input)`` to a distribution over states and is
    defined exactly on non-exit states.  ``exits`` maps each direction to
    its exit state.
    """
    inputs: tuple
    outputs: tuple
    states: tuple
    initial: object
    delta: dict
    exits: dict
    labels: dict
    name: str = ""

    @property
    def exit_states(self):
        return frozenset(self.exits.values())

    def exit_direction(self, state):
        for d, q in self.exits.items():
            if q == state:
                return d
        raise KeyError(state)

    def successors(self, state):
        out = set()
        for a in self.inputs:
            out.update(self.delta.get((state, a), ()))
        return out

    def reachable(self):
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            q = stack.pop()
            for t in self.successors(q):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen


def validate_component(c):
    """Return a list of violated structural constraints (empty if valid)."""
    report = []
    states = set(c.states)
    if len(states) != len(c.states):
        report.append("duplicate states")
    if c.initial not in states:
        report.append("initial state %r not a state" % (c.initial,))
    exit_states = list(c.exits.values())
    if len(set(exit_states)) != len(exit_states):
        report.append("exit indexing is not injective")
    for q in exit_states:
        if q not in states:
            report.append("exit %r not a state" % (q,))
    for q in c.states:
        if q not in c.labels:
            report.append("state %r has no output label" % (q,))
        elif c.labels[q] not in c.outputs:
            report.append("label %r of %r not in output alphabet" % (c.labels[q], q))
    for (q, a), dist in c.delta.items():
        if q in c.exit_states:
            report.append("exit has outgoing transition: %r on %r" % (q, a))
            continue
        if q not in states:
            report.append("transition from unknown state %r" % (q,))
        if a not in c.inputs:
            report.append("transition on unknown input %r" % (a,))
        for t in dist:
            if t not in states:
                report.append("transition to unknown state %r" % (t,))
        for problem in distribution_problems(dist):
            report.append("%s at (%r, %r)" % (problem, q, a))
    for q in c.states:
        if q in c.exit_states:
            continue
        for a in c.inputs:
            if (q, a) not in c.delta:
                report.append("delta not total: missing (%r, %r)" % (q, a))
    return report


@dataclass(frozen=True)
class Library:
    components: tuple
    directions: tuple

    @property
    def inputs(self):
        return self.components[0].inputs

    @property
    def outputs(self):
        return self.components[0].outputs

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]


def validate_library(lib):
    report = []
    if not lib.components:
        return ["library has no components"]
    c0 = lib.components[0]
    for i, c in enumerate(lib.components):
        report += ["component %d: %s" % (i, msg) for msg in validate_component(c)]
        if set(c.inputs) != set(c0.inputs):
            report.append("component %d: input alphabet differs" % i)
        if set(c.outputs) != set(c0.outputs):
            report.append("component %d: output alphabet differs" % i)
        if set(c.exits) != set(lib.directions):
            report.append("component %d: exits %r do not match directions %r"
                          % (i, sorted(map(str, c.exits)), sorted(map(str, lib.directions))))
    return report


def normalize_width(lib, directions):
    """Give every component exactly one exit per direction.

    Missing exits become fresh unreachable states labelled with
    :data:`DUMMY_OUTPUT`.  Components already of full width are returned
    unchanged.
    """
    directions = tuple(directions)
    needs_dummy = False
    for c in lib.components:
        if len(c.exits) > len(directions):
            raise WidthExceeded("component %r has %d exits, width is %d"
                                % (c.name, len(c.exits), len(directions)))
        unknown = set(c.exits) - set(directions)
        if unknown:
            raise ValueError("exits %r are not directions" % sorted(map(str, unknown)))
        if len(c.exits) < len(directions):
            needs_dummy = True
    if not needs_dummy:
        return Library(tuple(lib.components), directions)
    out = []
    for c in lib.components:
        outputs = c.outputs if DUMMY_OUTPUT in c.outputs else c.outputs + (DUMMY_OUTPUT,)
        states = list(c.states)
        exits = dict(c.exits)
        labels = dict(c.labels)
        for d in directions:
            if d in exits:
                continue
            q = ("dummy-exit", d)
            while q in labels:
                q = q + ("'",)
            states.append(q)
            exits[d] = q
            labels[q] = DUMMY_OUTPUT
        out.append(Component(c.inputs, outputs, tuple(states), c.initial,
                             dict(c.delta), {d: exits[d] for d in directions},
                             labels, c.name))
    return Library(tuple(out), directions)


def pad_index(index, lib):
    """Extend a library index function to dummy exits (max odd priority)."""
    top = max(index.values(), default=1)
    odd = top if top % 2 else top + 1
    out = dict(index)
    for i, c in enumerate(lib.components):
        for q in c.states:
            out.setdefault((i, q), odd)
    return out


@dataclass(frozen=True)
class ExitControlRelation:
    """Allowed ``(direction, component index)`` pairs."""
    pairs: frozenset

    @classmethod
    def unrestricted(cls, lib):
        return cls(frozenset(itertools.product(lib.directions, range(len(lib)))))

    def allows(self, direction, j):
        return (direction, j) in self.pairs

    def is_nonblocking(self, directions):
        return all(any(d == x for x, _ in self.pairs) for d in directions)

    def is_unrestricted(self, lib):
        return self.pairs == ExitControlRelation.unrestricted(lib).pairs


@dataclass(frozen=True)
class Composer:
    """Deterministic control-transfer transducer over a library.

    ``transfer[(M, d)]`` is the composer state taking control when instance
    ``M`` leaves through direction ``d``; ``typing[M]`` is the index of the
    component that ``M`` instantiates.
    """
    states: tuple
    initial: object
    transfer: dict
    typing: dict

    def reachable(self, directions):
        seen = [self.initial]
        known = {self.initial}
        for m in seen:
            for d in directions:
                n = self.transfer[(m, d)]
                if n not in known:
                    known.add(n)
                    seen.append(n)
        return seen


def validate_composer(c, lib):
    report = []
    if c.initial not in c.states:
        report.append("initial composer state %r unknown" % (c.initial,))
    for m in c.states:
        j = c.typing.get(m)
        if j is None:
            report.append("typing not total: %r" % (m,))
        elif not (isinstance(j, int) and 0 <= j < len(lib)):
            report.append("typing of %r references missing component %r" % (m, j))
        for d in lib.directions:
            if (m, d) not in c.transfer:
                report.append("transfer not total: missing (%r, %r)" % (m, d))
            elif c.transfer[(m, d)] not in c.typing:
                report.append("transfer (%r, %r) targets unknown state" % (m, d))
    return report


def check_compatibility(c, relation):
    """True iff every transfer edge of ``c`` lands in ``relation``."""
    return all(relation.allows(d, c.typing[target])
               for (_, d), target in c.transfer.items())


@dataclass(frozen=True)
class DPW:
    """Deterministic parity word automaton (min-parity acceptance)."""
    alphabet: tuple
    states: tuple
    initial: object
    delta: dict
    priority: dict

    def step(self, p, letter):
        return self.delta[(p, letter)]


def validate_dpw(a):
    report = []
    if a.initial not in a.states:
        report.append("initial DPW state unknown")
    for p in a.states:
        if p not in a.priority:
            report.append("priority missing for %r" % (p,))
        elif not (isinstance(a.priority[p], int) and a.priority[p] >= 0):
            report.append("priority of %r is not a natural number" % (p,))
        for x in a.alphabet:
            t = a.delta.get((p, x))
            if t is None:
                report.append("delta not total: missing (%r, %r)" % (p, x))
            elif t not in a.priority:
                report.append("delta (%r, %r) targets unknown state" % (p, x))
    return report


@dataclass(frozen=True)
class Lasso:
    """The ultimately periodic word ``prefix (cycle)^omega``."""
    prefix: tuple = ()
    cycle: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValueError("lasso cycle must be non-empty")

    def letter(self, n):
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]


def dpw_lasso_accepts(a, w):
    """Decide whether ``a`` accepts the lasso word ``w``.

    Runs the prefix, then iterates the cycle until a (state, position)
    pair repeats and takes the minimal priority on the detected loop.
    """
    alphabet = set(a.alphabet)
    bad = [x for x in w.prefix + w.cycle if x not in alphabet]
    if bad:
        raise AlphabetMismatch("letters %r not in DPW alphabet" % (bad,))
    p = a.initial
    for x in w.prefix:
        p = a.delta[(p, x)]
    seen = {}
    trace = []
    pos = 0
    while (p, pos) not in seen:
        seen[(p, pos)] = len(trace)
        trace.append(p)
        p = a.delta[(p, w.cycle[pos])]
        pos = (pos + 1) % len(w.cycle)
    loop = trace[seen[(p, pos)]:]
    return min(a.priority[q] for q in loop) % 2 == 0
