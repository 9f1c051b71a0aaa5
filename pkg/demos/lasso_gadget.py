"""Words of a probabilistic automaton as composers.

Each ultimately periodic word becomes a composer over the encoded library;
its composition value under the encoded monitor is the word's acceptance
probability.
"""
import itertools

from compsynth import random_instances as ri
from compsynth.composition import compose, value_dpw
from compsynth.core import Lasso
from compsynth.gadget import lasso_to_composer, pa_lasso_value, pa_to_dpw, pa_to_library

# seed 27 gives words with values 0, 2/3 and 1
a = ri.random_pa(ri.rng_for(27), 3, 2)
lib, monitor = pa_to_library(a), pa_to_dpw(a)
print("alphabet:", a.alphabet, "states:", len(a.states))

for n1, n2 in ((0, 1), (1, 1), (1, 2)):
    for w1 in itertools.product(a.alphabet, repeat=n1):
        for w2 in itertools.product(a.alphabet, repeat=n2):
            w = Lasso(w1, w2)
            direct = pa_lasso_value(a, w)
            via = value_dpw(compose(lasso_to_composer(w, a.alphabet), lib), monitor)
            print("%s(%s)^w  %-6s %-6s %s" % ("".join(map(str, w1)), "".join(map(str, w2)),
                                             direct, via, "ok" if direct == via else "MISMATCH"))
