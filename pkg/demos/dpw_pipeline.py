"""Monitor-based synthesis, from random instances to a verified composer."""
from compsynth import random_instances as ri
from compsynth.composition import compose, value_dpw
from compsynth.dpw import DpwProblem, build_product_game, synth_dpw_qualitative

for seed in range(8):
    rng = ri.rng_for(seed)
    lib = ri.random_library(rng, rng.randint(1, 3), rng.randint(3, 4), rng.randint(1, 2))
    monitor = ri.random_dpw(rng, lib.outputs, rng.randint(1, 3))
    p = DpwProblem(lib, monitor, 2)
    size = len(build_product_game(p).game.owner)
    res = synth_dpw_qualitative(p)
    if res.composer is not None:
        v = value_dpw(compose(res.composer, lib), monitor)
        print("seed %d: product %3d states, composer with %d states, value %s"
              % (seed, size, len(res.composer.states), v))
    else:
        print("seed %d: product %3d states, %s" % (seed, size, res.bound["verdict"]))
