"""Counting repeated observations matters.

Builds the built-in eight-state game, runs the memory search on both
stuttering reductions, and reports what each search saw.
"""
from compsynth.pos import (bounded_memory_search, reduce_collapsed, reduce_stutter,
                           separating_example)

og = separating_example()
print("states:", sorted(og.game.owner))
print("observations:", {s: og.obs[s] for s in sorted(og.obs)})

for name, reduce in (("stutter", reduce_stutter), ("collapsed", reduce_collapsed)):
    res = bounded_memory_search(reduce(og), 4)
    print("%-9s reduction: winner %s (%d nodes searched)"
          % (name, "found" if res.found else "absent", res.nodes))
    if res.found:
        sigma = res.strategy
        print("   memory cells:", len(sigma.memory))
    print("   search notes:", res.meta)
