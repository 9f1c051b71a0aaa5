"""Embedded synthesis on the fixture library.

Solves the qualitative question, then the quantitative one for a few
thresholds, and checks the returned composer against the composition.
"""
from fractions import Fraction
from pathlib import Path

from compsynth import io
from compsynth.composition import compose, value_embedded
from compsynth.embedded import EmbeddedProblem, synth_embedded, synth_unrestricted

here = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
lib = io.load(here / "library.json")
index = io.load(here / "library_index.json")
print("components:", len(lib), "exit directions:", lib.directions)

res = synth_embedded(EmbeddedProblem.unrestricted(lib, index))
print("almost-sure composer exists:", res.realizable)
if res.realizable:
    print("  its value:", value_embedded(compose(res.composer, lib), index))

for eta in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
    r = synth_unrestricted(lib, index, eta)
    line = "threshold %s: realizable=%s value=%s" % (eta, r.realizable, r.value)
    if r.composer is not None:
        line += " check=%s" % value_embedded(compose(r.composer, lib), index)
    print(line)
