"""Command-line entry point.

Exit status: 0 realizable / valid, 1 not realizable (within the memory
bound for monitor problems), 2 unusable input.  Results are printed as
JSON transcripts with exact rationals.
"""
import argparse
from fractions import Fraction
import json
import logging
import sys

from . import io
from .composition import compose, value_dpw, value_embedded
from .core import (CompSynthError, ExitControlRelation, Lasso, validate_composer,
                   validate_dpw, validate_library)
from .dpw import DpwProblem, build_product_game, synth_dpw_qualitative
from .embedded import (EmbeddedProblem, build_game, make_alternating, parity_game_to_library,
                       synth_embedded, synth_unrestricted, validate_problem)
from .gadget import pa_lasso_value, pa_to_dpw, pa_to_library, validate_pa
from .games import validate_game
from .pos import lower_bound_gadget, reduce_collapsed, reduce_stutter, validate_observed
from . import random_instances as ri

log = logging.getLogger("compsynth")


class InputError(Exception):
    pass


def _check(report, what):
    if report:
        raise InputError("invalid %s: %s" % (what, "; ".join(report)))


def _eta(text):
    try:
        eta = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("not a rational: %r" % text)
    if not 0 < eta < 1:
        raise argparse.ArgumentTypeError("threshold must lie strictly between 0 and 1")
    return eta


def _emit(doc, out=None):
    text = io.dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _transcript(result, extra=None):
    doc = {"realizable": result.realizable,
           "value": io.rat(result.value) if result.value is not None else None,
           "certificate": {k: io.enc(v) if not isinstance(v, list) else [io.enc(x) for x in v]
                           for k, v in result.certificate.items()}}
    if result.bound is not None:
        doc["bound"] = {k: io.enc(v) for k, v in result.bound.items()}
    if result.composer is not None:
        doc["composer"] = io.to_document(result.composer)
    doc.update(extra or {})
    return doc


def _load_problem(args):
    lib = io.load(args.library)
    _check(validate_library(lib), "library")
    index = io.load(args.index)
    if getattr(args, "relation", None):
        relation = io.load(args.relation)
    else:
        relation = ExitControlRelation.unrestricted(lib)
    p = EmbeddedProblem(lib, relation, index, getattr(args, "eta", None))
    _check(validate_problem(p), "problem")
    return p


def _save_composer(result, path):
    if path and result.composer is not None:
        io.save(result.composer, path)


def cmd_synth(args):
    if args.what == "dpw":
        lib, monitor = io.load(args.library), io.load(args.dpw)
        _check(validate_library(lib) + validate_dpw(monitor), "input")
        result = synth_dpw_qualitative(DpwProblem(lib, monitor, args.mem_bound), args.node_limit)
        doc = _transcript(result)
        doc["verdict"] = result.bound["verdict"]
    else:
        p = _load_problem(args)
        if args.what == "embedded":
            result = synth_embedded(p)
        else:
            result = synth_unrestricted(p.library, p.index, p.eta)
        doc = _transcript(result)
    _save_composer(result, args.out)
    _emit(doc)
    return 0 if result.realizable else 1


def cmd_reduce(args):
    if args.what == "product":
        lib, monitor = io.load(args.library), io.load(args.dpw)
        out = build_product_game(DpwProblem(lib, monitor))
    elif args.what == "game":
        out = build_game(_load_problem(args))
    else:
        og = io.load(args.input)
        _check(validate_observed(og) + validate_game(og.game), "observed game")
        out = {"collapsed": reduce_collapsed, "stutter": reduce_stutter,
               "lowerbound": lower_bound_gadget}[args.what](og)
    _emit(out, args.out)
    return 0


def cmd_gadget(args):
    if args.what == "parity":
        g = io.load(args.game)
        _check(validate_game(g), "game")
        if args.alternate:
            g = make_alternating(g)
        initial = io.dec(json.loads(args.initial)) if args.initial.startswith(("[", '"')) \
            else _state(g, args.initial)
        p = parity_game_to_library(g, initial)
        io.save(p.library, args.out_lib)
        _emit(io.index_document(p.index), args.out_index)
        io.save(p.relation, args.out_relation)
    else:
        a = io.load(args.input)
        _check(validate_pa(a), "automaton")
        io.save(pa_to_library(a), args.out_lib)
        io.save(pa_to_dpw(a), args.out_dpw)
    return 0


def _state(g, text):
    for s in g.owner:
        if str(s) == text:
            return s
    raise InputError("no state named %r" % text)


def cmd_verify(args):
    lib, c = io.load(args.library), io.load(args.composer)
    _check(validate_library(lib) + validate_composer(c, lib), "composer")
    t = compose(c, lib)
    if args.dpw:
        value = value_dpw(t, io.load(args.dpw))
        ok = value == 1
    else:
        value = value_embedded(t, io.load(args.index))
        ok = value == 1 if args.eta is None else value >= args.eta
    _emit({"valid": ok, "value": io.rat(value), "reachable_states": len(t.reachable())})
    return 0 if ok else 1


def _letters(text, alphabet):
    names = {str(x): x for x in alphabet}
    parts = text.split(",") if "," in text else list(text)
    try:
        return tuple(names[x.strip()] for x in parts if x.strip())
    except KeyError as e:
        raise InputError("letter %s not in the automaton alphabet" % e)


def cmd_oracle(args):
    a = io.load(args.automaton)
    _check(validate_pa(a), "automaton")
    if ";" not in args.lasso:
        raise InputError("lasso must be written prefix;cycle")
    w1, w2 = args.lasso.split(";", 1)
    w = Lasso(_letters(w1, a.alphabet), _letters(w2, a.alphabet))
    _emit({"lasso": io.to_document(w), "value": io.rat(pa_lasso_value(a, w))})
    return 0


def cmd_export(args):
    if args.composer:
        obj = compose(io.load(args.composer), io.load(args.input))
    else:
        obj = io.load(args.input)
    text = io.dot(obj)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_generate(args):
    rng = ri.rng_for(args.seed)
    if args.kind == "library":
        obj = ri.random_library(rng)
    elif args.kind == "index":
        obj = io.index_document(ri.random_index(rng, ri.random_library(rng)))
    elif args.kind == "game":
        obj = ri.random_game(rng)
    elif args.kind == "dpw":
        obj = ri.random_dpw(rng, ("x", "y"))
    else:
        obj = ri.random_pa(rng)
    _emit(obj, args.out)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="compsynth", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="synthesize a composer")
    sp.add_argument("what", choices=["embedded", "unrestricted", "dpw"])
    sp.add_argument("--library", required=True)
    sp.add_argument("--index")
    sp.add_argument("--relation")
    sp.add_argument("--eta", type=_eta)
    sp.add_argument("--dpw")
    sp.add_argument("--mem-bound", type=int, default=2)
    sp.add_argument("--node-limit", type=int, default=2_000_000)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_synth)

    rp = sub.add_parser("reduce", help="build a game")
    rp.add_argument("what", choices=["collapsed", "stutter", "lowerbound", "product", "game"])
    rp.add_argument("--in", dest="input")
    rp.add_argument("--library")
    rp.add_argument("--index")
    rp.add_argument("--relation")
    rp.add_argument("--dpw")
    rp.add_argument("--out")
    rp.set_defaults(func=cmd_reduce)

    gp = sub.add_parser("gadget", help="hardness encodings")
    gp.add_argument("what", choices=["parity", "pa"])
    gp.add_argument("--game")
    gp.add_argument("--initial")
    gp.add_argument("--alternate", action="store_true", help="insert dummy states first")
    gp.add_argument("--in", dest="input")
    gp.add_argument("--out-lib")
    gp.add_argument("--out-index")
    gp.add_argument("--out-relation")
    gp.add_argument("--out-dpw")
    gp.set_defaults(func=cmd_gadget)

    vp = sub.add_parser("verify", help="check a composer")
    vp.add_argument("what", choices=["composer"])
    vp.add_argument("--composer", required=True)
    vp.add_argument("--library", required=True)
    vp.add_argument("--index")
    vp.add_argument("--dpw")
    vp.add_argument("--eta", type=_eta)
    vp.set_defaults(func=cmd_verify)

    op = sub.add_parser("oracle", help="reference computations")
    op.add_argument("what", choices=["pa-lasso"])
    op.add_argument("--automaton", required=True)
    op.add_argument("--lasso", required=True, help='"prefix;cycle", letters comma separated '
                                                   "or one character each")
    op.set_defaults(func=cmd_oracle)

    ep = sub.add_parser("export", help="Graphviz output")
    ep.add_argument("what", choices=["dot"])
    ep.add_argument("--in", dest="input", required=True,
                    help="game or observed game; a library when --composer is given")
    ep.add_argument("--composer")
    ep.add_argument("--out")
    ep.set_defaults(func=cmd_export)

    np_ = sub.add_parser("generate", help="seeded random instance")
    np_.add_argument("kind", choices=["library", "index", "game", "dpw", "automaton"])
    np_.add_argument("--seed", type=int, required=True)
    np_.add_argument("--out")
    np_.set_defaults(func=cmd_generate)
    return ap


_NEEDS = {
    ("synth", "embedded"): ("index",), ("synth", "unrestricted"): ("index",),
    ("synth", "dpw"): ("dpw",),
    ("reduce", "collapsed"): ("input",), ("reduce", "stutter"): ("input",),
    ("reduce", "lowerbound"): ("input",), ("reduce", "product"): ("library", "dpw"),
    ("reduce", "game"): ("library", "index"),
    ("gadget", "parity"): ("game", "initial", "out_lib", "out_index", "out_relation"),
    ("gadget", "pa"): ("input", "out_lib", "out_dpw"),
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    missing = [n for n in _NEEDS.get((args.command, getattr(args, "what", None)), ())
               if getattr(args, n) is None]
    if args.command == "verify" and not (args.index or args.dpw):
        missing.append("index or dpw")
    if missing:
        parser.error("missing " + ", ".join("--" + m.replace("_", "-") for m in missing))
    try:
        return args.func(args)
    except (io.FormatError, InputError, OSError, CompSynthError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
