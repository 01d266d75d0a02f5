"""Command-line front end.

Exit codes: 0 pass, 1 an expectation or verdict failed, 2 bad input,
3 internal invariant violated.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import generate as gen
from . import io
from .complex import SimplicialComplex, SimplicialComplexPair, entourage_pair
from .connect import chain_profile, connectivity_profile, hu_bound
from .errors import InputError, InvariantViolation
from .experiments import EXPERIMENTS, ExperimentSpec, LadderSpec, run_experiment
from .homology import ChainComplex, Ring
from .homotopy import ScaledMap, homotopy_axiom_check
from .space import Entourage, EntourageLadder, MetricCloud, entourage_from_metric
from .tower import build_tower, excision_verify, resolution_check

log = logging.getLogger("uvhom")


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected a comma-separated integer list, got {text!r}") from None


def _params(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"parameter {item!r} is not key=value")
        try:
            out[key] = int(val)
        except ValueError:
            try:
                out[key] = float(val)
            except ValueError:
                raise InputError(f"parameter {key} needs a number, got {val!r}") from None
    return out


def _ladder_spec(args) -> LadderSpec:
    if getattr(args, "scales", None):
        return LadderSpec.from_list(args.scales)
    if getattr(args, "ladder", None):
        return LadderSpec.parse(args.ladder)
    return LadderSpec()


def _cloud(path) -> MetricCloud:
    obj = io.read_input(path)
    if not isinstance(obj, MetricCloud):
        raise InputError(f"{path}: expected a point or distance-matrix file")
    return obj


def _ladder(args, cloud: MetricCloud) -> EntourageLadder:
    return _ladder_spec(args).ladder(cloud)


def _entourage(args, path) -> Entourage:
    """A single entourage: the relation file itself, or a cloud at ``--scale``."""
    obj = io.read_input(path)
    if isinstance(obj, Entourage):
        return obj
    if isinstance(obj, SimplicialComplex):
        raise InputError("this command needs a cloud or relation, not a complex")
    if args.scale is None:
        raise InputError("--scale is required for point or matrix input")
    return entourage_from_metric(obj, args.scale)


def _subset(path, n):
    return io.read_subset(path, n) if path else frozenset()


def _emit(args, obj) -> None:
    text = io.dump_json(obj)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    cloud = gen.generate(args.kind, seed=args.seed, **_params(args.param))
    if args.out:
        io.write_points(cloud, args.out)
    else:
        w = csv.writer(sys.stdout)
        w.writerows([repr(float(x)) for x in row]
                    for row in (cloud.coords if cloud.coords is not None else cloud.distances))
    return 0


def _pair_from_input(args):
    obj = io.read_input(args.input)
    if isinstance(obj, SimplicialComplex):
        sub = _subset(args.subset, obj.vertex_count)
        return SimplicialComplexPair(obj, obj.restrict(sub)) if sub else SimplicialComplexPair.absolute(obj)
    U = obj if isinstance(obj, Entourage) else _entourage(args, args.input)
    return entourage_pair(U, _subset(args.subset, U.n), args.max_dim)


def cmd_complex(args) -> int:
    pair = _pair_from_input(args)
    if args.export:
        io.write_complex(pair.total, args.export)
    _emit(args, {"f_vector": list(pair.total.f_vector()), "truncated": pair.total.truncated,
                 "sub_f_vector": list(pair.sub.f_vector()),
                 "maximal_simplices": [list(s) for s in pair.total.maximal_simplices()]})
    return 0


def cmd_homology(args) -> int:
    pair = _pair_from_input(args)
    cc = ChainComplex(pair, args.ring)
    degrees = _ints(args.degrees) if args.degrees else list(range(pair.total.max_dim + 1))
    groups = {str(d): cc.group(d).to_dict() for d in degrees}
    _emit(args, {"ring": str(Ring.parse(args.ring)), "relative": bool(args.subset), "groups": groups})
    return 0


def cmd_tower(args) -> int:
    cloud = _cloud(args.input)
    ladder = _ladder(args, cloud)
    degrees = _ints(args.degrees) if args.degrees else None
    tower = build_tower(cloud, _subset(args.subset, cloud.n), ladder, args.max_dim, args.ring, degrees)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scale", "degree", "betti"])
            w.writerows(tower.csv_rows())
    _emit(args, tower.to_dict())
    return 0


def cmd_components(args) -> int:
    if args.scale is not None or Path(args.input).suffix.lower() == ".rel":
        U = _entourage(args, args.input)
        _emit(args, chain_profile(U, args.scale).to_dict(args.lengths))
        return 0
    cloud = _cloud(args.input)
    _emit(args, connectivity_profile(cloud, _ladder(args, cloud)).to_dict(args.lengths))
    return 0


def cmd_bounded(args) -> int:
    U = _entourage(args, args.input)
    B = _subset(args.subset, U.n) or frozenset(range(U.n))
    bound = hu_bound(B, U)
    finite = bound != float("inf")
    _emit(args, {"scale": args.scale, "subset_size": len(B), "bounded": finite,
                 "hu_bound_points": bound if finite else "inf",
                 "hu_bound_steps": bound - 1 if finite else "inf"})
    return 0 if finite or not args.expect_bounded else 1


def cmd_excise(args) -> int:
    cloud = _cloud(args.input)
    A, B = io.read_subset(args.A, cloud.n), io.read_subset(args.B, cloud.n)
    degrees = _ints(args.degrees) if args.degrees else (0, 1)
    v = excision_verify(cloud, A, B, _ladder(args, cloud), args.max_dim, args.ring, degrees)
    _emit(args, v.to_dict())
    return 0 if v.ok else 1


def cmd_homotopy(args) -> int:
    X = _cloud(args.input)
    Y = _cloud(args.target) if args.target else X
    lx, ly = _ladder(args, X), _ladder(args, Y)
    A, B = _subset(args.subset, X.n), _subset(args.target_subset, Y.n)

    def load(path):
        return ScaledMap(tuple(io.read_map(path, X.n)), X, Y, lx, ly, A, B)

    f, g = load(args.f), load(args.g)
    steps = [load(p) for p in args.step] if args.step else []
    if steps:
        steps = [f, *steps, g]
    degrees = _ints(args.degrees) if args.degrees else (0, 1)
    v = homotopy_axiom_check(f, g, steps, args.V, args.ring, degrees, args.max_dim)
    _emit(args, v.to_dict())
    return 0 if v.ok else 1


def cmd_resolution(args) -> int:
    base = _cloud(args.input)
    systems = [_cloud(p) for p in args.system]
    if len(args.cone) != len(systems):
        raise InputError("give one --cone map per --system")
    cone = [io.read_map(p, base.n) for p in args.cone]
    bonding = [io.read_map(p, systems[k + 1].n) for k, p in enumerate(args.bonding or [])]
    v = resolution_check((base, _ladder(args, base)), [(c, _ladder(args, c)) for c in systems], bonding, cone)
    _emit(args, v.to_dict())
    return 0 if v.ok else 1


def cmd_experiment(args) -> int:
    ladder = _ladder_spec(args)
    spec = ExperimentSpec(args.name, params=_params(args.param), ladder=ladder, ring=args.ring,
                          max_dim=args.max_dim,
                          degrees=tuple(_ints(args.degrees)) if args.degrees else (0, 1), seed=args.seed)
    bundle = run_experiment(spec)
    _emit(args, bundle)
    for e in bundle["expectations"]:
        log.info("%s %s", "PASS" if e["ok"] else "FAIL", e["name"])
    return 0 if bundle["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="points .csv, distances .matrix/.dist, relation .rel or complex .cx")
    common.add_argument("--ladder", help='geometric ladder "start:ratio:count" (blank fields take defaults)')
    common.add_argument("--scales", help='explicit scales "a,b,c", strictly decreasing')
    common.add_argument("--ring", default="z2", help="z2, zp:P or z")
    common.add_argument("--max-dim", type=int, default=2)
    common.add_argument("--degrees", help="comma-separated degrees")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="also write (scale, degree, betti) rows here")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="uvhom", description="Uniform Vietoris homology on finite samples.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("generate", parents=[common], help="sample a classical space")
    s.add_argument("kind", choices=sorted(gen.GENERATORS))
    s.add_argument("--param", action="append", metavar="KEY=VALUE")
    s.set_defaults(func=cmd_generate)

    for name, fn, help_ in (("complex", cmd_complex, "build a Vietoris complex"),
                            ("homology", cmd_homology, "homology of one complex or pair")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--scale", type=float)
        s.add_argument("--subset", help="subset file; gives the pair (X_U, A_U)")
        if name == "complex":
            s.add_argument("--export", help="write maximal simplices to this .cx file")
        s.set_defaults(func=fn)

    s = sub.add_parser("tower", parents=[common], help="homology tower along a ladder")
    s.add_argument("--subset")
    s.set_defaults(func=cmd_tower)

    s = sub.add_parser("components", parents=[common], help="chain components and lengths")
    s.add_argument("--scale", type=float)
    s.add_argument("--lengths", action="store_true", help="include the chain-length matrix")
    s.set_defaults(func=cmd_components)

    s = sub.add_parser("bounded", parents=[common], help="Hu bound of a subset at one scale")
    s.add_argument("--scale", type=float)
    s.add_argument("--subset")
    s.add_argument("--expect-bounded", action="store_true", help="exit 1 when the bound is infinite")
    s.set_defaults(func=cmd_bounded)

    s = sub.add_parser("excise", parents=[common], help="verify excision for (A, A∩B) -> (X, B)")
    s.add_argument("--A", required=True)
    s.add_argument("--B", required=True)
    s.set_defaults(func=cmd_excise)

    s = sub.add_parser("homotopy", parents=[common], help="homotopy-axiom pipeline for two maps")
    s.add_argument("--target", help="target cloud (default: the input)")
    s.add_argument("--subset")
    s.add_argument("--target-subset")
    s.add_argument("--f", required=True, help="map file for f")
    s.add_argument("--g", required=True, help="map file for g")
    s.add_argument("--step", action="append", help="intermediate map files, in order")
    s.add_argument("--V", type=float, required=True, help="target scale")
    s.set_defaults(func=cmd_homotopy)

    s = sub.add_parser("resolution", parents=[common], help="check the uniform-resolution conditions")
    s.add_argument("--system", action="append", required=True, help="system cloud, finest last")
    s.add_argument("--bonding", action="append", help="map file system k+1 -> k")
    s.add_argument("--cone", action="append", required=True, help="map file base -> system i")
    s.set_defaults(func=cmd_resolution)

    s = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    s.add_argument("name", choices=sorted(EXPERIMENTS))
    s.add_argument("--param", action="append", metavar="KEY=VALUE")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    needs_input = args.command not in ("generate", "experiment")
    try:
        if needs_input and not args.input:
            raise InputError("--input is required")
        return args.func(args)
    except InvariantViolation as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return 3
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
