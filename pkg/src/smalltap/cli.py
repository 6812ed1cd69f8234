"""``smalltap`` command line.

Every command prints one JSON document on stdout.  Exit status is 0 on
success, 1 when the instance is infeasible and 2 on bad input; errors go to
stderr as ``{"error": code, "detail": message}``.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io
from .decompose import approximate, ratio_bound, solve_level_candidate
from .errors import Infeasible, InstanceError, LevelOutOfRange, NotLeafToLeaf, TapError, TooLarge
from .exact import solve_exact, tap_polytope_membership
from .generators import random_instance, tight_example, worst_case_instance
from .instance import is_leaf_to_leaf, leaf_to_leaf, validate
from .lp import solve_edge_lp, solve_odd_lp

fmt = io.fmt


class CliError(Exception):
    def __init__(self, code: str, detail: str, status: int = 2):
        super().__init__(detail)
        self.code, self.detail, self.status = code, detail, status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", f"{self.prog}: {message}")


def _emit_instance(inst, out):
    if out:
        io.save_instance(inst, out)
    return io.instance_to_dict(inst)


def _ratio(a, b):
    return None if a is None or b is None or b == 0 else a / b


def cmd_validate(args):
    inst = io.load_instance(args.instance)
    idx = validate(inst)
    covered = set()
    for p in idx.link_paths.values():
        covered |= p
    return {
        "name": inst.name,
        "valid": True,
        "vertices": len(inst.vertices),
        "tree_edges": len(inst.tree_edges),
        "links": len(inst.links),
        "k": idx.k,
        "leaf_to_leaf": is_leaf_to_leaf(idx),
        "feasible": len(covered) == len(idx.edges),
    }


def cmd_reduce(args):
    inst = io.load_instance(args.instance)
    validate(inst)
    reduced, _ = leaf_to_leaf(inst)
    return _emit_instance(reduced, args.out)


def cmd_exact(args):
    inst = io.load_instance(args.instance)
    sol = solve_exact(inst, method=args.method)
    return {"name": inst.name, "cost": fmt(sol.cost), "links": io.sorted_ids(sol.link_ids)}


def cmd_lp(args):
    inst = io.load_instance(args.instance)
    if args.relaxation == "edge":
        sol, cuts, rounds = solve_edge_lp(inst), (), 1
    else:
        res = solve_odd_lp(inst)
        sol, cuts, rounds = res.solution, res.cuts, res.rounds
    if not sol.optimal:
        raise Infeasible(f"LP status {sol.status.value}")
    return {
        "name": inst.name,
        "relaxation": args.relaxation,
        "value": fmt(sol.objective_value),
        "values": io.point_to_dict(sol.values)["values"],
        "rounds": rounds,
        "cuts": [{"S": io.sorted_ids(c.S), "boundary_size": c.size} for c in cuts],
    }


def cmd_approx(args):
    inst = io.load_instance(args.instance)
    if args.level is None:
        res = approximate(inst, n_jobs=2 if args.parallel else None)
        return {
            "name": inst.name,
            "k": res.k,
            "cost": fmt(res.best.cost),
            "level": res.best.level,
            "links": io.sorted_ids(res.best.link_ids),
            "candidate_costs": {str(l): fmt(c) for l, c in sorted(res.all_costs.items())},
            "ratio_bound": fmt(res.ratio_bound),
        }
    validate(inst)
    reduced, mapping = leaf_to_leaf(inst)
    cand = solve_level_candidate(reduced, args.level)
    ids = mapping.backward(cand.link_ids)
    return {
        "name": inst.name,
        "level": args.level,
        "cost": fmt(inst.cost_of(ids)),
        "links": io.sorted_ids(ids),
        "stars": [star.summary() for star, _ in cand.per_star],
    }


def gap_report(inst, with_exact: bool = True) -> dict:
    idx = validate(inst)
    edge = solve_edge_lp(idx).objective_value
    odd = solve_odd_lp(idx).value
    exact = solve_exact(idx).cost if with_exact else None
    approx = approximate(inst).best.cost
    return {
        "name": inst.name,
        "k": idx.k,
        "edge_lp_value": fmt(edge),
        "odd_lp_value": fmt(odd),
        "exact_value": fmt(exact),
        "approx_value": fmt(approx),
        "ratio_bound": fmt(ratio_bound(idx.k)),
        "observed_ratio": fmt(_ratio(approx, exact)),
        "observed_gap_edge": fmt(_ratio(exact, edge)),
        "observed_gap_odd": fmt(_ratio(exact, odd)),
    }


def cmd_gap(args):
    return gap_report(io.load_instance(args.instance), with_exact=not args.no_exact)


def cmd_membership(args):
    inst = io.load_instance(args.instance)
    point = io.load_point(args.point)
    res = tap_polytope_membership(inst, point, dominant=args.dominant)
    weights = None
    if res.weights is not None:
        weights = [{"links": io.sorted_ids(B), "weight": fmt(w)}
                   for B, w in sorted(res.weights.items(),
                                      key=lambda kv: io.sorted_ids(kv[0]))]
    return {"name": inst.name, "member": res.member, "dominant": args.dominant,
            "weights": weights}


def cmd_gen(args):
    if args.levels < 1 or args.branching < 2:
        raise CliError("bad-arguments", "need --levels >= 1 and --branching >= 2")
    if not 0 <= args.link_density <= 1:
        raise CliError("bad-arguments", "--link-density must lie in [0, 1]")
    if args.cost_max < 0:
        raise CliError("bad-arguments", "--cost-max must be non-negative")
    inst = random_instance(args.levels, args.branching, args.link_density, args.cost_max,
                           args.seed, max_links=args.max_links)
    return _emit_instance(inst, args.out)


def cmd_paper(args):
    if args.case == "tight-example":
        inst = tight_example()
    else:
        if args.k is None or args.k < 1:
            raise CliError("bad-arguments", "--case worst-case needs --k >= 1")
        inst = worst_case_instance(args.k)
    return _emit_instance(inst, args.out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="smalltap", description="Weighted tree augmentation tools.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_instance(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("instance", help="instance JSON file")
        sp.set_defaults(fn=fn)
        return sp

    with_instance("validate", cmd_validate, "check an instance file")
    sp = with_instance("reduce", cmd_reduce, "leaf-to-leaf reduction")
    sp.add_argument("--out", help="also write the reduced instance here")
    sp = with_instance("exact", cmd_exact, "exact optimum")
    sp.add_argument("--method", choices=("bnb", "exhaustive"), default="bnb")
    sp = with_instance("lp", cmd_lp, "solve an LP relaxation")
    sp.add_argument("--relaxation", choices=("edge", "odd"), default="odd")
    sp = with_instance("approx", cmd_approx, "level-decomposition approximation")
    sp.add_argument("--level", type=int, help="solve only this level's candidate")
    sp.add_argument("--parallel", action="store_true", help="solve levels in worker processes")
    sp = with_instance("gap", cmd_gap, "LP, exact and approximation values side by side")
    sp.add_argument("--no-exact", action="store_true", help="skip the exact oracle")
    sp = with_instance("membership", cmd_membership, "is a point in the TAP polytope?")
    sp.add_argument("--point", required=True, help='point JSON file {"values": {...}}')
    sp.add_argument("--dominant", action="store_true",
                    help="test membership in the dominant (point >= combination)")

    sp = sub.add_parser("gen", help="random leaf-to-leaf instance")
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--branching", type=int, default=2)
    sp.add_argument("--link-density", type=float, default=0.3)
    sp.add_argument("--cost-max", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-links", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("paper", help="builtin instances")
    sp.add_argument("--case", choices=("tight-example", "worst-case"), required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_paper)
    return p


def _fail(code: str, detail: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "detail": detail}) + "\n")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        return _fail(exc.code, exc.detail, exc.status)
    try:
        doc = args.fn(args)
    except CliError as exc:
        return _fail(exc.code, exc.detail, exc.status)
    except Infeasible as exc:
        return _fail("infeasible", str(exc), 1)
    except io.FormatError as exc:
        return _fail("bad-format", str(exc), 2)
    except (NotLeafToLeaf, LevelOutOfRange) as exc:
        return _fail("bad-arguments", str(exc), 2)
    except InstanceError as exc:
        return _fail("invalid-instance", f"{type(exc).__name__}: {exc}", 2)
    except TooLarge as exc:
        return _fail("too-large", str(exc), 2)
    except TapError as exc:
        return _fail("error", f"{type(exc).__name__}: {exc}", 2)
    sys.stdout.write(io.dumps(doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
