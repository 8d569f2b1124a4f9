"""Command-line front end.

Every command writes NDJSON records followed by a summary line carrying the
seed, library versions and SHA-256 hashes of the input files (``--format
text`` prints a table instead).  ``csp solve`` and ``csp oracle`` exit with
0 on ACCEPT and 1 on REJECT; any error exits with 2.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .report import Report, emit, figure_path, sha256_file, sha256_json

EXIT_ACCEPT, EXIT_REJECT, EXIT_ERROR = 0, 1, 2


class CommandError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CommandError(f"{path} is not valid JSON: {exc}") from None


def _report(args, inputs: Sequence[str] = (), params: dict | None = None) -> Report:
    hashes = {p: sha256_file(p) for p in inputs}
    if params is not None:
        hashes["parameters"] = sha256_json(params)
    return Report(args.command_path, args.seed, hashes)


def _write_json(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _classes(theta) -> list:
    return [list(c) for c in theta.classes]


# --- algebra ----------------------------------------------------------------------------------

def _algebra(path: str):
    from .algebra import FiniteAlgebra

    try:
        return FiniteAlgebra.from_json(_load_json(path))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CommandError(f"{path}: not an algebra ({exc})") from None


def cmd_algebra_check(args) -> int:
    from .algebra import check_flags, congruence_lattice, is_chain, is_simple, is_subdirectly_irreducible

    alg = _algebra(args.algebra)
    lat = congruence_lattice(alg)
    rep = _report(args, [args.algebra])
    rep.add({"kind": "algebra", "size": alg.size, **check_flags(alg), "simple": is_simple(alg),
             "subdirectly_irreducible": is_subdirectly_irreducible(alg, lat), "congruences": len(lat),
             "chain": is_chain(lat)})
    emit(rep, args.out, args.format)
    return 0


def cmd_algebra_congruences(args) -> int:
    from .algebra import block_congruences, congruence_lattice

    alg = _algebra(args.algebra)
    lat = congruence_lattice(alg)
    blocks = {tuple(map(tuple, t.classes)) for t in block_congruences(alg, lat)}
    rep = _report(args, [args.algebra])
    for theta in lat:
        rep.add({"kind": "congruence", "classes": _classes(theta),
                 "block": tuple(map(tuple, theta.classes)) in blocks})
    emit(rep, args.out, args.format)
    return 0


def cmd_algebra_monolith(args) -> int:
    from .algebra import monolith

    alg = _algebra(args.algebra)
    try:
        mu = monolith(alg)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    rep = _report(args, [args.algebra])
    rep.add({"kind": "monolith", "classes": _classes(mu), "nontrivial": [list(c) for c in mu.nontrivial_classes()]})
    emit(rep, args.out, args.format)
    return 0


# --- tree ---------------------------------------------------------------------------------------

def _tree(path: str):
    from .cmtree import CMTree

    try:
        t = CMTree.from_json(_load_json(path))
        t.validate()
        return t
    except (KeyError, TypeError, ValueError) as exc:
        raise CommandError(f"{path}: not a tree ({exc})") from None


def cmd_tree_eval(args) -> int:
    from .cmtree import eval_leaf_op, parse_vertex, vertex_name

    t = _tree(args.tree)
    leaves = set(t.leaves())
    args_v = [parse_vertex(x) for x in (args.a, args.b, args.c)]
    for name, v in zip((args.a, args.b, args.c), args_v):
        if v not in leaves:
            raise CommandError(f"{name!r} is not a leaf of the tree")
    rep = _report(args, [args.tree])
    rep.add({"kind": "eval", "args": [args.a, args.b, args.c], "result": vertex_name(eval_leaf_op(t, *args_v))})
    emit(rep, args.out, args.format)
    return 0


def cmd_tree_represent(args) -> int:
    from .cmtree import represent_with_map, vertex_name

    alg = _algebra(args.algebra)
    try:
        t, leaf_of = represent_with_map(alg)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    rep = _report(args, [args.algebra])
    rep.add({"kind": "tree", "tree": t.to_json(),
             "leaf_of": {alg.elements[a]: vertex_name(v) for a, v in sorted(leaf_of.items())}})
    emit(rep, args.out, args.format)
    return 0


def cmd_tree_check(args) -> int:
    from .cmtree import is_sapling, leaf_algebra, represent, tree_isomorphic

    t = _tree(args.tree)
    rec = {"kind": "tree_check", "vertices": len(t.vertices), "leaves": len(t.leaves()),
           "reduced": t.is_reduced, "simple": t.is_simple, "sapling": is_sapling(t)}
    if rec["reduced"] and rec["simple"]:
        rec["round_trip"] = tree_isomorphic(represent(leaf_algebra(t)), t) is not None
    rep = _report(args, [args.tree])
    rep.add(rec)
    emit(rep, args.out, args.format)
    return 0 if rec.get("round_trip", True) else 1


# --- pnk -----------------------------------------------------------------------------------------

def cmd_pnk_build(args) -> int:
    from . import pnk
    from .algebra import is_conservative_minority

    if args.n < 2 or args.k < 0:
        raise CommandError("need n >= 2 and k >= 0")
    st = pnk.build_structure(args.n, args.k)
    rep = _report(args, params={"n": args.n, "k": args.k})
    by_arity: dict = {}
    for s, r in st.relations.items():
        by_arity.setdefault(s.arity, [0, 0])
        by_arity[s.arity][0] += 1
        by_arity[s.arity][1] += len(r)
    rep.add({"kind": "pnk", "n": args.n, "k": args.k, "leaves": len(st.domain),
             "conservative_minority": is_conservative_minority(pnk.pnk_algebra(args.n, args.k)),
             "symbols": {str(a): c for a, (c, _) in sorted(by_arity.items())},
             "tuples": {str(a): t for a, (_, t) in sorted(by_arity.items())}})
    if args.dump_relations:
        data = st.to_json()
        Path(args.dump_relations).write_text(json.dumps(data, sort_keys=True) + "\n")
        rep.summary["dump"] = {"path": args.dump_relations, "sha256": sha256_json(data)}
    emit(rep, args.out, args.format)
    return 0


# --- relbasis ---------------------------------------------------------------------------------------

def cmd_relbasis_catalog(args) -> int:
    from .relbasis import basis

    alg = _algebra(args.algebra)
    cat = basis(alg)
    rep = _report(args, [args.algebra])
    for name, arity, rel in cat.relations():
        rep.add({"kind": "relation", "family": name, "arity": arity, "tuples": sorted(list(t) for t in rel)})
    rep.summary["counts"] = {"unary": len(cat.unary), "endo": len(cat.endo_graphs),
                             "iso": len(cat.iso_graphs), "lin": len(cat.lin)}
    emit(rep, args.out, args.format)
    return 0


def cmd_relbasis_check_critical(args) -> int:
    from .relbasis import (CriticalRelation, critical_shape, critical_tuples, is_critical,
                           is_multisorted_critical)

    alg = _algebra(args.algebra)
    data = _load_json(args.relation)
    try:
        rel = frozenset(tuple(int(a) for a in t) for t in data["tuples"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CommandError(f"{args.relation}: expected {{\"tuples\": [[...]]}} ({exc})") from None
    arities = {len(t) for t in rel}
    if len(arities) != 1:
        raise CommandError("relation must be nonempty with a single arity")
    arity = arities.pop()
    rec: dict = {"kind": "critical", "arity": arity, "size": len(rel),
                 "critical": is_critical(alg, rel, arity),
                 "critical_tuples": [list(s) for s in critical_tuples(alg, rel, arity)]}
    if "sorts" in data and "tuple" in data:
        sorts = tuple(tuple(int(a) for a in x) for x in data["sorts"])
        s = tuple(int(a) for a in data["tuple"])
        rec["multisorted_critical"] = is_multisorted_critical(alg, rel, sorts, s)
        if rec["multisorted_critical"]:
            rec["shape"] = critical_shape(alg, CriticalRelation(sorts, rel, s)).to_json()
    rep = _report(args, [args.algebra, args.relation])
    rep.add(rec)
    emit(rep, args.out, args.format)
    return 0 if rec["critical"] or rec.get("multisorted_critical") else 1


def cmd_relbasis_survey(args) -> int:
    from . import pnk
    from .algebra import all_conservative_minority, random_conservative_minority
    from .relbasis import critical_survey

    rng = random.Random(args.seed)
    algebras = [a for d in range(1, args.max_domain + 1) for a in all_conservative_minority(d)]
    for item in args.pnk or ():
        n, k = (int(x) for x in item.split(","))
        algebras.append(pnk.pnk_algebra(n, k))
    algebras += [random_conservative_minority(args.random_size, rng) for _ in range(args.random)]
    entries = critical_survey(algebras)
    rep = _report(args, params={"max_domain": args.max_domain, "pnk": args.pnk, "random": args.random,
                                "random_size": args.random_size})
    for e in entries:
        rep.add({"kind": "survey", "sort_sizes": [len(x) for x in e.sorts], "relations": len(e.relations),
                 "ok": e.ok, "shapes": [sh.to_json() for sh in e.shapes if not sh.ok]})
    rep.summary["relations"] = sum(len(e.relations) for e in entries)
    rep.summary["all_ok"] = all(e.ok for e in entries)
    emit(rep, args.out, args.format)
    return 0 if rep.summary["all_ok"] else 1


# --- csp -----------------------------------------------------------------------------------------------

def _instance(path: str):
    from .solver import Instance

    try:
        return Instance.from_json(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise CommandError(f"{path}: not an instance ({exc})") from None


def _names(sol: dict) -> dict:
    from .cmtree import vertex_name

    return {str(x): vertex_name(v) for x, v in sol.items()}


def cmd_csp_gen(args) -> int:
    from .solver import generate

    rng = random.Random(args.seed)
    try:
        inst, plant = generate(args.n, args.k, args.vars, args.constraints, args.mode, rng)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    data = inst.to_json()
    data["generator"] = {"seed": args.seed, "mode": args.mode, "vars": args.vars,
                         "constraints": args.constraints, "version": __version__,
                         "planted": _names(plant) if plant is not None else None}
    _write_json(data, args.out)
    return 0


def _literal_verdict(inst) -> str:
    from .solver import reduce_instance, solve_level_one

    cur = inst
    while cur.k > 1:
        cur = reduce_instance(cur).reduced
    if cur.k == 0:
        from .signature import EMPTY
        return "REJECT" if cur.constraints.get(EMPTY) else "ACCEPT"
    return "ACCEPT" if solve_level_one(cur, literal=True).accept else "REJECT"


def cmd_csp_solve(args) -> int:
    from .solver import satisfies, solve

    inst = _instance(args.instance)
    rep = _report(args, [args.instance])
    if args.literal:
        verdict = _literal_verdict(inst)
        rep.add({"kind": "solve", "verdict": verdict, "literal": True, "witness": None})
    else:
        res = solve(inst)
        rec = {"kind": "solve", "verdict": res.verdict, "depth": len(res.chain),
               "witness": _names(res.witness) if res.witness is not None else None}
        if res.witness is not None:
            rec["witness_ok"] = satisfies(inst, res.witness)
        rep.add(rec)
        verdict = res.verdict
    emit(rep, args.out, args.format)
    return EXIT_ACCEPT if verdict == "ACCEPT" else EXIT_REJECT


def cmd_csp_oracle(args) -> int:
    from .solver import brute_force_oracle

    inst = _instance(args.instance)
    sol = brute_force_oracle(inst)
    rep = _report(args, [args.instance])
    verdict = "ACCEPT" if sol is not None else "REJECT"
    rep.add({"kind": "oracle", "verdict": verdict, "witness": _names(sol) if sol is not None else None})
    emit(rep, args.out, args.format)
    return EXIT_ACCEPT if verdict == "ACCEPT" else EXIT_REJECT


def cmd_csp_reduce(args) -> int:
    from .solver import reduce_instance

    inst = _instance(args.instance)
    if inst.k < 1:
        raise CommandError("nothing to reduce at level 0")
    r = reduce_instance(inst)
    rep = _report(args, [args.instance])
    rep.add({"kind": "reduce", "from_level": inst.k, "to_level": r.reduced.k,
             "constraints_in": inst.size, "constraints_out": r.reduced.size, "reduced": r.reduced.to_json()})
    if args.dump_atlas:
        atlas = {str(x): lvl for x, lvl in sorted(r.atlas.items(), key=lambda kv: str(kv[0]))}
        Path(args.dump_atlas).write_text(json.dumps(atlas, sort_keys=True) + "\n")
        rep.summary["atlas"] = {"path": args.dump_atlas, "sha256": sha256_json(atlas)}
    emit(rep, args.out, args.format)
    return 0


# --- datalog -------------------------------------------------------------------------------------------

def _program(path: str):
    from .gdatalog import DatalogSyntaxError, parse_program

    try:
        return parse_program(Path(path).read_text())
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None
    except DatalogSyntaxError as exc:
        raise CommandError(f"{path}: {exc}") from None


def cmd_datalog_check(args) -> int:
    from .gdatalog import check_linear, check_symmetric, missing_symmetric_rules

    p = _program(args.program)
    linear = check_linear(p)
    rec = {"kind": "datalog_check", "rules": len(p.rules), "idbs": sorted(p.idbs), "edbs": sorted(p.edbs),
           "goal": p.goal, "linear": linear, "symmetric": check_symmetric(p) if linear else False}
    if linear:
        rec["missing_symmetric"] = [str(r) for r in missing_symmetric_rules(p)]
    rep = _report(args, [args.program])
    rep.add(rec)
    emit(rep, args.out, args.format)
    return 0


def _database(path: str):
    from .gdatalog import Database, instance_to_database

    data = _load_json(path)
    if "constraints" in data:
        return instance_to_database(_instance(path))
    return Database.from_json(data)


def cmd_datalog_run(args) -> int:
    from .gdatalog import StageSignatureError, eval_stage1_z2, eval_staged, goal_derived

    if len(args.programs) > 1 and not args.stages:
        raise CommandError("several programs need --stages")
    progs = [_program(p) for p in args.programs]
    db = _database(args.db)
    try:
        result = eval_staged(progs, db) if args.stages else eval_stage1_z2(progs[0], db)
    except StageSignatureError as exc:
        raise CommandError(str(exc)) from None
    last = progs[-1]
    rep = _report(args, [*args.programs, args.db])
    for pred in sorted(result.relations):
        ts = result.relations[pred]
        rec = {"kind": "relation", "predicate": pred, "size": len(ts)}
        if args.show_tuples:
            rec["tuples"] = sorted([list(map(str, t)) for t in ts])
        rep.add(rec)
    if last.goal is not None:
        rep.summary["goal"] = last.goal
        rep.summary["goal_derived"] = goal_derived(last, result)
    emit(rep, args.out, args.format)
    return 0


def cmd_datalog_gen_solve_n1(args) -> int:
    from .gdatalog import format_program, gen_solve_n1_program

    if args.n < 2:
        raise CommandError("need n >= 2")
    text = format_program(gen_solve_n1_program(args.n))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_datalog_gen_lin(args) -> int:
    from .gdatalog import format_program, gen_lin_program

    text = format_program(gen_lin_program())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# --- batch -------------------------------------------------------------------------------------------------

def _sizes(text: str) -> list[int]:
    try:
        out = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CommandError(f"bad size list {text!r}") from None
    if any(s < 0 for s in out):
        raise CommandError("sizes must be nonnegative")
    return out


def cmd_bench(args) -> int:
    from .harness import bench_sweep, fit_bench, growth_ratios

    sizes = _sizes(args.sizes)
    params = {"n": args.n, "k": args.k, "sizes": sizes, "reps": args.reps}
    records = bench_sweep(args.n, args.k, sizes, args.seed, args.reps) if sizes else []
    rep = _report(args, params=params)
    rep.extend(records)
    fit = fit_bench(records, omega=args.omega)
    rep.summary["fit"] = fit
    rep.summary["growth"] = growth_ratios(records)
    if records and not args.no_figure:
        from .report import plot_bench
        path = plot_bench(records, fit, args.figure or figure_path(args.out, "bench.png"))
        rep.summary["figure"] = str(path)
    emit(rep, args.out, args.format)
    return 0


def _seed_range(text: str, seed: int, count: int) -> range:
    if text:
        try:
            a, b = (int(x) for x in text.split(":"))
        except ValueError:
            raise CommandError(f"bad seed range {text!r}; expected START:END") from None
        return range(a, b)
    return range(seed, seed + count)


def cmd_crosscheck(args) -> int:
    from .harness import crosscheck

    seeds = _seed_range(args.seeds, args.seed, args.count)
    rep = _report(args, params={"n": args.n, "k": args.k, "seeds": [seeds.start, seeds.stop],
                                "max_vars": args.max_vars, "max_constraints": args.max_constraints})
    all_records = []
    failure = None
    for n in args.n:
        for k in args.k:
            records, failure = crosscheck(n, k, seeds, args.max_vars, args.max_constraints)
            all_records += records
            if failure is not None:
                break
        if failure is not None:
            break
    rep.extend(all_records)
    rep.summary["disagreements"] = sum(not r["agree"] for r in all_records)
    if failure is not None:
        rep.summary["counterexample"] = failure
    if all_records and not args.no_figure:
        from .report import plot_crosscheck
        rep.summary["figure"] = str(plot_crosscheck(all_records, args.figure or figure_path(args.out, "crosscheck.png")))
    emit(rep, args.out, args.format)
    return 1 if failure is not None else 0


# --- parser ------------------------------------------------------------------------------------------------------

def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json", help="NDJSON (default) or a text table")

    parser = argparse.ArgumentParser(prog="cmcsp", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"cmcsp {__version__}")
    top = parser.add_subparsers(dest="group", required=True, metavar="command")

    def leaf(sub, name: str, fn, help: str):
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(fn=fn)
        return p

    alg = top.add_parser("algebra", help="finite ternary algebras").add_subparsers(dest="cmd", required=True)
    leaf(alg, "check", cmd_algebra_check, "conservative, minority and Maltsev flags; simplicity").add_argument("algebra")
    leaf(alg, "congruences", cmd_algebra_congruences, "the congruence lattice").add_argument("algebra")
    leaf(alg, "monolith", cmd_algebra_monolith, "the least nontrivial congruence").add_argument("algebra")

    tree = top.add_parser("tree", help="conservative minority trees").add_subparsers(dest="cmd", required=True)
    p = leaf(tree, "eval", cmd_tree_eval, "apply the leaf operation to three leaves")
    p.add_argument("tree")
    for name in ("a", "b", "c"):
        p.add_argument(name, help="leaf name, child symbols joined by '.'")
    leaf(tree, "represent", cmd_tree_represent, "simple reduced tree of an algebra").add_argument("algebra")
    leaf(tree, "check", cmd_tree_check, "shape checks and the representation round trip").add_argument("tree")

    pk = top.add_parser("pnk", help="the recursive template structures").add_subparsers(dest="cmd", required=True)
    p = leaf(pk, "build", cmd_pnk_build, "build the structure for (n, k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dump-relations", metavar="PATH", help="write every relation as JSON")

    rb = top.add_parser("relbasis", help="relational bases and critical relations").add_subparsers(dest="cmd", required=True)
    leaf(rb, "catalog", cmd_relbasis_catalog, "the named generating relations").add_argument("algebra")
    p = leaf(rb, "check-critical", cmd_relbasis_check_critical, "criticality of one relation")
    p.add_argument("algebra")
    p.add_argument("relation", help='JSON {"tuples": [...], optional "sorts" and "tuple"}')
    p = leaf(rb, "survey", cmd_relbasis_survey, "arity-3 functional critical relations and their shape")
    p.add_argument("--max-domain", type=int, default=3, help="all algebras up to this size (default 3)")
    p.add_argument("--pnk", action="append", metavar="N,K", help="also include a template algebra")
    p.add_argument("--random", type=int, default=0, help="number of random algebras to add")
    p.add_argument("--random-size", type=int, default=4)

    csp = top.add_parser("csp", help="instances, solving and reductions").add_subparsers(dest="cmd", required=True)
    p = leaf(csp, "gen", cmd_csp_gen, "generate an instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--vars", type=int, default=10)
    p.add_argument("--constraints", type=int, default=25)
    p.add_argument("--mode", default="planted", help="planted, corrupted or random")
    p = leaf(csp, "solve", cmd_csp_solve, "decide an instance; exit 0 on ACCEPT, 1 on REJECT")
    p.add_argument("instance")
    p.add_argument("--literal", action="store_true", help="use the path-quantified equation system at level one")
    leaf(csp, "oracle", cmd_csp_oracle, "backtracking search; exit 0 on ACCEPT, 1 on REJECT").add_argument("instance")
    p = leaf(csp, "reduce", cmd_csp_reduce, "one reduction step")
    p.add_argument("instance")
    p.add_argument("--dump-atlas", metavar="PATH", help="write the variable-to-level map as JSON")

    dl = top.add_parser("datalog", help="Datalog with GF(2) equations").add_subparsers(dest="cmd", required=True)
    leaf(dl, "check", cmd_datalog_check, "linearity and symmetry").add_argument("program")
    p = leaf(dl, "run", cmd_datalog_run, "evaluate on a database or instance file")
    p.add_argument("programs", nargs="+")
    p.add_argument("--db", required=True, help='JSON {"domain": [...], "relations": {...}} or an instance')
    p.add_argument("--stages", action="store_true", help="run the programs as consecutive stages")
    p.add_argument("--show-tuples", action="store_true")
    p = leaf(dl, "gen-solve-n1", cmd_datalog_gen_solve_n1, "the one-stage level-one solver program")
    p.add_argument("--n", type=int, required=True)
    leaf(dl, "gen-lin", cmd_datalog_gen_lin, "the linear-equation program")

    def bench_args(p) -> None:
        p.add_argument("--n", type=_ints, default=[3], help="comma-separated (default 3)")
        p.add_argument("--k", type=_ints, default=[3], help="comma-separated (default 3)")
        p.add_argument("--sizes", default="1000,2000,4000,8000,16000",
                       help="comma-separated constraint counts")
        p.add_argument("--reps", type=int, default=5)
        p.add_argument("--omega", type=float, default=3.0, help="exponent of the Gaussian term in the fit")
        p.add_argument("--figure", help="PNG path (default: next to --out)")
        p.add_argument("--no-figure", action="store_true")

    bench_args(leaf(top, "bench", cmd_bench, "timing sweep over constraint counts with a model fit"))
    bench_args(leaf(csp, "bench", cmd_bench, "same as the top-level bench"))

    p = leaf(top, "crosscheck", cmd_crosscheck, "solve vs oracle vs Datalog on seeded instances; exit 1 on disagreement")
    p.add_argument("--n", type=_ints, default=[2], help="comma-separated (default 2)")
    p.add_argument("--k", type=_ints, default=[1], help="comma-separated (default 1)")
    p.add_argument("--seeds", default="", help="START:END, overrides --seed/--count")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-vars", type=int, default=10)
    p.add_argument("--max-constraints", type=int, default=25)
    p.add_argument("--figure")
    p.add_argument("--no-figure", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    args.command_path = " ".join(x for x in (args.group, getattr(args, "cmd", None)) if x)
    try:
        return args.fn(args)
    except (CommandError, ValueError) as exc:
        print(f"cmcsp: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001 - any failure maps to the error exit code
        print(f"cmcsp: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
