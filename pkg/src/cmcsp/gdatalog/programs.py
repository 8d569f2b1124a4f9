"""Generated programs: the Boolean linear-equation program and the level-one solver.

The level-one program works with three families of binary facts about a
root ``x`` and a variable ``y`` joined to it by bijection edges:

* ``T_j_b(x,y)``: ``x`` avoids ``0..j-1``, and ``x = j`` forces ``y = b``.
  Ruling out value ``j`` moves to level ``j+1``; ruling out every value
  emits the contradiction ``0 = 1``.
* ``H_c_b(x,y)`` for a linear-triple variable ``x``: ``x = c`` forces
  ``y = b``.  Ruling out ``x = c`` emits ``x = 1-c``.
* ``W_p(x,y)``: every solution has ``y = p(x)``.  When ``p`` maps ``{0,1}``
  onto itself and both ends sit in linear triples, emits ``x + y = p(0)``.

Each fact stays true in every solution when read as an implication, so
running any rule backwards (as symmetry demands) never derives a false
fact.  This keeps the goal sound; completeness follows because the
forward rules reproduce the exact level-one decision procedure.
"""

from __future__ import annotations

import re
from functools import lru_cache
from itertools import permutations, product

from .. import pnk
from ..signature import Symbol, symbols
from ..solver.instance import Instance
from .analysis import symmetric_closure
from .engine import Database, eval_stage1_z2, goal_derived
from .syntax import EQ, LBOT, Atom, DatalogProgram, Rule, l_name

# --- the linear-equation program ----------------------------------------------------------


def gen_lin_program() -> DatalogProgram:
    """Five recursion-free rules turning ``L, G, E, R0, R1`` atoms into equations.

    ``L(x,y,z)`` reads ``x+y+z = 1``, ``G(x,y)`` reads ``x+y = 1``, ``E(x,y)``
    reads ``x+y = 0`` and ``R0``/``R1`` fix a value.  Positions with a zero
    coefficient repeat a bound variable so every rule stays safe.
    """
    rules = [
        Rule(Atom(l_name(0, 1, 1, 1, 1), ("x", "y", "z")), (Atom("L", ("x", "y", "z")),)),
        Rule(Atom(l_name(0, 1, 1, 0, 1), ("x", "y", "y")), (Atom("G", ("x", "y")),)),
        Rule(Atom(l_name(0, 1, 1, 0, 0), ("x", "y", "y")), (Atom("E", ("x", "y")),)),
        Rule(Atom(l_name(0, 1, 0, 0, 0), ("x", "x", "x")), (Atom("R0", ("x",)),)),
        Rule(Atom(l_name(0, 1, 0, 0, 1), ("x", "x", "x")), (Atom("R1", ("x",)),)),
    ]
    prog = DatalogProgram(rules, goal=LBOT)
    prog.validate()
    return prog


# --- encoding level-one instances ------------------------------------------------------------

def edb_name(sym: Symbol) -> str:
    """An identifier for a template symbol."""
    return re.sub(r"[^A-Za-z0-9]+", "_", str(sym)).strip("_")


@lru_cache(maxsize=None)
def symbol_views(n: int, sym: Symbol) -> dict:
    """Read a level-one relation as unary sets, bijection edges and linear triples.

    Returns ``{"unary": [(pos, allowed)], "edges": [(i, j, perm)], "lin": bool}``;
    the views together must reproduce the relation exactly.
    """
    rel = {tuple(v[0] for v in t) for t in pnk.relation(n, sym)}
    ar = sym.arity
    every = set(range(n))
    views: dict = {"unary": [], "edges": [], "lin": False}
    if ar == 1:
        views["unary"].append((0, frozenset(t[0] for t in rel)))
        return views
    if ar == 3:
        if rel == {(a, a, a) for a in range(n)}:
            ident = tuple(range(n))
            views["edges"] = [(0, 1, ident), (1, 2, ident)]
        elif rel == {t for t in product((0, 1), repeat=3) if sum(t) % 2 == 1}:
            views["lin"] = True
        else:
            raise ValueError(f"no view for ternary symbol {sym}")
        return views
    firsts = {a for a, _ in rel}
    seconds = {b for _, b in rel}
    if len(rel) == n and firsts == seconds == every:
        perm = [0] * n
        for a, b in rel:
            perm[a] = b
        views["edges"].append((0, 1, tuple(perm)))
    elif rel == set(product(firsts, seconds)):
        if firsts != every:
            views["unary"].append((0, frozenset(firsts)))
        if seconds != every:
            views["unary"].append((1, frozenset(seconds)))
    else:
        raise ValueError(f"no view for binary symbol {sym}")
    return views


def instance_to_database(inst: Instance) -> Database:
    if inst.k != 1:
        raise ValueError("the generated program reads level-one instances")
    rels = {edb_name(s): set(ts) for s, ts in inst.constraints.items()}
    return Database(tuple(inst.variables), rels)


# --- the level-one solver program -------------------------------------------------------------

def _atom(sym: Symbol, fixed: dict) -> Atom:
    """An atom for ``sym`` with the given positions fixed and fresh variables elsewhere."""
    args = tuple(fixed.get(i, f"w{i}") for i in range(sym.arity))
    return Atom(edb_name(sym), args)


def _compose(q: tuple, p: tuple) -> tuple:
    return tuple(q[p[a]] for a in range(len(p)))


def _inverse(p: tuple) -> tuple:
    inv = [0] * len(p)
    for a, b in enumerate(p):
        inv[b] = a
    return tuple(inv)


def _t(j: int, b: int) -> str:
    return f"T_{j}_{b}"


def _h(c: int, b: int) -> str:
    return f"H_{c}_{b}"


def _w(p: tuple) -> str:
    return "W_" + "".join(str(a) for a in p)


def gen_solve_n1_program(n: int) -> DatalogProgram:
    """A one-stage symmetric linear program deriving ``Lbot`` exactly on unsatisfiable level-one instances."""
    if n < 2:
        raise ValueError("n must be at least 2")
    syms = symbols(n, 1)
    unary: list = []   # (body atom at variable y, allowed set)
    edges: list = []   # (body atom over y -> z, permutation)
    lin_syms = []
    for s in syms:
        v = symbol_views(n, s)
        for pos, allowed in v["unary"]:
            unary.append((_atom(s, {pos: "y"}), allowed))
        for i, j, p in v["edges"]:
            edges.append((_atom(s, {i: "y", j: "z"}), p))
        if v["lin"]:
            lin_syms.append(s)
    lin_at = {var: [_atom(s, {pos: var}) for s in lin_syms for pos in range(3)] for var in ("x", "y")}
    # linear-triple variables must take 0 or 1
    checks = unary + [(a, frozenset((0, 1))) for a in lin_at["y"]]
    rules: list = []
    contradiction = Atom(l_name(0, 0, 0, 0, 1), ("x", "x", "x"))

    def walk_rules(name, states, act) -> None:
        for st in states:
            for atom, p in edges:
                rules.append(Rule(Atom(name(act(st, p)), ("x", "z")), (Atom(name(st), ("x", "y")), atom)))
                rules.append(Rule(Atom(name(act(st, _inverse(p))), ("x", "y")), (Atom(name(st), ("x", "z")), atom)))

    # value-by-value elimination for every root
    rules.append(Rule(Atom(_t(0, 0), ("x", "x")), (Atom(EQ, ("x", "x")),)))
    walk_rules(lambda st: _t(*st), list(product(range(n), range(n))), lambda st, p: (st[0], p[st[1]]))
    for j, b in product(range(n), range(n)):
        up = Atom(_t(j + 1, j + 1), ("x", "x")) if j + 1 < n else contradiction
        for atom, allowed in checks:
            if b not in allowed:
                rules.append(Rule(up, (Atom(_t(j, b), ("x", "y")), atom)))
        if b != j:
            rules.append(Rule(up, (Atom(_t(j, b), ("x", "x")),)))
    # hypotheses x = c for linear-triple variables
    for c in (0, 1):
        for start in lin_at["x"]:
            rules.append(Rule(Atom(_h(c, c), ("x", "x")), (start,)))
    walk_rules(lambda st: _h(*st), list(product((0, 1), range(n))), lambda st, p: (st[0], p[st[1]]))
    for c, b in product((0, 1), range(n)):
        excl = Atom(l_name(0, 1, 0, 0, 1 - c), ("x", "x", "x"))
        for atom, allowed in checks:
            if b not in allowed:
                rules.append(Rule(excl, (Atom(_h(c, b), ("x", "y")), atom)))
        if b != c:
            rules.append(Rule(excl, (Atom(_h(c, b), ("x", "x")),)))
    # composites of bijection walks between linear-triple variables
    ident = tuple(range(n))
    perms = list(permutations(range(n)))
    for start in lin_at["x"]:
        rules.append(Rule(Atom(_w(ident), ("x", "x")), (start,)))
    walk_rules(_w, perms, lambda st, p: _compose(p, st))
    for p in perms:
        if {p[0], p[1]} == {0, 1}:
            for atom in lin_at["y"]:
                rules.append(Rule(Atom(l_name(0, 1, 1, 0, p[0]), ("x", "y", "y")), (Atom(_w(p), ("x", "y")), atom)))
    # the linear triples themselves
    for s in lin_syms:
        rules.append(Rule(Atom(l_name(0, 1, 1, 1, 1), ("x", "y", "z")), (Atom(edb_name(s), ("x", "y", "z")),)))
    prog = symmetric_closure(DatalogProgram(_dedupe(rules), goal=LBOT))
    prog.validate()
    return prog


def _dedupe(rules: list[Rule]) -> list[Rule]:
    seen: set = set()
    out = []
    for r in rules:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


@lru_cache(maxsize=8)
def solve_n1_program(n: int) -> DatalogProgram:
    return gen_solve_n1_program(n)


def datalog_rejects(inst: Instance) -> bool:
    """Whether the generated program derives its goal on ``inst``."""
    prog = solve_n1_program(inst.n)
    return goal_derived(prog, eval_stage1_z2(prog, instance_to_database(inst)))


__all__ = [
    "gen_lin_program", "edb_name", "symbol_views", "instance_to_database", "gen_solve_n1_program",
    "solve_n1_program", "datalog_rejects",
]
