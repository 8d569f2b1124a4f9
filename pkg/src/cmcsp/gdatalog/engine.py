"""Bottom-up evaluation: least fixpoints, the GF(2) step and stage chains."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from ..solver.gf2 import Z2System, gauss_gf2
from .syntax import EQ, LBOT, LTOP, Atom, DatalogProgram, Rule, l_params


class StageSignatureError(ValueError):
    pass


@dataclass
class Database:
    """A finite structure: a domain and named relations of tuples over it."""

    domain: tuple
    relations: dict = field(default_factory=dict)

    def get(self, pred: str) -> set:
        return self.relations.get(pred, set())

    def holds(self, pred: str, args: tuple = ()) -> bool:
        return tuple(args) in self.get(pred)

    def reduct(self, preds: Iterable[str]) -> "Database":
        return Database(self.domain, {p: set(self.get(p)) for p in preds})

    def copy(self) -> "Database":
        return Database(self.domain, {p: set(ts) for p, ts in self.relations.items()})

    def size(self) -> int:
        return sum(len(ts) for ts in self.relations.values())

    def to_json(self) -> dict:
        return {"domain": list(self.domain),
                "relations": {p: sorted(list(t) for t in ts) for p, ts in sorted(self.relations.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "Database":
        rels = {p: {tuple(t) for t in ts} for p, ts in data.get("relations", {}).items()}
        domain = data.get("domain")
        if domain is None:
            domain = sorted({x for ts in rels.values() for t in ts for x in t}, key=str)
        return cls(tuple(domain), rels)


class _Store:
    """Relations with lazily built hash indexes on bound positions."""

    def __init__(self, db: Database) -> None:
        self.domain = db.domain
        self.rels: dict = {p: set(ts) for p, ts in db.relations.items()}
        self.indexes: dict = {}

    def index(self, pred: str, positions: tuple) -> dict:
        per_pred = self.indexes.setdefault(pred, {})
        idx = per_pred.get(positions)
        if idx is None:
            idx = {}
            for t in self.rels.get(pred, ()):
                idx.setdefault(tuple(t[i] for i in positions), []).append(t)
            per_pred[positions] = idx
        return idx

    def add(self, pred: str, t: tuple) -> bool:
        rel = self.rels.setdefault(pred, set())
        if t in rel:
            return False
        rel.add(t)
        for positions, idx in self.indexes.get(pred, {}).items():
            idx.setdefault(tuple(t[i] for i in positions), []).append(t)
        return True


def _unify(atom: Atom, t: tuple, env: dict) -> dict | None:
    new = dict(env)
    for v, x in zip(atom.args, t):
        y = new.get(v)
        if y is None:
            new[v] = x
        elif y != x:
            return None
    return new


def _order(atoms: list[Atom], bound: set) -> list[Atom]:
    """Greedy join order: most bound variables first, equality atoms once fully bound."""
    rest = list(atoms)
    out = []
    bound = set(bound)
    while rest:
        def score(a: Atom):
            nb = sum(v in bound for v in a.args)
            if a.pred == EQ:
                return (2 if nb == 2 else (1 if nb == 1 else -1), 0)
            return (1 if nb == len(a.args) else 0, nb)
        best = max(rest, key=score)
        rest.remove(best)
        out.append(best)
        bound |= set(best.args)
    return out


def _join(store: _Store, atoms: list[Atom], env: dict):
    if not atoms:
        yield env
        return
    a, rest = atoms[0], atoms[1:]
    if a.pred == EQ:
        x, y = a.args
        vx, vy = env.get(x), env.get(y)
        if vx is not None and vy is not None:
            if vx == vy:
                yield from _join(store, rest, env)
        elif vx is not None or vy is not None:
            val = vx if vx is not None else vy
            yield from _join(store, rest, {**env, x: val, y: val})
        else:
            for d in store.domain:
                yield from _join(store, rest, {**env, x: d, y: d})
        return
    positions = tuple(i for i, v in enumerate(a.args) if v in env)
    if len(positions) == len(a.args):
        if tuple(env[v] for v in a.args) in store.rels.get(a.pred, ()):
            yield from _join(store, rest, env)
        return
    if positions:
        cands = store.index(a.pred, positions).get(tuple(env[a.args[i]] for i in positions), ())
    else:
        cands = store.rels.get(a.pred, ())
    for t in list(cands):
        new = _unify(a, t, env)
        if new is not None:
            yield from _join(store, rest, new)


class _Compiled:
    def __init__(self, rules: list[Rule], idbs: set) -> None:
        self.base: list = []
        self.triggers: dict = {}
        for r in rules:
            idb_pos = [i for i, a in enumerate(r.body) if a.pred in idbs]
            if not idb_pos:
                self.base.append((r, _order(list(r.body), set())))
            for i in idb_pos:
                others = [a for j, a in enumerate(r.body) if j != i]
                order = _order(others, set(r.body[i].args))
                self.triggers.setdefault(r.body[i].pred, []).append((r, r.body[i], order))


def _head(rule: Rule, env: dict) -> tuple:
    return tuple(env[v] for v in rule.head.args)


def _fixpoint(rules: list[Rule], idbs: set, store: _Store) -> None:
    comp = _Compiled(rules, idbs)
    # facts given up front for IDB predicates also trigger rules
    queue: deque = deque((pred, t) for pred in comp.triggers for t in store.rels.get(pred, ()))
    for r, order in comp.base:
        for env in _join(store, order, {}):
            t = _head(r, env)
            if store.add(r.head.pred, t):
                queue.append((r.head.pred, t))
    while queue:
        pred, t = queue.popleft()
        for r, atom, order in comp.triggers.get(pred, ()):
            env = _unify(atom, t, {})
            if env is None:
                continue
            for out in _join(store, order, env):
                h = _head(r, out)
                if store.add(r.head.pred, h):
                    queue.append((r.head.pred, h))


def _split_closing(p: DatalogProgram) -> tuple[list[Rule], list[Rule]]:
    main, closing = [], []
    for r in p.rules:
        (closing if any(a.pred in (LTOP, LBOT) for a in r.body) else main).append(r)
    return main, closing


def eval_fixpoint(p: DatalogProgram, db: Database) -> Database:
    """The least fixpoint of all rules; equation predicates are kept as plain relations."""
    store = _Store(db)
    _fixpoint(list(p.rules), p.idbs, store)
    return Database(db.domain, store.rels)


@dataclass
class Z2Step:
    """The systems built from the equation predicates, one per prefix."""

    systems: dict = field(default_factory=dict)
    satisfiable: dict = field(default_factory=dict)


def equation_systems(p: DatalogProgram, rels: dict) -> dict:
    k = p.equation_arity
    systems: dict = {}
    if k is None:
        return systems
    if k == 0:
        systems[()] = Z2System()
    for pred, ts in rels.items():
        params = l_params(pred)
        if params is None:
            continue
        _, a1, a2, a3, b = params
        for t in ts:
            prefix, vs = t[:k], t[k:]
            xs = [v for a, v in zip((a1, a2, a3), vs) if a]
            systems.setdefault(prefix, Z2System()).add(xs, b)
    return systems


def eval_stage1_z2(p: DatalogProgram, db: Database, step: Z2Step | None = None) -> Database:
    """Fixpoint, then ``Ltop``/``Lbot`` per prefix by Gaussian elimination, then one closing pass.

    Rules reading ``Ltop`` or ``Lbot`` are left out of the fixpoint and fire
    once at the end, without further recursion.
    """
    main, closing = _split_closing(p)
    store = _Store(db)
    _fixpoint(main, p.idbs, store)
    systems = equation_systems(p, store.rels)
    if p.equation_arity is not None:
        store.rels.setdefault(LTOP, set())
        store.rels.setdefault(LBOT, set())
    for prefix in sorted(systems, key=str):
        ok = gauss_gf2(systems[prefix]) is not None
        store.add(LTOP if ok else LBOT, prefix)
        if step is not None:
            step.systems[prefix] = systems[prefix]
            step.satisfiable[prefix] = ok
    derived = []
    for r in closing:
        order = _order(list(r.body), set())
        derived.extend((r.head.pred, _head(r, env)) for env in _join(store, order, {}))
    for pred, t in derived:
        store.add(pred, t)
    return Database(db.domain, store.rels)


def outputs_of(p: DatalogProgram) -> tuple:
    if p.outputs:
        return p.outputs
    return tuple(sorted(p.idbs))


def eval_staged(stages: list[DatalogProgram], db: Database) -> Database:
    """Run the stages in order, each on the output reduct of the previous one."""
    current = db
    available = set(db.relations)
    for i, stage in enumerate(stages):
        missing = stage.edbs - available
        if i > 0 and missing:
            raise StageSignatureError(f"stage {i + 1} reads {sorted(missing)} not output by stage {i}")
        result = eval_stage1_z2(stage, current)
        outs = outputs_of(stage)
        current = result.reduct(outs)
        available = set(outs)
    return current


def goal_derived(p: DatalogProgram, result: Database) -> bool:
    if p.goal is None:
        raise ValueError("program has no goal predicate")
    return bool(result.get(p.goal))


__all__ = [
    "StageSignatureError", "Database", "eval_fixpoint", "Z2Step", "equation_systems", "eval_stage1_z2",
    "outputs_of", "eval_staged", "goal_derived",
]
