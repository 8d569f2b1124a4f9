"""CSP instances over the recursive structures and the instance transformations used by the reduction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .. import pnk
from ..errors import InconsistencyError
from ..signature import (
    OSymbol,
    Pair,
    Symbol,
    Transfer,
    check_symbol,
    is_uniform,
    parse_symbol,
)

Var = Hashable


@dataclass
class Instance:
    """Variables plus, per symbol, a set of variable tuples.

    Instances are treated as values: transformations return new instances.
    """

    n: int
    k: int
    variables: tuple
    constraints: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.variables = tuple(self.variables)
        self.constraints = {s: set(map(tuple, ts)) for s, ts in self.constraints.items() if ts}

    def add(self, sym: Symbol, tup: tuple) -> None:
        self.constraints.setdefault(sym, set()).add(tuple(tup))

    def items(self) -> Iterable[tuple[Symbol, tuple]]:
        for s, ts in self.constraints.items():
            for t in ts:
                yield s, t

    @property
    def size(self) -> int:
        return sum(len(ts) for ts in self.constraints.values())

    def validate(self) -> None:
        vs = set(self.variables)
        for s, ts in self.constraints.items():
            check_symbol(s, self.n, self.k)
            for t in ts:
                if len(t) != s.arity:
                    raise ValueError(f"tuple {t} does not match arity of {s}")
                if not set(t) <= vs:
                    raise ValueError(f"tuple {t} uses undeclared variables")

    def restrict(self, variables: Iterable[Var]) -> "Instance":
        vs = set(variables)
        cons = {s: {t for t in ts if set(t) <= vs} for s, ts in self.constraints.items()}
        return Instance(self.n, self.k, tuple(v for v in self.variables if v in vs), cons)

    def support(self, arity: int) -> set[tuple]:
        return {t for s, ts in self.constraints.items() if s.arity == arity for t in ts}

    def is_concise(self) -> bool:
        count: dict = {}
        for s, ts in self.constraints.items():
            if s.arity == 1:
                for (x,) in ts:
                    count[x] = count.get(x, 0) + 1
        return all(count.get(x) == 1 for x in self.variables)

    # serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "variables": [str(v) for v in self.variables],
            "constraints": [
                {"symbol": str(s), "tuples": sorted([str(v) for v in t] for t in ts)}
                for s, ts in sorted(self.constraints.items(), key=lambda kv: str(kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Instance":
        cons: dict = {}
        for entry in data.get("constraints", []):
            sym = parse_symbol(entry["symbol"])
            cons.setdefault(sym, set()).update(tuple(t) for t in entry["tuples"])
        inst = cls(int(data["n"]), int(data["k"]), tuple(data["variables"]), cons)
        inst.validate()
        return inst


@dataclass
class OuterInstance:
    """An instance over the structure on the nonzero children ``1..n-1``."""

    n: int
    variables: tuple
    constraints: dict = field(default_factory=dict)

    def add(self, sym: OSymbol, tup: tuple) -> None:
        self.constraints.setdefault(sym, set()).add(tuple(tup))


# --- solutions ---------------------------------------------------------------------

def satisfies(inst: Instance, sol: Mapping) -> bool:
    return not violations(inst, sol)


def violations(inst: Instance, sol: Mapping) -> list[tuple[Symbol, tuple]]:
    """Constraints not satisfied by ``sol`` (missing or non-leaf values count as violations)."""
    domain = pnk.leaf_index(inst.n, inst.k)
    if any(sol.get(x) not in domain for x in inst.variables):
        return [(None, (x,)) for x in inst.variables if sol.get(x) not in domain]
    bad = []
    for s, ts in inst.constraints.items():
        rel = pnk.relation(inst.n, s)
        for t in ts:
            if tuple(sol[x] for x in t) not in rel:
                bad.append((s, t))
    return bad


# --- transformations -------------------------------------------------------------------

def make_transfer_compatible(inst: Instance) -> Instance:
    """Constrain every transfer target to the image of the deepest embedding."""
    if inst.k < 1:
        return inst
    out = Instance(inst.n, inst.k, inst.variables, inst.constraints)
    targets = {y for _, y in inst.constraints.get(Transfer(inst.k), ())}
    if targets:
        sym = pnk.subalgebra_symbol(inst.n, inst.k, inst.k - 1)
        for y in targets:
            out.add(sym, (y,))
    return out


def make_concise(inst: Instance) -> Instance:
    """Replace the unary constraints of each variable by one symbol naming their intersection."""
    n, k = inst.n, inst.k
    full = frozenset(pnk.leaves(n, k))
    allowed = {x: full for x in inst.variables}
    rest = {}
    for s, ts in inst.constraints.items():
        if s.arity == 1:
            vals = pnk.unary_set(n, s)
            for (x,) in ts:
                allowed[x] = allowed[x] & vals
        else:
            rest[s] = ts
    out = Instance(n, k, inst.variables, rest)
    for x, vals in allowed.items():
        out.add(pnk.unary_symbol(n, k, vals), (x,))
    return out


class UnionFind:
    def __init__(self, items: Iterable[Var] = ()) -> None:
        self.parent: dict = {x: x for x in items}

    def find(self, x: Var) -> Var:
        parent = self.parent
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: Var, b: Var) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def groups(self, items: Iterable[Var]) -> list[list]:
        out: dict = {}
        for x in items:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def components(inst: Instance, uniform_only: bool = False) -> list[list]:
    """Connected components of the constraint graph, in variable order."""
    uf = UnionFind(inst.variables)
    for s, ts in inst.constraints.items():
        if s.arity == 1 or (uniform_only and not is_uniform(s)):
            continue
        for t in ts:
            for v in t[1:]:
                uf.union(t[0], v)
    return uf.groups(inst.variables)


def source_components(inst: Instance) -> tuple[list[list], list[bool]]:
    """Uniform components and whether each contains the source of a transfer edge."""
    comps = components(inst, uniform_only=True)
    sources = {x for x, _ in inst.constraints.get(Transfer(inst.k), ())}
    return comps, [any(x in sources for x in c) for c in comps]


def inner_restriction(inst: Instance) -> Instance:
    out = Instance(inst.n, inst.k - 1, inst.variables)
    for s, ts in inst.constraints.items():
        if not isinstance(s, Pair):
            raise ValueError(f"inner restriction of nonuniform symbol {s}")
        out.constraints.setdefault(s.inner, set()).update(ts)
    return out


def outer_restriction(inst: Instance) -> OuterInstance:
    out = OuterInstance(inst.n, inst.variables)
    for s, ts in inst.constraints.items():
        if not isinstance(s, Pair):
            raise ValueError(f"outer restriction of nonuniform symbol {s}")
        out.constraints.setdefault(s.outer, set()).update(ts)
    return out


def uniform_product(inner: Instance, outer: OuterInstance) -> Instance:
    """Pair every inner symbol with every outer symbol on a common tuple."""
    if set(inner.variables) != set(outer.variables):
        raise ValueError("instances have different variable sets")
    by_tuple_in: dict = {}
    for s, ts in inner.constraints.items():
        for t in ts:
            by_tuple_in.setdefault(t, []).append(s)
    by_tuple_out: dict = {}
    for o, ts in outer.constraints.items():
        for t in ts:
            by_tuple_out.setdefault(t, []).append(o)
    if set(by_tuple_in) != set(by_tuple_out):
        raise InconsistencyError("supports of the two instances differ")
    out = Instance(inner.n, inner.k + 1, inner.variables)
    cons = out.constraints
    for t, syms in by_tuple_in.items():
        for s in syms:
            for o in by_tuple_out[t]:
                cons.setdefault(Pair(s, o), set()).add(t)
    return out


__all__ = [
    "Var", "Instance", "OuterInstance", "satisfies", "violations", "make_transfer_compatible",
    "make_concise", "UnionFind", "components", "source_components", "inner_restriction",
    "outer_restriction", "uniform_product",
]
