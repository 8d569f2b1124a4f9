"""One-level reductions, solution projection and lifting, and the full decision procedure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .. import pnk
from ..errors import InconsistencyError
from ..signature import EMPTY, EQ2, EQ3, POINT, Full, Transfer, eq_symbol, is_uniform, sub_s
from .instance import (
    Instance,
    UnionFind,
    inner_restriction,
    make_concise,
    make_transfer_compatible,
    outer_restriction,
    uniform_product,
)
from .level_one import solve_linear_exact, split_by_component, to_linear_instance


@dataclass
class ReduceResult:
    """A reduction of ``source`` (level ``k+1``) to ``reduced`` (level ``k``) with its atlas.

    At level one, ``witnesses`` holds a solution of every satisfiable
    component.  Higher up, ``sources`` are the variables of transfer-source
    components and ``inner`` is the reduction of the inner restriction of
    the remaining uniform part.
    """

    source: Instance
    reduced: Instance
    atlas: dict
    witnesses: dict = field(default_factory=dict)
    sources: frozenset = frozenset()
    components: list = field(default_factory=list)
    inner: "ReduceResult | None" = None
    prepared: Instance | None = None

    @property
    def level(self) -> int:
        return self.source.k


def reduce_level_one(inst: Instance, stats: dict | None = None) -> ReduceResult:
    """Collapse each connected component to the one-point structure, empty if unsatisfiable."""
    out = Instance(inst.n, 0, inst.variables)
    for s, ts in inst.constraints.items():
        if s.arity == 2:
            out.constraints.setdefault(EQ2, set()).update(ts)
        elif s.arity == 3:
            out.constraints.setdefault(EQ3, set()).update(ts)
    witnesses: dict = {}
    points, empties = set(), set()
    for part in split_by_component(to_linear_instance(inst)):
        res = solve_linear_exact(part, stats)
        if res.accept:
            witnesses.update((x, (c,)) for x, c in res.witness.items())
            points.update((x,) for x in part.variables)
        else:
            empties.update((x,) for x in part.variables)
    if points:
        out.constraints[POINT] = points
    if empties:
        out.constraints[EMPTY] = empties
    return ReduceResult(inst, out, {x: 0 for x in inst.variables}, witnesses=witnesses)


def reduce_instance(inst: Instance, stats: dict | None = None) -> ReduceResult:
    """Reduce a level ``k+1`` instance to level ``k``."""
    if inst.k < 1:
        raise ValueError("nothing to reduce at level 0")
    if inst.k == 1:
        return reduce_level_one(inst, stats)
    n, big = inst.n, inst.k
    k = big - 1
    prepared = make_concise(make_transfer_compatible(inst))
    transfer = Transfer(big)
    uniform_cons, other_cons = {}, {}
    for s, ts in prepared.constraints.items():
        (uniform_cons if is_uniform(s) else other_cons)[s] = ts

    uf = UnionFind(prepared.variables)
    for s, ts in uniform_cons.items():
        if s.arity > 1:
            for t in ts:
                for v in t[1:]:
                    uf.union(t[0], v)
    comps = uf.groups(prepared.variables)
    source_vars = {x for x, _ in other_cons.get(transfer, ())}
    source_roots = {uf.find(x) for x in source_vars}
    in_source = {x for x in prepared.variables if uf.find(x) in source_roots}
    rest = [x for x in prepared.variables if x not in in_source]

    src_part = Instance(n, big, [x for x in prepared.variables if x in in_source])
    rest_part = Instance(n, big, rest)
    for s, ts in uniform_cons.items():
        for t in ts:
            (src_part if t[0] in in_source else rest_part).constraints.setdefault(s, set()).add(t)

    reduced = inner_restriction(src_part)
    atlas = {x: 0 for x in src_part.variables}
    sub = None
    if rest:
        sub = reduce_instance(inner_restriction(rest_part), stats)
        product = uniform_product(sub.reduced, outer_restriction(rest_part))
        for s, ts in product.constraints.items():
            reduced.constraints.setdefault(s, set()).update(ts)
        for x in rest:
            atlas[x] = sub.atlas[x] + 1
    reduced.variables = prepared.variables

    full = other_cons.get(Full(big))
    if full:
        reduced.constraints.setdefault(Full(k), set()).update(full)
    for x, y in other_cons.get(transfer, ()):
        if x not in in_source:
            raise InconsistencyError("transfer source outside the source components")
        level = atlas[y]
        sym = sub_s(n, k - level, level) if level < k else eq_symbol(n, k)
        reduced.constraints.setdefault(sym, set()).add((x, y))
    return ReduceResult(inst, reduced, atlas, sources=frozenset(in_source), components=comps,
                        inner=sub, prepared=prepared)


def project_solution(result: ReduceResult, sol: Mapping) -> dict:
    """Map a solution of the source instance to one of the reduced instance."""
    k = result.level - 1
    if k == 0:
        return {x: () for x in result.source.variables}
    out = {}
    for x in result.source.variables:
        level = result.atlas[x]
        out[x] = pnk.phi_collapse(k, sol[x]) if level == k else pnk.psi_inverse(level, sol[x])
    return out


def lift_solution(result: ReduceResult, sol: Mapping) -> dict:
    """Map a solution of the reduced instance (on a union of components) back to the source."""
    if result.level == 1:
        try:
            return {x: result.witnesses[x] for x in sol}
        except KeyError as exc:
            raise InconsistencyError(f"no witness stored for {exc.args[0]!r}") from None
    out: dict = {}
    inner_part: dict = {}
    for x, v in sol.items():
        if x in result.sources:
            out[x] = (0,) + v
        elif v[0] != 0:
            out[x] = v
        else:
            inner_part[x] = v[1:]
    if inner_part:
        assert result.inner is not None
        for x, v in lift_solution(result.inner, inner_part).items():
            out[x] = (0,) + v
    return out


@dataclass
class SolveResult:
    accept: bool
    witness: dict | None
    chain: list
    equations_ok: bool = True
    perm_ok: bool = True

    @property
    def verdict(self) -> str:
        return "ACCEPT" if self.accept else "REJECT"


def solve(inst: Instance, witness: bool = True, stats: dict | None = None) -> SolveResult:
    """Reduce down to level one, decide there, and lift a witness back up."""
    if inst.k == 0:
        ok = not inst.constraints.get(EMPTY)
        return SolveResult(ok, {x: () for x in inst.variables} if ok else None, [])
    chain = []
    cur = inst
    while cur.k > 1:
        r = reduce_instance(cur, stats)
        chain.append(r)
        cur = r.reduced
    li = to_linear_instance(cur)
    res = solve_linear_exact(li, stats)
    if not res.accept:
        return SolveResult(False, None, chain, res.equations_ok, res.perm_ok)
    sol = None
    if witness:
        sol = {x: (c,) for x, c in res.witness.items()}
        for r in reversed(chain):
            sol = lift_solution(r, sol)
    return SolveResult(True, sol, chain, res.equations_ok, res.perm_ok)


__all__ = [
    "ReduceResult", "reduce_level_one", "reduce_instance", "project_solution", "lift_solution",
    "SolveResult", "solve",
]
