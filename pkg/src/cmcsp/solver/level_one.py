"""Solving instances at level one through unary sets, bijection edges and ``x+y+z=1`` triples.

Level-one leaves ``(c,)`` are renamed to ``c``.  An instance becomes a list of
allowed sets, permutation edges ``s(v) = p[s(u)]`` and linear triples; the
nonuniform ``full`` symbol only contributes connectivity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from ..signature import EQ3, POINT, Full, Lin, Pair, Swap01, Transfer
from .gf2 import Z2System, gauss_gf2
from .instance import Instance, UnionFind


@dataclass
class LinearInstance:
    """Instance over ``{0..n-1}`` with unary sets, bijection edges and linear triples."""

    n: int
    variables: tuple
    allowed: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)
    lin: list = field(default_factory=list)
    links: list = field(default_factory=list)

    def restrict(self, variables: Iterable[Hashable]) -> "LinearInstance":
        vs = set(variables)
        return LinearInstance(
            self.n,
            tuple(v for v in self.variables if v in vs),
            {x: a for x, a in self.allowed.items() if x in vs},
            [e for e in self.edges if e[0] in vs],
            [t for t in self.lin if t[0] in vs],
            [e for e in self.links if e[0] in vs],
        )

    def perm_system(self) -> "LinearInstance":
        """The same instance with the linear triples removed."""
        return LinearInstance(self.n, self.variables, dict(self.allowed), list(self.edges), [], list(self.links))

    def satisfied_by(self, values: dict) -> bool:
        if any(values[x] not in a for x, a in self.allowed.items()):
            return False
        if any(p[values[u]] != values[v] for u, v, p in self.edges):
            return False
        return all(sorted((values[x], values[y], values[z])) in ([0, 0, 1], [1, 1, 1])
                   for x, y, z in self.lin)


def to_linear_instance(inst: Instance) -> LinearInstance:
    if inst.k != 1:
        raise ValueError("translation applies to level-one instances")
    n = inst.n
    out = LinearInstance(n, inst.variables)
    every = frozenset(range(n))
    allowed = out.allowed

    def restrict(x, vals) -> None:
        allowed[x] = allowed.get(x, every) & vals

    swap = (1, 0) + tuple(range(2, n))
    for s, ts in inst.constraints.items():
        if isinstance(s, Pair):
            if s.arity == 1:
                vals = frozenset(s.outer.members) | ({0} if s.inner == POINT else frozenset())
                for (x,) in ts:
                    restrict(x, vals)
            elif s.arity == 2:
                p = (0,) + s.outer.images
                out.edges.extend((x, y, p) for x, y in ts)
            else:
                assert s.inner == EQ3
                ident = tuple(range(n))
                for x, y, z in ts:
                    out.edges.append((x, y, ident))
                    out.edges.append((y, z, ident))
        elif isinstance(s, Full):
            out.links.extend(ts)
        elif isinstance(s, Transfer):
            for x, y in ts:
                restrict(x, frozenset({0}))
                restrict(y, frozenset({0}))
        elif isinstance(s, Swap01):
            out.edges.extend((x, y, swap) for x, y in ts)
        elif isinstance(s, Lin):
            out.lin.extend(ts)
        else:
            raise ValueError(f"{s} is not a level-one symbol")
    return out


@dataclass
class LevelOneResult:
    accept: bool
    equations_ok: bool
    perm_ok: bool
    witness: dict | None
    system: Z2System


def _inverse(p: tuple) -> tuple:
    inv = [0] * len(p)
    for a, b in enumerate(p):
        inv[b] = a
    return tuple(inv)


def solve_linear_exact(li: LinearInstance, stats: dict | None = None) -> LevelOneResult:
    """Decide ``li`` exactly and build a witness.

    Each bijection component is parametrized by the value ``a`` of its root;
    ``pi[v][a]`` is the forced value of ``v``.  Root values consistent with
    every edge and unary set are the candidates.  A component touching a
    linear triple contributes equations tying its triple variables to one
    anchor variable, which fully describes its admissible 0/1 patterns.
    """
    n = li.n
    every = range(n)
    adj: dict = {}
    for u, v, p in li.edges:
        adj.setdefault(u, []).append((v, p))
        adj.setdefault(v, []).append((u, _inverse(p)))
    lin_vars = {x for t in li.lin for x in t}
    allowed = li.allowed
    system = Z2System()
    comps = []
    seen: set = set()
    perm_ok = True
    for root in li.variables:
        if root in seen:
            continue
        pi = {root: tuple(every)}
        order = [root]
        ok = [True] * n
        queue = deque([root])
        seen.add(root)
        while queue:
            u = queue.popleft()
            pu = pi[u]
            for w, p in adj.get(u, ()):
                val = tuple(p[b] for b in pu)
                pw = pi.get(w)
                if pw is None:
                    pi[w] = val
                    order.append(w)
                    seen.add(w)
                    queue.append(w)
                elif pw != val:
                    for a in every:
                        if pw[a] != val[a]:
                            ok[a] = False
        cand_t = [a for a in every if ok[a]]
        for v in order:
            vals = allowed.get(v)
            if vals is not None:
                pv = pi[v]
                cand_t = [a for a in cand_t if pv[a] in vals]
        lv = [v for v in order if v in lin_vars]
        cand = [a for a in cand_t if all(pi[v][a] < 2 for v in lv)]
        if not cand_t:
            perm_ok = False
        if lv:
            x0 = lv[0]
            values = sorted({pi[x0][a] for a in cand})
            if not values:
                system.add([], 1)
            elif len(values) == 1:
                a = cand[0]
                for x in lv:
                    system.add([x], pi[x][a])
            else:
                a0 = next(a for a in cand if pi[x0][a] == 0)
                for x in lv[1:]:
                    system.add([x, x0], pi[x][a0])
        comps.append((order, pi, cand_t, cand, lv))
    for t in li.lin:
        system.add(t, 1)
    sol = gauss_gf2(system, stats)
    equations_ok = sol is not None
    witness = None
    if equations_ok and perm_ok:
        witness = {}
        for order, pi, cand_t, cand, lv in comps:
            if lv:
                b = sol[lv[0]]
                a = next(a for a in cand if pi[lv[0]][a] == b)
            else:
                a = cand_t[0]
            for v in order:
                witness[v] = pi[v][a]
    return LevelOneResult(equations_ok and perm_ok, equations_ok, perm_ok, witness, system)


def literal_equation_system(li: LinearInstance) -> Z2System:
    """Equations read off bijection paths literally, by search over (variable, composite) states.

    A variable is forced to ``c`` when some path from it ends at a variable
    where every other value's image is excluded; path composites sending 0
    to 0 or to 1 yield ``x+y=0`` or ``x+y=1``.
    """
    n = li.n
    fwd: dict = {}
    for u, v, p in li.edges:
        fwd.setdefault(u, []).append((v, p))
    lin_vars = {x for t in li.lin for x in t}
    every = frozenset(range(n))

    def excluded(x) -> frozenset:
        vals = li.allowed.get(x, every)
        if x in lin_vars:
            vals = vals & {0, 1}
        return every - vals

    excl = {x: excluded(x) for x in li.variables}
    system = Z2System()
    emitted: set = set()

    def emit(xs: tuple, rhs: int) -> None:
        key = (xs, rhs)
        if key not in emitted:
            emitted.add(key)
            system.add(xs, rhs)

    for t in li.lin:
        emit(tuple(t), 1)
    ident = tuple(range(n))
    for x0 in li.variables:
        start = (x0, ident)
        states = {start}
        queue = deque([start])
        while queue:
            xk, comp = queue.popleft()
            ex = excl[xk]
            for c in (0, 1):
                if all(comp[a] in ex for a in range(n) if a != c):
                    emit((x0,), c)
            if comp[0] in (0, 1):
                emit((x0, xk), comp[0])
            for w, p in fwd.get(xk, ()):
                nxt = (w, tuple(p[b] for b in comp))
                if nxt not in states:
                    states.add(nxt)
                    queue.append(nxt)
    return system


def arc_consistent_domains(li: LinearInstance) -> dict:
    """Domains after propagating unary sets across bijection edges to a fixpoint."""
    every = frozenset(range(li.n))
    dom = {x: set(li.allowed.get(x, every)) for x in li.variables}
    adj: dict = {}
    for u, v, p in li.edges:
        adj.setdefault(u, []).append((v, p))
        adj.setdefault(v, []).append((u, _inverse(p)))
    queue = deque(li.variables)
    queued = set(li.variables)
    while queue:
        u = queue.popleft()
        queued.discard(u)
        for w, p in adj.get(u, ()):
            image = {p[a] for a in dom[u]}
            if not dom[w] <= image:
                dom[w] &= image
                if w not in queued:
                    queued.add(w)
                    queue.append(w)
    return dom


def solve_linear_literal(li: LinearInstance) -> LevelOneResult:
    """Verdict from the path-derived equations plus arc consistency of the bijection part."""
    system = literal_equation_system(li)
    equations_ok = gauss_gf2(system) is not None
    perm_ok = all(arc_consistent_domains(li.perm_system()).values())
    return LevelOneResult(equations_ok and perm_ok, equations_ok, perm_ok, None, system)


def solve_perm_system(li: LinearInstance) -> dict | None:
    """Solve the instance without its linear triples; a witness or ``None``."""
    res = solve_linear_exact(li.perm_system())
    return res.witness


def linear_components(li: LinearInstance) -> list[list]:
    uf = UnionFind(li.variables)
    for u, v, _ in li.edges:
        uf.union(u, v)
    for u, v in li.links:
        uf.union(u, v)
    for x, y, z in li.lin:
        uf.union(x, y)
        uf.union(x, z)
    return uf.groups(li.variables)


def split_by_component(li: LinearInstance) -> list[LinearInstance]:
    """Sub-instances on the connected components, built in one pass."""
    uf = UnionFind(li.variables)
    for u, v, _ in li.edges:
        uf.union(u, v)
    for u, v in li.links:
        uf.union(u, v)
    for x, y, z in li.lin:
        uf.union(x, y)
        uf.union(x, z)
    parts: dict = {}
    for x in li.variables:
        r = uf.find(x)
        part = parts.get(r)
        if part is None:
            part = parts[r] = LinearInstance(li.n, [])
        part.variables.append(x)
    for x, a in li.allowed.items():
        parts[uf.find(x)].allowed[x] = a
    for e in li.edges:
        parts[uf.find(e[0])].edges.append(e)
    for e in li.links:
        parts[uf.find(e[0])].links.append(e)
    for t in li.lin:
        parts[uf.find(t[0])].lin.append(t)
    out = list(parts.values())
    for part in out:
        part.variables = tuple(part.variables)
    return out


def solve_level_one(inst: Instance, literal: bool = False, stats: dict | None = None) -> LevelOneResult:
    li = to_linear_instance(inst)
    if literal:
        return solve_linear_literal(li)
    res = solve_linear_exact(li, stats)
    if res.witness is not None:
        res.witness = {x: (c,) for x, c in res.witness.items()}
    return res


__all__ = [
    "LinearInstance", "to_linear_instance", "LevelOneResult", "solve_linear_exact",
    "literal_equation_system", "arc_consistent_domains", "solve_linear_literal", "solve_perm_system",
    "linear_components", "split_by_component", "solve_level_one",
]
