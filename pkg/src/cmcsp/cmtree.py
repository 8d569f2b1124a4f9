"""Conservative minority branch trees and their leaf algebras.

Vertices are tuples of child symbols, the root is ``()``.  Each internal
vertex carries a conservative minority algebra whose elements are its child
symbols in sorted order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .algebra import (
    Congruence,
    FiniteAlgebra,
    congruence_lattice,
    is_conservative_minority,
    is_simple,
    max_proper_congruence,
    quotient,
    subalgebra,
)
from .errors import InconsistencyError

Vertex = tuple


def vertex_name(v: Vertex) -> str:
    return ".".join(str(s) for s in v)


def parse_vertex(name: str) -> Vertex:
    if name == "":
        return ()
    return tuple(int(p) if p.lstrip("-").isdigit() else p for p in name.split("."))


@dataclass(frozen=True, eq=False)
class CMTree:
    vertices: frozenset
    locals: Mapping[Vertex, FiniteAlgebra]

    def __post_init__(self) -> None:
        vs = self.vertices
        if () not in vs:
            raise ValueError("root missing")
        for v in vs:
            if v and v[:-1] not in vs:
                raise ValueError(f"vertex set not prefix-closed at {v!r}")
        kids: dict[Vertex, list] = {}
        for v in vs:
            if v:
                kids.setdefault(v[:-1], []).append(v[-1])
        kids_sorted = {v: tuple(sorted(c)) for v, c in kids.items()}
        object.__setattr__(self, "_children", kids_sorted)
        for v, syms in kids_sorted.items():
            alg = self.locals.get(v)
            if alg is None or alg.size != len(syms):
                raise ValueError(f"local algebra at {v!r} does not match its children")
        if set(self.locals) != set(kids_sorted):
            raise ValueError("local algebras given at leaves")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CMTree):
            return NotImplemented
        return self.vertices == other.vertices and dict(self.locals) == dict(other.locals)

    def __hash__(self) -> int:
        return hash(self.vertices)

    # basic structure -------------------------------------------------------
    def children(self, v: Vertex) -> tuple:
        return self._children.get(v, ())  # type: ignore[attr-defined]

    def is_leaf(self, v: Vertex) -> bool:
        return v in self.vertices and not self.children(v)

    def leaves(self) -> list[Vertex]:
        return sorted((v for v in self.vertices if not self.children(v)), key=_order_key)

    def internal(self) -> list[Vertex]:
        return sorted((v for v in self.vertices if self.children(v)), key=_order_key)

    def below(self, v: Vertex) -> list[Vertex]:
        n = len(v)
        return [w for w in self.vertices if w[:n] == v]

    def local_apply(self, v: Vertex, a, b, c):
        syms = self.children(v)
        pos = {s: i for i, s in enumerate(syms)}
        return syms[self.locals[v](pos[a], pos[b], pos[c])]

    @property
    def is_reduced(self) -> bool:
        return all(len(self.children(v)) >= 2 for v in self.internal())

    @property
    def is_simple(self) -> bool:
        return all(is_simple(self.locals[v]) for v in self.internal())

    @property
    def is_projection(self) -> bool:
        from .algebra import minority_projection, is_isomorphism
        for v in self.internal():
            alg = self.locals[v]
            target = minority_projection(alg.size)
            if not any(is_isomorphism(alg, target, list(p)) for p in permutations(range(alg.size))):
                return False
        return True

    def validate(self) -> None:
        for v in self.internal():
            if not is_conservative_minority(self.locals[v]):
                raise ValueError(f"local algebra at {v!r} is not conservative minority")

    # serialization ---------------------------------------------------------
    def to_json(self) -> dict:
        alphabet = sorted({s for v in self.vertices for s in v}, key=str)
        return {
            "alphabet": [str(s) for s in alphabet],
            "vertices": sorted((vertex_name(v) for v in self.vertices), key=lambda s: (s.count("."), s)),
            "locals": {vertex_name(v): self.locals[v].to_json() for v in self.internal()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "CMTree":
        verts = frozenset(parse_vertex(s) for s in data["vertices"])
        locs = {parse_vertex(k): FiniteAlgebra.from_json(a) for k, a in data["locals"].items()}
        return cls(verts, locs)


def _order_key(v: Vertex):
    return tuple((0, s) if isinstance(s, int) else (1, str(s)) for s in v)


def make_tree(vertices: Iterable[Vertex], locals: Mapping[Vertex, FiniteAlgebra]) -> CMTree:
    return CMTree(frozenset(tuple(v) for v in vertices), dict(locals))


def with_projection_locals(vertices: Iterable[Vertex]) -> CMTree:
    """Tree with the projection minority algebra at every internal vertex."""
    from .algebra import minority_projection
    verts = frozenset(tuple(v) for v in vertices)
    counts: dict[Vertex, int] = {}
    for v in verts:
        if v:
            counts[v[:-1]] = counts.get(v[:-1], 0) + 1
    return CMTree(verts, {v: minority_projection(c) for v, c in counts.items()})


# --- leaf algebra ---------------------------------------------------------------

def eval_leaf_op(t: CMTree, a: Vertex, b: Vertex, c: Vertex) -> Vertex:
    if a == b == c:
        return a
    depth = 0
    while a[depth] == b[depth] == c[depth]:
        depth += 1
    d = a[:depth]
    x = t.local_apply(d, a[depth], b[depth], c[depth])
    hits = [leaf for leaf in (a, b, c) if leaf[depth] == x]
    if len({h for h in hits}) != 1:
        raise InconsistencyError("leaf operation is not uniquely determined")
    return hits[0]


def leaf_algebra(t: CMTree) -> FiniteAlgebra:
    leaves = t.leaves()
    pos = {v: i for i, v in enumerate(leaves)}
    table = tuple(pos[eval_leaf_op(t, a, b, c)] for a, b, c in product(leaves, repeat=3))
    return FiniteAlgebra(len(leaves), table, tuple(vertex_name(v) for v in leaves))


def block_congruence_of_vertex(t: CMTree, v: Vertex) -> Congruence:
    if v not in t.vertices:
        raise KeyError(v)
    leaves = t.leaves()
    block = [i for i, w in enumerate(leaves) if w[:len(v)] == v]
    return Congruence.from_classes(len(leaves), [block])


# --- representation -------------------------------------------------------------

def represent_with_map(alg: FiniteAlgebra) -> tuple[CMTree, dict[int, Vertex]]:
    """Simple reduced tree for ``alg`` plus the element-to-leaf map."""
    if not is_conservative_minority(alg):
        raise ValueError("represent needs a conservative minority algebra")
    vertices: set[Vertex] = set()
    locs: dict[Vertex, FiniteAlgebra] = {}
    leaf_of: dict[int, Vertex] = {}

    def build(block: tuple[int, ...], v: Vertex) -> None:
        vertices.add(v)
        if len(block) == 1:
            leaf_of[block[0]] = v
            return
        sub = subalgebra(alg, block)
        lam = max_proper_congruence(sub)
        q, _ = quotient(sub, lam)
        # classes are sorted by least member, which fixes the labels
        locs[v] = FiniteAlgebra(q.size, q.table)
        for label, cls in enumerate(lam.classes):
            build(tuple(block[i] for i in cls), v + (label,))

    build(tuple(range(alg.size)), ())
    return CMTree(frozenset(vertices), locs), leaf_of


def represent(alg: FiniteAlgebra) -> CMTree:
    return represent_with_map(alg)[0]


# --- subtrees and saplings ---------------------------------------------------------

def subtree(t: CMTree, leaves: Iterable[Vertex]) -> CMTree:
    chosen = set(leaves)
    if not chosen:
        raise ValueError("empty leaf set")
    if not all(t.is_leaf(v) for v in chosen):
        raise ValueError("subtree needs leaves")
    verts = {v[:i] for v in chosen for i in range(len(v) + 1)}
    locs = {}
    for v in verts:
        syms = t.children(v)
        kept = [i for i, s in enumerate(syms) if v + (s,) in verts]
        if kept:
            locs[v] = FiniteAlgebra(len(kept), subalgebra(t.locals[v], kept).table)
    return CMTree(frozenset(verts), locs)


def _is_chain_below(t: CMTree, w: Vertex) -> bool:
    return all(len(t.children(u)) <= 1 for u in t.below(w))


def is_sapling(t: CMTree) -> bool:
    for v in t.vertices:
        bad = [s for s in t.children(v) if not _is_chain_below(t, v + (s,))]
        if len(bad) > 1:
            return False
    return True


def trunk(t: CMTree) -> list[Vertex]:
    if not is_sapling(t):
        raise ValueError("trunk is only defined for saplings")
    return sorted((v for v in t.vertices if len(t.children(v)) >= 2), key=len)


# --- transformations ----------------------------------------------------------------

def graft(t: CMTree, v: Vertex, s: CMTree) -> CMTree:
    if not t.is_leaf(v):
        raise ValueError("graft point must be a leaf")
    verts = (set(t.vertices) - {v}) | {v + w for w in s.vertices}
    locs = dict(t.locals)
    locs.update({v + w: a for w, a in s.locals.items()})
    return CMTree(frozenset(verts), locs)


def restrict_below(t: CMTree, v: Vertex) -> CMTree:
    if v not in t.vertices:
        raise KeyError(v)
    n = len(v)
    verts = {w[n:] for w in t.vertices if w[:n] == v}
    locs = {w[n:]: a for w, a in t.locals.items() if w[:n] == v}
    return CMTree(frozenset(verts), locs)


def _drop(t: CMTree, removed: set) -> CMTree:
    verts = set(t.vertices) - removed
    locs = {}
    for v in verts:
        syms = t.children(v)
        kept = [i for i, s in enumerate(syms) if v + (s,) in verts]
        if not kept:
            continue
        if len(kept) == len(syms):
            locs[v] = t.locals[v]
        else:
            locs[v] = FiniteAlgebra(len(kept), subalgebra(t.locals[v], kept).table)
    return CMTree(frozenset(verts), locs)


def prune_leq(t: CMTree, v: Vertex) -> CMTree:
    if v not in t.vertices or v == ():
        raise ValueError("cannot remove the root")
    return _drop(t, set(t.below(v)))


def prune_lt(t: CMTree, v: Vertex) -> CMTree:
    if v not in t.vertices:
        raise KeyError(v)
    return _drop(t, set(t.below(v)) - {v})


def quotient_map(t: CMTree, v: Vertex) -> dict[Vertex, Vertex]:
    n = len(v)
    return {leaf: (v if leaf[:n] == v else leaf) for leaf in t.leaves()}


def identify_only_child(t: CMTree, v: Vertex) -> tuple[CMTree, dict[Vertex, Vertex]]:
    """Contract ``v`` with its unique child; returns the tree and the vertex renaming."""
    syms = t.children(v)
    if len(syms) != 1:
        raise ValueError("vertex does not have exactly one child")
    n = len(v)
    rename = {}
    for w in t.vertices:
        if w[:n] == v and len(w) > n:
            rename[w] = v + w[n + 1:]
        else:
            rename[w] = w
    verts = frozenset(rename.values())
    locs = {}
    for w, a in t.locals.items():
        if w == v:
            continue
        locs[rename[w]] = a
    return CMTree(verts, locs), rename


def refine_by_congruence(t: CMTree, v: Vertex, lam: Congruence) -> tuple[CMTree, dict[Vertex, Vertex]]:
    """Insert one vertex per class of ``lam`` between ``v`` and its children."""
    syms = t.children(v)
    alg = t.locals.get(v)
    if alg is None or lam.size != alg.size or lam.is_full or lam.is_equality:
        raise ValueError("need a proper nontrivial congruence of the local algebra")
    q, labels = quotient(alg, lam)
    n = len(v)
    rename = {}
    for w in t.vertices:
        if w[:n] == v and len(w) > n:
            i = syms.index(w[n])
            rename[w] = v + (labels[i],) + w[n:]
        else:
            rename[w] = w
    verts = set(rename.values()) | {v + (k,) for k in range(q.size)}
    locs = {rename[w]: a for w, a in t.locals.items() if w != v}
    locs[v] = FiniteAlgebra(q.size, q.table)
    for k, cls in enumerate(lam.classes):
        locs[v + (k,)] = FiniteAlgebra(len(cls), subalgebra(alg, cls).table)
    return CMTree(frozenset(verts), locs), rename


def reduce_tree(t: CMTree) -> CMTree:
    """Contract every only child until the tree is reduced."""
    while True:
        single = [v for v in t.internal() if len(t.children(v)) == 1]
        if not single:
            return t
        t, _ = identify_only_child(t, single[0])


# --- isomorphism ----------------------------------------------------------------

def _shape(t: CMTree, v: Vertex, memo: dict) -> Any:
    """Cheap isomorphism invariant used to prune the matching."""
    if v not in memo:
        memo[v] = tuple(sorted(_shape(t, v + (s,), memo) for s in t.children(v)))
    return memo[v]


def tree_isomorphic(t1: CMTree, t2: CMTree) -> dict[Vertex, Vertex] | None:
    """A vertex bijection preserving order and local operations, or None.

    Children are matched by backtracking.  Because local operations are
    conservative, every triple of matched children can be checked at once.
    """
    s1: dict = {}
    s2: dict = {}
    if _shape(t1, (), s1) != _shape(t2, (), s2):
        return None
    memo: dict[tuple, dict | None] = {}

    def match(a: Vertex, b: Vertex) -> dict | None:
        key = (a, b)
        if key in memo:
            return memo[key]
        memo[key] = None
        ca, cb = t1.children(a), t2.children(b)
        if len(ca) != len(cb) or s1[a] != s2[b]:
            return None
        if not ca:
            memo[key] = {a: b}
            return memo[key]
        op1, op2 = t1.locals[a], t2.locals[b]
        m = len(ca)
        f = [-1] * m
        used = [False] * m
        sub: list = [None] * m

        def consistent(i: int) -> bool:
            for x in range(i + 1):
                for y in range(i + 1):
                    for z in (i,) if x < i and y < i else range(i + 1):
                        if f[op1(x, y, z)] != op2(f[x], f[y], f[z]):
                            return False
            return True

        def extend(i: int) -> bool:
            if i == m:
                return True
            for j in range(m):
                if used[j]:
                    continue
                inner = match(a + (ca[i],), b + (cb[j],))
                if inner is None:
                    continue
                f[i] = j
                used[j] = True
                sub[i] = inner
                if consistent(i) and extend(i + 1):
                    return True
                used[j] = False
                f[i] = -1
            return False

        if not extend(0):
            return None
        result = {a: b}
        for part in sub:
            result.update(part)
        memo[key] = result
        return result

    return match((), ())


# --- random trees -------------------------------------------------------------------

def random_simple_algebra(size: int, rng, attempts: int = 200) -> FiniteAlgebra:
    """A random simple conservative minority algebra, by rejection sampling."""
    from .algebra import random_conservative_minority
    for _ in range(attempts):
        alg = random_conservative_minority(size, rng)
        if is_simple(alg):
            return alg
    raise InconsistencyError(f"no simple algebra of size {size} found")


def random_tree(rng, max_leaves: int = 12, max_children: int = 4) -> CMTree:
    """A random simple reduced tree with between 1 and ``max_leaves`` leaves."""
    vertices: set[Vertex] = set()
    locs: dict[Vertex, FiniteAlgebra] = {}

    def build(v: Vertex, count: int) -> None:
        vertices.add(v)
        if count == 1:
            return
        k = rng.randint(2, min(count, max_children))
        # split count into k positive parts
        cuts = sorted(rng.sample(range(1, count), k - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [count])]
        locs[v] = random_simple_algebra(k, rng)
        for i, part in enumerate(parts):
            build(v + (i,), part)

    build((), rng.randint(1, max_leaves))
    return CMTree(frozenset(vertices), locs)


__all__ = [
    "CMTree", "Vertex", "vertex_name", "parse_vertex", "make_tree", "with_projection_locals",
    "eval_leaf_op", "leaf_algebra", "block_congruence_of_vertex", "represent", "represent_with_map",
    "subtree", "is_sapling", "trunk", "graft", "restrict_below", "prune_leq", "prune_lt",
    "quotient_map", "identify_only_child", "refine_by_congruence", "reduce_tree",
    "tree_isomorphic", "random_simple_algebra", "random_tree",
]
