"""The recursive projection-minority family: trees, embeddings, transfers and structures.

Leaves of the depth-k tree for ``n`` are tuples: ``(0,)*i + (c,)`` with
``0 <= i < k`` and ``1 <= c <= n-1``, plus the all-zero leaf ``(0,)*k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

from .algebra import FiniteAlgebra, minority_projection
from .cmtree import CMTree, graft, leaf_algebra, vertex_name
from .signature import (
    EQ2,
    OEq3,
    OPerm,
    OSet,
    OSymbol,
    Base,
    Full,
    Lin,
    Pair,
    Swap01,
    Symbol,
    Transfer,
    POINT,
    EMPTY,
    symbols,
    sub_s,
)

Leaf = tuple


def zeros(i: int) -> Leaf:
    return (0,) * i


# --- trees and leaves -------------------------------------------------------------

@lru_cache(maxsize=None)
def build_pnk_tree(n: int, k: int) -> CMTree:
    if n < 2 or k < 0:
        raise ValueError("need n >= 2 and k >= 0")
    if k == 0:
        return CMTree(frozenset({()}), {})
    base = CMTree(frozenset({()} | {(c,) for c in range(n)}), {(): minority_projection(n)})
    tree = base
    for depth in range(1, k):
        tree = graft(tree, zeros(depth), base)
    return tree


@lru_cache(maxsize=None)
def leaves(n: int, k: int) -> tuple[Leaf, ...]:
    """Leaves in lexicographic order."""
    out = [zeros(i) + (c,) for i in range(k) for c in range(1, n)] + [zeros(k)]
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def leaf_index(n: int, k: int) -> dict[Leaf, int]:
    return {v: i for i, v in enumerate(leaves(n, k))}


def outer_leaves(n: int) -> tuple[Leaf, ...]:
    return tuple((c,) for c in range(1, n))


def depth_of(leaf: Leaf) -> int:
    """``i`` for ``(0^i, c)``; the all-zero leaf reports its length."""
    return len(leaf) - 1 if leaf and leaf[-1] != 0 else len(leaf)


def leaf_op(n: int, a: Leaf, b: Leaf, c: Leaf) -> Leaf:
    """Leaf operation of the family, evaluated directly on tuples."""
    if a == b == c:
        return a
    depth = 0
    while depth < len(a) and depth < len(b) and depth < len(c) and a[depth] == b[depth] == c[depth]:
        depth += 1
    xa, xb, xc = a[depth], b[depth], c[depth]
    if xa == xb:
        x = xc
    elif xa == xc:
        x = xb
    elif xb == xc:
        x = xa
    else:
        x = xb
    return a if xa == x else (b if xb == x else c)


@lru_cache(maxsize=None)
def pnk_algebra(n: int, k: int) -> FiniteAlgebra:
    lv = leaves(n, k)
    idx = leaf_index(n, k)
    table = tuple(idx[leaf_op(n, a, b, c)] for a, b, c in product(lv, repeat=3))
    return FiniteAlgebra(len(lv), table, tuple(vertex_name(v) for v in lv))


def trunk_depths(k: int) -> list[int]:
    return list(range(k))


# --- embeddings -------------------------------------------------------------------

def psi_embedding(n: int, k: int, depths: Iterable[int], w: Leaf | None = None) -> dict[Leaf, Leaf]:
    """Map from the leaves of depth ``|X|`` into depth ``k`` for trunk depths ``X``."""
    xs = sorted(set(depths))
    if any(not 0 <= x < k for x in xs):
        raise ValueError("trunk depths out of range")
    m = len(xs)
    if w is None:
        w = zeros(k)
    if w not in leaf_index(n, k):
        raise ValueError(f"{w!r} is not a leaf")
    if xs:
        deepest = xs[-1]
        if w[:deepest + 1] != zeros(deepest + 1):
            raise ValueError("w must lie below the zero child of the deepest trunk vertex")
    out = {zeros(m): w}
    for i, j in enumerate(xs):
        for c in range(1, n):
            out[zeros(i) + (c,)] = zeros(j) + (c,)
    return out


def psi_index(n: int, k: int, i: int) -> dict[Leaf, Leaf]:
    """The embedding of depth ``k-1`` into depth ``k`` that misses the trunk vertex ``0^i``."""
    return psi_embedding(n, k, [x for x in range(k) if x != i])


def psi_apply(i: int, leaf: Leaf) -> Leaf:
    """Fast form of ``psi_index(n, k, i)``: keep shallow outer leaves, shift the rest."""
    d = depth_of(leaf)
    if d < i and leaf[-1] != 0:
        return leaf
    return (0,) + leaf


def psi_inverse(i: int, leaf: Leaf) -> Leaf:
    d = depth_of(leaf)
    if leaf and leaf[-1] != 0 and d < i:
        return leaf
    if leaf and leaf[-1] != 0 and d == i:
        raise ValueError(f"{leaf!r} is outside the image of psi_{i}")
    if not leaf or leaf[0] != 0:
        raise ValueError(f"{leaf!r} is outside the image of psi_{i}")
    return leaf[1:]


def phi_collapse(k: int, leaf: Leaf) -> Leaf:
    """Collapse the leaves below ``0^k`` onto ``0^k``."""
    z = zeros(k)
    return z if leaf[:k] == z else leaf


def phi_fiber(n: int, k: int, leaf: Leaf) -> list[Leaf]:
    """Preimage of a depth-k leaf under the collapse from depth k+1."""
    if leaf == zeros(k):
        return [zeros(k + 1)] + [zeros(k) + (c,) for c in range(1, n)]
    return [leaf]


def full_subalgebra(n: int, k: int, depths: Iterable[int], w: Leaf | None = None) -> set[Leaf]:
    return set(psi_embedding(n, k, depths, w).values())


def subalgebra_index(n: int, k: int, i: int) -> set[Leaf]:
    return set(psi_index(n, k, i).values())


def full_sapling(n: int, k: int, depths: Iterable[int], w: Leaf | None = None) -> CMTree:
    from .cmtree import subtree
    return subtree(build_pnk_tree(n, k), full_subalgebra(n, k, depths, w))


def transfer_relation(n: int, k: int, first: tuple, second: tuple) -> set[tuple[Leaf, Leaf]]:
    (x1, w1), (x2, w2) = first, second
    if len(set(x1)) != len(set(x2)):
        raise ValueError("trunk subsets differ in size")
    p1 = psi_embedding(n, k, x1, w1)
    p2 = psi_embedding(n, k, x2, w2)
    return {(p1[b], p2[b]) for b in p1}


@lru_cache(maxsize=None)
def canonical_transfer(n: int, k: int) -> frozenset:
    if k < 1:
        raise ValueError("transfer needs k >= 1")
    src, dst = psi_index(n, k, 0), psi_index(n, k, k - 1)
    return frozenset((src[b], dst[b]) for b in src)


# --- interpretation of symbols ------------------------------------------------------

def outer_relation(o: OSymbol) -> frozenset:
    if isinstance(o, OSet):
        return frozenset(((c,),) for c in o.members)
    if isinstance(o, OPerm):
        return frozenset(((c,), (o(c),)) for c in range(1, len(o.images) + 1))
    raise TypeError("eq3 outer relation depends on n")


def _outer(n: int, o: OSymbol) -> frozenset:
    if isinstance(o, OEq3):
        return frozenset(((c,),) * 3 for c in range(1, n))
    return outer_relation(o)


@lru_cache(maxsize=None)
def relation(n: int, sym: Symbol) -> frozenset:
    """Tuples of leaves named by ``sym`` at its own level."""
    if isinstance(sym, Base):
        return {"empty": frozenset(), "point": frozenset({((),)}),
                "eq2": frozenset({((), ())}), "eq3": frozenset({((), (), ())})}[sym.name]
    if isinstance(sym, Pair):
        inner = frozenset(tuple((0,) + v for v in t) for t in relation(n, sym.inner))
        return inner | _outer(n, sym.outer)
    if isinstance(sym, Full):
        lv = leaves(n, sym.k)
        return frozenset(product(lv, repeat=2))
    if isinstance(sym, Transfer):
        return canonical_transfer(n, sym.k)
    if isinstance(sym, Swap01):
        sw = {0: 1, 1: 0}
        return frozenset(((c,), (sw.get(c, c),)) for c in range(n))
    if isinstance(sym, Lin):
        return frozenset(tuple((v,) for v in t) for t in ((1, 1, 1), (1, 0, 0), (0, 1, 0), (0, 0, 1)))
    raise TypeError(f"unknown symbol {sym!r}")


@lru_cache(maxsize=None)
def relation_indices(n: int, sym: Symbol) -> frozenset:
    idx = leaf_index(n, sym.level)
    return frozenset(tuple(idx[v] for v in t) for t in relation(n, sym))


@lru_cache(maxsize=None)
def unary_set(n: int, sym: Symbol) -> frozenset:
    return frozenset(t[0] for t in relation(n, sym))


@lru_cache(maxsize=None)
def unary_symbol(n: int, k: int, subset: frozenset) -> Symbol:
    """The unique unary symbol at level ``k`` naming ``subset``."""
    if k == 0:
        if subset - {()}:
            raise ValueError("not a subset of the one-point domain")
        return POINT if subset else EMPTY
    inner = frozenset(v[1:] for v in subset if v[0] == 0)
    outer = frozenset(v[0] for v in subset if v[0] != 0 and len(v) == 1)
    if len(inner) + len(outer) != len(subset):
        raise ValueError("subset contains non-leaves")
    return Pair(unary_symbol(n, k - 1, inner), OSet(outer))


def full_unary(n: int, k: int) -> Symbol:
    return unary_symbol(n, k, frozenset(leaves(n, k)))


def subalgebra_symbol(n: int, k: int, i: int) -> Symbol:
    """Unary symbol naming the image of ``psi_i`` at level ``k``."""
    return unary_symbol(n, k, frozenset(subalgebra_index(n, k, i)))


def block_congruence_symbol(n: int, k: int, i: int) -> Symbol:
    """Binary symbol naming the block congruence of the trunk vertex ``0^i``."""
    if not 0 <= i <= k:
        raise ValueError("vertex depth out of range")
    if i == 0:
        return Full(k) if k >= 1 else EQ2
    return Pair(block_congruence_symbol(n, k - 1, i - 1), OPerm(tuple(range(1, n))))


# --- structures ---------------------------------------------------------------------

@dataclass
class PnkStructure:
    n: int
    k: int
    domain: tuple
    relations: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n, "k": self.k,
            "domain": [vertex_name(v) for v in self.domain],
            "relations": [
                {"symbol": str(s), "tuples": sorted([vertex_name(v) for v in t] for t in r)}
                for s, r in self.relations.items()
            ],
        }


def build_structure(n: int, k: int) -> PnkStructure:
    rels = {s: relation(n, s) for s in symbols(n, k)}
    return PnkStructure(n, k, leaves(n, k), rels)


def build_outer(n: int) -> dict:
    """The structure on the nonzero children: subsets, permutation graphs, ternary equality."""
    from .signature import outer_symbols
    return {o: _outer(n, o) for a in (1, 2, 3) for o in outer_symbols(n, a)}


def materialize_sub_s(n: int, r: int, l: int) -> frozenset:
    return relation(n, sub_s(n, r, l))


def uniform_split(n: int, k: int, tuples: Iterable[Sequence[Leaf]]) -> tuple[frozenset, frozenset] | None:
    """Split into an inner part (pulled back one level) and a strongly functional outer part."""
    rows = {tuple(t) for t in tuples}
    if k < 1:
        return None
    inner, outer = set(), set()
    for t in rows:
        if all(v[0] == 0 for v in t):
            inner.add(tuple(v[1:] for v in t))
        elif all(v[0] != 0 and len(v) == 1 for v in t):
            outer.add(t)
        else:
            return None
    if not _strongly_functional(outer, n):
        return None
    return frozenset(inner), frozenset(outer)


def _strongly_functional(rel: set, n: int) -> bool:
    if not rel:
        return True
    arity = len(next(iter(rel)))
    if arity == 1:
        return True
    cover = {(c,) for c in range(1, n)}  # outer leaves
    for i in range(arity):
        if {t[i] for t in rel} != cover:
            return False
        for j in range(arity):
            if i != j and len({t[i] for t in rel}) != len({(t[i], t[j]) for t in rel}):
                return False
    return True


def compose_uniform(inner: Iterable[Sequence[Leaf]], outer: Iterable[Sequence[Leaf]]) -> frozenset:
    return frozenset(tuple((0,) + v for v in t) for t in inner) | frozenset(tuple(t) for t in outer)


__all__ = [
    "Leaf", "zeros", "build_pnk_tree", "leaves", "leaf_index", "outer_leaves", "depth_of", "leaf_op",
    "pnk_algebra", "trunk_depths", "psi_embedding", "psi_index", "psi_apply", "psi_inverse",
    "phi_collapse", "phi_fiber", "full_subalgebra", "subalgebra_index", "full_sapling",
    "transfer_relation", "canonical_transfer", "relation", "relation_indices", "unary_set",
    "unary_symbol", "full_unary", "subalgebra_symbol", "block_congruence_symbol", "PnkStructure",
    "build_structure", "build_outer", "materialize_sub_s", "uniform_split", "compose_uniform",
]
