from __future__ import annotations

import random
from itertools import permutations, product

import pytest
from hypothesis import given, strategies as st

from cmcsp.algebra import (
    FiniteAlgebra,
    congruence_lattice,
    is_congruence,
    is_conservative_minority,
    is_isomorphism,
    minority_projection,
    random_conservative_minority,
)
from cmcsp.cmtree import (
    CMTree,
    block_congruence_of_vertex,
    eval_leaf_op,
    graft,
    identify_only_child,
    is_sapling,
    leaf_algebra,
    make_tree,
    parse_vertex,
    prune_leq,
    prune_lt,
    quotient_map,
    random_simple_algebra,
    random_tree,
    reduce_tree,
    refine_by_congruence,
    represent,
    represent_with_map,
    restrict_below,
    subtree,
    tree_isomorphic,
    trunk,
    vertex_name,
    with_projection_locals,
)
from cmcsp.errors import InconsistencyError

trees = st.builds(lambda seed, m: random_tree(random.Random(seed), max_leaves=m),
                  st.integers(0, 10**6), st.integers(1, 9))
algebras = st.builds(lambda d, seed: random_conservative_minority(d, random.Random(seed)),
                     st.integers(1, 6), st.integers(0, 10**6))


def same_leaf_algebra(t1: CMTree, t2: CMTree, rename: dict) -> bool:
    """Leaf algebras agree under the leaf renaming ``rename``."""
    a1, a2 = leaf_algebra(t1), leaf_algebra(t2)
    pos2 = {v: i for i, v in enumerate(t2.leaves())}
    return is_isomorphism(a1, a2, [pos2[rename[v]] for v in t1.leaves()])


# --- structure ------------------------------------------------------------------------

def test_vertex_names_round_trip():
    for v in [(), (0,), (1, 0, 2), ("a", 3)]:
        assert parse_vertex(vertex_name(v)) == v


def test_tree_validation():
    with pytest.raises(ValueError):
        make_tree([(0,)], {})
    with pytest.raises(ValueError):
        make_tree([(), (0, 1)], {})
    with pytest.raises(ValueError):
        make_tree([(), (0,), (1,)], {(): minority_projection(3)})
    bad = FiniteAlgebra.from_function(2, lambda a, b, c: a)
    t = make_tree([(), (0,), (1,)], {(): bad})
    with pytest.raises(ValueError):
        t.validate()


@given(trees)
def test_json_round_trip(t):
    assert CMTree.from_json(t.to_json()) == t


@given(trees)
def test_random_trees_are_simple_and_reduced(t):
    t.validate()
    assert t.is_reduced and t.is_simple


def test_projection_flags():
    t = with_projection_locals([(), (0,), (1,), (1, 0), (1, 1), (1, 2)])
    assert t.is_projection and t.is_reduced and t.is_simple
    assert t.leaves() == [(0,), (1, 0), (1, 1), (1, 2)]


# --- leaf operation -------------------------------------------------------------------

def test_leaf_op_on_hand_example():
    # root with two children, the second splits three ways
    t = with_projection_locals([(), (0,), (1,), (1, 0), (1, 1), (1, 2)])
    a, b, c, d = (0,), (1, 0), (1, 1), (1, 2)
    assert eval_leaf_op(t, b, c, d) == c            # projection minority of three distinct returns the middle
    assert eval_leaf_op(t, a, b, c) == a            # a is alone in its root class
    assert eval_leaf_op(t, b, a, c) == a
    assert eval_leaf_op(t, b, b, d) == d


@given(trees)
def test_leaf_algebra_is_conservative_minority(t):
    assert is_conservative_minority(leaf_algebra(t))


@given(trees)
def test_vertex_blocks_are_congruences(t):
    alg = leaf_algebra(t)
    for v in t.vertices:
        assert is_congruence(alg, block_congruence_of_vertex(t, v))


def test_ambiguous_leaf_op_raises():
    # a non-conservative local value matches none of the arguments
    bad = FiniteAlgebra.from_function(3, lambda a, b, c: (a + b + c) % 3)
    t = make_tree([(), (0,), (1,), (2,)], {(): bad})
    with pytest.raises((InconsistencyError, ValueError)):
        eval_leaf_op(t, (0,), (1,), (1,))


# --- representation -------------------------------------------------------------------

@given(algebras)
def test_represent_reproduces_algebra(alg):
    t, leaf_of = represent_with_map(alg)
    assert t.is_reduced and t.is_simple
    pos = {v: i for i, v in enumerate(t.leaves())}
    assert is_isomorphism(alg, leaf_algebra(t), [pos[leaf_of[a]] for a in range(alg.size)])


@given(trees)
def test_tree_round_trip(t):
    assert tree_isomorphic(represent(leaf_algebra(t)), t) is not None


@given(trees, st.randoms(use_true_random=False))
def test_isomorphism_invariant_under_child_relabeling(t, rng):
    # rename the children of the root by a permutation and permute the local table accordingly
    if not t.internal():
        return
    syms = t.children(())
    perm = list(range(len(syms)))
    rng.shuffle(perm)
    rename = {w: ((perm[syms.index(w[0])],) + w[1:] if w else w) for w in t.vertices}
    locs = {rename[w]: a for w, a in t.locals.items() if w}
    root = t.locals[()]
    inv = {p: i for i, p in enumerate(perm)}
    locs[()] = FiniteAlgebra.from_function(
        root.size, lambda a, b, c: perm[root(inv[a], inv[b], inv[c])])
    other = CMTree(frozenset(rename.values()), locs)
    assert tree_isomorphic(t, other) is not None


def test_non_isomorphic_trees():
    t1 = with_projection_locals([(), (0,), (1,), (2,)])
    t2 = with_projection_locals([(), (0,), (1,), (1, 0), (1, 1)])
    assert tree_isomorphic(t1, t2) is None


def test_non_isomorphic_root_algebras():
    rng = random.Random(0)
    a = random_simple_algebra(4, rng)
    b = next(x for x in (random_simple_algebra(4, rng) for _ in range(200))
             if not any(is_isomorphism(a, x, list(p)) for p in permutations(range(4))))
    verts = [(), (0,), (1,), (2,), (3,)]
    assert tree_isomorphic(make_tree(verts, {(): a}), make_tree(verts, {(): b})) is None


def test_represent_rejects_non_minority():
    with pytest.raises(ValueError):
        represent(FiniteAlgebra.from_function(2, lambda a, b, c: a))


# --- subtrees and saplings -----------------------------------------------------------

@given(trees, st.randoms(use_true_random=False))
def test_subtree_is_subalgebra(t, rng):
    leaves = t.leaves()
    chosen = rng.sample(leaves, rng.randint(1, len(leaves)))
    s = subtree(t, chosen)
    assert set(s.leaves()) == set(chosen)
    full = leaf_algebra(t)
    pos = {v: i for i, v in enumerate(leaves)}
    sub = leaf_algebra(s)
    sl = s.leaves()
    for a, b, c in product(range(len(sl)), repeat=3):
        assert sl[sub(a, b, c)] == leaves[full(pos[sl[a]], pos[sl[b]], pos[sl[c]])]


def test_sapling_and_trunk():
    t = with_projection_locals([(), (0,), (1,), (0, 0), (0, 1), (0, 0, 0), (0, 0, 1)])
    assert is_sapling(t)
    assert trunk(t) == [(), (0,), (0, 0)]
    bushy = with_projection_locals([(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)])
    assert not is_sapling(bushy)
    with pytest.raises(ValueError):
        trunk(bushy)


# --- transformations ----------------------------------------------------------------

@given(trees, trees)
def test_graft_then_restrict(t, s):
    leaf = t.leaves()[-1]
    g = graft(t, leaf, s)
    assert restrict_below(g, leaf) == s
    assert len(g.leaves()) == len(t.leaves()) - 1 + len(s.leaves())


@given(trees)
def test_reduce_tree_keeps_leaf_algebra(t):
    # insert only-children above every leaf, then contract them again
    stretched = t
    for leaf in t.leaves():
        stretched = graft(stretched, leaf, with_projection_locals([(), (0,)]))
    assert not stretched.internal() or not stretched.is_reduced
    reduced = reduce_tree(stretched)
    assert reduced == t


@given(trees)
def test_identify_only_child_renames_leaves(t):
    leaf = t.leaves()[0]
    stretched = graft(t, leaf, with_projection_locals([(), (0,)]))
    out, rename = identify_only_child(stretched, leaf)
    assert out == t
    assert rename[leaf + (0,)] == leaf


@given(algebras)
def test_refine_by_congruence_keeps_leaf_algebra(alg):
    if alg.size < 2:
        return
    t = make_tree([()] + [(i,) for i in range(alg.size)], {(): alg})
    for lam in congruence_lattice(alg):
        if lam.is_full or lam.is_equality:
            continue
        out, rename = refine_by_congruence(t, (), lam)
        assert same_leaf_algebra(t, out, rename)


@given(trees)
def test_prune_and_quotient_map(t):
    for v in t.vertices:
        if not v:
            continue
        pruned = prune_leq(t, v)
        assert all(w[:len(v)] != v for w in pruned.vertices)
        cut = prune_lt(t, v)
        assert cut.is_leaf(v)
        qm = quotient_map(t, v)
        assert set(qm.values()) == set(cut.leaves())
        # collapsing a block is a homomorphism onto the pruned tree's leaf algebra
        full, small = leaf_algebra(t), leaf_algebra(cut)
        lv, sv = t.leaves(), cut.leaves()
        spos = {w: i for i, w in enumerate(sv)}
        for a, b, c in product(range(len(lv)), repeat=3):
            assert spos[qm[lv[full(a, b, c)]]] == small(spos[qm[lv[a]]], spos[qm[lv[b]]], spos[qm[lv[c]]])
        break
