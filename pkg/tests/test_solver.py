from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from cmcsp import pnk
from cmcsp.errors import CapacityError
from cmcsp.signature import EQ2, LIN, SWAP01, Pair, Transfer, identity_perm, parse_symbol
from cmcsp.solver import (
    Instance,
    MODES,
    Z2System,
    all_solutions,
    brute_force_gf2,
    brute_force_oracle,
    components,
    exhaustive_oracle,
    gauss_gf2,
    generate,
    inner_restriction,
    instance_stream,
    lift_solution,
    make_concise,
    make_transfer_compatible,
    outer_restriction,
    project_solution,
    reduce_instance,
    satisfies,
    seeded_instance,
    solve,
    solve_level_one,
    uniform_product,
    violations,
)

GRID = [(n, k) for n in (2, 3) for k in (1, 2, 3)]
seeded = st.builds(lambda nk, seed: (nk, seed), st.sampled_from(GRID), st.integers(0, 10**6))


def solution_set(inst: Instance) -> set:
    return {tuple(sorted(s.items())) for s in all_solutions(inst, cap=50_000)}


# --- GF(2) ----------------------------------------------------------------------------------

@st.composite
def systems(draw):
    m = draw(st.integers(1, 12))
    system = Z2System()
    for v in range(m):
        system.var(v)
    for _ in range(draw(st.integers(0, 2 * m))):
        xs = draw(st.lists(st.integers(0, m - 1), min_size=1, max_size=4))
        system.add(xs, draw(st.integers(0, 1)))
    return system


@given(systems())
def test_gauss_agrees_with_brute_force(system):
    g, b = gauss_gf2(system), brute_force_gf2(system)
    assert (g is None) == (b is None)
    if g is not None:
        assert system.holds(g) and system.holds(b)


def test_gauss_small_cases():
    s = Z2System()
    s.add(["x", "y"], 1)
    s.add(["x"], 1)
    assert gauss_gf2(s) == {"x": 1, "y": 0}
    s.add(["y"], 1)
    assert gauss_gf2(s) is None and brute_force_gf2(s) is None
    # repeated variables cancel
    t = Z2System()
    t.add(["x", "x"], 1)
    assert gauss_gf2(t) is None


def test_gauss_free_variables_zero_and_brute_force_least():
    s = Z2System()
    s.add(["a", "b", "c"], 0)
    assert gauss_gf2(s) == {"a": 0, "b": 0, "c": 0}
    s.add(["c"], 1)
    assert brute_force_gf2(s) == {"a": 1, "b": 0, "c": 1}


def test_gauss_stats_and_json():
    s = Z2System()
    s.add(["x", "y"], 1)
    stats: dict = {}
    gauss_gf2(s, stats)
    assert "gauss_seconds" in stats
    assert s.to_json() == {"variables": ["x", "y"], "equations": [{"vars": ["x", "y"], "rhs": 1}]}


# --- instances --------------------------------------------------------------------------------

def test_instance_json_round_trip_and_validation():
    inst, _ = seeded_instance(3, 2, 5)
    assert Instance.from_json(inst.to_json()).to_json() == inst.to_json()
    bad = inst.to_json()
    bad["constraints"].append({"symbol": "eq2", "tuples": [["x0", "x0"]]})
    with pytest.raises(ValueError):
        Instance.from_json(bad)
    with pytest.raises(ValueError):
        Instance(3, 1, ("x0",), {Pair(EQ2, identity_perm(3)): {("x0", "zz")}}).validate()


def test_generate_modes_and_determinism():
    with pytest.raises(ValueError):
        generate(2, 1, 3, 3, "bogus")
    for i, mode in enumerate(MODES):
        a, _ = seeded_instance(2, 2, i)
        b, _ = seeded_instance(2, 2, i)
        assert a.to_json() == b.to_json()
    inst, plant = generate(3, 2, 0, 5)
    assert plant == {} and inst.size == 0


@given(seeded)
def test_planted_solutions_satisfy(args):
    (n, k), seed = args
    inst, plant = generate(n, k, 6, 15, "planted", random.Random(seed))
    assert satisfies(inst, plant)
    assert not violations(inst, plant)


@given(seeded)
def test_violations_iff_not_satisfied(args):
    (n, k), seed = args
    inst, _ = seeded_instance(n, k, seed, max_vars=5)
    rng = random.Random(seed)
    lv = pnk.leaves(n, k)
    sol = {x: rng.choice(lv) for x in inst.variables}
    assert satisfies(inst, sol) == (not violations(inst, sol))


def test_instance_stream_seeds():
    seeds = [s for s, _, _ in instance_stream(2, 1, 4, seed=10)]
    assert seeds == [10, 11, 12, 13]


# --- oracles -----------------------------------------------------------------------------------

@given(seeded)
def test_pruned_oracle_matches_plain_enumeration(args):
    (n, k), seed = args
    inst, _ = seeded_instance(n, k, seed, max_vars=5, max_constraints=10)
    a = brute_force_oracle(inst)
    b = exhaustive_oracle(inst)
    assert (a is None) == (b is None)
    if a is not None:
        assert satisfies(inst, a)


def test_oracle_caps():
    big = Instance(3, 3, tuple(f"x{i}" for i in range(10)))
    with pytest.raises(CapacityError):
        exhaustive_oracle(big)
    with pytest.raises(CapacityError):
        list(all_solutions(big, cap=100))


# --- the solver -------------------------------------------------------------------------------

@given(seeded)
def test_solve_matches_oracle(args):
    (n, k), seed = args
    inst, _ = seeded_instance(n, k, seed)
    res = solve(inst)
    assert res.accept == (brute_force_oracle(inst) is not None)
    if res.accept:
        assert satisfies(inst, res.witness)
    assert res.verdict == ("ACCEPT" if res.accept else "REJECT")
    assert len(res.chain) == k - 1


def test_solve_level_zero_and_empty():
    assert solve(Instance(2, 0, ("x",))).accept
    assert not solve(Instance.from_json({"n": 2, "k": 0, "variables": ["x"],
                                         "constraints": [{"symbol": "empty", "tuples": [["x"]]}]})).accept
    assert solve(Instance(3, 2, ())).accept


def test_solve_without_witness():
    inst, _ = seeded_instance(3, 3, 0)
    assert solve(inst, witness=False).witness is None


def test_lin_and_transfer_examples():
    lin = Instance(2, 1, ("x", "y", "z"), {LIN: {("x", "y", "z")}})
    w = solve(lin).witness
    assert sum(w[v][0] for v in "xyz") % 2 == 1
    # the same variable three times: 3x = 1 forces x = 1
    assert solve(Instance(2, 1, ("x",), {LIN: {("x", "x", "x")}})).witness == {"x": (1,)}
    # transfer from x to y, then pin y outside the image: unsatisfiable
    n, k = 3, 2
    outside = frozenset(pnk.leaves(n, k)) - pnk.subalgebra_index(n, k, k - 1)
    inst = Instance(n, k, ("x", "y"), {Transfer(k): {("x", "y")}, pnk.unary_symbol(n, k, outside): {("y",)}})
    assert not solve(inst).accept and brute_force_oracle(inst) is None


@given(st.integers(0, 10**6))
def test_literal_reading_exact_for_two_elements(seed):
    inst, _ = seeded_instance(2, 1, seed)
    assert solve_level_one(inst, literal=True).accept == solve_level_one(inst).accept


def test_literal_reading_is_unsound_for_three_elements():
    # swap01 and equality on the same pair: both satisfied by x = y = 2, but the path
    # equations read off literally give x + y = 1 and x + y = 0
    inst = Instance(3, 1, ("x", "y"), {SWAP01: {("x", "y")}, Pair(EQ2, identity_perm(3)): {("x", "y")}})
    assert brute_force_oracle(inst) is not None
    assert solve(inst).accept
    assert not solve_level_one(inst, literal=True).accept


# --- reductions ------------------------------------------------------------------------------

@given(st.sampled_from([(n, k) for n, k in GRID if k >= 2]), st.integers(0, 10**6))
def test_reduction_projects_and_lifts_solutions(nk, seed):
    n, k = nk
    inst, plant = generate(n, k, 5, 12, "planted", random.Random(seed))
    r = reduce_instance(inst)
    assert r.reduced.k == k - 1 and r.level == k
    for s in all_solutions(inst, cap=50_000):
        assert satisfies(r.reduced, project_solution(r, s))
    for s in all_solutions(r.reduced, cap=50_000):
        assert satisfies(inst, lift_solution(r, s))
    assert inst.support(2) == r.reduced.support(2)
    assert inst.support(3) == r.reduced.support(3)
    for x, level in r.atlas.items():
        if level < k - 1:
            assert plant[x] in pnk.subalgebra_index(n, k, level)


@given(seeded)
def test_concise_form_keeps_solutions(args):
    (n, k), seed = args
    inst, _ = seeded_instance(n, k, seed, max_vars=4, max_constraints=10)
    c = make_concise(inst)
    assert c.is_concise()
    assert solution_set(c) == solution_set(inst)


@given(st.sampled_from(GRID), st.integers(0, 10**6))
def test_transfer_compatible_keeps_solutions(nk, seed):
    n, k = nk
    inst, _ = seeded_instance(n, k, seed, max_vars=4, max_constraints=10)
    assert solution_set(make_transfer_compatible(inst)) == solution_set(inst)


def test_uniform_split_of_instances():
    n, k = 3, 2
    sym2 = parse_symbol("(pair (pair eq2 (perm 2 1)) (perm 1 2))")
    sym1 = pnk.full_unary(n, k)
    inst = Instance(n, k, ("x", "y"), {sym2: {("x", "y")}, sym1: {("x",), ("y",)}})
    inner, outer = inner_restriction(inst), outer_restriction(inst)
    assert inner.k == k - 1
    back = uniform_product(inner, outer)
    assert back.constraints == inst.constraints


def test_components():
    inst = Instance(2, 1, ("a", "b", "c", "d"), {LIN: {("a", "b", "b")}, SWAP01: {("c", "d")}})
    assert sorted(map(sorted, components(inst))) == [["a", "b"], ["c", "d"]]
    assert sorted(map(sorted, components(inst, uniform_only=True))) == [["a"], ["b"], ["c"], ["d"]]
