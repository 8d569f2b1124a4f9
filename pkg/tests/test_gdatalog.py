from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from cmcsp.gdatalog import (
    LBOT,
    LTOP,
    Database,
    DatalogSyntaxError,
    StageSignatureError,
    Z2Step,
    check_linear,
    check_symmetric,
    datalog_rejects,
    eval_fixpoint,
    eval_stage1_z2,
    eval_staged,
    gen_lin_program,
    gen_solve_n1_program,
    goal_derived,
    instance_to_database,
    l_name,
    l_params,
    missing_symmetric_rules,
    parse_program,
    rules_equivalent,
    symmetric_closure,
)
from cmcsp.solver import Z2System, brute_force_gf2, seeded_instance, solve

PATH = """
% reachability
P(x,y) :- E(x,y).
P(x,z) :- P(x,y), E(y,z).
goal P.
"""

graphs = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=20)


def reachable(edges) -> set:
    """Oracle: transitive closure by repeated squaring of the edge set."""
    closure = set(edges)
    while True:
        new = {(a, d) for a, b in closure for c, d in closure if b == c} - closure
        if not new:
            return closure
        closure |= new


def edge_db(edges) -> Database:
    return Database(tuple(range(8)), {"E": set(edges)})


# --- syntax ------------------------------------------------------------------------------------

def test_parse_and_format_round_trip():
    for p in [parse_program(PATH), gen_lin_program(), gen_solve_n1_program(2), gen_solve_n1_program(3)]:
        again = parse_program(str(p))
        assert [str(r) for r in again.rules] == [str(r) for r in p.rules]
        assert again.goal == p.goal and again.outputs == p.outputs


def test_equation_predicate_names():
    name = l_name(2, 1, 0, 1, 1)
    assert name == "L[2;1,0,1,1]"
    assert l_params(name) == (2, 1, 0, 1, 1)
    assert l_params("P") is None
    assert parse_program(f"{name}(a,b,x,y,z) :- Q(a,b,x,y,z).").equation_arity == 2


@pytest.mark.parametrize("text", [
    "P(x,y) :- E(x).",                       # unsafe head variable
    "P(x) :- E(x). P(x,y) :- E(x), E(y).",   # arity clash
    "L[1;1,1,1,1](x,y) :- E(x,y).",          # equation predicate with wrong arity
    "Ltop(x) :- E(x).",                       # reserved head
    "P(x) :- E(x)",                           # missing period
    "P(x) :- E(x). goal Q.",                  # unknown goal
    "L[1;2,1,1,1](a,x,y,z) :- E(a,x,y,z).",  # malformed coefficient
    "P(x) :- E(x) & F(x).",
])
def test_syntax_errors(text):
    with pytest.raises(DatalogSyntaxError):
        parse_program(text)


def test_mixed_equation_prefixes_rejected():
    with pytest.raises(DatalogSyntaxError):
        parse_program("L[0;1,1,1,1](x,y,z) :- E(x,y,z). L[1;1,1,1,1](a,x,y,z) :- F(a,x,y,z).")


# --- fixpoint ----------------------------------------------------------------------------------

@given(graphs)
def test_fixpoint_matches_transitive_closure(edges):
    out = eval_fixpoint(parse_program(PATH), edge_db(edges))
    assert out.get("P") == reachable(edges)
    assert out.get("E") == set(edges)


@given(graphs, graphs)
def test_fixpoint_is_monotone(a, b):
    p = parse_program(PATH)
    small = eval_fixpoint(p, edge_db(a)).get("P")
    big = eval_fixpoint(p, edge_db(a + b)).get("P")
    assert small <= big


@given(graphs, st.randoms(use_true_random=False))
def test_fixpoint_independent_of_rule_and_atom_order(edges, rng):
    p = parse_program("""
        P(x,z) :- E(x,y), P(y,z).
        P(x,y) :- E(x,y).
        Q(x) :- P(x,x).
        S(x,y) :- P(x,y), P(y,x), x = y.
    """)
    base = eval_fixpoint(p, edge_db(edges)).relations
    shuffled = list(p.rules)
    rng.shuffle(shuffled)
    shuffled = [type(r)(r.head, tuple(rng.sample(r.body, len(r.body)))) for r in shuffled]
    p2 = parse_program("\n".join(str(r) for r in shuffled))
    assert eval_fixpoint(p2, edge_db(edges)).relations == base


def test_equality_atoms_and_zero_ary_facts():
    p = parse_program("Loop(x) :- E(x,y), x = y. Flag :- Loop(x).")
    out = eval_fixpoint(p, edge_db([(1, 1), (1, 2)]))
    assert out.get("Loop") == {(1,)}
    assert out.holds("Flag")
    assert not eval_fixpoint(p, edge_db([(1, 2)])).holds("Flag")


def test_database_json_round_trip():
    db = Database(("a", "b"), {"E": {("a", "b")}, "U": {("a",)}})
    assert Database.from_json(db.to_json()) == db
    inferred = Database.from_json({"relations": {"E": [["a", "b"]]}})
    assert inferred.domain == ("a", "b")
    assert db.reduct(["U"]).relations == {"U": {("a",)}}


# --- equation predicates ---------------------------------------------------------------------

@st.composite
def boolean_facts(draw):
    m = draw(st.integers(1, 6))
    xs = [f"v{i}" for i in range(m)]
    var = st.sampled_from(xs)
    rels = {
        "L": set(draw(st.lists(st.tuples(var, var, var), max_size=4))),
        "G": set(draw(st.lists(st.tuples(var, var), max_size=3))),
        "E": set(draw(st.lists(st.tuples(var, var), max_size=3))),
        "R0": set(draw(st.lists(st.tuples(var), max_size=2))),
        "R1": set(draw(st.lists(st.tuples(var), max_size=2))),
    }
    return Database(tuple(xs), rels)


@given(boolean_facts())
def test_lin_program_derives_bottom_iff_unsatisfiable(db):
    """Oracle: the same equations solved by exhaustive assignment."""
    system = Z2System()
    for x in db.domain:
        system.var(x)
    for t in db.get("L"):
        system.add(t, 1)
    for x, y in db.get("G"):
        system.add((x, y), 1)
    for x, y in db.get("E"):
        system.add((x, y), 0)
    for (x,) in db.get("R0"):
        system.add((x,), 0)
    for (x,) in db.get("R1"):
        system.add((x,), 1)
    p = gen_lin_program()
    step = Z2Step()
    out = eval_stage1_z2(p, db, step)
    unsat = brute_force_gf2(system) is None
    assert goal_derived(p, out) == unsat
    assert out.holds(LTOP) != unsat
    assert list(step.satisfiable.values()) == [not unsat]


def test_prefixed_systems_are_separate():
    p = parse_program("""
        L[1;1,0,0,1](a,x,x,x) :- One(a,x).
        L[1;1,0,0,0](a,x,x,x) :- Zero(a,x).
        Bad(a) :- Lbot(a).
        goal Bad.
    """)
    db = Database(("p", "q", "x"), {"One": {("p", "x"), ("q", "x")}, "Zero": {("q", "x")}})
    out = eval_stage1_z2(p, db)
    assert out.get(LTOP) == {("p",)}
    assert out.get(LBOT) == {("q",)}
    assert out.get("Bad") == {("q",)}


def test_closing_rules_see_the_solved_equations():
    # rules reading Lbot fire after the equations are solved
    p = parse_program("""
        L[0;1,0,0,1](x,x,x) :- U(x).
        L[0;1,0,0,0](x,x,x) :- V(x).
        Seen :- Lbot.
        goal Seen.
    """)
    out = eval_stage1_z2(p, Database(("x",), {"U": {("x",)}, "V": {("x",)}}))
    assert out.holds("Seen")


# --- staging --------------------------------------------------------------------------------

def test_staged_evaluation_and_signature_check():
    s1 = parse_program("P(x,y) :- E(x,y). P(x,z) :- P(x,y), E(y,z). output P.")
    s2 = parse_program("Cyc(x) :- P(x,x). goal Cyc. output Cyc.")
    out = eval_staged([s1, s2], edge_db([(0, 1), (1, 0), (2, 3)]))
    assert out.get("Cyc") == {(0,), (1,)}
    assert set(out.relations) == {"Cyc"}
    bad = parse_program("Cyc(x) :- E(x,x). output Cyc.")
    with pytest.raises(StageSignatureError):
        eval_staged([s1, bad], edge_db([(0, 0)]))


# --- static checks -------------------------------------------------------------------------

def test_linear_and_symmetric_checks():
    p = parse_program(PATH)
    assert check_linear(p)
    assert not check_symmetric(p)
    assert missing_symmetric_rules(p)
    closed = symmetric_closure(p)
    assert check_symmetric(closed)
    nonlinear = parse_program("P(x,y) :- E(x,y). P(x,z) :- P(x,y), P(y,z).")
    assert not check_linear(nonlinear) and not check_symmetric(nonlinear)


def test_rules_equivalent_up_to_renaming():
    a = parse_program("P(x,z) :- P(x,y), E(y,z).").rules[0]
    b = parse_program("P(u,w) :- E(v,w), P(u,v).").rules[0]
    c = parse_program("P(u,w) :- E(u,v), P(v,w).").rules[0]
    assert rules_equivalent(a, b)
    assert not rules_equivalent(a, c)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_generated_programs_static_properties(n):
    for p in (gen_lin_program(), gen_solve_n1_program(n)):
        assert check_linear(p) and check_symmetric(p)


# --- level-one solver program -------------------------------------------------------------

@given(st.sampled_from([2, 3]), st.integers(0, 10**6))
def test_program_goal_matches_solver(n, seed):
    inst, _ = seeded_instance(n, 1, seed)
    assert datalog_rejects(inst) == (not solve(inst, witness=False).accept)


def test_instance_database_encoding():
    inst, _ = seeded_instance(3, 1, 4)
    db = instance_to_database(inst)
    assert set(db.domain) == set(inst.variables)
    assert db.size() >= inst.size
    assert instance_to_database(inst) == db
