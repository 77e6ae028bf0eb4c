import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_automorphisms, brute_orbits, naive_extension
from wms.errors import ArityMismatch, FormulaSyntaxError, ShapeMismatch, UnboundVariable, UnknownRelation
from wms.logic import (
    DefinableSet,
    FiniteStructure,
    PartitionedFormula,
    automorphisms,
    complete_graph,
    delta_atoms,
    evaluate,
    extension_equal,
    free_variables,
    graph,
    load_structure,
    orbit,
    parse_formula,
    path_graph,
    same_type_over,
    tuple_orbits,
)
from wms.logic.syntax import And, Const, Eq, Exists, Forall, Iff, Implies, Lit, Not, Or, Rel, Var

P3 = path_graph(3)
K3 = complete_graph(3)


def test_parse_examples():
    f = parse_formula("E(x,y) & !E(y,x)", P3.signature)
    assert f == And(Rel("E", (Var("x"), Var("y"))), Not(Rel("E", (Var("y"), Var("x")))))
    g = parse_formula("exists z. (E(x,z) & E(z,y))", P3.signature)
    assert g == Exists(("z",), And(Rel("E", (Var("x"), Var("z"))), Rel("E", (Var("z"), Var("y")))))
    with pytest.raises(ArityMismatch):
        parse_formula("E(x)", P3.signature)


def test_parse_precedence_and_associativity():
    f = parse_formula("a = b -> b = c -> c = a")
    assert isinstance(f, Implies) and isinstance(f.right, Implies)
    g = parse_formula("x = y | x = z & y = z")
    assert isinstance(g, Or) and isinstance(g.right, And)
    h = parse_formula("exists z. x = z & z = y")
    assert isinstance(h, And) and isinstance(h.left, Exists)
    assert parse_formula("x != #2") == Not(Eq(Var("x"), Lit(2)))


@pytest.mark.parametrize("text", ["E(x,", "x = ", "exists . x=x", "x = y)", "E(x,y) @"])
def test_parse_errors_carry_position(text):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text, P3.signature)
    assert info.value.position >= 0


def test_unknown_relation():
    with pytest.raises(UnknownRelation):
        parse_formula("R(x,y)", P3.signature)


def test_evaluate_examples():
    D = evaluate(P3, "E(x,y)", "x,y")
    assert set(D.tuples()) == {(0, 1), (1, 0), (1, 2), (2, 1)} and D.size == 4
    assert evaluate(P3, "x = x", "x") == DefinableSet.full(1, 3)
    assert evaluate(P3, "exists y. E(x,y)", "x").size == 3


def test_extension_equal_examples():
    assert extension_equal(evaluate(P3, "E(x,y)", "x,y"), evaluate(P3, "E(y,x)", "x,y"))
    assert extension_equal(evaluate(P3, "x=x", "x"), evaluate(P3, "!false", "x"))
    assert not extension_equal(evaluate(P3, "E(x,y)", "x,y"), evaluate(P3, "x=y", "x,y"))
    with pytest.raises(ShapeMismatch):
        extension_equal(evaluate(P3, "x=x", "x"), evaluate(P3, "x=y", "x,y"))


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        evaluate(P3, "E(x,y)", "x")


def test_delta_atoms_examples():
    E = PartitionedFormula.parse("E(x,y)", P3.signature)
    atoms = delta_atoms(P3, [E], [0, 1, 2])
    assert sorted(sorted(a.tuples()) for a in atoms) == [[(0,), (2,)], [(1,)]]
    eq = PartitionedFormula.parse("x = y")
    assert sorted(a.size for a in delta_atoms(P3, [eq], [0, 1, 2])) == [1, 1, 1]
    assert delta_atoms(P3, [E], []) == [DefinableSet.full(1, 3)]


def test_automorphism_examples():
    assert automorphisms(P3) == [(0, 1, 2), (2, 1, 0)]
    assert automorphisms(P3, [0, 1, 2]) == [(0, 1, 2)]
    assert len(automorphisms(K3)) == 6
    assert same_type_over(P3, (0,), (2,))
    assert not same_type_over(P3, (0,), (1,))
    assert same_type_over(P3, (1,), (1,))


def test_structure_json_round_trip(tmp_path):
    path = tmp_path / "p3.json"
    path.write_text(json.dumps({"name": "P3", "universe": 3, "relations": {"E": {"arity": 2, "symmetric": True, "tuples": [[0, 1], [1, 2]]}}}))
    S = load_structure(path)
    assert S.relations["E"] == P3.relations["E"]
    again = FiniteStructure.from_json(S.to_json())
    assert again.relations == S.relations


def test_free_variables_in_order():
    assert free_variables(parse_formula("E(y,x) & exists y. E(y,z)")) == ["y", "x", "z"]


# ---------------------------------------------------------------- properties

VARS = ("x", "y", "z")


def graphs(max_m=4):
    return st.integers(1, max_m).flatmap(
        lambda m: st.sets(st.tuples(st.integers(0, m - 1), st.integers(0, m - 1)), max_size=m * m).map(
            lambda edges: graph(m, edges)
        )
    )


def formulas(m):
    terms = st.one_of(st.sampled_from(VARS).map(Var), st.integers(0, m - 1).map(Lit))
    atoms = st.one_of(
        st.tuples(terms, terms).map(lambda ts: Rel("E", ts)),
        st.tuples(terms, terms).map(lambda ts: Eq(*ts)),
        st.booleans().map(Const),
    )

    def extend(children):
        binary = st.sampled_from([And, Or, Implies, Iff])
        return st.one_of(
            children.map(Not),
            st.tuples(binary, children, children).map(lambda t: t[0](t[1], t[2])),
            st.tuples(st.sampled_from([Exists, Forall]), st.sampled_from(VARS), children).map(
                lambda t: t[0]((t[1],), t[2])
            ),
        )

    return st.recursive(atoms, extend, max_leaves=8)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_evaluate_matches_naive_semantics(data):
    S = data.draw(graphs())
    f = data.draw(formulas(S.m))
    assert set(evaluate(S, f, VARS).tuples()) == naive_extension(S, f, VARS)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_printed_formulas_parse_back(data):
    f = data.draw(formulas(3))
    assert parse_formula(str(f)) == f


@settings(max_examples=40, deadline=None)
@given(graphs(5), st.data())
def test_automorphisms_match_permutation_scan(S, data):
    fixed = data.draw(st.sets(st.integers(0, S.m - 1), max_size=2))
    assert automorphisms(S, fixed) == brute_automorphisms(S, fixed)


@settings(max_examples=40, deadline=None)
@given(graphs(4), st.integers(1, 2))
def test_tuple_orbits_match_brute_force(S, k):
    ours = [frozenset(o.tuples()) for o in tuple_orbits(S, k)]
    assert set(ours) == set(brute_orbits(S, k))
    assert [min(o) for o in ours] == sorted(min(o) for o in ours)


@settings(max_examples=40, deadline=None)
@given(graphs(4))
def test_orbit_lists_same_type_tuples(S):
    for c in itertools.product(range(S.m), repeat=1):
        members = orbit(S, c)
        assert members == sorted(members)
        assert all(same_type_over(S, c, d) for d in members)
        assert {d for d in itertools.product(range(S.m), repeat=1) if same_type_over(S, c, d)} == set(members)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_definable_set_boolean_ops(k, m, data):
    masks = st.integers(0, 2 ** (m**k) - 1)
    a, b = data.draw(masks), data.draw(masks)
    A, B = DefinableSet.from_mask(k, m, a), DefinableSet.from_mask(k, m, b)
    full = 2 ** (m**k) - 1
    assert (A & B).to_mask() == a & b
    assert (A | B).to_mask() == a | b
    assert (A - B).to_mask() == a & ~b
    assert (~A).to_mask() == full & ~a
    assert A.issubset(B) == (a & ~b == 0)
    assert A.size == bin(a).count("1")
