# -*- coding: utf-8 -*-
# tests/test_linear.py
from __future__ import annotations

import pytest

from guarded_owqa.exceptions import CapExceededError, NotDecomposableError
from guarded_owqa.linear import (
    PositionGraph,
    decide_linear,
    depth_bound,
    linearize,
    position_edges,
    semi_width,
    tight_chase,
    ucq_rewrite,
)
from guarded_owqa.linear.linearizer import INSTANTIATE, LIFT, root_span
from guarded_owqa.logic.canonical import canonical_mapping
from guarded_owqa.logic.model import Atom, ConjunctiveQuery, Constant, Instance, TGD, Variable
from guarded_owqa.saturation import fact_saturate, saturate

from conftest import element_atom

x, y, z = Variable("x"), Variable("y"), Variable("z")
x1, x2, z1 = Variable("x1"), Variable("x2"), Variable("z1")
a, b = Constant("a"), Constant("b")


@pytest.fixture
def chain_linear(chain_program):
    sigma = chain_program.ruleset
    closure = saturate(sigma)
    facts = fact_saturate(sigma, closure, chain_program.instance)
    return linearize(sigma, closure, facts.instance)


def _type(*side):
    return canonical_mapping(element_atom("R", 1, 2), [element_atom("U", i) for i in side])[0]


# =========================
# Linearizer
# =========================

def test_chain_has_three_types(chain_linear):
    assert set(chain_linear.catalog.types) == {_type(), _type(1), _type(2)}
    assert all(r.name.startswith("lin_R_") for r in chain_linear.catalog.relations())


def test_chain_rules(chain_linear):
    rel = chain_linear.catalog.relation_of
    first, second = rel[_type(1)].name, rel[_type(2)].name
    rules = set(chain_linear.tgds)
    assert TGD((Atom(first, (x1, x2)),), (Atom("U", (x1,)),)) in rules
    assert TGD((Atom(first, (x1, x2)),), (Atom("R", (x1, x2)),)) in rules
    assert TGD((Atom(second, (x1, x2)),), (Atom(first, (x2, z1)),)) in rules


def test_every_lift_rule_is_linear_and_narrow(chain_linear):
    for lr in chain_linear.rules:
        assert lr.rule.is_linear
        if lr.kind == LIFT:
            assert lr.rule.width <= chain_linear.w
        else:
            assert lr.kind == INSTANTIATE and lr.rule.is_full


def test_instance_gains_type_facts(chain_linear):
    rel = chain_linear.catalog.relation_of
    for ctype in (_type(), _type(1), _type(2)):
        assert Atom(rel[ctype].name, (a, b)) in chain_linear.instance


def test_root_span(chain_program, principal_program):
    assert root_span(chain_program.ruleset) == 1
    assert root_span(principal_program.ruleset) == 4


def test_linear_output_decomposes(chain_linear):
    split = semi_width(chain_linear.tgds, chain_linear.w)
    assert all(r.width <= chain_linear.w for r in split.sigma1)
    assert PositionGraph(split.sigma2).is_acyclic()


# =========================
# Position graph
# =========================

def test_swap_rule_is_not_decomposable():
    swap = TGD((Atom("R", (x, y)),), (Atom("R", (y, x)),))
    with pytest.raises(NotDecomposableError) as info:
        semi_width([swap], 0)
    assert str(info.value) == "position graph has a cycle: R[1]→R[2]→R[1]"
    assert info.value.cycle == (("R", 1), ("R", 2))


def test_swap_rule_fits_at_width_two():
    swap = TGD((Atom("R", (x, y)),), (Atom("R", (y, x)),))
    split = semi_width([swap], 2)
    assert split.sigma1 == (swap,) and split.sigma2 == ()


def test_graph_edges_match_brute_force(chain_linear):
    assert PositionGraph(chain_linear.tgds).edges == position_edges(chain_linear.tgds)


# =========================
# Depth bound
# =========================

@pytest.mark.parametrize(
    "args, expected",
    [
        ((3, 10, 3, 2), 750),
        ((1, 1, 2, 1), 3),
        ((2, 4, 2, 1, 3), 96),
    ],
)
def test_depth_bound(args, expected):
    assert depth_bound(*args) == expected


# =========================
# Rewriting
# =========================

P_TO_R = TGD((Atom("P", (x,)),), (Atom("R", (x, z)),))


def test_rewriting_follows_existential_heads():
    ucq = ucq_rewrite(ConjunctiveQuery((Atom("R", (x, y)),)), [P_TO_R])
    shapes = {tuple(a.relation for a in cq.atoms) for cq in ucq.disjuncts}
    assert shapes == {("R",), ("P",)}


def test_existential_cannot_meet_a_frontier_term():
    ucq = ucq_rewrite(ConjunctiveQuery((Atom("R", (x, x)),)), [P_TO_R])
    assert len(ucq) == 1


def test_existential_cannot_meet_a_constant():
    ucq = ucq_rewrite(ConjunctiveQuery((Atom("R", (x, b)),)), [P_TO_R])
    assert len(ucq) == 1


def test_factorization_merges_atoms_of_one_child():
    query = ConjunctiveQuery((Atom("R", (x, y)), Atom("R", (x, z))))
    ucq = ucq_rewrite(query, [P_TO_R])
    assert any([atom.relation for atom in cq.atoms] == ["P"] for cq in ucq.disjuncts)


def test_cap_is_enforced():
    with pytest.raises(CapExceededError):
        ucq_rewrite(ConjunctiveQuery((Atom("R", (x, y)),)), [P_TO_R], cap=1)


def test_stop_ends_the_search():
    ucq = ucq_rewrite(
        ConjunctiveQuery((Atom("R", (x, y)),)),
        [P_TO_R],
        stop=lambda cq: cq.atoms[0].relation == "P",
    )
    assert ucq.matched is not None and ucq.matched.atoms[0].relation == "P"


# =========================
# Tight chase & decision
# =========================

def test_tight_chase_respects_depth():
    rules = [P_TO_R, TGD((Atom("R", (x, y)),), (Atom("S", (y,)),))]
    instance = Instance(frozenset({Atom("P", (a,))}))
    shallow = tight_chase([Atom("S", (y,))], rules, instance, depth_bound=1)
    assert not shallow.entailed and not shallow.complete
    deep = tight_chase([Atom("S", (y,))], rules, instance, depth_bound=2)
    assert deep.entailed and deep.max_depth == 2
    assert [deep.nodes[i].fact.relation for i in deep.support([Atom("S", (y,))])] == ["P", "R", "S"]


def test_tight_chase_finishes_on_finite_forest():
    rules = [TGD((Atom("P", (x,)),), (Atom("Q", (x,)),))]
    result = tight_chase([Atom("S", (y,))], rules, Instance(frozenset({Atom("P", (a,))})), depth_bound=10)
    assert not result.entailed and result.complete
    assert result.pruned == 0


def test_pruned_forest_is_not_complete():
    rules = [TGD((Atom("R", (x, y)),), (Atom("R", (y, z)),))]
    instance = Instance(frozenset({Atom("R", (a, b))}))
    result = tight_chase([Atom("S", (y,))], rules, instance, depth_bound=100)
    assert result.pruned > 0
    assert not result.entailed
    assert not result.complete
    assert result.max_depth == 2


@pytest.mark.parametrize("mode", ["rewrite", "chase", "both"])
def test_decide_chain_query(chain_program, chain_linear, mode):
    decision = decide_linear(chain_program.queries[0], chain_linear, mode=mode)
    assert decision.answer


@pytest.mark.parametrize("mode", ["rewrite", "both"])
def test_decide_rejects_loop(chain_linear, mode):
    query = ConjunctiveQuery((Atom("R", (x, x)),))
    assert not decide_linear(query, chain_linear, mode=mode).answer


def test_unknown_mode(chain_program, chain_linear):
    with pytest.raises(ValueError):
        decide_linear(ConjunctiveQuery((Atom("R", (x, x)),)), chain_linear, mode="guess")
