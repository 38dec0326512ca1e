# -*- coding: utf-8 -*-
# tests/test_saturation.py
from __future__ import annotations

import random

import pytest

from guarded_owqa.api.fuzz import generate_program
from guarded_owqa.api.pipeline import entails_fact
from guarded_owqa.chase import Strategy, run_chase
from guarded_owqa.chase.oracle import bounded_entailment_oracle
from guarded_owqa.config import get_settings
from guarded_owqa.dsl.parser import parse_program
from guarded_owqa.logic.canonical import canonical_mapping, freeze_atoms
from guarded_owqa.logic.homomorphism import FactIndex
from guarded_owqa.logic.model import Atom, Constant, Instance, SignatureStats
from guarded_owqa.preprocess.normalize import normalize_program
from guarded_owqa.saturation import (
    fact_saturate,
    is_fact_saturated,
    is_suitable,
    saturate,
    suitable_count_bound,
)
from guarded_owqa.saturation.saturate import FROM_PRINCIPAL, enumerate_trivial_rules

from conftest import element_atom

a, b, c = Constant("a"), Constant("b"), Constant("c")


# =========================
# Size bound
# =========================

def test_bound_with_one_side_relation():
    stats = SignatureStats(a=2, a_prime=1, n_prime=1, w=1, w_prime=1)
    assert suitable_count_bound(stats, 2) == 4 * 27 * 2


def test_bound_without_side_relations():
    stats = SignatureStats(a=2, a_prime=0, n_prime=0, w=1, w_prime=1)
    assert suitable_count_bound(stats, 1) == 27


def test_generated_closures_stay_within_bound():
    config = get_settings()
    for seed in range(30):
        normalized, _ = normalize_program(generate_program(random.Random(seed), config))
        sigma = normalized.ruleset
        closure = saturate(sigma)
        assert len(closure) <= suitable_count_bound(sigma.stats, len(sigma))


# =========================
# Suitability
# =========================

def test_unbounded_breadth_is_not_suitable(transitivity_program):
    sigma = transitivity_program.ruleset
    ok, witness = is_suitable(sigma.rules[1], sigma)
    assert ok and witness.compatible_head == -2
    ok, witness = is_suitable(sigma.rules[4], sigma)
    assert not ok
    assert witness.breadth == 3


def test_non_full_rule_is_not_suitable(chain_program):
    sigma = chain_program.ruleset
    ok, witness = is_suitable(sigma.rules[0], sigma)
    assert not ok and not witness.is_full


def test_trivial_rules_cover_side_choices(chain_program):
    rules = {str(r) for r in enumerate_trivial_rules(chain_program.ruleset)}
    assert "R(x1,x2) -> R(x1,x2)" in rules
    assert "R(x1,x2), U(x1) -> R(x1,x2)" in rules
    assert "R(x1,x2), U(x2) -> R(x1,x2)" in rules


# =========================
# Closure content
# =========================

def test_transitivity_drops_the_wide_body(transitivity_program):
    closure = saturate(transitivity_program.ruleset)
    key = canonical_mapping(element_atom("R", 1, 2, 3, 4, 5), [element_atom("S", 1)])[0]
    assert element_atom("U", 5) in closure.heads(key)
    assert str(closure.lemma_rule(key, element_atom("U", 5))) == "R(x1,x2,x3,x4,x5), S(x1) -> U(x5)"


def test_consequence_through_a_child(principal_program):
    closure = saturate(principal_program.ruleset)
    key = canonical_mapping(element_atom("R", 1, 2, 3, 4), [element_atom("S", 1), element_atom("S", 2)])[0]
    head = element_atom("U", 3, 4)
    assert head in closure.heads(key)
    assert closure.provenance(key, head) == FROM_PRINCIPAL
    assert "R(x1,x2,x3,x4), S(x1), S(x2) -> U(x3,x4)" in {str(r) for r in closure.as_rules()}


def test_only_non_full_rules_give_no_lemmas():
    program = parse_program("rel R/2\ntgd R(x,y) -> R(y,z)\n")
    assert saturate(program.ruleset).as_rules() == ()


def test_closure_does_not_depend_on_worklist_order(principal_program):
    sigma = principal_program.ruleset
    plain = saturate(sigma)
    shuffled = saturate(sigma, order_seed=3)
    for key in set(plain.bodies) & set(shuffled.bodies):
        assert set(plain.heads(key)) == set(shuffled.heads(key))


def test_closure_rules_are_entailed(chain_program, principal_program):
    for program in (chain_program, principal_program):
        normalized, _ = normalize_program(program)
        closure = saturate(normalized.ruleset)
        for rule in closure.as_rules():
            body, ren = freeze_atoms(rule.body)
            heads = [h.substitute(ren) for h in rule.head]
            verdict = bounded_entailment_oracle(normalized.with_instance(Instance(frozenset(body))), heads, 500)
            assert verdict.entailed, str(rule)


def test_apply_reaches_fixpoint(chain_program):
    closure = saturate(chain_program.ruleset)
    index = FactIndex([Atom("R", (a, b)), Atom("R", (b, c)), Atom("U", (a,))])
    added = closure.apply(index)
    assert set(added) == {Atom("U", (b,)), Atom("U", (c,))}
    assert closure.apply(index) == []


def test_assumed_head_is_kept(chain_program):
    closure = saturate(chain_program.ruleset)
    key = canonical_mapping(element_atom("R", 1, 2))[0]
    closure.assume(key, element_atom("U", 1))
    assert closure.provenance(key, element_atom("U", 1)) == "assumed"


# =========================
# Fact closure
# =========================

def test_fact_closure_of_chain(chain_program):
    sigma = chain_program.ruleset
    closure = saturate(sigma)
    result = fact_saturate(sigma, closure, chain_program.instance)
    assert result.added == {Atom("U", (b,))}
    assert is_fact_saturated(sigma, closure, result.instance)


def test_fact_closure_recovers_facts_from_children():
    program = parse_program(
        "rel R/2\nrel S/1 side\nrel T/1 side\n"
        "tgd R(x,y) -> R(y,z)\n"
        "tgd R(x,y), S(x) -> T(x)\n"
        "tgd R(x,y), T(y) -> S(y)\n"
        "fact R(a,b)\nfact S(b)\n"
    )
    normalized, _ = normalize_program(program)
    sigma = normalized.ruleset
    result = fact_saturate(sigma, saturate(sigma), normalized.instance, record=True)
    assert Atom("T", (b,)) in result.instance
    assert result.run is not None
    assert result.run.initial == normalized.instance.facts


def test_entails_fact_stays_in_the_domain(chain_program):
    assert entails_fact(chain_program, Atom("U", (b,)))
    assert not entails_fact(chain_program, Atom("U", (c,)))


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4, 5, 6, 7])
def test_fact_closure_contains_what_the_chase_finds(seed):
    program = generate_program(random.Random(seed), get_settings())
    normalized, _ = normalize_program(program)
    sigma = normalized.ruleset
    result = fact_saturate(sigma, saturate(sigma), normalized.instance)
    domain = normalized.instance.active_domain
    run = run_chase(normalized, Strategy.TREE, budget=300)
    found = {f for f in run.all_facts() if f.values <= domain}
    assert found <= result.instance.facts


# =========================
# Closure completeness
# =========================

SELF_FEEDING_TEXT = (
    "rel Q/1\nrel P/2\n"
    "tgd Q(x) -> P(x,z)\n"
    "tgd P(x,y) -> P(z,x)\n"
    "tgd P(x,y) -> P(y,y)\n"
    "fact Q(a)\n"
)


def test_body_reads_its_own_heads_through_a_child():
    program = parse_program(SELF_FEEDING_TEXT)
    normalized, _ = normalize_program(program)
    closure = saturate(normalized.ruleset)
    key = canonical_mapping(element_atom("P", 1, 2))[0]
    assert element_atom("P", 1, 1) in closure.lookup(key)
    assert "P(x1,x2) -> P(x1,x1)" in {str(r) for r in closure.as_rules()}
    assert entails_fact(program, Atom("P", (a, a)))


def _frozen_body(key):
    ren = {n: Constant(f"k_{n.index}") for n in key.elements}
    return frozenset(f.substitute(ren) for f in key.facts), set(ren.values())


@pytest.mark.parametrize("seed", range(60))
def test_closure_covers_what_the_chase_finds_from_each_body(seed):
    program = generate_program(random.Random(seed), get_settings())
    normalized, _ = normalize_program(program)
    sigma = normalized.ruleset
    closure = saturate(sigma)
    for key in closure.bodies[:12]:
        facts, domain = _frozen_body(key)
        index = FactIndex(sorted(facts, key=Atom.sort_key))
        closure.apply(index)
        run = run_chase(normalized.with_instance(Instance(facts)), Strategy.TREE, budget=120)
        missing = {f for f in run.all_facts() if f.values <= domain} - set(index)
        assert not missing, (seed, str(key.principal), sorted(map(str, missing)))

    result = fact_saturate(sigma, closure, normalized.instance)
    run = run_chase(normalized, Strategy.TREE, budget=300)
    found = {f for f in run.all_facts() if f.values <= normalized.instance.active_domain}
    assert found <= result.instance.facts
