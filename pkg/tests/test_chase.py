# -*- coding: utf-8 -*-
# tests/test_chase.py
from __future__ import annotations

import json
import random
from dataclasses import replace

import pytest

from guarded_owqa.api.fuzz import generate_program
from guarded_owqa.chase import (
    Strategy,
    Verdict,
    bounded_entailment_oracle,
    check_one_pass_discipline,
    check_principal_exempt_nodes,
    check_proof,
    check_shortcut_discipline,
    run_chase,
    run_from_records,
    run_to_records,
)
from guarded_owqa.chase.model import CHASE, PROPAGATION, RELAXED
from guarded_owqa.config import get_settings
from guarded_owqa.dsl.parser import parse_program
from guarded_owqa.exceptions import IllegalStrategyInputError
from guarded_owqa.logic.homomorphism import find_homomorphism
from guarded_owqa.logic.model import Atom, Constant
from guarded_owqa.preprocess.normalize import normalize_program
from guarded_owqa.saturation.saturate import saturate

a, b = Constant("a"), Constant("b")


# =========================
# Strategies
# =========================

def test_tree_chase_derives_side_fact_along_the_chain(chain_program):
    run = run_chase(chain_program, Strategy.TREE, budget=40)
    assert run.exhausted
    assert Atom("U", (b,)) in run.nodes[0].facts
    assert len(run.steps) <= 40


def test_tree_chase_terminates_on_full_rules():
    program = parse_program("rel R/2\nrel S/1\ntgd R(x,y) -> S(y)\nfact R(a,b)\n")
    run = run_chase(program, Strategy.TREE, budget=100)
    assert not run.exhausted
    assert run.all_facts() == {Atom("R", (a, b)), Atom("S", (b,))}
    assert len(run.nodes) == 1


def test_tree_chase_fires_each_full_trigger_once():
    program = parse_program(
        "rel R/2\nrel S/1\nrel T/1\nrel U/1\n"
        "tgd R(x,y) -> S(y)\n"
        "tgd S(x) -> T(x)\n"
        "tgd R(x,y), T(y) -> U(x)\n"
        "fact R(a,b)\nfact R(b,c)\n"
    )
    run = run_chase(program, Strategy.TREE, budget=100)
    assert not run.exhausted
    derived = run.all_facts() - program.instance.facts
    assert len(derived) == 6
    assert len(run.steps) == len(derived)


def test_one_pass_never_revisits(chain_program):
    run = run_chase(chain_program, Strategy.ONE_PASS, budget=60)
    assert check_one_pass_discipline(run)
    assert any(step.kind == PROPAGATION for step in run.steps) or len(run.nodes) > 1


def test_principal_exempt_keeps_one_principal_fact_per_node(chain_program):
    normalized, _ = normalize_program(chain_program)
    run = run_chase(normalized, Strategy.PRINCIPAL_EXEMPT, budget=60)
    side = normalized.signature.side_names
    assert check_principal_exempt_nodes(run, side)
    for step in run.steps:
        if step.kind == PROPAGATION:
            assert all(f.relation in side for f in step.facts)
        if step.kind in (CHASE, RELAXED) and step.target != step.node:
            assert all(f.relation in side for f in step.inherited)


@pytest.mark.parametrize("seed", range(30))
def test_principal_exempt_agrees_with_a_finished_tree_chase(seed):
    program = generate_program(random.Random(seed), get_settings())
    normalized, _ = normalize_program(program)
    domain = normalized.instance.active_domain
    tree = run_chase(normalized, Strategy.TREE, budget=300)
    exempt = run_chase(normalized, Strategy.PRINCIPAL_EXEMPT, budget=300)
    if tree.exhausted:
        pytest.skip("tree chase did not finish")
    tree_facts = tree.all_facts()
    exempt_facts = exempt.all_facts()
    assert {f for f in exempt_facts if f.values <= domain} <= {f for f in tree_facts if f.values <= domain}
    for query in normalized.queries:
        if find_homomorphism(query.atoms, exempt_facts) is not None:
            assert find_homomorphism(query.atoms, tree_facts) is not None


@pytest.mark.parametrize("strategy", [Strategy.SHORTCUT, Strategy.SHORTCUT_DONATING])
def test_shortcut_runs_have_no_propagation(chain_program, strategy):
    normalized, _ = normalize_program(chain_program)
    closure = saturate(normalized.ruleset)
    run = run_chase(normalized, strategy, closure, budget=80)
    assert check_shortcut_discipline(run)
    assert not any(step.kind == PROPAGATION for step in run.steps)


def test_shortcut_proof_with_lemmas_checks(chain_program):
    normalized, _ = normalize_program(chain_program)
    closure = saturate(normalized.ruleset)
    run = run_chase(normalized, Strategy.SHORTCUT, closure, budget=80)
    query = normalized.queries[0]
    match = find_homomorphism(query.atoms, run.all_facts())
    assert match is not None
    assert check_proof(normalized, run, match, query)


def test_shortcut_needs_a_saturation(chain_program):
    normalized, _ = normalize_program(chain_program)
    with pytest.raises(IllegalStrategyInputError):
        run_chase(normalized, Strategy.SHORTCUT, None, budget=10)


def test_principal_exempt_needs_normalized_input():
    program = parse_program("rel R/2\nrel S/2\ntgd R(x,y) -> S(x,y)\nfact R(a,b)\n")
    with pytest.raises(IllegalStrategyInputError):
        run_chase(program, Strategy.PRINCIPAL_EXEMPT, budget=10)


# =========================
# Oracle
# =========================

def test_oracle_entails_chain_query(chain_program):
    verdict = bounded_entailment_oracle(chain_program, chain_program.queries[0], 2000)
    assert verdict.verdict is Verdict.ENTAILED
    assert check_proof(chain_program, verdict.run, verdict.match, chain_program.queries[0])


def test_oracle_certain_no_for_underivable_relation():
    program = parse_program("rel R/2\nrel S/1\nfact R(a,b)\nquery S(x)\n")
    verdict = bounded_entailment_oracle(program, program.queries[0], 100)
    assert verdict.verdict is Verdict.UNKNOWN
    assert verdict.certain_no


def test_oracle_certain_no_after_termination():
    program = parse_program("rel R/2\nrel S/1\ntgd R(x,y) -> S(x)\nfact R(a,b)\nquery S('b)\n")
    verdict = bounded_entailment_oracle(program, program.queries[0], 100)
    assert not verdict.entailed
    assert verdict.certain_no
    assert not verdict.run.exhausted


def test_oracle_skips_the_chase_for_underivable_relation():
    program = parse_program("rel R/2\nrel S/1\ntgd R(x,y) -> R(y,z)\nfact R(a,b)\nquery S(x)\n")
    verdict = bounded_entailment_oracle(program, program.queries[0], 500)
    assert not verdict.entailed
    assert verdict.certain_no
    assert verdict.run.steps == ()
    assert not verdict.run.exhausted


def test_oracle_uses_the_whole_budget_on_an_endless_chain():
    program = parse_program("rel R/2\ntgd R(x,y) -> R(y,z)\nfact R(a,b)\nquery R(x,x)\n")
    verdict = bounded_entailment_oracle(program, program.queries[0], 2000)
    assert verdict.run.exhausted
    assert len(verdict.run.steps) == 2000
    assert not verdict.entailed


def test_oracle_unknown_when_budget_runs_out():
    program = parse_program("rel R/2\ntgd R(x,y) -> R(y,z)\nfact R(a,b)\nquery R(x,x)\n")
    verdict = bounded_entailment_oracle(program, program.queries[0], 30)
    assert verdict.verdict is Verdict.UNKNOWN
    assert verdict.run.exhausted
    assert not verdict.certain_no


# =========================
# Proof checking
# =========================

def test_tampered_fact_is_reported(chain_program):
    verdict = bounded_entailment_oracle(chain_program, chain_program.queries[0], 2000)
    run = verdict.run
    index = next(i for i, s in enumerate(run.steps) if s.kind == CHASE and s.facts)
    bad = replace(run.steps[index], facts=(Atom("U", (Constant("zzz"),)),))
    tampered = replace(run, steps=run.steps[:index] + (bad,) + run.steps[index + 1:])
    result = check_proof(chain_program, tampered, verdict.match, chain_program.queries[0])
    assert not result
    assert result.failed_step == index


def test_foreign_rule_is_rejected(chain_program):
    verdict = bounded_entailment_oracle(chain_program, chain_program.queries[0], 2000)
    other = parse_program("rel R/2\nrel U/1 side\ntgd R(x,y) -> U(x)\nfact R(a,b)\nfact U(a)\n")
    result = check_proof(other.with_instance(chain_program.instance), verdict.run, verdict.match, chain_program.queries[0])
    assert not result
    assert "not a program rule" in result.reason


def test_wrong_match_fails_after_replay(chain_program):
    verdict = bounded_entailment_oracle(chain_program, chain_program.queries[0], 2000)
    match = {var: Constant("zzz") for var in verdict.match}
    result = check_proof(chain_program, verdict.run, match, chain_program.queries[0])
    assert not result
    assert result.failed_step == len(verdict.run.steps)


def test_trace_reloads_and_still_checks(chain_program):
    verdict = bounded_entailment_oracle(chain_program, chain_program.queries[0], 2000)
    doc = json.loads(json.dumps(run_to_records(verdict.run)))
    reloaded = run_from_records(doc)
    assert reloaded.steps == verdict.run.steps
    assert check_proof(chain_program, reloaded, verdict.match, chain_program.queries[0])
