# -*- coding: utf-8 -*-
# tests/test_normalize.py
from __future__ import annotations

import pytest

from guarded_owqa.chase.oracle import bounded_entailment_oracle
from guarded_owqa.dsl.parser import parse_program
from guarded_owqa.exceptions import HeadConstantError, NotObeyingError, UnguardedRuleError
from guarded_owqa.logic.model import TAG_CONST, TAG_SPLIT, TAG_TWIN, Atom, Constant, Variable
from guarded_owqa.preprocess.normalize import (
    HOM_CLOSURE,
    identifications,
    normalize_program,
    set_partitions,
    split_multiheads,
    strong_obedience_violations,
)


def test_side_heads_go_through_a_twin(chain_program):
    normalized, trace = normalize_program(chain_program)
    twin = normalized.signature.get("twin_U")
    assert twin is not None and twin.origin == TAG_TWIN and not twin.is_side
    heads = [r.head[0].relation for r in normalized.tgds]
    assert "U" not in heads[:2]
    assert "twin_U(v1) -> U(v1)" in [str(r) for r in normalized.tgds]
    assert Atom("twin_U", (Constant("a"),)) in normalized.instance
    assert trace.symbol_map == {"twin_U": "principal twin of U"}


def test_output_strongly_obeys(chain_program, transitivity_program, principal_program):
    for program in (chain_program, transitivity_program, principal_program):
        normalized, _ = normalize_program(program)
        assert strong_obedience_violations(normalized.ruleset) == []
        assert all(len(r.head) == 1 for r in normalized.tgds)


def test_normalization_is_idempotent(chain_program, principal_program):
    for program in (chain_program, principal_program):
        once, _ = normalize_program(program)
        twice, trace = normalize_program(once)
        assert twice == once
        assert trace.symbol_map == {}


def test_multi_head_rule_is_split():
    program = parse_program("rel R/2\nrel S/1\ntgd R(x,y) -> S(x), S(y)\n")
    normalized, trace = normalize_program(program)
    split = [r for r in normalized.signature if r.origin == TAG_SPLIT]
    assert len(split) == 1
    assert all(index == 0 for index, _ in trace.rule_map if index is not None)
    assert {str(r) for r in split_multiheads(program.tgds)} == {
        "R(x,y) -> split_1(x,y)",
        "split_1(x,y) -> S(x)",
        "split_1(x,y) -> S(y)",
    }


def test_query_constants_become_marked_variables():
    program = parse_program("rel R/2\nfact R(c,d)\nquery R('c, y)\n")
    normalized, _ = normalize_program(program)
    marker = normalized.signature.get("const_c")
    assert marker is not None and marker.is_side and marker.origin == TAG_CONST
    x_c, y = Variable("x_c"), Variable("y")
    assert normalized.queries[0].atoms == (Atom("R", (x_c, y)), Atom("const_c", (x_c,)))
    assert Atom("const_c", (Constant("c"),)) in normalized.instance


def test_identification_closure_is_added():
    program = parse_program("rel R/2\nrel S/2\ntgd R(x,y) -> S(x,y)\n")
    normalized, trace = normalize_program(program)
    rules = {str(r) for r in normalized.tgds}
    assert "R(x,x) -> S(x,x)" in rules
    assert HOM_CLOSURE in [tag for _, tag in trace.rule_map]
    assert len(trace.rule_map) == len(normalized.tgds)


def test_set_partitions_count_is_bell_number():
    assert len(list(set_partitions([1, 2, 3]))) == 5
    assert len(list(set_partitions([1, 2, 3, 4]))) == 15


def test_identifications_skip_the_identity():
    rule = parse_program("rel R/2\nrel S/2\ntgd R(x,y) -> S(x,y)\n").tgds[0]
    assert [str(r) for r in identifications(rule)] == ["R(x,x) -> S(x,x)"]


@pytest.mark.parametrize(
    "text, error",
    [
        ("rel R/2\ntgd R(x,y), R(y,z) -> R(x,z)\n", UnguardedRuleError),
        ("rel R/2\nrel P/1\ntgd R(x,y), P(x) -> P(y)\n", NotObeyingError),
        ("rel R/2\ntgd R(x,y) -> R(x,'c)\n", HeadConstantError),
    ],
)
def test_rejected_inputs(text, error):
    with pytest.raises(error):
        normalize_program(parse_program(text))


def test_normalized_program_keeps_oracle_answers(chain_program):
    normalized, _ = normalize_program(chain_program)
    for source_query, query in zip(chain_program.queries, normalized.queries):
        before = bounded_entailment_oracle(chain_program, source_query, 500)
        after = bounded_entailment_oracle(normalized, query, 500)
        assert before.entailed and after.entailed
