# -*- coding: utf-8 -*-
# tests/test_api.py
from __future__ import annotations

import json
import random

import pytest
from click.testing import CliRunner

from guarded_owqa.api import answer, differential_test, entailed_facts, entails_fact, generate_program, prepare
from guarded_owqa.api.bench import BenchReport, fact_closure_scaling, loglog_fit, polynomial_fit_ok, saturation_scaling
from guarded_owqa.api.cli import cli, main
from guarded_owqa.api.fuzz import case_seed, run_case
from guarded_owqa.chase import bounded_entailment_oracle
from guarded_owqa.config import get_settings
from guarded_owqa.dsl.parser import parse_program
from guarded_owqa.dsl.report import STAT_KEYS
from guarded_owqa.linear import decide_linear
from guarded_owqa.logic.canonical import canonical_mapping
from guarded_owqa.logic.model import Atom, Constant

from conftest import element_atom

a, b = Constant("a"), Constant("b")

NO_RULES_TEXT = """\
rel R/2
fact R(a,b)
query R(x,x)
query R(x,y)
"""

CHAIN_WITHOUT_MARKER = """\
rel R/2
rel U/1 side
tgd R(x,y) -> R(y,z)
tgd R(x,y), U(x) -> U(y)
fact R(a,b)
query U(x)
"""


def _settings(**overrides):
    return get_settings(workers=1, **overrides)


# =========================
# Pipeline
# =========================

def test_chain_answers_are_certified(chain_program):
    answers, report = answer(chain_program, _settings(certify=True))
    assert [a.value for a in answers] == [True, True]
    assert all(a.certificate is not None for a in answers)
    assert report.has_certificates
    assert [r.query for r in report.answers] == ["R(x,y), R(y,z), U(z)", "U(x)"]


def test_statistics_cover_every_key(chain_program):
    _, report = answer(chain_program, _settings())
    assert set(report.statistics) == set(STAT_KEYS)
    assert report.statistics["ruleCountIn"] == 2
    assert report.statistics["saturatedCount"] <= report.statistics["suitableBound"]
    assert {"normalize", "saturate", "fact_saturate", "linearize", "decide"} <= set(report.timings_ms)


def test_program_without_rules():
    answers, _ = answer(parse_program(NO_RULES_TEXT), _settings(certify=True))
    assert [a.value for a in answers] == [False, True]
    assert answers[0].certificate is None and answers[1].certificate is not None


def test_unreachable_marker_is_not_entailed():
    answers, _ = answer(parse_program(CHAIN_WITHOUT_MARKER), _settings(cross_check=True, oracle_budget=200))
    assert [a.value for a in answers] == [False]


@pytest.mark.parametrize("engine", ["rewrite", "chase", "both"])
def test_engines_agree_on_chain(chain_program, engine):
    answers, _ = answer(chain_program, _settings(engine=engine))
    assert [a.value for a in answers] == [True, True]


@pytest.mark.parametrize("seed", range(30))
def test_engines_agree_on_generated_programs(seed):
    program = generate_program(random.Random(seed), _settings())
    prepared = prepare(program)
    for query in prepared.normalized.queries:
        rewrite = decide_linear(query, prepared.lin, "rewrite", cap=5000)
        chase = decide_linear(query, prepared.lin, "chase", node_cap=5000)
        both = decide_linear(query, prepared.lin, "both", cap=5000, node_cap=5000)
        assert both.answer == rewrite.answer
        if chase.answer:
            assert rewrite.answer
        if chase.witness is not None and chase.witness.complete:
            assert chase.answer == rewrite.answer
        verdict = bounded_entailment_oracle(prepared.normalized, query, 300)
        if verdict.entailed:
            assert rewrite.answer
        if rewrite.answer:
            assert not verdict.certain_no


def test_prepared_stages_are_reused(chain_program):
    prepared = prepare(chain_program)
    first, _ = answer(chain_program, _settings(), prepared=prepared)
    second, _ = answer(chain_program, _settings(), prepared=prepared)
    assert [a.value for a in first] == [a.value for a in second]


def test_entailed_facts_stay_in_input_signature(chain_program):
    facts = entailed_facts(chain_program)
    assert facts.facts == {Atom("R", (a, b)), Atom("U", (a,)), Atom("U", (b,))}
    assert entails_fact(chain_program, Atom("U", (b,)))
    assert not entails_fact(chain_program, Atom("R", (b, a)))


# =========================
# Differential testing
# =========================

def test_generated_programs_are_deterministic():
    config = _settings()
    first = generate_program(random.Random(case_seed(7, 3)), config)
    second = generate_program(random.Random(case_seed(7, 3)), config)
    assert first == second


def test_fuzz_finds_no_failures():
    report = differential_test(_settings(seed=11, cases=6, oracle_budget=300))
    assert report.cases == 6
    assert report.ok, report.summary()


def test_fuzz_detects_unsound_closure():
    program = parse_program(CHAIN_WITHOUT_MARKER)
    key = canonical_mapping(element_atom("R", 1, 2))[0]

    def plant(closure):
        closure.assume(key, element_atom("U", 1))

    report = differential_test(_settings(cases=1), programs=[program], saturation_hook=plant)
    assert not report.ok
    assert report.summary()["failures"][0]["index"] == 0


def test_case_outcome_counts(chain_program):
    outcome = run_case(0, _settings(oracle_budget=500), program=chain_program)
    assert outcome.failures == ()
    assert outcome.entailed == 2 and outcome.certified == 2


# =========================
# Benchmarks
# =========================

def test_loglog_fit_of_linear_growth():
    fit = loglog_fit([10, 100, 1000], [1.0, 10.0, 100.0])
    assert fit["slope"] == pytest.approx(1.0)
    assert fit["r2"] == pytest.approx(1.0)


def test_saturation_stays_within_bound():
    report = saturation_scaling(sizes=(0, 1))
    assert [r["side_relations"] for r in report.rows] == [0, 1]
    assert report.summary["violations"] == 0


def test_fact_closure_sweep():
    report = fact_closure_scaling(sizes=(5, 20))
    assert [r["facts"] for r in report.rows] == [5, 20]
    assert {"slope", "r2", "monotone"} <= set(report.summary)
    assert isinstance(report.passed, bool)
    assert report.as_document()["passed"] == report.passed


@pytest.mark.parametrize(
    "fit, expected",
    [
        ({"slope": 1.0, "r2": 0.99}, True),
        ({"slope": 3.5, "r2": 0.95}, True),
        ({"slope": 4.0, "r2": 0.99}, False),
        ({"slope": 1.0, "r2": 0.5}, False),
    ],
)
def test_polynomial_fit_thresholds(fit, expected):
    assert polynomial_fit_ok(fit) is expected


# =========================
# Command line
# =========================

def test_cli_answer_writes_report(chain_file, tmp_path):
    out = tmp_path / "report.json"
    result = CliRunner().invoke(cli, ["answer", chain_file, "--certify", "--json", str(out)])
    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert list(doc) == ["answers", "statistics", "timings_ms", "certificate"]
    assert [a["answer"] for a in doc["answers"]] == [True, True]


def test_cli_dumps_fact_closure(chain_file, tmp_path):
    out, dump = tmp_path / "report.json", tmp_path / "closure.owqa"
    result = CliRunner().invoke(cli, ["answer", chain_file, "--json", str(out), "--dump-fact-closure", str(dump)])
    assert result.exit_code == 0, result.output
    assert "fact U(b)" in dump.read_text(encoding="utf-8").splitlines()


def test_cli_normalize_and_linearize(chain_file):
    runner = CliRunner()
    normalized = runner.invoke(cli, ["normalize", chain_file])
    assert normalized.exit_code == 0 and "twin_U" in normalized.output
    linear = runner.invoke(cli, ["linearize", chain_file])
    assert linear.exit_code == 0 and "# childishTypes" in linear.output


def test_cli_oracle(chain_file):
    result = CliRunner().invoke(cli, ["oracle", chain_file, "--budget", "200"])
    assert result.exit_code == 0
    assert "ENTAILED U(x)" in result.output


def test_main_lists_facts(chain_file, capsys):
    assert main(["facts", chain_file]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "fact U(b)" in lines


def test_main_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.owqa"
    bad.write_text("rel R/2\nfact R(a)\n", encoding="utf-8")
    assert main(["answer", str(bad)]) == 2
    assert "error: line 2" in capsys.readouterr().err
    assert main(["bench", "no-such-suite"]) == 1
    assert main(["answer", str(tmp_path / "missing.owqa")]) == 1


def test_failed_bench_check_exits_non_zero(monkeypatch, capsys):
    monkeypatch.setattr(
        "guarded_owqa.api.bench.end_to_end",
        lambda config, sizes=(): BenchReport("end-to-end", passed=False),
    )
    assert main(["bench", "end-to-end", "--cases", "1"]) == 3
    assert json.loads(capsys.readouterr().out)["passed"] is False


def test_cli_reports_its_version():
    result = CliRunner().invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "0.1.0" in result.output
