# -*- coding: utf-8 -*-
# guarded_owqa/api/cli.py
from __future__ import annotations

import functools
import json
import logging
import sys
from typing import Callable, List, Optional

import click

from .. import hooks
from ..chase.engine import run_chase
from ..chase.model import Strategy, run_to_records
from ..chase.oracle import bounded_entailment_oracle, underivable_relations
from ..config import get_settings
from ..config.settings import ENGINES
from ..dsl.parser import parse_file
from ..dsl.render import render_fact, render_program, render_query
from ..dsl.report import emit_report
from ..exceptions import (
    BoundViolationError,
    CertificationFailureError,
    GuardedOwqaError,
    ModeDisagreementError,
)
from ..logic.homomorphism import find_homomorphism
from ..logic.model import Program
from ..preprocess.normalize import normalize_program
from ..saturation.saturate import saturate, suitable_count_bound
from .fuzz import differential_test
from .pipeline import answer as run_answer
from .pipeline import entailed_facts, get_attr, prepare

logger = logging.getLogger(__name__)

# internal failures: the pipeline itself is wrong
_INTERNAL = (CertificationFailureError, BoundViolationError, ModeDisagreementError)

EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


# =========================
# Helpers
# =========================

def _exit_codes(fn: Callable[..., int]) -> Callable[..., int]:
    """Map package errors to exit codes; a nonzero return value becomes the exit code."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            code = fn(*args, **kwargs)
        except _INTERNAL as e:
            logger.error({"title": type(e).__name__, "message": str(e)})
            click.echo(f"error: {e}", err=True)
            ctx.exit(EXIT_INTERNAL)
        except GuardedOwqaError as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(EXIT_INPUT)
        if code:
            ctx.exit(code)
        return 0

    return wrapper


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        click.echo(text, nl=False)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _strategy_verdict(program: Program, index: int, strategy: Strategy, budget: int):
    """Any chase variant as a bounded oracle; the non-tree variants run on the normalized program."""
    if strategy is Strategy.TREE:
        verdict = bounded_entailment_oracle(program, program.queries[index], budget)
        return verdict.entailed, verdict.run
    normalized, _ = normalize_program(program)
    target = normalized.queries[index]
    closure = saturate(normalized.ruleset) if strategy in (Strategy.SHORTCUT, Strategy.SHORTCUT_DONATING) else None
    if underivable_relations(normalized, target.atoms):
        run = run_chase(normalized, strategy, closure, budget)
        return False, run
    run = run_chase(
        normalized, strategy, closure, budget,
        stop_when=lambda tree: find_homomorphism(target.atoms, tree.all) is not None,
    )
    return find_homomorphism(target.atoms, run.all_facts()) is not None, run


# =========================
# Commands
# =========================

@click.group()
@click.version_option(hooks.app_version, prog_name=hooks.app_name)
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG to stderr.")
def cli(verbose: bool) -> None:
    """Certain answers for conjunctive queries under guarded TGDs with a side signature."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s %(message)s",
    )


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--engine", type=click.Choice(ENGINES), default=None, help="Linear decision procedure.")
@click.option("--certify", is_flag=True, help="Attach a checked chase proof to every positive answer.")
@click.option("--cross-check", is_flag=True, help="Compare every answer with the bounded oracle.")
@click.option("--budget", type=int, default=None, help="Oracle step budget.")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None, help="Write the report here.")
@click.option("--dump-fact-closure", type=click.Path(dir_okay=False), default=None, help="Write the fact-saturated instance here.")
@_exit_codes
def answer(file, engine, certify, cross_check, budget, json_path, dump_fact_closure) -> int:
    """Answer every query of FILE."""
    config = get_settings(
        engine=engine,
        certify=certify or None,
        cross_check=cross_check or None,
        oracle_budget=budget,
    )
    program = parse_file(file)
    prepared = prepare(program)
    _, report = run_answer(program, config, prepared=prepared)
    if dump_fact_closure:
        dumped = Program(prepared.normalized.signature, (), prepared.facts.instance)
        _write(dump_fact_closure, render_program(dumped))
    _write(json_path, emit_report(report, include_certificate=config.certify))
    return 0


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@_exit_codes
def normalize(file) -> int:
    """Print the normalized program; the trace summary goes to stderr."""
    normalized, trace = normalize_program(parse_file(file))
    click.echo(render_program(normalized), nl=False)
    click.echo(json.dumps(trace.summary(), ensure_ascii=False), err=True)
    return 0


@cli.command(name="saturate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@_exit_codes
def saturate_cmd(file) -> int:
    """Print the closure rules of FILE's normalized rules."""
    normalized, _ = normalize_program(parse_file(file))
    sigma = normalized.ruleset
    closure = saturate(sigma)
    click.echo(render_program(Program(normalized.signature, closure.as_rules())), nl=False)
    click.echo(f"# closureSize {len(closure)} bound {suitable_count_bound(sigma.stats, len(sigma))}")
    return 0


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@_exit_codes
def linearize(file) -> int:
    """Print the linear program (generated relations carry the lin_ prefix)."""
    prepared = prepare(parse_file(file))
    lin = prepared.lin
    click.echo(render_program(Program(lin.signature, lin.tgds, lin.instance, prepared.normalized.queries)), nl=False)
    click.echo(f"# childishTypes {len(lin.catalog)} linearRules {len(lin.rules)}")
    return 0


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--budget", type=int, default=None, help="Chase step budget.")
@click.option("--strategy", type=click.Choice([s.value for s in Strategy]), default=Strategy.TREE.value)
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None, help="Write the chase runs as JSON.")
@_exit_codes
def oracle(file, budget, strategy, trace_path) -> int:
    """Bounded chase verdict for every query of FILE."""
    budget = budget or get_settings().oracle_budget
    program = parse_file(file)
    runs: List[dict] = []
    for index, query in enumerate(program.queries):
        entailed, run = _strategy_verdict(program, index, Strategy(strategy), budget)
        click.echo(f"{'ENTAILED' if entailed else 'UNKNOWN'} {render_query(query)[len('query '):]}")
        runs.append(run_to_records(run))
    if trace_path:
        _write(trace_path, json.dumps(runs, indent=2, ensure_ascii=False) + "\n")
    return 0


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@_exit_codes
def facts(file) -> int:
    """List the facts over the input domain entailed by FILE."""
    for fact in entailed_facts(parse_file(file)).sorted_facts():
        click.echo(render_fact(fact))
    return 0


@cli.command()
@click.option("--seed", type=int, default=None)
@click.option("--cases", type=int, default=None)
@click.option("--workers", type=int, default=None, help="Worker processes (default from GUARDED_OWQA_WORKERS).")
@click.option("--budget", type=int, default=None, help="Oracle step budget.")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None)
@_exit_codes
def fuzz(seed, cases, workers, budget, json_path) -> int:
    """Differential test of the pipeline against the bounded oracle on generated programs."""
    config = get_settings(seed=seed, cases=cases, workers=workers, oracle_budget=budget)
    report = differential_test(config)
    _write(json_path, json.dumps(report.summary(), indent=2, ensure_ascii=False) + "\n")
    return 0 if report.ok else EXIT_INTERNAL


@cli.command()
@click.argument("suite", type=click.Choice(sorted(hooks.bench_suites)))
@click.option("--cases", type=int, default=None, help="Programs for end-to-end.")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None)
@_exit_codes
def bench(suite, cases, json_path) -> int:
    """Timing sweeps: saturation-scaling, fact-closure-scaling or end-to-end; exit 3 when a check fails."""
    config = get_settings(cases=cases)
    report = get_attr(hooks.bench_suites[suite])(config)
    _write(json_path, json.dumps(report.as_document(), indent=2, ensure_ascii=False) + "\n")
    return 0 if report.passed else EXIT_INTERNAL


# =========================
# Entry point
# =========================

def main(argv: Optional[List[str]] = None) -> int:
    try:
        code = cli.main(args=argv, prog_name="guarded-owqa", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
