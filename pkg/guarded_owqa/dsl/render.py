# -*- coding: utf-8 -*-
# guarded_owqa/dsl/render.py
from __future__ import annotations

from typing import Iterable, List

from ..logic.model import Atom, ConjunctiveQuery, Constant, Program, Relation, TGD


def _rule_term(term) -> str:
    if isinstance(term, Constant):
        return f"'{term.name}"
    return str(term)


def _atom(atom: Atom, term=_rule_term) -> str:
    return f"{atom.relation}({','.join(term(a) for a in atom.args)})"


def _atoms(atoms: Iterable[Atom]) -> str:
    return ", ".join(_atom(a) for a in atoms)


def render_relation(rel: Relation) -> str:
    line = f"rel {rel.name}/{rel.arity}"
    if rel.is_side:
        line += " side"
    if rel.is_generated:
        line += f" @{rel.origin}"
    return line


def render_tgd(rule: TGD) -> str:
    return f"tgd {_atoms(rule.body)} -> {_atoms(rule.head)}"


def render_fact(fact: Atom) -> str:
    return f"fact {_atom(fact, str)}"


def render_query(query: ConjunctiveQuery) -> str:
    return f"query {_atoms(query.atoms)}"


def render_program(program: Program) -> str:
    """Canonical text: relations in declaration order, rules in order, facts sorted, queries in order."""
    lines: List[str] = [render_relation(r) for r in program.signature]
    lines += [render_tgd(r) for r in program.tgds]
    lines += [render_fact(f) for f in program.instance.sorted_facts()]
    lines += [render_query(q) for q in program.queries]
    return "\n".join(lines) + "\n"


def render_rules(rules: Iterable[TGD]) -> str:
    return "".join(render_tgd(r) + "\n" for r in rules)


