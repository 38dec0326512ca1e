# -*- coding: utf-8 -*-
# guarded_owqa/chase/model.py
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from ..logic.model import Atom, Constant, Null, TGD, Term, Variable


class Strategy(str, Enum):
    TREE = "TREE"
    ONE_PASS = "ONE_PASS"
    PRINCIPAL_EXEMPT = "PRINCIPAL_EXEMPT"
    SHORTCUT = "SHORTCUT"
    SHORTCUT_DONATING = "SHORTCUT_DONATING"


CHASE = "chase"
RELAXED = "relaxedChase"
PROPAGATION = "propagation"
SATURATION = "saturation"

Binding = Tuple[Tuple[Variable, Term], ...]


@dataclass(frozen=True)
class Derivation:
    rule_id: int
    trigger: Binding
    fact: Atom


@dataclass(frozen=True)
class ChaseStepRecord:
    """
    node   - node the step reads from (the parent for child-creating steps)
    target - node that receives the facts (a new child, the node itself, or the
             propagation destination)
    """

    kind: str
    node: int
    target: int
    rule_id: int = -1
    trigger: Binding = ()
    fresh: Binding = ()
    facts: Tuple[Atom, ...] = ()
    inherited: Tuple[Atom, ...] = ()
    derivations: Tuple[Derivation, ...] = ()
    recently_updated: int = 0


@dataclass(frozen=True)
class ChaseNode:
    id: int
    facts: FrozenSet[Atom]
    parent: Optional[int] = None
    birth: int = -1


@dataclass(frozen=True)
class ChaseRun:
    strategy: Strategy
    initial: FrozenSet[Atom]
    rules: Tuple[TGD, ...]
    steps: Tuple[ChaseStepRecord, ...]
    nodes: Tuple[ChaseNode, ...]
    budget: int
    exhausted: bool = False
    # rules[lemma_from:] are lemma rules (saturation output), not program rules
    lemma_from: int = -1

    @property
    def lemmas(self) -> Tuple[TGD, ...]:
        return self.rules[self.lemma_from:] if self.lemma_from >= 0 else ()

    def all_facts(self) -> FrozenSet[Atom]:
        out: set = set()
        for node in self.nodes:
            out |= node.facts
        return frozenset(out)

    def children(self, node_id: int) -> List[int]:
        return [n.id for n in self.nodes if n.parent == node_id]


def binding(mapping: Dict[Variable, Term]) -> Binding:
    return tuple(sorted(mapping.items(), key=lambda kv: kv[0].name))


# =========================
# Trace records (JSON-shaped)
# =========================

def term_doc(term: Term) -> Dict[str, Any]:
    if isinstance(term, Null):
        return {"n": term.index}
    if isinstance(term, Variable):
        return {"v": term.name}
    return {"c": term.name}


def _term_from(doc: Dict[str, Any]) -> Term:
    if "n" in doc:
        return Null(int(doc["n"]))
    if "v" in doc:
        return Variable(str(doc["v"]))
    return Constant(str(doc["c"]))


def _atom_doc(atom: Atom) -> List[Any]:
    return [atom.relation, [term_doc(t) for t in atom.args]]


def _atom_from(doc: List[Any]) -> Atom:
    return Atom(str(doc[0]), tuple(_term_from(t) for t in doc[1]))


def _atoms_doc(atoms: Iterable[Atom]) -> List[Any]:
    return [_atom_doc(a) for a in atoms]


def _binding_doc(b: Binding) -> List[Any]:
    return [[var.name, term_doc(val)] for var, val in b]


def _binding_from(doc: List[Any]) -> Binding:
    return tuple((Variable(str(name)), _term_from(val)) for name, val in doc)


def run_to_records(run: ChaseRun) -> Dict[str, Any]:
    return {
        "strategy": run.strategy.value,
        "budget": run.budget,
        "exhausted": run.exhausted,
        "lemmaFrom": run.lemma_from,
        "initial": _atoms_doc(sorted(run.initial, key=Atom.sort_key)),
        "rules": [{"body": _atoms_doc(r.body), "head": _atoms_doc(r.head)} for r in run.rules],
        "steps": [
            {
                "kind": s.kind,
                "node": s.node,
                "target": s.target,
                "ruleId": s.rule_id,
                "trigger": _binding_doc(s.trigger),
                "fresh": _binding_doc(s.fresh),
                "facts": _atoms_doc(s.facts),
                "inherited": _atoms_doc(s.inherited),
                "derivations": [
                    {"ruleId": d.rule_id, "trigger": _binding_doc(d.trigger), "fact": _atom_doc(d.fact)}
                    for d in s.derivations
                ],
                "recentlyUpdated": s.recently_updated,
            }
            for s in run.steps
        ],
        "nodes": [
            {
                "id": n.id,
                "parent": n.parent,
                "birth": n.birth,
                "facts": _atoms_doc(sorted(n.facts, key=Atom.sort_key)),
            }
            for n in run.nodes
        ],
    }


def run_from_records(doc: Dict[str, Any]) -> ChaseRun:
    steps = tuple(
        ChaseStepRecord(
            kind=s["kind"],
            node=int(s["node"]),
            target=int(s["target"]),
            rule_id=int(s.get("ruleId", -1)),
            trigger=_binding_from(s.get("trigger", [])),
            fresh=_binding_from(s.get("fresh", [])),
            facts=tuple(_atom_from(a) for a in s.get("facts", [])),
            inherited=tuple(_atom_from(a) for a in s.get("inherited", [])),
            derivations=tuple(
                Derivation(int(d["ruleId"]), _binding_from(d["trigger"]), _atom_from(d["fact"]))
                for d in s.get("derivations", [])
            ),
            recently_updated=int(s.get("recentlyUpdated", 0)),
        )
        for s in doc.get("steps", [])
    )
    nodes = tuple(
        ChaseNode(int(n["id"]), frozenset(_atom_from(a) for a in n["facts"]), n.get("parent"), int(n.get("birth", -1)))
        for n in doc.get("nodes", [])
    )
    rules = tuple(
        TGD(tuple(_atom_from(a) for a in r["body"]), tuple(_atom_from(a) for a in r["head"]))
        for r in doc.get("rules", [])
    )
    return ChaseRun(
        strategy=Strategy(doc["strategy"]),
        initial=frozenset(_atom_from(a) for a in doc.get("initial", [])),
        rules=rules,
        steps=steps,
        nodes=nodes,
        budget=int(doc.get("budget", 0)),
        exhausted=bool(doc.get("exhausted", False)),
        lemma_from=int(doc.get("lemmaFrom", -1)),
    )
