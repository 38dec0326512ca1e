# -*- coding: utf-8 -*-
# guarded_owqa/preprocess/normalize.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from ..exceptions import (
    BoundViolationError,
    HeadConstantError,
    NotObeyingError,
    UnguardedRuleError,
)
from ..logic.analysis import obeys_side, principal_guard_indices
from ..logic.canonical import dedupe_atoms, rule_key
from ..logic.model import (
    TAG_CONST,
    TAG_SPLIT,
    TAG_TWIN,
    Atom,
    ConjunctiveQuery,
    Constant,
    Instance,
    Kind,
    Program,
    Relation,
    RuleSet,
    TGD,
    Variable,
)

logger = logging.getLogger(__name__)

# ruleMap tags
SOURCE_RULE = "source"
MULTIHEAD_SPLIT = "multihead-split"
CONSTANT_ELIM = "constant-elim"
HEAD_REDIRECT = "head-redirect"
GUARD_INTRO = "guard-intro"
HOM_CLOSURE = "hom-closure"
TWIN_RULE = "twin"


@dataclass
class NormalizationTrace:
    symbol_map: Dict[str, str] = field(default_factory=dict)
    # one entry per output rule: (index of the source rule or None, tag)
    rule_map: List[Tuple[Optional[int], str]] = field(default_factory=list)
    w_prime: int = 0

    def summary(self) -> Dict[str, object]:
        tags: Dict[str, int] = {}
        for _, tag in self.rule_map:
            tags[tag] = tags.get(tag, 0) + 1
        return {"generatedSymbols": len(self.symbol_map), "rules": len(self.rule_map), "tags": tags, "wPrime": self.w_prime}


# =========================
# Helpers
# =========================

def _fresh_name(base: str, taken: Set[str]) -> str:
    name, n = base, 1
    while name in taken:
        n += 1
        name = f"{base}_{n}"
    taken.add(name)
    return name


def _check_guarded(rules: Sequence[TGD]) -> None:
    for i, rule in enumerate(rules):
        if not rule.is_guarded:
            raise UnguardedRuleError(f"rule {i + 1} is not guarded: {rule}")


def set_partitions(items: Sequence) -> Iterator[List[List]]:
    """All set partitions, each block listed in input order."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def identifications(rule: TGD) -> Iterator[TGD]:
    """h(rule) for every non-trivial identification h of exported variables."""
    exported = list(rule.exported)
    for blocks in set_partitions(exported):
        if len(blocks) == len(exported):
            continue
        h = {v: block[0] for block in blocks for v in block}
        image = rule.substitute(h)
        yield TGD(dedupe_atoms(image.body), dedupe_atoms(image.head))


# =========================
# Multi-head splitting
# =========================

def _split(rules: Sequence[TGD], taken: Set[str]) -> Tuple[List[TGD], List[Relation], List[Tuple[int, str]]]:
    _check_guarded(rules)
    out: List[TGD] = []
    relations: List[Relation] = []
    origin: List[Tuple[int, str]] = []
    for i, rule in enumerate(rules):
        head = dedupe_atoms(rule.head)
        if len(head) == 1:
            out.append(TGD(rule.body, head))
            origin.append((i, SOURCE_RULE))
            continue
        exported = [v for v in rule.head_variables if v in set(rule.exported)]
        args = tuple(exported) + rule.existential
        if not args:
            raise HeadConstantError(f"rule {i + 1} has a head without variables: {rule}")
        rel = Relation(_fresh_name(f"{TAG_SPLIT}_{len(relations) + 1}", taken), len(args), Kind.PRINCIPAL, TAG_SPLIT)
        relations.append(rel)
        marker = Atom(rel.name, args)
        out.append(TGD(rule.body, (marker,)))
        origin.append((i, MULTIHEAD_SPLIT))
        for atom in head:
            out.append(TGD((marker,), (atom,)))
            origin.append((i, MULTIHEAD_SPLIT))
    return out, relations, origin


def split_multiheads(rules: Sequence[TGD], taken_names: Sequence[str] = ()) -> List[TGD]:
    """Single-headed rules; each multi-head rule routes through a fresh split_ relation."""
    return _split(rules, set(taken_names) | {a.relation for r in rules for a in r.body + r.head})[0]


# =========================
# Constant elimination
# =========================

def _replace_constants(atoms: Sequence[Atom], names: Dict[Constant, Variable]) -> Tuple[Atom, ...]:
    return tuple(a.substitute(names) for a in atoms)


def _variable_for(constant: Constant, used: Set[str]) -> Variable:
    name = f"x_{constant.name}"
    while name in used:
        name += "_"
    used.add(name)
    return Variable(name)


def _eliminate(program: Program) -> Tuple[Program, Dict[str, str], List[str]]:
    for i, rule in enumerate(program.tgds):
        heads = [t for a in rule.head for t in a.args if isinstance(t, Constant)]
        if heads:
            raise HeadConstantError(
                f"rule {i + 1} has constant '{heads[0]} in its head; constants in rule heads are not supported"
            )
    constants = sorted(
        {c for r in program.tgds for c in r.constants} | {c for q in program.queries for c in q.constants},
        key=lambda c: c.name,
    )
    if not constants:
        return program, {}, [SOURCE_RULE] * len(program.tgds)

    taken = {r.name for r in program.signature}
    markers: Dict[Constant, Relation] = {}
    symbols: Dict[str, str] = {}
    for c in constants:
        rel = Relation(_fresh_name(f"{TAG_CONST}_{c.name}", taken), 1, Kind.SIDE, TAG_CONST)
        markers[c] = rel
        symbols[rel.name] = f"marker of constant {c.name}"

    def rewrite(atoms: Sequence[Atom], extra: Sequence[Atom] = ()) -> Tuple[Tuple[Atom, ...], Dict[Constant, Variable]]:
        present = sorted({t for a in atoms for t in a.args if isinstance(t, Constant)}, key=lambda c: c.name)
        used = {v.name for a in list(atoms) + list(extra) for v in a.variables}
        names = {c: _variable_for(c, used) for c in present}
        return _replace_constants(atoms, names) + tuple(Atom(markers[c].name, (names[c],)) for c in present), names

    tgds: List[TGD] = []
    tags: List[str] = []
    for i, rule in enumerate(program.tgds):
        if not rule.constants:
            tgds.append(rule)
            tags.append(SOURCE_RULE)
            continue
        body, _ = rewrite(rule.body, rule.head)
        new = TGD(body, rule.head)
        if not new.is_guarded:
            raise UnguardedRuleError(f"rule {i + 1} uses a constant outside every guard: {rule}")
        tgds.append(new)
        tags.append(CONSTANT_ELIM)
    queries = tuple(ConjunctiveQuery(rewrite(q.atoms)[0]) if q.constants else q for q in program.queries)
    facts = program.instance.facts | {Atom(markers[c].name, (c,)) for c in constants}
    signature = program.signature.extend(markers[c] for c in constants)
    return Program(signature, tuple(tgds), Instance(facts), queries), symbols, tags


def eliminate_constants(program: Program) -> Program:
    """Constants of rules and queries become variables x_c guarded by unary side markers const_c."""
    return _eliminate(program)[0]


# =========================
# Strong obedience
# =========================

def _is_twin_rule(rule: TGD, twin_of: Dict[str, str]) -> bool:
    if len(rule.body) != 1 or len(rule.head) != 1:
        return False
    body, head = rule.body[0], rule.head[0]
    return twin_of.get(body.relation) == head.relation and body.args == head.args


def _guard_choice(rule: TGD) -> int:
    return min(rule.guard_indices, key=lambda i: (rule.body[i].relation, tuple(str(t) for t in rule.body[i].args)))


def strong_obedience_violations(ruleset: RuleSet) -> List[str]:
    side = ruleset.side
    problems: List[str] = []
    keys = {rule_key(r) for r in ruleset.rules}
    for i, rule in enumerate(ruleset.rules):
        label = f"rule {i + 1} ({rule})"
        if len(rule.head) != 1:
            problems.append(f"{label} is not single-headed")
        if len(principal_guard_indices(rule, side)) != 1:
            problems.append(f"{label} does not have exactly one principal guard")
        principal_atoms = [a for a in rule.body if a.relation not in side]
        if len(principal_atoms) != 1:
            problems.append(f"{label} has {len(principal_atoms)} principal body atoms")
        if not rule.is_full and rule.head[0].relation in side:
            problems.append(f"{label} is non-full with a side head")
        for image in identifications(rule):
            if rule_key(image) not in keys:
                problems.append(f"{label} misses identification {image}")
                break
    return problems


def _enforce(program: Program) -> Tuple[Program, Dict[str, str], List[Tuple[Optional[int], str]]]:
    side = program.signature.side_names
    for i, rule in enumerate(program.tgds):
        if len(rule.head) != 1:
            raise NotObeyingError(f"rule {i + 1} is not single-headed: {rule}")
        if not rule.is_guarded:
            raise UnguardedRuleError(f"rule {i + 1} is not guarded: {rule}")
        if not obeys_side(rule, side):
            raise NotObeyingError(f"rule {i + 1} does not obey the side signature: {rule}")

    taken = {r.name for r in program.signature}
    twins: Dict[str, Relation] = {}
    symbols: Dict[str, str] = {}
    for rel in program.signature:
        if not rel.is_side:
            continue
        existing = program.signature.get(f"{TAG_TWIN}_{rel.name}")
        if existing is not None and existing.origin == TAG_TWIN and existing.arity == rel.arity:
            twins[rel.name] = existing
            continue
        twin = Relation(_fresh_name(f"{TAG_TWIN}_{rel.name}", taken), rel.arity, Kind.PRINCIPAL, TAG_TWIN)
        twins[rel.name] = twin
        symbols[twin.name] = f"principal twin of {rel.name}"
    twin_of = {t.name: r for r, t in twins.items()}

    out: List[TGD] = []
    rule_map: List[Tuple[Optional[int], str]] = []
    seen: Set[tuple] = set()

    def emit(rule: TGD, source: Optional[int], tag: str) -> None:
        key = rule_key(rule)
        if key in seen:
            return
        seen.add(key)
        out.append(rule)
        rule_map.append((source, tag))
        for image in identifications(rule):
            if rule_key(image) not in seen:
                seen.add(rule_key(image))
                out.append(image)
                rule_map.append((source, HOM_CLOSURE))

    for i, rule in enumerate(program.tgds):
        if _is_twin_rule(rule, twin_of):
            emit(rule, i, TWIN_RULE)
            continue
        tag = SOURCE_RULE
        head = rule.head[0]
        if head.relation in twins:
            head = Atom(twins[head.relation].name, head.args)
            tag = HEAD_REDIRECT
        body = rule.body
        if all(a.relation in side for a in body):
            guard = body[_guard_choice(rule)]
            body = (Atom(twins[guard.relation].name, guard.args),) + body
            tag = GUARD_INTRO
        emit(TGD(body, (head,)), i, tag)

    for rel_name, twin in twins.items():
        args = tuple(Variable(f"v{k}") for k in range(1, twin.arity + 1))
        emit(TGD((Atom(twin.name, args),), (Atom(rel_name, args),)), None, TWIN_RULE)

    facts = set(program.instance.facts)
    facts |= {Atom(twins[f.relation].name, f.args) for f in program.instance.facts if f.relation in twins}
    signature = program.signature.extend(twins.values())
    return Program(signature, tuple(out), Instance(frozenset(facts)), program.queries), symbols, rule_map


def enforce_strong_obedience(program: Program) -> Tuple[Program, NormalizationTrace]:
    normalized, symbols, rule_map = _enforce(program)
    trace = NormalizationTrace(symbol_map=dict(symbols), rule_map=list(rule_map))
    _check_output(program, normalized, trace)
    return normalized, trace


def _check_output(source: Program, normalized: Program, trace: NormalizationTrace) -> None:
    ruleset = normalized.ruleset
    problems = strong_obedience_violations(ruleset)
    if problems:
        raise NotObeyingError("normalization left violations: " + "; ".join(problems[:3]))
    stats_in = source.ruleset.stats
    stats_out = ruleset.stats
    trace.w_prime = stats_out.w_prime
    if stats_out.w > max(stats_in.a_prime, stats_in.w):
        raise BoundViolationError(f"normalized width {stats_out.w} exceeds max(a', w) = {max(stats_in.a_prime, stats_in.w)}")
    if len(normalized.signature) > 2 * len(source.signature):
        raise BoundViolationError("normalized signature more than doubled")
    bound = normalization_size_bound(len(source.tgds), stats_in.w, stats_in.n_prime, stats_in.a_prime)
    if len(normalized.tgds) > bound:
        raise BoundViolationError(f"normalized rule count {len(normalized.tgds)} exceeds {bound}")


def normalization_size_bound(rule_count: int, w: int, n_prime: int, a_prime: int) -> int:
    """Rules after twins and identification closure: each rule has at most w^w variants."""
    return rule_count * (w ** w + 1) + n_prime * (a_prime ** a_prime + 1)


# =========================
# Whole preprocessing
# =========================

def normalize_program(program: Program) -> Tuple[Program, NormalizationTrace]:
    """split → constants → strong obedience; ruleMap entries point at the input rules."""
    # 1) multi-head splitting
    taken = {r.name for r in program.signature}
    rules, relations, split_origin = _split(program.tgds, taken)
    split_symbols = {r.name: "multi-head split" for r in relations}
    staged = Program(program.signature.extend(relations), tuple(rules), program.instance, program.queries)

    # 2) constants
    staged, const_symbols, const_tags = _eliminate(staged)

    # 3) twins + identification closure
    normalized, twin_symbols, enforce_map = _enforce(staged)

    rule_map: List[Tuple[Optional[int], str]] = []
    for idx, tag in enforce_map:
        if idx is None:
            rule_map.append((None, tag))
            continue
        source, split_tag = split_origin[idx]
        if tag in (SOURCE_RULE,):
            tag = const_tags[idx] if const_tags[idx] != SOURCE_RULE else split_tag
        rule_map.append((source, tag))

    trace = NormalizationTrace(symbol_map={**split_symbols, **const_symbols, **twin_symbols}, rule_map=rule_map)
    _check_output(staged, normalized, trace)
    logger.info({
        "stage": "normalize",
        "rules_in": len(program.tgds),
        "rules_out": len(normalized.tgds),
        "generated": sorted(trace.symbol_map),
        "w_prime": trace.w_prime,
    })
    return normalized, trace


__all__ = [
    "NormalizationTrace",
    "eliminate_constants",
    "enforce_strong_obedience",
    "normalize_program",
    "split_multiheads",
]
