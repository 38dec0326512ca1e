# -*- coding: utf-8 -*-
# tests/conftest.py
from __future__ import annotations

import pytest

from guarded_owqa.dsl.parser import parse_program
from guarded_owqa.logic.model import Atom, Null

# R-chain with a side marker that travels along it
CHAIN_TEXT = """\
rel R/2
rel U/1 side
tgd R(x,y) -> R(y,z)
tgd R(x,y), U(x) -> U(y)
fact R(a,b)
fact U(a)
query R(x,y), R(y,z), U(z)
query U(x)
"""

# transitivity over three side facts; P provides R-shaped heads
TRANSITIVITY_TEXT = """\
rel P/1
rel R/5
rel S/1 side
rel T/1 side
rel U/1 side
tgd P(x) -> R(x,y1,y2,y3,z)
tgd R(x,y1,y2,y3,z), S(x) -> T(y1)
tgd R(x,y1,y2,y3,z), S(x) -> T(y2)
tgd R(x,y1,y2,y3,z), S(x) -> T(y3)
tgd R(x,y1,y2,y3,z), T(y1), T(y2), T(y3) -> U(z)
"""

# a full consequence reached through a child created by a non-full rule
PRINCIPAL_TEXT = """\
rel P/1
rel R/4
rel Rp/3
rel S/1 side
rel T/1 side
rel U/2 side
tgd P(x1) -> R(x1,x2,y1,y2)
tgd R(x1,x2,y1,y2), S(x1), S(x2) -> T(y1)
tgd R(x1,x2,y1,y2), S(x1), S(x2) -> T(y2)
tgd Rp(y1,y2,z), T(y1), T(y2) -> U(y1,y2)
tgd R(x1,x2,y1,y2), S(x1), S(x2) -> Rp(y1,y2,z)
"""


def nulls(*indices: int) -> tuple:
    return tuple(Null(i) for i in indices)


def element_atom(relation: str, *indices: int) -> Atom:
    return Atom(relation, nulls(*indices))


@pytest.fixture
def chain_program():
    return parse_program(CHAIN_TEXT)


@pytest.fixture
def transitivity_program():
    return parse_program(TRANSITIVITY_TEXT)


@pytest.fixture
def principal_program():
    return parse_program(PRINCIPAL_TEXT)


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain.owqa"
    path.write_text(CHAIN_TEXT, encoding="utf-8")
    return str(path)
