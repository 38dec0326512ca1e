# -*- coding: utf-8 -*-
from .decide import LinearDecision, decide_linear, depth_bound
from .linearizer import (
    ChildishCatalog,
    LinearProgram,
    LinearRule,
    enumerate_childish_types,
    instantiate_rules,
    lift_rules,
    linearize,
    linearize_instance,
)
from .position_graph import PositionGraph, SemiWidthDecomposition, position_edges, semi_width
from .rewriting import UnionOfCQs, ucq_rewrite
from .tight_chase import TightChaseResult, tight_chase
