# -*- coding: utf-8 -*-
from .fact_closure import ChildLabel, FactClosureResult, entails_fact, fact_saturate, is_fact_saturated
from .saturate import (
    SaturationSet,
    SuitabilityWitness,
    SuitableRule,
    enumerate_trivial_rules,
    is_suitable,
    saturate,
    suitable_count_bound,
)
