# -*- coding: utf-8 -*-
from .engine import ChaseTree, run_chase
from .fullrules import FullRuleSet
from .model import ChaseNode, ChaseRun, ChaseStepRecord, Derivation, Strategy, run_from_records, run_to_records
from .oracle import OracleVerdict, Verdict, bounded_entailment_oracle
from .proof import (
    ProofCheck,
    check_one_pass_discipline,
    check_principal_exempt_nodes,
    check_proof,
    check_shortcut_discipline,
)
