# -*- coding: utf-8 -*-
from .certify import Certificate, certify
from .fuzz import FuzzReport, differential_test, generate_program
from .pipeline import Answer, Prepared, answer, entailed_facts, entails_fact, prepare
