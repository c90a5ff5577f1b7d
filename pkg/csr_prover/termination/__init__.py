# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
μ-termination: polynomial interpretation certificates and μ-loops.
"""

from .certificate import (
    Certificate,
    CertificateCheck,
    Interpretation,
    check_certificate,
    evaluate_term,
    format_polynomial,
    polynomial_terms,
)
from .loops import (
    LoopBounds,
    LoopWitness,
    find_loop,
    replay_derivation,
    replay_loop,
    unroll_loop,
)
from .prover import (
    SearchBudget,
    TerminationOutcome,
    prove,
)
from .search import (
    PHASES,
    SearchPhase,
    SearchStats,
    find_certificate,
)

__all__ = [
    'PHASES',
    'Certificate',
    'CertificateCheck',
    'Interpretation',
    'LoopBounds',
    'LoopWitness',
    'SearchBudget',
    'SearchPhase',
    'SearchStats',
    'TerminationOutcome',
    'check_certificate',
    'evaluate_term',
    'find_certificate',
    'find_loop',
    'format_polynomial',
    'polynomial_terms',
    'prove',
    'replay_derivation',
    'replay_loop',
    'unroll_loop',
]
