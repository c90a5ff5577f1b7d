# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Context-sensitive rewriting prover: replacement maps, μ-termination and productivity of rewrite systems.
"""

# ruff: noqa: E402
# avoid circular imports

__version__ = '0.1.0'

from .analysis import (
    AnalysisReport,
    analyze,
)
from .log import (
    setup_logging,
)
from .productivity import (
    Verdict,
    productivity_pipeline,
    prove_constructor_normalizing,
    prove_productive,
)
from .repmap import (
    ReplacementMap,
    canonical_map,
    mu_delta,
)
from .term import (
    App,
    Rule,
    Signature,
    Trs,
    Var,
)
from .termination import (
    Certificate,
    SearchBudget,
    TerminationOutcome,
    prove,
)
from .trs import (
    SpecFile,
    load_spec,
    parse_spec,
)

__all__ = [
    'AnalysisReport',
    'App',
    'Certificate',
    'ReplacementMap',
    'Rule',
    'SearchBudget',
    'Signature',
    'SpecFile',
    'TerminationOutcome',
    'Trs',
    'Var',
    'Verdict',
    'analyze',
    'canonical_map',
    'load_spec',
    'mu_delta',
    'parse_spec',
    'productivity_pipeline',
    'prove',
    'prove_constructor_normalizing',
    'prove_productive',
    'setup_logging',
]
