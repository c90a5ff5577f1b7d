# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

import logging
import typing as t
from dataclasses import (
    dataclass,
    field,
)

from ..constants import (
    DEFAULT_BUDGET_MS,
    DEFAULT_LOOP_DEPTH,
    DEFAULT_LOOP_MAX_FRONTIER,
    DEFAULT_LOOP_MAX_TERM_SIZE,
    DEFAULT_MAX_CANDIDATES,
    ProofStage,
    TerminationKind,
)
from ..log import (
    stage,
)
from ..repmap import (
    ReplacementMap,
)
from ..term import (
    Trs,
)
from ..utils import (
    Deadline,
    MissingInterpretation,
)
from .certificate import (
    Certificate,
    CertificateCheck,
    check_certificate,
)
from .loops import (
    LoopBounds,
    LoopWitness,
    find_loop,
    replay_loop,
)
from .search import (
    SearchStats,
    find_certificate,
)

LOGGER = logging.getLogger(__name__)

# share of the wall-clock budget given to the loop search
LOOP_SEARCH_SHARE = 0.25


@dataclass
class SearchBudget:
    budget_ms: t.Optional[float] = DEFAULT_BUDGET_MS
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    loop_depth: int = DEFAULT_LOOP_DEPTH
    loop_max_term_size: int = DEFAULT_LOOP_MAX_TERM_SIZE
    loop_max_frontier: int = DEFAULT_LOOP_MAX_FRONTIER

    @property
    def loop_bounds(self) -> LoopBounds:
        return LoopBounds(self.loop_depth, self.loop_max_term_size, self.loop_max_frontier)


@dataclass
class TerminationOutcome:
    kind: TerminationKind
    certificate: t.Optional[Certificate] = None
    loop: t.Optional[LoopWitness] = None
    reason: t.Optional[str] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @classmethod
    def terminating(cls, certificate: Certificate, reason: str) -> 'TerminationOutcome':
        return cls(TerminationKind.TERMINATING, certificate=certificate, reason=reason)

    @classmethod
    def nonterminating(cls, loop: LoopWitness) -> 'TerminationOutcome':
        return cls(TerminationKind.NONTERMINATING, loop=loop, reason='μ-loop found')

    @classmethod
    def unknown(cls, reason: str) -> 'TerminationOutcome':
        return cls(TerminationKind.UNKNOWN, reason=reason)

    @property
    def is_terminating(self) -> bool:
        return self.kind == TerminationKind.TERMINATING

    @property
    def is_nonterminating(self) -> bool:
        return self.kind == TerminationKind.NONTERMINATING

    def verify(self, trs: Trs, mu: ReplacementMap) -> bool:
        """Re-check the embedded evidence"""
        if self.certificate is not None:
            return check_certificate(trs, mu, self.certificate).valid

        if self.loop is not None:
            return replay_loop(trs, mu, self.loop)

        return self.kind == TerminationKind.UNKNOWN


def prove(
    trs: Trs,
    mu: ReplacementMap,
    budget: t.Optional[SearchBudget] = None,
    certificate: t.Optional[Certificate] = None,
) -> TerminationOutcome:
    """
    Prove or disprove μ-termination of ``trs``.

    A given certificate is checked first. Then a μ-loop is searched with a quarter of the time budget, and finally
    polynomial interpretations with the rest of it.

    :return: the first verified result, Unknown if every technique gave up
    """
    budget = budget or SearchBudget()
    deadline = Deadline(budget.budget_ms)

    if certificate is not None:
        try:
            check = check_certificate(trs, mu, certificate)
        except MissingInterpretation as e:
            check = CertificateCheck(False, [str(e)])

        if check.valid:
            LOGGER.info('The given certificate is valid', extra=stage(ProofStage.CERTIFICATE_SEARCH))
            return TerminationOutcome.terminating(certificate, 'given certificate')

        LOGGER.warning('The given certificate is invalid: %s', '; '.join(check.diagnostics))

    loop = find_loop(trs, mu, budget.loop_bounds, deadline.slice(LOOP_SEARCH_SHARE))
    if loop is not None:
        return TerminationOutcome.nonterminating(loop)

    stats = SearchStats()
    cert = find_certificate(trs, mu, budget.max_candidates, deadline, stats=stats)
    if cert is not None:
        outcome = TerminationOutcome.terminating(cert, f'polynomial interpretation ({stats.phases[-1]})')
        outcome.stats = stats
        return outcome

    reason = 'no μ-loop within the loop bounds and '
    if stats.exhausted:
        reason += f'certificate search budget exhausted after {stats.nodes} candidates'
    else:
        reason += 'no polynomial interpretation in the searched domains'

    LOGGER.info(reason, extra=stage(ProofStage.CERTIFICATE_SEARCH))
    outcome = TerminationOutcome.unknown(reason)
    outcome.stats = stats
    return outcome
