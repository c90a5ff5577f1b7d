# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Machine readable reports.

A report embeds the normalized input system, the maps and every piece of evidence (certificates as text, loops as
recorded steps), so that :func:`check_report` can replay it without the original files.
"""

import logging
import typing as t

from pydantic import (
    Field,
)

from .analysis import (
    AnalysisReport,
)
from .constants import (
    Answer,
    Question,
    TerminationKind,
    Theorem,
)
from .csr import (
    StepRecord,
)
from .productivity import (
    JustificationStep,
    Verdict,
)
from .repmap import (
    ReplacementMap,
)
from .term import (
    Signature,
    Term,
    format_position,
    format_term,
    match,
    parse_position,
    subterm_at,
    variables,
)
from .termination import (
    Certificate,
    CertificateCheck,
    LoopWitness,
    TerminationOutcome,
    check_certificate,
    replay_loop,
)
from .trs import (
    parse_spec,
    parse_term,
    print_spec,
)
from .utils import (
    BaseModel,
    CsrError,
    InvalidInput,
    MissingInterpretation,
    text_digest,
    to_version,
)

LOGGER = logging.getLogger(__name__)


class StepModel(BaseModel):
    position: str
    rule: str
    before: str
    after: str

    @classmethod
    def from_record(cls, record: StepRecord) -> 'StepModel':
        return cls(
            position=format_position(record.position),
            rule=record.rule_label,
            before=format_term(record.before),
            after=format_term(record.after),
        )


class LoopModel(BaseModel):
    start: str
    steps: t.List[StepModel]
    reentry: str
    matcher: t.Dict[str, str] = {}

    @classmethod
    def from_witness(cls, witness: LoopWitness) -> 'LoopModel':
        return cls(
            start=format_term(witness.start),
            steps=[StepModel.from_record(s) for s in witness.steps],
            reentry=format_position(witness.reentry),
            matcher={x.name: format_term(v) for x, v in witness.matcher.items()},
        )

    def to_witness(self, signature: Signature) -> LoopWitness:
        start = parse_term(self.start, signature)
        var_sorts = {x.name: x.sort for x in variables(start)}

        def _term(s: str) -> Term:
            return parse_term(s, signature, var_sorts)

        steps = [StepRecord(parse_position(s.position), s.rule, _term(s.before), _term(s.after)) for s in self.steps]
        reentry = parse_position(self.reentry)
        witness = LoopWitness(start, steps, reentry)
        if steps:
            try:
                sigma = match(start, subterm_at(steps[-1].after, reentry))
            except CsrError:
                sigma = None
            witness.matcher = sigma or {}

        return witness


class OutcomeModel(BaseModel):
    kind: TerminationKind
    reason: t.Optional[str] = None
    certificate: t.Optional[str] = None
    loop: t.Optional[LoopModel] = None
    candidates: int = 0
    phases: t.List[str] = []

    @classmethod
    def from_outcome(cls, outcome: TerminationOutcome) -> 'OutcomeModel':
        return cls(
            kind=outcome.kind,
            reason=outcome.reason,
            certificate=outcome.certificate.to_text() if outcome.certificate is not None else None,
            loop=LoopModel.from_witness(outcome.loop) if outcome.loop is not None else None,
            candidates=outcome.stats.nodes,
            phases=list(outcome.stats.phases),
        )

    def summary(self) -> t.List[str]:
        lines = [f'result: {self.kind.value}']
        if self.reason:
            lines.append(f'reason: {self.reason}')
        if self.certificate:
            lines.append('certificate:')
            lines.extend(f'  {line}' for line in self.certificate.splitlines())
        if self.loop:
            lines.append(f'loop from {self.loop.start}:')
            lines.extend(f'  {s.position} {s.rule} {s.after}' for s in self.loop.steps)
            lines.append(f'  re-entering at position {self.loop.reentry}')
        return lines


class PremiseModel(BaseModel):
    name: str
    holds: bool
    detail: str = ''


class JustificationModel(BaseModel):
    theorem: Theorem
    conclusion: str
    premises: t.List[PremiseModel]
    system: t.Optional[str] = None
    map: t.Optional[str] = None
    outcome: t.Optional[OutcomeModel] = None

    @classmethod
    def from_step(cls, step: JustificationStep) -> 'JustificationModel':
        return cls(
            theorem=step.theorem,
            conclusion=step.conclusion,
            premises=[PremiseModel(name=p.name, holds=p.holds, detail=p.detail) for p in step.premises],
            system=print_spec(step.subject) if step.subject is not None else None,
            map=step.mu.to_text() if step.mu is not None else None,
            outcome=OutcomeModel.from_outcome(step.evidence) if step.evidence is not None else None,
        )


class VerdictModel(BaseModel):
    question: Question
    answer: Answer
    route: str = 'direct'
    reason: t.Optional[str] = None
    used_map: t.Optional[str] = None
    outcome: t.Optional[OutcomeModel] = None
    chain: t.List[JustificationModel] = []
    attempts: t.List['VerdictModel'] = []

    @classmethod
    def from_verdict(cls, verdict: Verdict) -> 'VerdictModel':
        return cls(
            question=verdict.question,
            answer=verdict.answer,
            route=verdict.route,
            reason=verdict.reason,
            used_map=verdict.used_map.to_text() if verdict.used_map is not None else None,
            outcome=OutcomeModel.from_outcome(verdict.evidence) if verdict.evidence is not None else None,
            chain=[JustificationModel.from_step(s) for s in verdict.chain],
            attempts=[cls.from_verdict(a) for a in verdict.attempts],
        )

    def summary(self) -> t.List[str]:
        lines = [f'{self.question.value}: {self.answer.value}']
        if self.route != 'direct':
            lines.append(f'route: {self.route}')
        if self.reason:
            lines.append(f'reason: {self.reason}')
        if self.used_map is not None:
            lines.append(f'map: {self.used_map or "⊥"}')
        for step in self.chain:
            premises = ', '.join(f'{p.name}{"" if p.holds else " (fails)"}' for p in step.premises)
            lines.append(f'by {step.theorem.value}: {step.conclusion} [{premises}]')
        if self.outcome is not None:
            lines.extend(self.outcome.summary())
        return lines


VerdictModel.model_rebuild()


class MapsModel(BaseModel):
    canonical: str
    delta: t.Optional[str] = None
    used: t.Optional[str] = None


class Report(BaseModel):
    __EQ_IGNORE_FIELDS__ = ('timings',)

    tool_version: str
    command: str
    input_file: t.Optional[str] = None
    input_digest: str
    system: str
    analysis: t.Optional[AnalysisReport] = None
    maps: MapsModel
    outcome: t.Optional[OutcomeModel] = None
    verdict: t.Optional[VerdictModel] = None
    timings: t.Dict[str, float] = Field(default_factory=dict)

    @classmethod
    def create(
        cls,
        command: str,
        text: str,
        system: str,
        maps: MapsModel,
        **kwargs: t.Any,
    ) -> 'Report':
        from . import __version__  # noqa: PLC0415

        return cls(
            tool_version=__version__,
            command=command,
            input_digest=text_digest(text),
            system=system,
            maps=maps,
            **kwargs,
        )

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=True)

    @classmethod
    def from_json(cls, json_data: t.Union[str, bytes]) -> 'Report':
        from . import __version__  # noqa: PLC0415

        try:
            report = cls.model_validate_json(json_data)
        except ValueError as e:
            raise InvalidInput(f'Invalid report: {e}')

        if to_version(report.tool_version) > to_version(__version__):
            LOGGER.warning(
                'Report written by csr-prover %s, newer than the running %s', report.tool_version, __version__
            )

        return report


def _check_outcome(system: str, map_text: t.Optional[str], outcome: OutcomeModel, where: str) -> CertificateCheck:
    trs = parse_spec(system).trs
    mu = ReplacementMap.from_text(trs.signature, map_text or '')

    if outcome.certificate is not None:
        cert = Certificate.from_text(outcome.certificate, where)
        try:
            check = check_certificate(trs, mu, cert)
        except MissingInterpretation as e:
            check = CertificateCheck(False, [str(e)])
        return CertificateCheck(check.valid, [f'{where}: {d}' for d in check.diagnostics])

    if outcome.loop is not None:
        try:
            witness = outcome.loop.to_witness(trs.signature)
        except (InvalidInput, CsrError) as e:
            return CertificateCheck(False, [f'{where}: {e}'])

        if replay_loop(trs, mu, witness):
            return CertificateCheck(True)
        return CertificateCheck(False, [f'{where}: the loop does not replay'])

    if outcome.kind != TerminationKind.UNKNOWN:
        return CertificateCheck(False, [f'{where}: {outcome.kind.value} without evidence'])

    return CertificateCheck(True)


def check_report(report: Report) -> CertificateCheck:
    """
    Replay every certificate and loop embedded in ``report``.
    """
    diagnostics: t.List[str] = []
    if report.outcome is not None:
        check = _check_outcome(report.system, report.maps.used, report.outcome, 'outcome')
        diagnostics.extend(check.diagnostics)

    def _visit(verdict: VerdictModel, where: str) -> None:
        for i, step in enumerate(verdict.chain, start=1):
            if step.outcome is None:
                continue
            if step.system is None:
                diagnostics.append(f'{where} step {i}: evidence without system')
                continue
            check = _check_outcome(step.system, step.map, step.outcome, f'{where} step {i}')
            diagnostics.extend(check.diagnostics)

        for j, attempt in enumerate(verdict.attempts, start=1):
            _visit(attempt, f'{where} attempt {j}')

    if report.verdict is not None:
        _visit(report.verdict, 'verdict')

    return CertificateCheck(not diagnostics, diagnostics)
