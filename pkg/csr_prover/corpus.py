# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
The example corpus and its golden expectations.

``corpus.yml`` lists the entries::

    entries:
      - name: ordinals
        file: ordinals.trs
        certificate: ordinals.cert
        golden: golden/ordinals.yml

Each golden file holds the expected results of some of the checks below, absent keys are not checked.
"""

import logging
import os
import typing as t
from dataclasses import (
    dataclass,
)

import yaml

from .analysis import (
    analyze,
)
from .constants import (
    DEFAULT_FUEL,
    Answer,
    ProverMode,
    Question,
    TerminationKind,
    TraceOutcome,
)
from .csr import (
    head_normal_form_violation,
    normalize,
)
from .productivity import (
    productivity_pipeline,
    verify_verdict,
)
from .repmap import (
    ReplacementMap,
    canonical_map,
    is_canonical_for,
)
from .term import (
    format_position,
    format_term,
    is_variant,
)
from .termination import (
    Certificate,
    SearchBudget,
    check_certificate,
    prove,
)
from .transform import (
    ground_simulation_failures,
    shallow_transform,
)
from .trs import (
    SpecFile,
    load_spec,
    parse_term,
)
from .utils import (
    BaseModel,
    InvalidInput,
)

LOGGER = logging.getLogger(__name__)

CORPUS_MANIFEST_FN = 'corpus.yml'


class NormalizeCase(BaseModel):
    term: str
    map: t.Optional[str] = None
    fuel: int = DEFAULT_FUEL
    outcome: TraceOutcome
    normal_form: t.Optional[str] = None


class TerminationCase(BaseModel):
    map: t.Optional[str] = None
    kind: TerminationKind
    start: t.Optional[str] = None
    reentry: t.Optional[str] = None


class CertificateCase(BaseModel):
    file: str
    map: t.Optional[str] = None
    valid: bool = True


class VerdictCase(BaseModel):
    mode: ProverMode = ProverMode.DEFAULT
    map: t.Optional[str] = None
    transform: bool = True
    use_certificate: bool = True
    answer: Answer
    question: t.Optional[Question] = None
    route: t.Optional[str] = None
    used_map: t.Optional[t.Dict[str, t.List[int]]] = None


class Golden(BaseModel):
    canonical: t.Optional[t.Dict[str, t.List[int]]] = None
    delta: t.Optional[t.Dict[str, t.List[int]]] = None
    strategy_is_canonical: t.Optional[bool] = None
    analysis: t.Dict[str, t.Any] = {}
    exhaustive_witness_includes: t.List[str] = []
    normalize: t.List[NormalizeCase] = []
    termination: t.List[TerminationCase] = []
    certificates: t.List[CertificateCase] = []
    productivity: t.List[VerdictCase] = []
    shallowing: t.Optional[t.List[str]] = None
    head_normal_form_seeds: t.List[str] = []


class CorpusEntry(BaseModel):
    name: str
    file: str
    certificate: t.Optional[str] = None
    golden: t.Optional[str] = None


class Corpus(BaseModel):
    rootpath: str = '.'
    entries: t.List[CorpusEntry] = []

    @classmethod
    def load(cls, dirpath: str) -> 'Corpus':
        manifest = os.path.join(dirpath, CORPUS_MANIFEST_FN)
        if not os.path.isfile(manifest):
            raise InvalidInput(f'No {CORPUS_MANIFEST_FN} in "{dirpath}"')

        with open(manifest, encoding='utf-8') as fr:
            data = yaml.safe_load(fr) or {}

        try:
            return cls(rootpath=dirpath, **data)
        except ValueError as e:
            raise InvalidInput(f'Invalid corpus manifest "{manifest}": {e}')

    def path(self, relpath: str) -> str:
        return os.path.join(self.rootpath, relpath)

    def entry(self, name: str) -> CorpusEntry:
        for e in self.entries:
            if e.name == name:
                return e

        raise InvalidInput(f'No corpus entry named "{name}"')

    def load_spec(self, entry: CorpusEntry) -> SpecFile:
        return load_spec(self.path(entry.file))

    def load_golden(self, entry: CorpusEntry) -> Golden:
        if not entry.golden:
            return Golden()

        with open(self.path(entry.golden), encoding='utf-8') as fr:
            data = yaml.safe_load(fr) or {}

        try:
            return Golden.model_validate(data)
        except ValueError as e:
            raise InvalidInput(f'Invalid golden file "{entry.golden}": {e}')

    def load_certificate(self, entry: CorpusEntry) -> t.Optional[Certificate]:
        if not entry.certificate:
            return None

        return Certificate.load(self.path(entry.certificate))


@dataclass
class CheckResult:
    entry: str
    check: str
    passed: bool
    detail: str = ''

    def to_text(self) -> str:
        status = 'ok' if self.passed else 'FAILED'
        res = f'{self.entry}: {self.check}: {status}'
        if self.detail and not self.passed:
            res += f' ({self.detail})'
        return res


class _EntryChecker:
    def __init__(self, corpus: Corpus, entry: CorpusEntry, budget: t.Optional[SearchBudget]) -> None:
        self.corpus = corpus
        self.entry = entry
        self.budget = budget

        self.spec = corpus.load_spec(entry)
        self.golden = corpus.load_golden(entry)
        self.certificate = corpus.load_certificate(entry)
        self.results: t.List[CheckResult] = []

    def record(self, check: str, passed: bool, detail: str = '') -> None:
        res = CheckResult(self.entry.name, check, passed, detail)
        if passed:
            LOGGER.info(res.to_text())
        else:
            LOGGER.error(res.to_text())
        self.results.append(res)

    def expect_map(self, check: str, expected: t.Mapping[str, t.List[int]], got: ReplacementMap) -> None:
        want = ReplacementMap(self.spec.trs.signature, expected)
        self.record(check, want == got, f'expected {want.to_text() or "⊥"}, got {got.to_text() or "⊥"}')

    def run(self) -> t.List[CheckResult]:
        trs = self.spec.trs
        golden = self.golden

        if golden.canonical is not None:
            self.expect_map('canonical map', golden.canonical, canonical_map(trs))
        if golden.delta is not None:
            self.expect_map('μ_Δ', golden.delta, self.spec.resolve_map('delta'))
        if golden.strategy_is_canonical is not None:
            got = is_canonical_for(self.spec.resolve_map('strategy'), trs)
            self.record('strategy in CM_R', got == golden.strategy_is_canonical, f'got {got}')

        if golden.analysis or golden.exhaustive_witness_includes:
            self.check_analysis()
        for i, case in enumerate(golden.normalize, start=1):
            self.check_normalize(i, case)
        for i, case in enumerate(golden.termination, start=1):
            self.check_termination(i, case)
        for case in golden.certificates:
            self.check_certificate(case)
        for i, case in enumerate(golden.productivity, start=1):
            self.check_productivity(i, case)
        if golden.shallowing is not None:
            self.check_shallowing(golden.shallowing)
        if golden.head_normal_form_seeds:
            self.check_head_normal_forms(golden.head_normal_form_seeds)

        return self.results

    def check_analysis(self) -> None:
        report = analyze(self.spec.trs)
        dumped = report.model_dump(mode='json')
        for key, expected in self.golden.analysis.items():
            if key not in dumped:
                self.record(f'analysis {key}', False, 'unknown key')
                continue
            self.record(f'analysis {key}', dumped[key] == expected, f'expected {expected}, got {dumped[key]}')

        signature = self.spec.trs.signature
        reported = [parse_term(w, signature) for w in report.exhaustive_witnesses]
        for witness in self.golden.exhaustive_witness_includes:
            expected = parse_term(witness, signature)
            self.record(
                f'exhaustiveness witness {witness}',
                any(is_variant(expected, w) for w in reported),
                f'got {", ".join(report.exhaustive_witnesses)}',
            )

    def check_normalize(self, i: int, case: NormalizeCase) -> None:
        trs = self.spec.trs
        mu = self.spec.resolve_map(case.map)
        trace = normalize(parse_term(case.term, trs.signature), trs, mu, case.fuel)
        ok = trace.outcome == case.outcome
        if ok and case.normal_form is not None:
            ok = format_term(trace.final) == case.normal_form
        self.record(
            f'normalize #{i} {case.term}',
            ok,
            f'got {trace.outcome.value} with {format_term(trace.final)}',
        )

    def check_termination(self, i: int, case: TerminationCase) -> None:
        trs = self.spec.trs
        mu = self.spec.resolve_map(case.map)
        outcome = prove(trs, mu, self.budget, self.certificate if case.kind == TerminationKind.TERMINATING else None)
        ok = outcome.kind == case.kind and outcome.verify(trs, mu)
        detail = f'got {outcome.kind.value}: {outcome.reason}'
        if ok and outcome.loop is not None:
            if case.start is not None:
                ok = format_term(outcome.loop.start) == case.start
            if ok and case.reentry is not None:
                ok = format_position(outcome.loop.reentry) == case.reentry
            detail = f'loop from {format_term(outcome.loop.start)} at {format_position(outcome.loop.reentry)}'
        self.record(f'termination #{i} ({case.map or "default"})', ok, detail)

    def check_certificate(self, case: CertificateCase) -> None:
        trs = self.spec.trs
        cert = Certificate.load(self.corpus.path(case.file))
        check = check_certificate(trs, self.spec.resolve_map(case.map), cert)
        self.record(f'certificate {case.file}', check.valid == case.valid, '; '.join(check.diagnostics))

    def check_productivity(self, i: int, case: VerdictCase) -> None:
        trs = self.spec.trs
        mu = self.spec.resolve_map(case.map) if case.map else self.spec.strategy
        verdict = productivity_pipeline(
            trs,
            mu,
            self.budget,
            mode=case.mode,
            shallowing=case.transform,
            certificate=self.certificate if case.use_certificate else None,
        )
        ok = verdict.answer == case.answer and verify_verdict(verdict)
        if ok and case.question is not None:
            ok = verdict.question == case.question
        if ok and case.route is not None:
            ok = verdict.route == case.route
        if ok and case.used_map is not None:
            ok = verdict.used_map is not None and verdict.used_map == ReplacementMap(
                verdict.used_map.signature, case.used_map
            )
        self.record(
            f'productivity #{i} ({case.mode.value})',
            ok,
            f'got {verdict.question.value} {verdict.answer.value} via {verdict.route}: {verdict.reason}',
        )

    def check_shallowing(self, expected: t.List[str]) -> None:
        result = shallow_transform(self.spec.trs)
        got = [str(r) for r in result.output.rules]
        self.record('shallowing', got == expected, f'got {"; ".join(got)}')

        failures = ground_simulation_failures(self.spec.trs, result)
        self.record(
            'shallowing simulates ground terms',
            not failures,
            f'differs from {", ".join(format_term(s) for s in failures)}',
        )

    def check_head_normal_forms(self, seeds: t.List[str]) -> None:
        trs = self.spec.trs
        mu = canonical_map(trs)
        for seed in seeds:
            trace = normalize(parse_term(seed, trs.signature), trs, mu, DEFAULT_FUEL)
            if trace.outcome != TraceOutcome.NORMAL_FORM:
                self.record(f'head normal form of {seed}', False, f'no μcan-normal form: {trace.outcome.value}')
                continue

            violation = head_normal_form_violation(trace.final, trs)
            self.record(
                f'head normal form of {seed}',
                violation is None,
                f'{format_term(trace.final)} reduces to the redex {format_term(violation) if violation else ""}',
            )


def run_corpus(
    dirpath: str,
    budget: t.Optional[SearchBudget] = None,
    names: t.Optional[t.Iterable[str]] = None,
) -> t.List[CheckResult]:
    """
    Run the golden checks of every corpus entry, or of the ones called ``names``
    """
    corpus = Corpus.load(dirpath)
    entries = [corpus.entry(n) for n in names] if names else corpus.entries

    results = []
    for entry in entries:
        LOGGER.info('Checking corpus entry %s', entry.name)
        results.extend(_EntryChecker(corpus, entry, budget).run())

    return results
