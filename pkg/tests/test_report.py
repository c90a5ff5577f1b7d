# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import os

import pytest

from csr_prover import (
    __version__,
)
from csr_prover.constants import (
    Answer,
    TerminationKind,
)
from csr_prover.productivity import (
    productivity_pipeline,
)
from csr_prover.repmap import (
    canonical_map,
)
from csr_prover.report import (
    MapsModel,
    OutcomeModel,
    Report,
    VerdictModel,
    check_report,
)
from csr_prover.termination import (
    Certificate,
    prove,
)
from csr_prover.trs import (
    print_spec,
)
from csr_prover.utils import (
    InvalidInput,
)


def _report(spec, mu, **kwargs):
    return Report.create(
        'prove-termination',
        spec.text,
        print_spec(spec.trs, spec.strategy),
        MapsModel(canonical=canonical_map(spec.trs).to_text(), used=mu.to_text()),
        input_file=spec.filepath,
        **kwargs,
    )


def test_loop_report(ex5_3):
    mu = canonical_map(ex5_3.trs)
    report = _report(ex5_3, mu, outcome=OutcomeModel.from_outcome(prove(ex5_3.trs, mu)))
    assert report.tool_version == __version__
    assert report.input_digest.startswith('sha256:')
    assert report.outcome.kind == TerminationKind.NONTERMINATING
    assert report.outcome.loop.start == 's'
    assert report.outcome.loop.reentry == '2'

    again = Report.from_json(report.to_json())
    assert again == report
    assert again.model_copy(update={'timings': {'prove': 1.0}}) == report
    assert check_report(again).valid

    again.outcome.loop.steps[0].after = ':(b,b)'
    check = check_report(again)
    assert not check.valid
    assert check.diagnostics[0].startswith('outcome: ')


def test_certificate_report(ordinals, corpus_dir):
    cert = Certificate.load(os.path.join(corpus_dir, 'ordinals.cert'))
    outcome = prove(ordinals.trs, ordinals.strategy, certificate=cert)
    report = Report.from_json(_report(ordinals, ordinals.strategy, outcome=OutcomeModel.from_outcome(outcome)).to_json())
    assert check_report(report).valid
    assert 'certificate:' in report.outcome.summary()

    report.outcome.certificate = report.outcome.certificate.replace('ω = 1', 'ω = 0')
    check = check_report(report)
    assert not check.valid
    assert any('not strictly decreasing' in d for d in check.diagnostics)


def test_claim_without_evidence(ordinals):
    report = _report(ordinals, ordinals.strategy, outcome=OutcomeModel(kind=TerminationKind.TERMINATING))
    check = check_report(report)
    assert check.diagnostics == ['outcome: Terminating without evidence']


def test_verdict_report(ex5_3, corpus_dir):
    cert = Certificate.load(os.path.join(corpus_dir, 'ex5_3_shallow.cert'))
    verdict = productivity_pipeline(ex5_3.trs, certificate=cert)
    model = VerdictModel.from_verdict(verdict)
    assert model.answer == Answer.YES
    assert model.route == 'shallowing'
    assert len(model.attempts) == 2
    assert model.summary()[:2] == ['Productive: Yes', 'route: shallowing']

    report = Report.from_json(_report(ex5_3, canonical_map(ex5_3.trs), verdict=model).to_json())
    assert check_report(report).valid

    # the loop of the first attempt is checked too
    report.verdict.attempts[0].chain[-1].outcome.loop.reentry = '1'
    check = check_report(report)
    assert not check.valid
    assert check.diagnostics == ['verdict attempt 1 step 1: the loop does not replay']


def test_invalid_json():
    with pytest.raises(InvalidInput, match='Invalid report'):
        Report.from_json('{"command": "analyze"}')
