# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import os

import pytest

from csr_prover.constants import (
    Answer,
    ProverMode,
    Question,
    Theorem,
)
from csr_prover.productivity import (
    disprove_constructor_normalizing,
    productivity_pipeline,
    prove_constructor_normalizing,
    prove_productive,
    shallow_characterization,
    verify_verdict,
)
from csr_prover.repmap import (
    ReplacementMap,
)
from csr_prover.termination import (
    Certificate,
)
from csr_prover.trs import (
    parse_spec,
)

LOOPING = """
(SORTS (Nat data))
(SIG (0 -> Nat) (w -> Nat))
(RULES w -> w)
"""

PARTIAL = """
(SORTS (Nat data))
(SIG (0 -> Nat) (s Nat -> Nat) (f Nat -> Nat))
(VAR x)
(RULES f(0) -> 0)
"""

ONES = """
(SORTS (Bit data) (Str codata))
(SIG (0 -> Bit) (1 -> Bit) (: Bit Str -> Str) (ones -> Str))
(RULES ones -> :(1,ones))
"""


def _cert(corpus_dir, name):
    return Certificate.load(os.path.join(corpus_dir, name))


def test_zip_alt_p_is_productive(zip_alt_p):
    verdict = productivity_pipeline(zip_alt_p.trs, zip_alt_p.strategy)
    assert verdict.answer == Answer.YES
    assert verdict.route == 'direct'
    assert verdict.used_map == zip_alt_p.strategy
    assert verdict.chain[-1].theorem == Theorem.TERMINATION_IMPLIES_PRODUCTIVITY
    assert verify_verdict(verdict)


def test_ordinals_with_certificate(ordinals, corpus_dir):
    verdict = prove_productive(ordinals.trs, ordinals.strategy, certificate=_cert(corpus_dir, 'ordinals.cert'))
    assert verdict.answer == Answer.YES
    assert verdict.evidence.reason == 'given certificate'

    names = [p.name for p in verdict.chain[-1].premises]
    assert names == ['productivity map', 'exhaustive', 'left-linear', 'orthogonal (informational)', 'μ-terminating']
    assert verify_verdict(verdict)


def test_map_below_productivity_map(ordinals):
    verdict = prove_productive(ordinals.trs, ReplacementMap.bottom(ordinals.trs.signature))
    assert verdict.answer == Answer.UNKNOWN
    assert verdict.reason == 'premise "productivity map" does not hold'


def test_ex5_3_via_shallowing(ex5_3, corpus_dir):
    verdict = productivity_pipeline(ex5_3.trs, certificate=_cert(corpus_dir, 'ex5_3_shallow.cert'))
    assert verdict.answer == Answer.YES
    assert verdict.route == 'shallowing'
    assert verdict.chain[0].theorem == Theorem.SHALLOWING_PRESERVES_PRODUCTIVITY
    assert 'f_b:' in verdict.subject.signature.symbols

    first, second = verdict.attempts
    assert first.answer == Answer.UNKNOWN
    assert first.reason == 'μ-nonterminating'
    assert second.answer == Answer.YES
    assert verify_verdict(verdict)


def test_ex5_3_without_shallowing(ex5_3):
    verdict = productivity_pipeline(ex5_3.trs, shallowing=False)
    assert verdict.answer == Answer.UNKNOWN
    assert verdict.route == 'direct'
    assert 'transform-shallow' in verdict.reason
    assert verdict.loop is not None


def test_comparison_mode(zip_alt_p):
    verdict = productivity_pipeline(zip_alt_p.trs, mode=ProverMode.ZR10)
    assert verdict.question == Question.CONSTRUCTOR_NORMALIZING
    assert verdict.answer == Answer.UNKNOWN
    assert verdict.route == 'zr10'
    assert verify_verdict(verdict)


def test_comparison_mode_only_concludes_constructor_normalization():
    spec = parse_spec(ONES)
    verdict = productivity_pipeline(spec.trs, mode=ProverMode.ZR10, question=Question.PRODUCTIVE)
    assert verdict.question == Question.CONSTRUCTOR_NORMALIZING
    assert verdict.answer == Answer.YES
    assert verdict.chain[-1].theorem == Theorem.PROPER_ZR10_TERMINATION_IMPLIES_CN
    assert verdict.chain[-1].conclusion == 'constructor normalizing'
    assert all(step.theorem != Theorem.TERMINATION_IMPLIES_PRODUCTIVITY for step in verdict.chain)
    assert verify_verdict(verdict)


def test_shallow_loop_is_not_productive():
    spec = parse_spec(LOOPING)
    verdict = productivity_pipeline(spec.trs)
    assert verdict.answer == Answer.NO
    assert verdict.chain[-1].theorem == Theorem.PRODUCTIVE_SHALLOW_IMPLIES_TERMINATION
    assert [a.answer for a in verdict.attempts] == [Answer.UNKNOWN]
    assert verify_verdict(verdict)


class TestConstructorNormalization:
    def test_not_exhaustive(self):
        spec = parse_spec(PARTIAL)
        verdict = prove_constructor_normalizing(spec.trs)
        assert verdict.answer == Answer.NO
        assert verdict.chain[0].theorem == Theorem.CN_IMPLIES_EXHAUSTIVE
        assert verdict.chain[0].premises[-1].detail == 'f(s(0)) is a ground normal form'
        assert verify_verdict(verdict)

    def test_overlapping_system_stays_unknown(self, wallis):
        verdict = prove_constructor_normalizing(wallis.trs)
        assert verdict.answer == Answer.UNKNOWN
        assert verdict.reason == 'not exhaustive, witness incr(nil)'

    def test_disproof(self):
        spec = parse_spec(LOOPING)
        verdict = disprove_constructor_normalizing(spec.trs)
        assert verdict.answer == Answer.NO
        assert verdict.loop is not None
        assert verify_verdict(verdict)

    def test_disproof_needs_strong_compatibility(self, ex5_3):
        verdict = disprove_constructor_normalizing(ex5_3.trs)
        assert verdict.answer == Answer.UNKNOWN
        assert verdict.reason == 'premise "strongly compatible" does not hold'

    def test_shallow_characterization(self, ex5_3_shallow, corpus_dir):
        verdict = shallow_characterization(ex5_3_shallow.trs, certificate=_cert(corpus_dir, 'ex5_3_shallow.cert'))
        assert verdict.answer == Answer.YES
        assert verdict.question == Question.CONSTRUCTOR_NORMALIZING
        assert verdict.chain[-1].theorem == Theorem.SHALLOW_CHARACTERIZATION
        assert verify_verdict(verdict)

        verdict = shallow_characterization(parse_spec(LOOPING).trs)
        assert verdict.answer == Answer.NO

    def test_pipeline_question(self, ordinals, corpus_dir):
        verdict = productivity_pipeline(
            ordinals.trs,
            certificate=_cert(corpus_dir, 'ordinals.cert'),
            question=Question.CONSTRUCTOR_NORMALIZING,
        )
        assert verdict.question == Question.CONSTRUCTOR_NORMALIZING
        assert verdict.answer == Answer.YES


@pytest.mark.parametrize('question', list(Question))
def test_unsorted(question):
    spec = parse_spec('(VAR x) (RULES f(x) -> x)')
    verdict = productivity_pipeline(spec.trs, question=question)
    assert verdict.answer == Answer.UNKNOWN
    assert verdict.reason == 'sorts required'


def test_tampered_verdict_does_not_verify(zip_alt_p):
    verdict = productivity_pipeline(zip_alt_p.trs, zip_alt_p.strategy)
    verdict.chain[-1].premises[1].holds = False
    assert not verify_verdict(verdict)

    verdict = productivity_pipeline(zip_alt_p.trs, zip_alt_p.strategy)
    verdict.chain = []
    assert not verify_verdict(verdict)
