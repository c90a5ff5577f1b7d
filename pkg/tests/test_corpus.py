# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import pytest
from conftest import (
    CORPUS_DIR,
)

from csr_prover.analysis import (
    ground_constructor_term,
    is_orthogonal,
)
from csr_prover.constants import (
    DEFAULT_FUEL,
    Answer,
    TraceOutcome,
)
from csr_prover.corpus import (
    CheckResult,
    Corpus,
    run_corpus,
)
from csr_prover.csr import (
    head_normal_form_violation,
    normalize,
    reachable,
)
from csr_prover.productivity import (
    productivity_pipeline,
)
from csr_prover.repmap import (
    ReplacementMap,
)
from csr_prover.term import (
    App,
    root,
)
from csr_prover.termination import (
    SearchBudget,
)
from csr_prover.trs import (
    parse_term,
)
from csr_prover.utils import (
    InvalidInput,
)

ENTRIES = [e.name for e in Corpus.load(CORPUS_DIR).entries]


def test_corpus_matches_golden(corpus_dir):
    results = run_corpus(corpus_dir, SearchBudget(budget_ms=None))
    failed = [r.to_text() for r in results if not r.passed]
    assert failed == []
    assert {r.entry for r in results} == {'wallis', 'ordinals', 'zip_alt_p', 'ex5_3', 'ex5_3_shallow'}


def test_single_entry(corpus_dir):
    results = run_corpus(corpus_dir, names=['zip_alt_p'])
    assert {r.entry for r in results} == {'zip_alt_p'}
    assert 'zip_alt_p: canonical map: ok' in [r.to_text() for r in results]


def test_manifest(corpus_dir):
    corpus = Corpus.load(corpus_dir)
    assert [e.name for e in corpus.entries] == ['wallis', 'ordinals', 'zip_alt_p', 'ex5_3', 'ex5_3_shallow']
    assert corpus.entry('ex5_3').certificate == 'ex5_3_shallow.cert'
    assert corpus.load_certificate(corpus.entry('wallis')) is None

    with pytest.raises(InvalidInput, match='No corpus entry named "nope"'):
        corpus.entry('nope')


def test_missing_manifest(tmp_path):
    with pytest.raises(InvalidInput, match='No corpus.yml'):
        Corpus.load(str(tmp_path))


def test_failed_golden_check(tmp_path, corpus_dir):
    (tmp_path / 'corpus.yml').write_text(
        f'entries:\n  - name: ordinals\n    file: {corpus_dir}/ordinals.trs\n    golden: golden.yml\n'
    )
    (tmp_path / 'golden.yml').write_text("canonical:\n  '+': [1]\nanalysis:\n  shallow: false\n  nope: 1\n")

    results = run_corpus(str(tmp_path))
    assert [r.to_text() for r in results] == [
        'ordinals: canonical map: FAILED (expected (+ 1), got (+ 2) (+_L 2) (× 2) (×_L 2))',
        'ordinals: analysis shallow: FAILED (expected False, got True)',
        'ordinals: analysis nope: FAILED (unknown key)',
    ]


def test_check_result_text():
    assert CheckResult('e', 'c', True, 'ignored').to_text() == 'e: c: ok'
    assert CheckResult('e', 'c', False).to_text() == 'e: c: FAILED'


def _ground_seeds(trs, golden):
    seeds = [parse_term(s, trs.signature) for s in golden.head_normal_form_seeds]
    for name in trs.defined:
        args = [ground_constructor_term(trs, s) for s in trs.signature.symbol(name).arg_sorts]
        if all(a is not None for a in args):
            seeds.append(App(name, tuple(args)))

    return seeds


@pytest.mark.parametrize('name', ENTRIES)
def test_productive_entries_reach_constructor_head_normal_forms(corpus_dir, name):
    corpus = Corpus.load(corpus_dir)
    entry = corpus.entry(name)
    spec = corpus.load_spec(entry)
    verdict = productivity_pipeline(spec.trs, spec.strategy, certificate=corpus.load_certificate(entry))
    if verdict.answer != Answer.YES:
        pytest.skip(f'{name} is not proven productive')

    trs = verdict.subject
    top = ReplacementMap.top(trs.signature)
    seeds = _ground_seeds(trs, corpus.load_golden(entry))
    assert seeds

    for seed in seeds:
        trace = normalize(seed, trs, verdict.used_map, DEFAULT_FUEL)
        assert trace.outcome == TraceOutcome.NORMAL_FORM
        head = root(trace.final)
        assert head in trs.constructors
        assert head_normal_form_violation(trace.final, trs, depth=8) is None

        # orthogonal systems are confluent and constructor roots never change
        if is_orthogonal(trs):
            for u in reachable(seed, trs, top, 8, max_terms=2_000):
                if root(u) in trs.constructors:
                    assert root(u) == head
