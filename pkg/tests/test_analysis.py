# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import pytest
from conftest import (
    term_of,
)

from csr_prover.analysis import (
    analyze,
    definitional_tree,
    ground_constructor_term,
    is_constructor_system,
    is_exhaustive,
    is_inductively_sequential,
    is_left_linear,
    is_orthogonal,
    is_proper,
    is_shallow,
)
from csr_prover.constants import (
    Answer,
    CompatClass,
)
from csr_prover.term import (
    format_term,
    is_variant,
)
from csr_prover.trs import (
    parse_spec,
)


def test_wallis_is_not_exhaustive(wallis):
    res = is_exhaustive(wallis.trs)
    assert res.answer == Answer.NO
    assert format_term(res.witness) == 'incr(nil)'

    witnesses = res.all_witnesses()
    assert any(is_variant(term_of(wallis, 'take(s(n),nil)'), w) for w in witnesses)
    assert any(is_variant(term_of(wallis, 'tail(nil)'), w) for w in witnesses)
    # halfPi matches any argument, constants are trivially covered
    assert 'halfPi' not in res.witnesses
    assert 'evenNs' not in res.witnesses
    assert any(is_variant(term_of(wallis, 'prodOfFracs(cons(x,xs))'), w) for w in witnesses)
    assert 'rep2' in res.witnesses


@pytest.mark.parametrize('name', ['ordinals', 'zip_alt_p', 'ex5_3', 'ex5_3_shallow'])
def test_corpus_exhaustive(request, name):
    spec = request.getfixturevalue(name)
    res = is_exhaustive(spec.trs)
    assert res.answer == Answer.YES
    assert res.witness is None


def test_exhaustive_unknown():
    spec = parse_spec(
        """
(SORTS (Nat data))
(SIG (0 -> Nat) (s Nat -> Nat) (f Nat -> Nat) (g Nat Nat -> Nat))
(VAR x)
(RULES
  f(f(x)) -> x
  g(x,x) -> x
)
"""
    )
    res = is_exhaustive(spec.trs)
    assert res.answer == Answer.UNKNOWN
    assert res.reason == 'not a constructor system'


def test_uninhabited_sort_warns():
    spec = parse_spec(
        """
(SORTS (Nat data) (Void data))
(SIG (0 -> Nat) (f Void -> Nat))
(VAR x)
(RULES f(x) -> 0)
"""
    )
    res = is_exhaustive(spec.trs)
    assert res.answer == Answer.YES
    assert res.warnings == ['Sort Void has no constructors, its arguments are treated as covered']
    assert ground_constructor_term(spec.trs, 'Void') is None
    assert ground_constructor_term(spec.trs, 'Nat') == term_of(spec, '0')


def test_syntactic_properties(wallis, ex5_3):
    assert is_left_linear(wallis.trs)
    assert is_constructor_system(wallis.trs)
    # zip(nil,xs) and zip(xs,nil) overlap on zip(nil,nil)
    assert not is_orthogonal(wallis.trs)
    assert is_orthogonal(ex5_3.trs)


def test_shallow(ordinals, ex5_3, ex5_3_shallow):
    ok, index_sets = is_shallow(ordinals.trs)
    assert ok
    assert index_sets['+'] == {2}
    assert index_sets['nats'] == frozenset()

    ok, index_sets = is_shallow(ex5_3.trs)
    assert not ok
    assert 'f' not in index_sets

    ok, index_sets = is_shallow(ex5_3_shallow.trs)
    assert ok
    assert index_sets == {
        's': frozenset(),
        'f': {1},
        'f_a': frozenset(),
        'f_b': {1},
        'f_b:': {2},
    }


def test_proper(ordinals, ex5_3):
    assert is_proper(ordinals.trs)
    assert not is_proper(ex5_3.trs)


def test_definitional_tree(ex5_3, wallis):
    tree = definitional_tree(ex5_3.trs, 'f')
    assert tree is not None
    assert tree.position == (1,)
    assert [r.label for r in tree.leaves()] == ['r2', 'r3']
    assert is_inductively_sequential(ex5_3.trs)

    # zip(nil,xs) and zip(xs,nil) have no common inductive position
    assert definitional_tree(wallis.trs, 'zip') is None
    assert not is_inductively_sequential(wallis.trs)


def test_analyze(ex5_3_shallow, ex5_3):
    report = analyze(ex5_3_shallow.trs)
    assert report.sorted
    assert report.shallow
    assert report.tree_specification
    assert report.compatibility_class == CompatClass.STRONGLY_COMPATIBLE
    assert report.strong_compat and report.weak_compat
    assert report.index_sets['f_b:'] == [2]

    report = analyze(ex5_3.trs)
    assert not report.shallow
    assert report.inductively_sequential
    assert report.compatibility_class != CompatClass.STRONGLY_COMPATIBLE
    assert 'shallow: no' in report.summary()


def test_analyze_unsorted():
    spec = parse_spec('(VAR x) (RULES f(x) -> x)')
    report = analyze(spec.trs)
    assert not report.sorted
    assert not report.collapsing_free
    assert report.warnings
