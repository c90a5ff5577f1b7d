# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import pytest

from csr_prover.constants import (
    SortKind,
)
from csr_prover.term import (
    App,
    Rule,
    Signature,
    Sort,
    Symbol,
    Trs,
    Var,
    compose,
    format_position,
    format_term,
    is_ground,
    is_variant,
    match,
    parse_position,
    positions,
    positions_f,
    positions_of,
    positions_x,
    rename,
    replace_at,
    size,
    subterm_at,
    substitute,
    unify,
    variables,
)
from csr_prover.utils import (
    InvalidPosition,
    SignatureMismatch,
    SortMismatch,
)

NAT = Signature(
    [
        Symbol('0', (), 'Nat'),
        Symbol('s', ('Nat',), 'Nat'),
        Symbol('+', ('Nat', 'Nat'), 'Nat'),
        Symbol(':', ('Nat', 'Str'), 'Str'),
        Symbol('nats', ('Nat',), 'Str'),
    ],
    [Sort('Nat'), Sort('Str', SortKind.CODATA)],
)
X = Var('x', 'Nat')
Y = Var('y', 'Nat')
ZERO = App('0')


def s(u):
    return App('s', (u,))


def plus(a, b):
    return App('+', (a, b))


@pytest.mark.parametrize(
    'text, position',
    [
        ('e', ()),
        ('Λ', ()),
        ('1', (1,)),
        ('2.1.3', (2, 1, 3)),
    ],
)
def test_parse_position(text, position):
    assert parse_position(text) == position
    if text != 'Λ':
        assert format_position(position) == text


@pytest.mark.parametrize('text', ['0', '1.0', 'a', '1..2'])
def test_parse_invalid_position(text):
    with pytest.raises(InvalidPosition):
        parse_position(text)


def test_positions_and_subterms():
    term = plus(s(X), ZERO)
    assert positions(term) == [(), (1,), (1, 1), (2,)]
    assert positions_f(term) == [(), (1,), (2,)]
    assert positions_x(term) == [(1, 1)]
    assert positions_of(X, plus(X, s(X))) == [(1,), (2, 1)]
    assert subterm_at(term, (1, 1)) == X
    assert size(term) == 4

    with pytest.raises(InvalidPosition, match='Position 1.1.1 is not valid'):
        subterm_at(term, (1, 1, 1))


def test_replace_at_checks_sorts():
    term = plus(s(X), ZERO)
    assert replace_at(term, (2,), Y) == plus(s(X), Y)
    assert replace_at(term, (), ZERO) == ZERO

    with pytest.raises(SortMismatch):
        replace_at(term, (2,), App('nats', (ZERO,)), NAT)


def test_format_term():
    assert format_term(App(':', (s(ZERO), App('nats', (X,))))) == ':(s(0),nats(x))'
    assert str(ZERO) == '0'
    assert str(Rule(plus(ZERO, X), X)) == '+(0,x) -> x'


def test_variables_in_order():
    assert variables(plus(Y, plus(X, Y))) == [Y, X]


def test_match():
    assert match(plus(s(X), Y), plus(s(ZERO), s(ZERO))) == {X: ZERO, Y: s(ZERO)}
    assert match(plus(X, X), plus(ZERO, s(ZERO))) is None
    assert match(plus(X, X), plus(ZERO, ZERO)) == {X: ZERO}
    # variables of the subject are constants
    assert match(s(ZERO), s(X)) is None


def test_unify():
    assert unify(plus(X, X), plus(ZERO, s(Y))) is None

    sigma = unify(plus(X, s(ZERO)), plus(s(Y), Y))
    assert substitute(X, sigma) == s(s(ZERO))

    sigma = unify(plus(X, s(Y)), plus(s(ZERO), s(ZERO)))
    assert substitute(plus(X, s(Y)), sigma) == plus(s(ZERO), s(ZERO))

    # occurs check
    assert unify(X, s(X)) is None


def test_compose():
    sigma = {X: s(Y)}
    tau = {Y: ZERO}
    assert substitute(X, compose(sigma, tau)) == s(ZERO)
    assert substitute(Y, compose(sigma, tau)) == ZERO


def test_is_variant():
    assert is_variant(plus(X, Y), plus(Y, X))
    assert not is_variant(plus(X, Y), plus(X, X))
    assert not is_variant(plus(X, Y), plus(ZERO, X))


def test_rename():
    renamed = rename(plus(X, s(X)), "'")
    assert renamed == plus(Var("x'", 'Nat'), s(Var("x'", 'Nat')))
    assert is_variant(renamed, plus(X, s(X)))
    assert not is_ground(renamed)
    assert is_ground(rename(s(ZERO), "'"))


def test_signature_checks():
    with pytest.raises(SignatureMismatch, match='declared twice'):
        Signature([Symbol('a', (), 'Nat'), Symbol('a', (), 'Nat')], [Sort('Nat')])

    with pytest.raises(SortMismatch, match='undeclared sort'):
        Signature([Symbol('a', (), 'Bool')], [Sort('Nat')])

    with pytest.raises(SortMismatch, match='Argument 1 of "s"'):
        NAT.check_term(s(App('nats', (ZERO,))))

    with pytest.raises(SignatureMismatch, match='expects 1 arguments'):
        NAT.check_term(App('s', ()))


def test_rule_checks():
    with pytest.raises(SignatureMismatch, match='is a variable'):
        Rule(X, ZERO)

    with pytest.raises(SignatureMismatch, match='variables y do not occur'):
        Rule(s(X), Y)

    with pytest.raises(SortMismatch, match='both sides'):
        Trs(NAT, [Rule(App('nats', (X,)), X)])


def test_trs_symbols():
    trs = Trs(
        NAT,
        [
            Rule(plus(ZERO, Y), Y),
            Rule(plus(s(X), Y), s(plus(X, Y))),
            Rule(App('nats', (X,)), App(':', (X, App('nats', (s(X),))))),
        ],
    )
    assert trs.defined == ['+', 'nats']
    assert trs.constructors == ['0', 's', ':']
    assert trs.labels == ['r1', 'r2', 'r3']
    assert trs.rule('r2').lhs == plus(s(X), Y)
    assert [c.name for c in trs.constructors_of('Nat')] == ['0', 's']
    assert not trs.critical_pairs


def test_critical_pairs():
    a = App('a')
    b = App('b')
    sig = Signature([Symbol('a'), Symbol('b'), Symbol('f', ('U',))])
    trs = Trs(sig, [Rule(App('f', (a,)), b), Rule(a, b)])
    pairs = trs.critical_pairs
    assert len(pairs) == 1
    assert {pairs[0].left, pairs[0].right} == {b, App('f', (b,))}
