# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import os
from fractions import (
    Fraction,
)

import pytest
import sympy

from csr_prover.constants import (
    TerminationKind,
)
from csr_prover.repmap import (
    ReplacementMap,
    canonical_map,
    zr10_map,
)
from csr_prover.term import (
    format_term,
)
from csr_prover.termination import (
    PHASES,
    Certificate,
    LoopBounds,
    SearchBudget,
    SearchStats,
    check_certificate,
    find_certificate,
    find_loop,
    format_polynomial,
    polynomial_terms,
    prove,
    replay_loop,
    unroll_loop,
)
from csr_prover.utils import (
    InvalidCertificate,
    MissingInterpretation,
)


def _cert(corpus_dir, name):
    return Certificate.load(os.path.join(corpus_dir, name))


class TestPolynomialText:
    def test_format(self):
        x, y = sympy.symbols('x y')
        assert format_polynomial((x + 1) * (y + 2)) == 'x*y + 2*x + y + 2'
        assert format_polynomial(x**2) == 'x^2'
        assert format_polynomial(x - 1) == 'x - 1'
        assert format_polynomial(-x + 3 * y**2) == '3*y^2 - x'
        assert format_polynomial(sympy.Integer(0)) == '0'

    def test_terms(self):
        x, y = sympy.symbols('x y')
        p = sympy.expand((2 * x + sympy.Rational(1, 2)).xreplace({x: y + 1}))
        assert format_polynomial(p) == '2*y + 5/2'
        assert polynomial_terms(p, [y]) == {(1,): Fraction(2), (0,): Fraction(5, 2)}
        assert polynomial_terms(x * y - x * y, [x, y]) == {}
        assert polynomial_terms(sympy.Rational(3, 4), []) == {(): Fraction(3, 4)}

    def test_interpretation_coefficients(self):
        cert = Certificate.from_text('f(x,y) = x*y + 2*x + 1/2\ng(x) = x - 1\n')
        assert cert['f'].linear_coefficient(1) == 2
        assert cert['f'].linear_coefficient(2) == 0
        assert cert['f'].coefficients()[(1, 1)] == 1
        assert any(c < 0 for c in cert['g'].coefficients().values())
        assert Certificate.from_text('h(x) = (x+1)^2')['h'].to_text() == 'h(x) = x^2 + 2*x + 1'

    def test_apply_is_simultaneous(self):
        x, y = sympy.symbols('x y')
        interp = Certificate.from_text('f(x,y) = 2*x + y')['f']
        assert format_polynomial(interp.apply([y, x])) == 'x + 2*y'

    def test_non_integer_exponent(self):
        with pytest.raises(InvalidCertificate, match='exponents must be non-negative integers'):
            Certificate.from_text('f(x) = x^(1/2)')


class TestCertificate:
    def test_parse(self):
        cert = Certificate.from_text(
            """
# comment
zip(x,y) = x + 1
:(x,y) = x   # trailing comment
alt = 1
half(x) = 1/2*x
"""
        )
        assert len(cert) == 4
        assert cert['zip'].params == ('x', 'y')
        assert cert['alt'].to_text() == 'alt = 1'
        assert cert['half'].to_text() == 'half(x) = 1/2*x'
        assert ':' in cert

        with pytest.raises(MissingInterpretation, match='No interpretation for symbol "p"'):
            cert['p']

    @pytest.mark.parametrize(
        'text, msg',
        [
            ('f(x) = y', 'unknown variables y'),
            ('f(x,x) = x', 'repeated parameter name'),
            ('f = 1\nf = 2', 'symbol f interpreted twice'),
            ('f(x) = x +', '<string>:1:'),
        ],
    )
    def test_invalid(self, text, msg):
        with pytest.raises(InvalidCertificate) as e:
            Certificate.from_text(text)
        assert msg in str(e.value.code)

    def test_round_trip(self, corpus_dir):
        cert = _cert(corpus_dir, 'ordinals.cert')
        again = Certificate.from_text(cert.to_text())
        assert again.to_text() == cert.to_text()

    @pytest.mark.parametrize(
        'name, cert_fn',
        [
            ('ordinals', 'ordinals.cert'),
            ('zip_alt_p', 'zip_alt_p.cert'),
        ],
    )
    def test_shipped_certificates(self, request, corpus_dir, name, cert_fn):
        spec = request.getfixturevalue(name)
        cert = _cert(corpus_dir, cert_fn)
        assert check_certificate(spec.trs, spec.strategy, cert).valid

        top = ReplacementMap.top(spec.trs.signature)
        check = check_certificate(spec.trs, top, cert)
        assert not check.valid
        assert any('not monotone' in d for d in check.diagnostics)

    def test_rational_certificate(self, ex5_3_shallow, corpus_dir):
        cert = _cert(corpus_dir, 'ex5_3_shallow.cert')
        assert check_certificate(ex5_3_shallow.trs, canonical_map(ex5_3_shallow.trs), cert).valid

    def test_rule_diagnostics(self, zip_alt_p):
        cert = Certificate.from_text('0 = 0\n1 = 0\n:(x,y) = x\nzip(x,y) = x + 1\nalt = 1\np = 1\n')
        check = check_certificate(zip_alt_p.trs, zip_alt_p.strategy, cert)
        assert not check.valid
        assert check.diagnostics == ['rule r1: p -> zip(alt,p) is not strictly decreasing, [l]-[r]-1 = -2']

    def test_missing_interpretation(self, zip_alt_p):
        with pytest.raises(MissingInterpretation):
            check_certificate(zip_alt_p.trs, zip_alt_p.strategy, Certificate.from_text('p = 1'))


class TestSearch:
    def test_find_linear_certificate(self, zip_alt_p):
        stats = SearchStats()
        cert = find_certificate(zip_alt_p.trs, zip_alt_p.strategy, stats=stats)
        assert cert is not None
        assert check_certificate(zip_alt_p.trs, zip_alt_p.strategy, cert).valid
        assert stats.phases == ['linear']
        assert stats.nodes > 0

    def test_candidate_cap(self, zip_alt_p):
        stats = SearchStats()
        top = ReplacementMap.top(zip_alt_p.trs.signature)
        assert find_certificate(zip_alt_p.trs, top, max_candidates=1, stats=stats) is None
        assert stats.exhausted

    def test_phases(self):
        assert [p.name for p in PHASES] == ['linear', 'products', 'rational']


class TestLoops:
    def test_loop_of_ex5_3(self, ex5_3):
        mu = canonical_map(ex5_3.trs)
        loop = find_loop(ex5_3.trs, mu)
        assert loop is not None
        assert format_term(loop.start) == 's'
        assert loop.reentry == (2,)
        assert format_term(loop.end) == ':(b,s)'
        assert replay_loop(ex5_3.trs, mu, loop)

        steps = unroll_loop(ex5_3.trs, mu, loop, 3)
        assert [s.position for s in steps] == [(), (2,), (2, 2)]
        assert format_term(steps[-1].after) == ':(b,:(b,:(b,s)))'

    def test_no_loop_below_frozen_argument(self, ex5_3):
        bottom = ReplacementMap.bottom(ex5_3.trs.signature)
        assert find_loop(ex5_3.trs, bottom) is None

    def test_tampered_loop_does_not_replay(self, ex5_3):
        mu = canonical_map(ex5_3.trs)
        loop = find_loop(ex5_3.trs, mu)
        loop.reentry = (1,)
        assert not replay_loop(ex5_3.trs, mu, loop)

        # the re-entry must stay replacing
        loop.reentry = (2,)
        assert not replay_loop(ex5_3.trs, ReplacementMap.bottom(ex5_3.trs.signature), loop)

    def test_zr10_loop(self, zip_alt_p):
        loop = find_loop(zip_alt_p.trs, zr10_map(zip_alt_p.trs), LoopBounds(max_depth=4))
        assert loop is not None
        assert format_term(loop.start) == 'p'
        assert 'reentry: 2' in loop.to_text()


class TestProve:
    def test_given_certificate(self, ordinals, corpus_dir):
        cert = _cert(corpus_dir, 'ordinals.cert')
        outcome = prove(ordinals.trs, ordinals.strategy, certificate=cert)
        assert outcome.kind == TerminationKind.TERMINATING
        assert outcome.reason == 'given certificate'
        assert outcome.verify(ordinals.trs, ordinals.strategy)

    def test_invalid_certificate_falls_back(self, ex5_3, corpus_dir):
        mu = canonical_map(ex5_3.trs)
        outcome = prove(ex5_3.trs, mu, certificate=_cert(corpus_dir, 'ex5_3_shallow.cert'))
        assert outcome.kind == TerminationKind.NONTERMINATING
        assert outcome.loop is not None
        assert outcome.verify(ex5_3.trs, mu)

    def test_search(self, zip_alt_p):
        outcome = prove(zip_alt_p.trs, zip_alt_p.strategy, SearchBudget(budget_ms=None))
        assert outcome.is_terminating
        assert outcome.reason == 'polynomial interpretation (linear)'

    def test_unknown(self):
        from csr_prover.trs import (
            parse_spec,
        )

        # terminating, but the search gives up after one candidate
        spec = parse_spec(
            """
(SORTS (Nat data))
(SIG (0 -> Nat) (s Nat -> Nat) (f Nat Nat -> Nat))
(VAR x y)
(RULES f(s(x),y) -> f(x,s(s(s(s(s(s(s(s(y))))))))))
"""
        )
        outcome = prove(spec.trs, ReplacementMap.top(spec.trs.signature), SearchBudget(max_candidates=1))
        assert outcome.kind == TerminationKind.UNKNOWN
        assert 'certificate search budget exhausted' in outcome.reason
        assert outcome.verify(spec.trs, ReplacementMap.top(spec.trs.signature))
