# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Polynomial interpretations as termination certificates.

Text format, one interpretation per line, ``#`` starts a comment::

    zip(x1,x2) = x1 + 1
    :(x1,x2) = x1
    alt = 1

Polynomials are sympy expressions over the rationals.
"""

import logging
import typing as t
from dataclasses import (
    dataclass,
    field,
)
from fractions import (
    Fraction,
)

import sympy
from pyparsing import (
    DelimitedList,
    Group,
    OpAssoc,
    Opt,
    ParseBaseException,
    ParseFatalException,
    ParseResults,
    Regex,
    StringEnd,
    Suppress,
    Word,
    alphanums,
    alphas,
    infix_notation,
    one_of,
)

from ..repmap import (
    ReplacementMap,
)
from ..term import (
    Term,
    Trs,
    Var,
)
from ..utils import (
    InvalidCertificate,
    MissingInterpretation,
)

LOGGER = logging.getLogger(__name__)

Exponents = t.Tuple[int, ...]


def to_fraction(value: sympy.Expr) -> Fraction:
    """
    :raises ValueError: if ``value`` is not a rational number
    """
    if not value.is_Rational:
        raise ValueError(f'{value} is not a rational number')

    return Fraction(int(value.p), int(value.q))


def to_rational(value: t.Union[int, Fraction]) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def polynomial_terms(expr: sympy.Expr, gens: t.Sequence[sympy.Symbol]) -> t.Dict[Exponents, Fraction]:
    """
    Non-zero coefficients of ``expr`` seen as a polynomial over QQ in ``gens``, keyed by exponent vectors
    """
    if not gens:
        value = to_fraction(sympy.expand(expr))
        return {(): value} if value else {}

    poly = sympy.Poly(expr, *gens, domain=sympy.QQ)
    return {m: to_fraction(c) for m, c in poly.as_dict(native=False).items() if c != 0}


def _sorted_symbols(expr: sympy.Expr) -> t.List[sympy.Symbol]:
    return sorted(expr.free_symbols, key=lambda s: s.name)


def has_nonnegative_coefficients(expr: sympy.Expr) -> bool:
    return all(c >= 0 for c in polynomial_terms(expr, _sorted_symbols(expr)).values())


def _format_number(n: Fraction) -> str:
    if n.denominator == 1:
        return str(n.numerator)

    return f'{n.numerator}/{n.denominator}'


def format_polynomial(expr: sympy.Expr) -> str:
    """
    ``2*x1*x2 + 1/2*x2 + 1``: higher degree first, then by variable names, constant last.

    The output reads back through the certificate grammar.
    """
    gens = _sorted_symbols(expr)
    terms = []
    for exponents, c in polynomial_terms(expr, gens).items():
        monomial = tuple((g.name, e) for g, e in zip(gens, exponents) if e)
        terms.append((monomial, c))

    if not terms:
        return '0'

    terms.sort(key=lambda mc: (-sum(e for _, e in mc[0]), mc[0]))

    parts = []
    for monomial, c in terms:
        factors = [v if e == 1 else f'{v}^{e}' for v, e in monomial]
        mag = abs(c)
        if not factors:
            body = _format_number(mag)
        elif mag == 1:
            body = '*'.join(factors)
        else:
            body = '*'.join([_format_number(mag), *factors])
        parts.append(('-' if c < 0 else '+', body))

    first_sign, first_body = parts[0]
    text = ('-' if first_sign == '-' else '') + first_body
    for sign, body in parts[1:]:
        text += f' {sign} {body}'

    return text


###########
# Grammar #
###########
def _number(t: ParseResults) -> sympy.Rational:
    return sympy.Rational(t[0])


def _variable(t: ParseResults) -> sympy.Symbol:
    return sympy.Symbol(t[0])


def _power(t: ParseResults) -> sympy.Expr:
    tokens = t[0]
    res = tokens[-1]
    for base in reversed(tokens[:-1:2]):
        if not (res.is_Integer and res >= 0):
            raise ParseFatalException('', msg='exponents must be non-negative integers')
        res = base ** int(res)

    return res


def _negate(t: ParseResults) -> sympy.Expr:
    return -t[0][1]


def _product(t: ParseResults) -> sympy.Expr:
    tokens = t[0]
    res = tokens[0]
    for factor in tokens[2::2]:
        res = res * factor

    return res


def _sum(t: ParseResults) -> sympy.Expr:
    tokens = t[0]
    res = tokens[0]
    for op, operand in zip(tokens[1::2], tokens[2::2]):
        res = res + operand if op == '+' else res - operand

    return res


NUMBER = Regex(r'\d+(/[1-9]\d*)?').set_parse_action(_number)
VARIABLE_NAME = Word(alphas + '_', alphanums + '_')
VARIABLE = VARIABLE_NAME.copy().set_parse_action(_variable)

POLYNOMIAL = infix_notation(
    NUMBER | VARIABLE,
    [
        ('^', 2, OpAssoc.RIGHT, _power),
        ('-', 1, OpAssoc.RIGHT, _negate),
        ('*', 2, OpAssoc.LEFT, _product),
        (one_of('+ -'), 2, OpAssoc.LEFT, _sum),
    ],
)

SYMBOL = Regex(r'[^\s(),=#]+')
PARAMS = Suppress('(') + Opt(DelimitedList(VARIABLE_NAME)) + Suppress(')')
INTERPRETATION = SYMBOL('symbol') + Opt(Group(PARAMS))('params') + Suppress('=') + POLYNOMIAL('poly') + StringEnd()


@dataclass
class Interpretation:
    symbol: str
    params: t.Tuple[str, ...]
    polynomial: sympy.Expr

    def __post_init__(self) -> None:
        self.polynomial = sympy.expand(self.polynomial)

    @property
    def param_symbols(self) -> t.Tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(p) for p in self.params)

    def coefficients(self) -> t.Dict[Exponents, Fraction]:
        return polynomial_terms(self.polynomial, self.param_symbols)

    def linear_coefficient(self, i: int) -> Fraction:
        """
        Coefficient of the monomial made of parameter ``i`` (1-based) alone
        """
        exponents = tuple(1 if j == i else 0 for j in range(1, len(self.params) + 1))
        return self.coefficients().get(exponents, Fraction(0))

    def to_text(self) -> str:
        if not self.params:
            return f'{self.symbol} = {format_polynomial(self.polynomial)}'

        return f'{self.symbol}({",".join(self.params)}) = {format_polynomial(self.polynomial)}'

    def apply(self, args: t.Sequence[sympy.Expr]) -> sympy.Expr:
        # simultaneous, so argument polynomials may mention the parameter names
        return self.polynomial.xreplace(dict(zip(self.param_symbols, args)))


@dataclass
class Certificate:
    interpretations: t.Dict[str, Interpretation] = field(default_factory=dict)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.interpretations

    def __getitem__(self, symbol: str) -> Interpretation:
        try:
            return self.interpretations[symbol]
        except KeyError:
            raise MissingInterpretation(f'No interpretation for symbol "{symbol}"')

    def __len__(self) -> int:
        return len(self.interpretations)

    def add(self, interpretation: Interpretation) -> None:
        self.interpretations[interpretation.symbol] = interpretation

    @classmethod
    def from_text(cls, text: str, filepath: t.Optional[str] = None) -> 'Certificate':
        cert = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue

            try:
                res = INTERPRETATION.parse_string(line, parse_all=True)
            except ParseBaseException as e:
                raise InvalidCertificate(f'{filepath or "<string>"}:{lineno}:{e.col}: {e.msg}')

            params = tuple(res.get('params', []))
            if len(set(params)) != len(params):
                raise InvalidCertificate(f'{filepath or "<string>"}:{lineno}: repeated parameter name')

            poly = res['poly'][0] if isinstance(res['poly'], ParseResults) else res['poly']
            unknown = {s.name for s in poly.free_symbols} - set(params)
            if unknown:
                raise InvalidCertificate(
                    f'{filepath or "<string>"}:{lineno}: unknown variables {", ".join(sorted(unknown))}'
                )

            if res['symbol'] in cert:
                raise InvalidCertificate(f'{filepath or "<string>"}:{lineno}: symbol {res["symbol"]} interpreted twice')

            cert.add(Interpretation(res['symbol'], params, poly))

        return cert

    @classmethod
    def load(cls, filepath: str) -> 'Certificate':
        try:
            with open(filepath, encoding='utf-8') as fr:
                text = fr.read()
        except OSError as e:
            raise InvalidCertificate(f'Cannot read certificate "{filepath}": {e}')

        return cls.from_text(text, filepath)

    def to_text(self) -> str:
        return '\n'.join(i.to_text() for i in self.interpretations.values()) + '\n'

    def interpret(self, term: Term) -> sympy.Expr:
        if isinstance(term, Var):
            return sympy.Symbol(term.name)

        return self[term.fun].apply([self.interpret(arg) for arg in term.args])


@dataclass
class CertificateCheck:
    valid: bool
    diagnostics: t.List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


def check_certificate(trs: Trs, mu: ReplacementMap, cert: Certificate) -> CertificateCheck:
    """
    Verify that ``cert`` is a μ-monotone interpretation orienting every rule of ``trs`` strictly.

    - every coefficient of every interpretation is non-negative
    - the linear coefficient of each replacing argument is at least 1
    - all coefficients of ``[l] - [r] - 1`` are non-negative, for every rule ``l -> r``

    :raises MissingInterpretation: if some symbol of ``trs`` has no interpretation
    """
    diagnostics = []
    for sym in trs.signature:
        interp = cert[sym.name]
        if len(interp.params) != sym.arity:
            return CertificateCheck(
                False,
                [f'interpretation of {sym.name} has {len(interp.params)} parameters, the symbol has arity {sym.arity}'],
            )

        if any(c < 0 for c in interp.coefficients().values()):
            diagnostics.append(f'interpretation of {sym.name} has a negative coefficient')

        for i in sorted(mu[sym.name]):
            if interp.linear_coefficient(i) < 1:
                diagnostics.append(f'interpretation of {sym.name} is not monotone in replacing argument {i}')

    for rule in trs.rules:
        diff = sympy.expand(cert.interpret(rule.lhs) - cert.interpret(rule.rhs) - 1)
        if not has_nonnegative_coefficients(diff):
            diagnostics.append(
                f'rule {rule.label}: {rule} is not strictly decreasing, [l]-[r]-1 = {format_polynomial(diff)}'
            )

    if diagnostics:
        for d in diagnostics:
            LOGGER.debug(d)
        return CertificateCheck(False, diagnostics)

    return CertificateCheck(True)


def evaluate_term(cert: Certificate, term: Term, values: t.Mapping[str, t.Union[int, Fraction]]) -> Fraction:
    """
    Value of ``term`` under ``cert`` with its variables set to ``values``

    :raises ValueError: if some variable of ``term`` has no value
    """
    replacements = {sympy.Symbol(name): to_rational(v) for name, v in values.items()}
    return to_fraction(sympy.expand(cert.interpret(term).xreplace(replacements)))
