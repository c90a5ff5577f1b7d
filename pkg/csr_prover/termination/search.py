# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Search for μ-monotone polynomial interpretations.

Every symbol gets a template polynomial whose coefficients are unknowns. Interpreting a rule ``l -> r`` with the
templates and grouping ``[l] - [r] - 1`` by the monomials over the rule variables yields one constraint per monomial:
a polynomial in the unknowns that must be non-negative. Unknowns are assigned depth-first in ascending order, and
every constraint touching the unknown just assigned is bounded from above to prune.

Templates and constraints are built with sympy once per phase. The depth-first search runs on plain
:class:`~fractions.Fraction` coefficient tables extracted from them.
"""

import itertools
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

from ..constants import (
    DEFAULT_MAX_CANDIDATES,
    ProofStage,
)
from ..log import (
    stage,
)
from ..repmap import (
    ReplacementMap,
)
from ..term import (
    Term,
    Trs,
    Var,
    function_symbols,
    variables,
)
from ..utils import (
    Deadline,
)
from .certificate import (
    Certificate,
    Interpretation,
    check_certificate,
    polynomial_terms,
    to_rational,
)

LOGGER = logging.getLogger(__name__)

_COEFFICIENTS = tuple(Fraction(i) for i in range(4))


@dataclass(frozen=True)
class SearchPhase:
    name: str
    coefficients: t.Tuple[Fraction, ...] = _COEFFICIENTS
    constants: t.Tuple[Fraction, ...] = _COEFFICIENTS
    products: bool = False


PHASES: t.Tuple[SearchPhase, ...] = (
    SearchPhase('linear'),
    SearchPhase('products', products=True),
    SearchPhase(
        'rational',
        coefficients=(Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)),
        constants=tuple(Fraction(i) for i in range(7)),
    ),
)


@dataclass
class SearchStats:
    nodes: int = 0
    phases: t.List[str] = field(default_factory=list)
    exhausted: bool = False  # stopped by candidate count or deadline


def _unknown(symbol: str, monomial: str) -> sympy.Symbol:
    # a space never occurs in symbol or variable names
    return sympy.Symbol(f'{symbol} {monomial}')


class _Template:
    def __init__(self, trs: Trs, mu: ReplacementMap, phase: SearchPhase) -> None:
        self.params: t.Dict[str, t.Tuple[str, ...]] = {}
        self.polys: t.Dict[str, sympy.Expr] = {}
        self.domains: t.Dict[sympy.Symbol, t.Tuple[Fraction, ...]] = {}
        self.unknowns_of: t.Dict[str, t.List[sympy.Symbol]] = {}

        for sym in trs.signature:
            params = tuple(f'x{i}' for i in range(1, sym.arity + 1))
            xs = tuple(sympy.Symbol(p) for p in params)
            self.params[sym.name] = params

            const = _unknown(sym.name, '1')
            poly = const
            unknowns = [const]
            self.domains[const] = phase.constants
            for i, x in enumerate(xs, start=1):
                u = _unknown(sym.name, x.name)
                poly += u * x
                unknowns.append(u)
                if i in mu[sym.name]:
                    self.domains[u] = tuple(c for c in phase.coefficients if c >= 1)
                else:
                    self.domains[u] = phase.coefficients

            if phase.products:
                for xi, xj in itertools.combinations(xs, 2):
                    u = _unknown(sym.name, f'{xi.name}*{xj.name}')
                    poly += u * xi * xj
                    unknowns.append(u)
                    self.domains[u] = _COEFFICIENTS

            self.polys[sym.name] = poly
            self.unknowns_of[sym.name] = unknowns

    def interpret(self, term: Term) -> sympy.Expr:
        if isinstance(term, Var):
            return sympy.Symbol(term.name)

        args = [self.interpret(a) for a in term.args]
        params = (sympy.Symbol(p) for p in self.params[term.fun])
        return self.polys[term.fun].xreplace(dict(zip(params, args)))

    def instantiate(self, assignment: t.Mapping[sympy.Symbol, Fraction]) -> Certificate:
        cert = Certificate()
        for name, poly in self.polys.items():
            values = {u: to_rational(assignment[u]) for u in self.unknowns_of[name]}
            cert.add(Interpretation(name, self.params[name], poly.xreplace(values)))

        return cert


class _Constraint:
    """
    ``sum(coefficient * prod(unknown ** exponent)) >= 0``
    """

    def __init__(self, origin: str, monomials: t.Dict[t.Tuple[t.Tuple[sympy.Symbol, int], ...], Fraction]) -> None:
        self.origin = origin
        self.monomials = list(monomials.items())
        self.unknowns = {u for m, _ in self.monomials for u, _ in m}

    def upper_bound(
        self,
        assignment: t.Mapping[sympy.Symbol, Fraction],
        domains: t.Mapping[sympy.Symbol, t.Tuple[Fraction, ...]],
    ) -> Fraction:
        res = Fraction(0)
        for m, c in self.monomials:
            prod = c
            for u, e in m:
                if u in assignment:
                    v = assignment[u]
                else:
                    v = domains[u][-1] if c > 0 else domains[u][0]
                prod *= v**e
            res += prod

        return res


def _rule_constraints(template: _Template, lhs: Term, rhs: Term, origin: str) -> t.List[_Constraint]:
    """
    One constraint per monomial over the rule variables of ``[l] - [r] - 1``
    """
    diff = sympy.expand(template.interpret(lhs) - template.interpret(rhs) - 1)
    rule_vars = [sympy.Symbol(x.name) for x in variables(lhs)]
    unknowns = sorted(diff.free_symbols - set(rule_vars), key=lambda s: s.name)
    gens = [*rule_vars, *unknowns]

    grouped: t.Dict[t.Tuple[int, ...], t.Dict[t.Tuple[t.Tuple[sympy.Symbol, int], ...], Fraction]] = {}
    for exponents, c in polynomial_terms(diff, gens).items():
        outer = exponents[: len(rule_vars)]
        inner = tuple((u, e) for u, e in zip(unknowns, exponents[len(rule_vars) :]) if e)
        grouped.setdefault(outer, {})[inner] = c

    return [_Constraint(origin, monomials) for monomials in grouped.values()]


def _unknown_order(trs: Trs, template: _Template) -> t.List[sympy.Symbol]:
    def _weight(term_pair: t.Tuple[Term, Term]) -> int:
        return sum(len(function_symbols(s)) for s in term_pair)

    order: t.Dict[sympy.Symbol, None] = {}
    for rule in sorted(trs.rules, key=lambda r: _weight((r.lhs, r.rhs))):
        for side in (rule.lhs, rule.rhs):
            for f in function_symbols(side):
                for u in template.unknowns_of[f]:
                    order.setdefault(u, None)

    for f in template.unknowns_of:
        for u in template.unknowns_of[f]:
            order.setdefault(u, None)

    return list(order)


def _search_phase(
    trs: Trs,
    mu: ReplacementMap,
    phase: SearchPhase,
    stats: SearchStats,
    max_candidates: int,
    deadline: Deadline,
) -> t.Optional[Certificate]:
    template = _Template(trs, mu, phase)

    constraints = []
    for rule in trs.rules:
        constraints.extend(_rule_constraints(template, rule.lhs, rule.rhs, rule.label))

    for c in constraints:
        if not c.unknowns and c.upper_bound({}, {}) < 0:
            LOGGER.debug('Rule %s cannot be oriented by any interpretation', c.origin)
            return None

    order = _unknown_order(trs, template)
    constrained = set().union(*(c.unknowns for c in constraints)) if constraints else set()
    fixed = {u: template.domains[u][0] for u in order if u not in constrained}
    free = [u for u in order if u in constrained]
    touching: t.Dict[sympy.Symbol, t.List[_Constraint]] = {u: [] for u in free}
    for c in constraints:
        for u in c.unknowns:
            touching[u].append(c)

    assignment: t.Dict[sympy.Symbol, Fraction] = dict(fixed)

    def _dfs(k: int) -> bool:
        if k == len(free):
            return True

        u = free[k]
        for v in template.domains[u]:
            stats.nodes += 1
            if stats.nodes >= max_candidates or (stats.nodes % 1024 == 0 and deadline.expired()):
                stats.exhausted = True
                return False

            assignment[u] = v
            if all(c.upper_bound(assignment, template.domains) >= 0 for c in touching[u]):
                if _dfs(k + 1):
                    return True
                if stats.exhausted:
                    return False

        del assignment[u]
        return False

    if not _dfs(0):
        return None

    return template.instantiate(assignment)


def find_certificate(
    trs: Trs,
    mu: ReplacementMap,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    deadline: t.Optional[Deadline] = None,
    phases: t.Sequence[SearchPhase] = PHASES,
    stats: t.Optional[SearchStats] = None,
) -> t.Optional[Certificate]:
    """
    Search a μ-monotone polynomial interpretation orienting every rule of ``trs``, phase by phase.

    :param max_candidates: cap on the number of coefficient assignments tried, over all phases
    :param deadline: wall-clock budget
    :return: a certificate which passed :func:`check_certificate`, or None
    """
    deadline = deadline or Deadline(None)
    stats = stats if stats is not None else SearchStats()
    extra = stage(ProofStage.CERTIFICATE_SEARCH)

    for phase in phases:
        if stats.exhausted or deadline.expired():
            stats.exhausted = True
            break

        stats.phases.append(phase.name)
        LOGGER.info('Searching %s interpretations', phase.name, extra=extra)
        cert = _search_phase(trs, mu, phase, stats, max_candidates, deadline)
        LOGGER.debug('%s candidates visited so far', stats.nodes, extra=extra)
        if cert is None:
            continue

        check = check_certificate(trs, mu, cert)
        if check.valid:
            LOGGER.info('Found a certificate in phase %s', phase.name, extra=extra)
            return cert

        # unreachable as long as constraints and the checker agree
        LOGGER.error('Discarding a candidate rejected by the checker: %s', '; '.join(check.diagnostics), extra=extra)

    return None
