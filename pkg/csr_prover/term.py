# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Sorted first-order terms, positions, substitutions, rules and rewrite systems.

Terms are immutable values. A variable carries its sort, an application only its function symbol name: the sort of an
application is looked up in the :class:`Signature`.

Positions are tuples of 1-based argument indices, the empty tuple being the root.
"""

import functools
import itertools
import logging
import typing as t
from dataclasses import (
    dataclass,
)

from .constants import (
    ROOT_POSITION_STR,
    UNSORTED_SORT,
    SortKind,
    SymbolKind,
)
from .utils import (
    InvalidPosition,
    SignatureMismatch,
    SortMismatch,
)

LOGGER = logging.getLogger(__name__)

Position = t.Tuple[int, ...]
ROOT: Position = ()


@dataclass(frozen=True)
class Sort:
    name: str
    kind: SortKind = SortKind.DATA

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Symbol:
    name: str
    arg_sorts: t.Tuple[str, ...] = ()
    result_sort: str = UNSORTED_SORT

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


@dataclass(frozen=True)
class Var:
    name: str
    sort: str = UNSORTED_SORT

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    fun: str
    args: t.Tuple['Term', ...] = ()

    def __str__(self) -> str:
        return format_term(self)


Term = t.Union[Var, App]
Substitution = t.Dict[Var, Term]


class Signature:
    """
    Sorts and function symbols, both in declaration order.

    An unsorted signature has the single data sort ``U``.
    """

    def __init__(
        self,
        symbols: t.Iterable[Symbol],
        sorts: t.Optional[t.Iterable[Sort]] = None,
    ) -> None:
        self.is_sorted = sorts is not None
        if sorts is None:
            sorts = [Sort(UNSORTED_SORT, SortKind.DATA)]

        self.sorts: t.Dict[str, Sort] = {s.name: s for s in sorts}
        self.symbols: t.Dict[str, Symbol] = {}
        for sym in symbols:
            if sym.name in self.symbols:
                raise SignatureMismatch(f'Symbol "{sym.name}" declared twice')
            for s in (*sym.arg_sorts, sym.result_sort):
                if s not in self.sorts:
                    raise SortMismatch(f'Symbol "{sym.name}" uses undeclared sort "{s}"')
            self.symbols[sym.name] = sym

    def __contains__(self, name: object) -> bool:
        return name in self.symbols

    def __iter__(self) -> t.Iterator[Symbol]:
        return iter(self.symbols.values())

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Signature):
            return NotImplemented

        return (
            self.is_sorted == other.is_sorted
            and list(self.sorts.values()) == list(other.sorts.values())
            and list(self.symbols.values()) == list(other.symbols.values())
        )

    def __hash__(self) -> int:
        return hash((self.is_sorted, tuple(self.sorts.values()), tuple(self.symbols.values())))

    def __repr__(self) -> str:
        return f'Signature({", ".join(self.symbols)})'

    def symbol(self, name: str) -> Symbol:
        try:
            return self.symbols[name]
        except KeyError:
            raise SignatureMismatch(f'Unknown symbol "{name}"')

    def arity(self, name: str) -> int:
        return self.symbol(name).arity

    def sort_of(self, term: Term) -> str:
        if isinstance(term, Var):
            return term.sort

        return self.symbol(term.fun).result_sort

    def symbols_of_sort(self, sort: str) -> t.List[Symbol]:
        return [sym for sym in self.symbols.values() if sym.result_sort == sort]

    def is_data(self, sort: str) -> bool:
        return self.sorts[sort].kind == SortKind.DATA

    def check_term(self, term: Term) -> str:
        """
        Check arities and argument sorts of ``term``, return its sort.
        """
        if isinstance(term, Var):
            return term.sort

        sym = self.symbol(term.fun)
        if len(term.args) != sym.arity:
            raise SignatureMismatch(f'Symbol "{sym.name}" expects {sym.arity} arguments, got {len(term.args)}')

        for i, (arg, expected) in enumerate(zip(term.args, sym.arg_sorts), start=1):
            got = self.check_term(arg)
            if got != expected:
                raise SortMismatch(
                    f'Argument {i} of "{sym.name}" must be of sort {expected}, got "{format_term(arg)}" of sort {got}'
                )

        return sym.result_sort


#############
# Positions #
#############
def format_position(p: Position) -> str:
    if not p:
        return ROOT_POSITION_STR

    return '.'.join(str(i) for i in p)


def parse_position(s: str) -> Position:
    s = s.strip()
    if s in (ROOT_POSITION_STR, 'Λ', ''):
        return ROOT

    try:
        p = tuple(int(i) for i in s.split('.'))
    except ValueError:
        raise InvalidPosition(f'Invalid position "{s}"')

    if any(i < 1 for i in p):
        raise InvalidPosition(f'Invalid position "{s}"')

    return p


def is_prefix(p: Position, q: Position) -> bool:
    """p ≤ q"""
    return q[: len(p)] == p


def _walk(term: Term, prefix: Position = ROOT) -> t.Iterator[t.Tuple[Position, Term]]:
    yield prefix, term
    if isinstance(term, App):
        for i, arg in enumerate(term.args, start=1):
            yield from _walk(arg, (*prefix, i))


def positions(term: Term) -> t.List[Position]:
    """
    All positions of ``term``, in pre-order, which is the lexicographic order of positions.
    """
    return [p for p, _ in _walk(term)]


def positions_f(term: Term) -> t.List[Position]:
    return [p for p, s in _walk(term) if isinstance(s, App)]


def positions_x(term: Term) -> t.List[Position]:
    return [p for p, s in _walk(term) if isinstance(s, Var)]


def positions_of(s: Term, term: Term) -> t.List[Position]:
    return [p for p, u in _walk(term) if u == s]


def subterms(term: Term) -> t.Iterator[t.Tuple[Position, Term]]:
    return _walk(term)


def subterm_at(term: Term, p: Position) -> Term:
    cur = term
    for i in p:
        if not isinstance(cur, App) or not 1 <= i <= len(cur.args):
            raise InvalidPosition(f'Position {format_position(p)} is not valid for {format_term(term)}')
        cur = cur.args[i - 1]

    return cur


def replace_at(term: Term, p: Position, s: Term, signature: t.Optional[Signature] = None) -> Term:
    """
    ``term[s]_p``

    :param signature: when given, ``s`` must have the sort of the replaced subterm
    """
    if signature is not None:
        old_sort = signature.sort_of(subterm_at(term, p))
        new_sort = signature.sort_of(s)
        if old_sort != new_sort:
            raise SortMismatch(
                f'Cannot replace a subterm of sort {old_sort} by "{format_term(s)}" of sort {new_sort}'
            )

    if not p:
        return s

    if not isinstance(term, App) or not 1 <= p[0] <= len(term.args):
        raise InvalidPosition(f'Position {format_position(p)} is not valid for {format_term(term)}')

    i = p[0] - 1
    return App(term.fun, (*term.args[:i], replace_at(term.args[i], p[1:], s), *term.args[i + 1 :]))


#########
# Terms #
#########
def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name

    if not term.args:
        return term.fun

    return f'{term.fun}({",".join(format_term(a) for a in term.args)})'


def variables(term: Term) -> t.List[Var]:
    """Variables of ``term`` in left-to-right order, without repetitions."""
    res: t.Dict[Var, None] = {}
    for _, s in _walk(term):
        if isinstance(s, Var):
            res.setdefault(s, None)

    return list(res)


def variable_occurrences(term: Term) -> t.List[Var]:
    return [s for _, s in _walk(term) if isinstance(s, Var)]


def function_symbols(term: Term) -> t.List[str]:
    res: t.Dict[str, None] = {}
    for _, s in _walk(term):
        if isinstance(s, App):
            res.setdefault(s.fun, None)

    return list(res)


def is_linear(term: Term) -> bool:
    occurrences = variable_occurrences(term)
    return len(occurrences) == len(set(occurrences))


def is_ground(term: Term) -> bool:
    return not variable_occurrences(term)


def size(term: Term) -> int:
    if isinstance(term, Var):
        return 1

    return 1 + sum(size(a) for a in term.args)


def depth(term: Term) -> int:
    if isinstance(term, Var) or not term.args:
        return 0

    return 1 + max(depth(a) for a in term.args)


def root(term: Term) -> t.Optional[str]:
    return term.fun if isinstance(term, App) else None


#################
# Substitutions #
#################
def substitute(term: Term, sigma: t.Mapping[Var, Term]) -> Term:
    if isinstance(term, Var):
        return sigma.get(term, term)

    if not term.args:
        return term

    return App(term.fun, tuple(substitute(a, sigma) for a in term.args))


def compose(sigma: t.Mapping[Var, Term], tau: t.Mapping[Var, Term]) -> Substitution:
    """``tau ∘ sigma``: first ``sigma``, then ``tau``"""
    res: Substitution = {x: substitute(s, tau) for x, s in sigma.items()}
    for x, s in tau.items():
        res.setdefault(x, s)

    return {x: s for x, s in res.items() if s != x}


def format_substitution(sigma: t.Mapping[Var, Term]) -> str:
    return '{' + ', '.join(f'{x}↦{format_term(s)}' for x, s in sigma.items()) + '}'


def match(pattern: Term, subject: Term) -> t.Optional[Substitution]:
    """
    Find σ with σ(pattern) = subject.

    Non-linear patterns need consistent bindings. Variables of ``subject`` are treated as constants.

    :return: the matcher, or None if there is none
    """
    sigma: Substitution = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p)
            if bound is None:
                sigma[p] = s
            elif bound != s:
                return None
            continue

        if not isinstance(s, App) or s.fun != p.fun or len(s.args) != len(p.args):
            return None

        stack.extend(zip(p.args, s.args))

    return sigma


def occurs(x: Var, term: Term) -> bool:
    return any(s == x for _, s in _walk(term))


def unify(t1: Term, t2: Term) -> t.Optional[Substitution]:
    """
    Most general unifier, with occurs check.

    :return: the idempotent mgu, or None if the terms are not unifiable
    """
    sigma: Substitution = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = substitute(a, sigma)
        b = substitute(b, sigma)
        if a == b:
            continue

        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a

        if isinstance(a, Var):
            if occurs(a, b):
                return None
            binding = {a: b}
            sigma = {x: substitute(s, binding) for x, s in sigma.items()}
            sigma[a] = b
            continue

        assert isinstance(b, App)
        if a.fun != b.fun or len(a.args) != len(b.args):
            return None

        stack.extend(zip(a.args, b.args))

    return sigma


def rename(term: Term, suffix: str) -> Term:
    return substitute(term, {x: Var(x.name + suffix, x.sort) for x in variables(term)})


def is_variant(s: Term, u: Term) -> bool:
    """Equal up to a bijective renaming of variables"""
    sigma = match(s, u)
    if sigma is None:
        return False

    images = list(sigma.values())
    return all(isinstance(v, Var) for v in images) and len(set(images)) == len(images)


#########
# Rules #
#########
@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    label: str = ''

    def __post_init__(self) -> None:
        if isinstance(self.lhs, Var):
            raise SignatureMismatch(f'Left-hand side of rule {self} is a variable')

        extra = set(variables(self.rhs)) - set(variables(self.lhs))
        if extra:
            raise SignatureMismatch(
                f'Rule {self}: variables {", ".join(sorted(x.name for x in extra))} do not occur in the left-hand side'
            )

    def __str__(self) -> str:
        return f'{format_term(self.lhs)} -> {format_term(self.rhs)}'

    @property
    def root(self) -> str:
        assert isinstance(self.lhs, App)
        return self.lhs.fun

    @property
    def is_collapsing(self) -> bool:
        return isinstance(self.rhs, Var)

    def renamed(self, suffix: str) -> 'Rule':
        sigma = {x: Var(x.name + suffix, x.sort) for x in variables(self.lhs)}
        return Rule(substitute(self.lhs, sigma), substitute(self.rhs, sigma), self.label)


@dataclass(frozen=True)
class CriticalPair:
    outer: Rule
    inner: Rule
    position: Position
    peak: Term
    left: Term
    right: Term

    def __str__(self) -> str:
        return (
            f'<{format_term(self.left)}, {format_term(self.right)}> from {self.outer.label}/{self.inner.label} '
            f'at {format_position(self.position)} in {format_term(self.peak)}'
        )


class Trs:
    """
    A rewrite system over a signature.

    Defined symbols are the roots of left-hand sides, every other symbol of the signature is a constructor.
    Rules without label are labelled ``r1, r2, ...`` by their position.
    """

    def __init__(self, signature: Signature, rules: t.Iterable[Rule]) -> None:
        self.signature = signature

        labelled = []
        for i, rule in enumerate(rules, start=1):
            if not rule.label:
                rule = Rule(rule.lhs, rule.rhs, f'r{i}')
            for side in (rule.lhs, rule.rhs):
                signature.check_term(side)
            if signature.sort_of(rule.lhs) != signature.sort_of(rule.rhs):
                raise SortMismatch(f'Rule {rule.label}: both sides must have the same sort')
            labelled.append(rule)

        labels = [r.label for r in labelled]
        if len(set(labels)) != len(labels):
            raise SignatureMismatch('Rule labels must be unique')

        self.rules: t.List[Rule] = labelled

    def __repr__(self) -> str:
        return f'Trs({len(self.rules)} rules over {self.signature!r})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trs):
            return NotImplemented

        return self.signature == other.signature and self.rules == other.rules

    def __hash__(self) -> int:
        return hash((self.signature, tuple(self.rules)))

    @functools.cached_property
    def defined(self) -> t.List[str]:
        res: t.Dict[str, None] = {}
        for rule in self.rules:
            res.setdefault(rule.root, None)

        return list(res)

    @functools.cached_property
    def constructors(self) -> t.List[str]:
        defined = set(self.defined)
        return [name for name in self.signature.symbols if name not in defined]

    def kind_of(self, name: str) -> SymbolKind:
        self.signature.symbol(name)
        return SymbolKind.DEFINED if name in self.defined else SymbolKind.CONSTRUCTOR

    def is_constructor(self, name: str) -> bool:
        return self.kind_of(name) == SymbolKind.CONSTRUCTOR

    def constructors_of(self, sort: str) -> t.List[Symbol]:
        defined = set(self.defined)
        return [sym for sym in self.signature.symbols_of_sort(sort) if sym.name not in defined]

    def is_constructor_term(self, term: Term) -> bool:
        return all(self.is_constructor(f) for f in function_symbols(term))

    @property
    def lhss(self) -> t.List[Term]:
        return [r.lhs for r in self.rules]

    @property
    def labels(self) -> t.List[str]:
        return [r.label for r in self.rules]

    def rule(self, label: str) -> Rule:
        for r in self.rules:
            if r.label == label:
                return r

        raise SignatureMismatch(f'Unknown rule label "{label}"')

    def rules_for(self, name: str) -> t.List[Rule]:
        return [r for r in self.rules if r.root == name]

    @functools.cached_property
    def critical_pairs(self) -> t.List[CriticalPair]:
        return critical_pairs(self)


def critical_pairs(trs: Trs) -> t.List[CriticalPair]:
    """
    Critical pairs of ``trs``: for every pair of rules (renamed apart) and every non-variable position of the outer
    left-hand side where the inner left-hand side unifies, except the root overlap of a rule with itself.
    """
    res = []
    for outer, inner in itertools.product(trs.rules, repeat=2):
        o = outer.renamed("'")
        i = inner.renamed("''")
        for p in positions_f(o.lhs):
            if not p and outer is inner:
                continue

            sigma = unify(subterm_at(o.lhs, p), i.lhs)
            if sigma is None:
                continue

            peak = substitute(o.lhs, sigma)
            left = substitute(replace_at(o.lhs, p, i.rhs), sigma)
            right = substitute(o.rhs, sigma)
            res.append(CriticalPair(outer, inner, p, peak, left, right))

    return res

