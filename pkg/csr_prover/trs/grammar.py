# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
pyparsing grammar of the ``.trs`` file format.

A file is a sequence of parenthesized blocks::

    (SORTS (Nat data) (Str codata))
    (SIG (0 -> Nat) (s Nat -> Nat) (: Nat Str -> Str) (nats Nat -> Str))
    (VAR x (sigma Str))
    (RULES
      nats(x) -> :(x,nats(s(x)))
    )
    (STRATEGY CONTEXTSENSITIVE (s 1) (nats 1))
    (COMMENT free text)

Terms are written in prefix form, ``f(t1,...,tk)``, constants without parentheses. The arrow ``->`` must be surrounded
by whitespace.
"""

import typing as t
from dataclasses import (
    dataclass,
)

from pyparsing import (
    DelimitedList,
    Forward,
    Group,
    Keyword,
    Opt,
    ParseBaseException,
    ParseFatalException,
    ParseResults,
    Regex,
    StringEnd,
    Suppress,
    Word,
    ZeroOrMore,
    col,
    lineno,
    nested_expr,
    nums,
    one_of,
)

from ..utils import (
    InvalidInput,
    InvalidSpecFile,
)


@dataclass(frozen=True)
class RawTerm:
    """A term as written, before symbols and variables are told apart"""

    name: str
    args: t.Tuple['RawTerm', ...]
    loc: int


@dataclass(frozen=True)
class RawRule:
    lhs: RawTerm
    rhs: RawTerm
    loc: int


@dataclass(frozen=True)
class Decl:
    """
    One entry of a SORTS, SIG, VAR or STRATEGY block

    - SORTS: ``(name kind)``, ``values`` holds the kind
    - SIG: ``(name A B -> R)``, ``values`` holds the argument sorts then the result sort
    - SIG without sorts: ``(name arity)``
    - VAR: ``name`` or ``(name sort)``
    - STRATEGY: ``(name i j ...)``
    """

    name: str
    values: t.Tuple[str, ...]
    loc: int


@dataclass(frozen=True)
class Block:
    kind: str
    items: t.Tuple[t.Any, ...]
    loc: int


def _location(text: str, loc: int) -> t.Tuple[int, int]:
    return lineno(loc, text), col(loc, text)


###########
# Grammar #
###########
LPAR = Suppress('(')
RPAR = Suppress(')')
ARROW = Suppress(Regex(r'->(?=[\s(),]|$)'))
IDENT = Regex(r'(?!->(?:[\s(),]|$))[^\s(),]+')
NUMBER = Word(nums)


def _make_term(s: str, loc: int, toks: ParseResults) -> RawTerm:  # noqa: ARG001
    args = tuple(toks[1]) if len(toks) > 1 else ()
    return RawTerm(toks[0], args, loc)


def _make_rule(s: str, loc: int, toks: ParseResults) -> RawRule:  # noqa: ARG001
    return RawRule(toks[0], toks[1], loc)


def _make_decl(s: str, loc: int, toks: ParseResults) -> Decl:  # noqa: ARG001
    return Decl(toks[0], tuple(toks[1:]), loc)


def _block(kind: str) -> t.Callable[[str, int, ParseResults], Block]:
    def _action(s: str, loc: int, toks: ParseResults) -> Block:  # noqa: ARG001
        return Block(kind, tuple(toks), loc)

    return _action


def _unknown_block(s: str, loc: int, toks: ParseResults) -> None:
    raise ParseFatalException(s, loc, f'unknown block "{toks[0]}"')


TERM = Forward()
TERM <<= (IDENT + Opt(Group(LPAR + Opt(DelimitedList(TERM)) + RPAR))).set_parse_action(_make_term)

RULE = (TERM + ARROW + TERM).set_parse_action(_make_rule)

SORT_DECL = (LPAR + IDENT + Opt(one_of('data codata')) + RPAR).set_parse_action(
    _make_decl
) | IDENT.copy().set_parse_action(_make_decl)
SIG_DECL = (
    LPAR + IDENT + ZeroOrMore(IDENT) + ARROW + IDENT + RPAR
    | LPAR + IDENT + NUMBER + RPAR  # unsorted: (f arity)
).set_parse_action(_make_decl)
VAR_DECL = (LPAR + IDENT + IDENT + RPAR).set_parse_action(_make_decl) | IDENT.copy().set_parse_action(_make_decl)
MAP_ENTRY = (LPAR + IDENT + ZeroOrMore(NUMBER) + RPAR).set_parse_action(_make_decl)

SORTS_BLOCK = (LPAR + Suppress(Keyword('SORTS')) - ZeroOrMore(SORT_DECL) + RPAR).set_parse_action(_block('SORTS'))
SIG_BLOCK = (LPAR + Suppress(Keyword('SIG')) - ZeroOrMore(SIG_DECL) + RPAR).set_parse_action(_block('SIG'))
VAR_BLOCK = (LPAR + Suppress(Keyword('VAR')) - ZeroOrMore(VAR_DECL) + RPAR).set_parse_action(_block('VAR'))
RULES_BLOCK = (LPAR + Suppress(Keyword('RULES')) - ZeroOrMore(RULE) + RPAR).set_parse_action(_block('RULES'))
STRATEGY_BLOCK = (
    LPAR + Suppress(Keyword('STRATEGY')) + Suppress(Keyword('CONTEXTSENSITIVE')) - ZeroOrMore(MAP_ENTRY) + RPAR
).set_parse_action(_block('STRATEGY'))
BLOCK_KINDS = 'SORTS SIG VAR RULES STRATEGY COMMENT'
COMMENT_BLOCK = (
    LPAR + Suppress(Keyword('COMMENT')) + ZeroOrMore(nested_expr() | Regex(r'[^()]+')) + RPAR
).set_parse_action(lambda s, loc, toks: Block('COMMENT', (), loc))
UNKNOWN_BLOCK = (LPAR + ~one_of(BLOCK_KINDS, as_keyword=True) + IDENT).set_parse_action(_unknown_block)

SPEC_FILE = (
    ZeroOrMore(SORTS_BLOCK | SIG_BLOCK | VAR_BLOCK | RULES_BLOCK | STRATEGY_BLOCK | COMMENT_BLOCK | UNKNOWN_BLOCK)
    + StringEnd()
)
MAP_TEXT = ZeroOrMore(MAP_ENTRY) + StringEnd()


def parse_blocks(text: str, filepath: t.Optional[str] = None) -> t.List[Block]:
    try:
        return list(SPEC_FILE.parse_string(text, parse_all=True))
    except ParseBaseException as e:
        raise InvalidSpecFile(e.msg, filepath, e.lineno, e.col)


def parse_raw_term(text: str) -> RawTerm:
    try:
        return (TERM + StringEnd()).parse_string(text.strip(), parse_all=True)[0]
    except ParseBaseException as e:
        raise InvalidInput(f'Invalid term "{text}": {e.msg} at column {e.col}')


def parse_map_entries(text: str) -> t.Dict[str, t.List[int]]:
    """
    ``(f 1 2) (g)`` -> ``{'f': [1, 2], 'g': []}``
    """
    try:
        decls = MAP_TEXT.parse_string(text, parse_all=True)
    except ParseBaseException as e:
        raise InvalidInput(f'Invalid replacement map "{text}": {e.msg} at column {e.col}')

    res: t.Dict[str, t.List[int]] = {}
    for d in decls:
        res.setdefault(d.name, []).extend(int(i) for i in d.values)

    return res


def location_of(text: str, loc: int) -> t.Tuple[int, int]:
    """(line, column) of the character offset ``loc``"""
    return _location(text, loc)
