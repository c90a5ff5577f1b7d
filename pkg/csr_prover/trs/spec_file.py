# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Loading and printing ``.trs`` files.

Two modes are supported:

- sorted, when the file has a ``SORTS`` block: every symbol is declared in ``SIG`` as ``(f A B -> R)``. Variables may
  carry a sort in ``VAR``, otherwise their sort is inferred from their argument positions, rule by rule.
- unsorted: symbols and arities are taken from the rules (or ``(f arity)`` entries in ``SIG``), everything is of the
  single data sort ``U``.
"""

import logging
import os
import typing as t
from dataclasses import (
    dataclass,
)

from ..constants import (
    UNSORTED_SORT,
    SortKind,
)
from ..repmap import (
    ReplacementMap,
    canonical_map,
    mu_delta,
    zr10_map,
)
from ..term import (
    App,
    Rule,
    Signature,
    Sort,
    Symbol,
    Term,
    Trs,
    Var,
    format_term,
    variables,
)
from ..utils import (
    CsrError,
    InvalidInput,
    InvalidSpecFile,
)
from .grammar import (
    Block,
    RawRule,
    RawTerm,
    location_of,
    parse_blocks,
    parse_raw_term,
)

LOGGER = logging.getLogger(__name__)


@dataclass
class SpecFile:
    trs: Trs
    strategy: t.Optional[ReplacementMap] = None
    filepath: t.Optional[str] = None
    text: t.Optional[str] = None

    @property
    def name(self) -> str:
        if self.filepath:
            return os.path.splitext(os.path.basename(self.filepath))[0]

        return '<string>'

    def to_text(self) -> str:
        return print_spec(self.trs, self.strategy)

    def resolve_map(self, name: t.Optional[str] = None) -> ReplacementMap:
        """
        The replacement map called ``name``

        - ``strategy``: the STRATEGY block of the file
        - ``canonical``, ``delta``, ``canonical+delta``, ``top``, ``bottom``, ``zr10``
        - ``file:PATH``: a file holding a map in the ``(f 1 2) (g 1)`` form

        Without a name, the STRATEGY block if any, else ``canonical``.
        """
        sig = self.trs.signature
        if name is None:
            return self.strategy if self.strategy is not None else canonical_map(self.trs)

        if name == 'strategy':
            if self.strategy is None:
                raise InvalidInput(f'{self.filepath or "<string>"} has no STRATEGY block')
            return self.strategy

        if name.startswith('file:'):
            path = name[len('file:') :]
            try:
                with open(path, encoding='utf-8') as fr:
                    text = fr.read()
            except OSError as e:
                raise InvalidInput(f'Cannot read replacement map "{path}": {e}')
            try:
                return ReplacementMap.from_text(sig, text)
            except CsrError as e:
                raise InvalidInput(f'{path}: {e}')

        builders: t.Dict[str, t.Callable[[], ReplacementMap]] = {
            'canonical': lambda: canonical_map(self.trs),
            'delta': lambda: mu_delta(self.trs),
            'canonical+delta': lambda: canonical_map(self.trs) | mu_delta(self.trs),
            'top': lambda: ReplacementMap.top(sig),
            'bottom': lambda: ReplacementMap.bottom(sig),
            'zr10': lambda: zr10_map(self.trs),
        }
        if name not in builders:
            raise InvalidInput(f'Unknown replacement map "{name}", choose from {", ".join([*builders, "strategy"])}')

        try:
            return builders[name]()
        except CsrError as e:
            raise InvalidInput(f'Cannot build map "{name}": {e}')


class _Loader:
    def __init__(self, text: str, filepath: t.Optional[str]) -> None:
        self.text = text
        self.filepath = filepath

        self.sorts: t.Optional[t.List[Sort]] = None
        self.symbols: t.Dict[str, Symbol] = {}
        self.var_sorts: t.Dict[str, t.Optional[str]] = {}

    def error(self, msg: str, loc: int) -> InvalidSpecFile:
        line, col = location_of(self.text, loc)
        return InvalidSpecFile(msg, self.filepath, line, col)

    def _blocks(self, blocks: t.List[Block], kind: str) -> t.List[Block]:
        res = [b for b in blocks if b.kind == kind]
        if len(res) > 1 and kind != 'COMMENT':
            raise self.error(f'duplicated {kind} block', res[1].loc)

        return res

    #########
    # Decls #
    #########
    def load_sorts(self, block: Block) -> None:
        self.sorts = []
        seen = set()
        for d in block.items:
            if d.name in seen:
                raise self.error(f'sort "{d.name}" declared twice', d.loc)
            seen.add(d.name)
            kind = SortKind(d.values[0]) if d.values else SortKind.DATA
            self.sorts.append(Sort(d.name, kind))

    def load_sig(self, block: Block) -> None:
        sort_names = {s.name for s in self.sorts or []}
        for d in block.items:
            if d.name in self.symbols:
                raise self.error(f'symbol "{d.name}" declared twice', d.loc)

            if len(d.values) == 1 and d.values[0].isdigit() and d.values[0] not in sort_names:
                if self.sorts is not None:
                    raise self.error(f'symbol "{d.name}" needs argument and result sorts in a sorted file', d.loc)
                self.symbols[d.name] = Symbol(d.name, (UNSORTED_SORT,) * int(d.values[0]), UNSORTED_SORT)
                continue

            if self.sorts is None:
                raise self.error(f'symbol "{d.name}" is declared with sorts but the file has no SORTS block', d.loc)

            for s in d.values:
                if s not in sort_names:
                    raise self.error(f'unknown sort "{s}" in the declaration of "{d.name}"', d.loc)
            self.symbols[d.name] = Symbol(d.name, tuple(d.values[:-1]), d.values[-1])

    def load_vars(self, block: Block) -> None:
        for d in block.items:
            if d.name in self.var_sorts:
                raise self.error(f'variable "{d.name}" declared twice', d.loc)
            if d.name in self.symbols:
                raise self.error(f'"{d.name}" is declared both as a variable and as a symbol', d.loc)

            sort = d.values[0] if d.values else None
            if sort is not None:
                if self.sorts is None:
                    raise self.error(f'variable "{d.name}" has a sort but the file has no SORTS block', d.loc)
                if sort not in {s.name for s in self.sorts}:
                    raise self.error(f'unknown sort "{sort}" of variable "{d.name}"', d.loc)
            elif self.sorts is None:
                sort = UNSORTED_SORT
            self.var_sorts[d.name] = sort

    def infer_symbols(self, rules: t.Sequence[RawRule]) -> None:
        """Unsorted mode, every non-variable identifier is a symbol of the arity it is used with"""

        def _visit(raw: RawTerm) -> None:
            if raw.name in self.var_sorts:
                return

            arity = len(raw.args)
            sym = self.symbols.get(raw.name)
            if sym is None:
                self.symbols[raw.name] = Symbol(raw.name, (UNSORTED_SORT,) * arity, UNSORTED_SORT)
            elif sym.arity != arity:
                raise self.error(f'symbol "{raw.name}" used with {arity} arguments, expected {sym.arity}', raw.loc)

            for arg in raw.args:
                _visit(arg)

        for rule in rules:
            _visit(rule.lhs)
            _visit(rule.rhs)

    #########
    # Terms #
    #########
    def _collect_var_sorts(self, raw: RawTerm, expected: t.Optional[str], found: t.Dict[str, t.Tuple[str, int]]) -> None:
        if raw.name in self.var_sorts:
            if raw.args:
                raise self.error(f'variable "{raw.name}" applied to arguments', raw.loc)
            if expected is None:
                return

            prev = found.get(raw.name)
            if prev is not None and prev[0] != expected:
                raise self.error(
                    f'variable "{raw.name}" used with sorts {prev[0]} and {expected} in the same rule', raw.loc
                )
            found[raw.name] = (expected, raw.loc)
            return

        sym = self.symbols.get(raw.name)
        if sym is None:
            raise self.error(f'unknown symbol "{raw.name}"', raw.loc)
        if len(raw.args) != sym.arity:
            raise self.error(f'symbol "{raw.name}" expects {sym.arity} arguments, got {len(raw.args)}', raw.loc)

        for arg, s in zip(raw.args, sym.arg_sorts):
            self._collect_var_sorts(arg, s, found)

    def rule_var_sorts(self, rule: RawRule) -> t.Dict[str, str]:
        found: t.Dict[str, t.Tuple[str, int]] = {}
        lhs_sort = None if rule.lhs.name in self.var_sorts else self.symbols.get(rule.lhs.name)
        self._collect_var_sorts(rule.lhs, None, found)
        self._collect_var_sorts(rule.rhs, lhs_sort.result_sort if isinstance(lhs_sort, Symbol) else None, found)

        res = {}
        for name, (sort, loc) in found.items():
            declared = self.var_sorts[name]
            if declared is not None and declared != sort:
                raise self.error(f'variable "{name}" is declared of sort {declared} but used with sort {sort}', loc)
            res[name] = sort

        return res

    def build_term(self, raw: RawTerm, var_sorts: t.Mapping[str, str]) -> Term:
        if raw.name in self.var_sorts:
            sort = var_sorts.get(raw.name) or self.var_sorts[raw.name]
            if sort is None:
                raise self.error(f'cannot infer the sort of variable "{raw.name}"', raw.loc)
            return Var(raw.name, sort)

        return App(raw.name, tuple(self.build_term(a, var_sorts) for a in raw.args))

    #########
    # Entry #
    #########
    def load(self) -> SpecFile:
        blocks = parse_blocks(self.text, self.filepath)

        for b in self._blocks(blocks, 'SORTS'):
            self.load_sorts(b)
        for b in self._blocks(blocks, 'SIG'):
            self.load_sig(b)
        if self.sorts is not None and not self.symbols:
            raise self.error('a sorted file needs a SIG block', self._blocks(blocks, 'SORTS')[0].loc)
        for b in self._blocks(blocks, 'VAR'):
            self.load_vars(b)

        raw_rules: t.List[RawRule] = []
        for b in self._blocks(blocks, 'RULES'):
            raw_rules.extend(b.items)

        if self.sorts is None:
            self.infer_symbols(raw_rules)

        try:
            signature = Signature(self.symbols.values(), self.sorts)
        except CsrError as e:
            raise self.error(str(e), blocks[0].loc if blocks else 0)

        rules = []
        for i, raw in enumerate(raw_rules, start=1):
            var_sorts = self.rule_var_sorts(raw)
            try:
                lhs = self.build_term(raw.lhs, var_sorts)
                rhs = self.build_term(raw.rhs, var_sorts)
                rule = Rule(lhs, rhs, f'r{i}')
                Trs(signature, [rule])
            except CsrError as e:
                raise self.error(str(e), raw.loc)
            rules.append(rule)

        trs = Trs(signature, rules)

        strategy = None
        for b in self._blocks(blocks, 'STRATEGY'):
            strategy = self.load_strategy(b, signature)

        LOGGER.debug(
            'Loaded %s rules over %s symbols from %s', len(rules), len(signature), self.filepath or '<string>'
        )
        return SpecFile(trs, strategy, self.filepath, self.text)

    def load_strategy(self, block: Block, signature: Signature) -> ReplacementMap:
        entries: t.Dict[str, t.List[int]] = {}
        for d in block.items:
            entries.setdefault(d.name, []).extend(int(i) for i in d.values)
            try:
                ReplacementMap(signature, {d.name: entries[d.name]})
            except CsrError as e:
                raise self.error(str(e), d.loc)

        return ReplacementMap(signature, entries)


def parse_spec(text: str, filepath: t.Optional[str] = None) -> SpecFile:
    """
    Parse the text of a ``.trs`` file

    :raises InvalidSpecFile: on syntax errors, unknown symbols, arity and sort errors and μ indices out of range, with
        the line and column of the offending item
    """
    return _Loader(text, filepath).load()


def load_spec(filepath: str) -> SpecFile:
    if not os.path.isfile(filepath):
        raise InvalidInput(f'File "{filepath}" does not exist')

    with open(filepath, encoding='utf-8') as fr:
        return parse_spec(fr.read(), filepath)


def parse_term(text: str, signature: Signature, var_sorts: t.Optional[t.Mapping[str, str]] = None) -> Term:
    """
    Parse a term against ``signature``. Identifiers which are not symbols are variables, their sort is inferred from
    the argument position they occur at, or taken from ``var_sorts`` when given.
    """
    var_sorts = var_sorts or {}
    raw = parse_raw_term(text)

    def _build(r: RawTerm, expected: t.Optional[str]) -> Term:
        if r.name not in signature:
            if r.args:
                raise InvalidInput(f'Unknown symbol "{r.name}" in "{text}"')
            if r.name in var_sorts:
                expected = var_sorts[r.name]
            if expected is None:
                if signature.is_sorted:
                    raise InvalidInput(f'Cannot infer the sort of variable "{r.name}" in "{text}"')
                expected = UNSORTED_SORT
            return Var(r.name, expected)

        sym = signature.symbol(r.name)
        if len(r.args) != sym.arity:
            raise InvalidInput(f'Symbol "{r.name}" expects {sym.arity} arguments, got {len(r.args)} in "{text}"')
        return App(r.name, tuple(_build(a, s) for a, s in zip(r.args, sym.arg_sorts)))

    term = _build(raw, None)
    try:
        signature.check_term(term)
    except CsrError as e:
        raise InvalidInput(f'Invalid term "{text}": {e}')

    return term


def print_spec(trs: Trs, strategy: t.Optional[ReplacementMap] = None) -> str:
    """
    The normalized text of ``trs``. Parsing it back gives an equal system and map.
    """
    sig = trs.signature
    lines = []
    if sig.is_sorted:
        lines.append('(SORTS ' + ' '.join(f'({s.name} {s.kind.value})' for s in sig.sorts.values()) + ')')
        decls = []
        for sym in sig:
            decls.append('(' + ' '.join([sym.name, *sym.arg_sorts, '->', sym.result_sort]) + ')')
        lines.append('(SIG')
        lines.extend(f'  {d}' for d in decls)
        lines.append(')')
    else:
        lines.append('(SIG ' + ' '.join(f'({sym.name} {sym.arity})' for sym in sig) + ')')

    names: t.List[str] = []
    for rule in trs.rules:
        for x in variables(rule.lhs):
            if x.name not in names:
                names.append(x.name)
    if names:
        lines.append('(VAR ' + ' '.join(names) + ')')

    lines.append('(RULES')
    lines.extend(f'  {format_term(r.lhs)} -> {format_term(r.rhs)}' for r in trs.rules)
    lines.append(')')

    if strategy is not None:
        lines.append(f'(STRATEGY CONTEXTSENSITIVE {strategy.to_text()})'.replace(' )', ')'))

    return '\n'.join(lines) + '\n'


__all__ = [
    'SpecFile',
    'load_spec',
    'parse_spec',
    'parse_term',
    'print_spec',
]
