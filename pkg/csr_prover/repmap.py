# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Replacement maps and their lattice.

A replacement map assigns every function symbol the set of its argument indices where rewriting may take place.
Maps are total over their signature, absent entries being the empty set.
"""

import typing as t

from .constants import (
    Compatibility,
)
from .term import (
    ROOT,
    App,
    Position,
    Signature,
    Term,
    Trs,
    Var,
    positions_f,
    subterm_at,
    subterms,
)
from .utils import (
    IndexOutOfRange,
    SignatureMismatch,
    UnsortedSignature,
)


class ReplacementMap(t.Mapping[str, t.FrozenSet[int]]):
    def __init__(
        self,
        signature: Signature,
        entries: t.Optional[t.Mapping[str, t.Iterable[int]]] = None,
    ) -> None:
        self.signature = signature

        self._entries: t.Dict[str, t.FrozenSet[int]] = {name: frozenset() for name in signature.symbols}
        for name, indices in (entries or {}).items():
            if name not in signature:
                raise SignatureMismatch(f'Replacement map mentions unknown symbol "{name}"')

            arity = signature.arity(name)
            indices = frozenset(indices)
            for i in sorted(indices):
                if not 1 <= i <= arity:
                    raise IndexOutOfRange(f'index {i} out of range for symbol "{name}" of arity {arity}')

            self._entries[name] = indices

    @classmethod
    def bottom(cls, signature: Signature) -> 'ReplacementMap':
        return cls(signature)

    @classmethod
    def top(cls, signature: Signature) -> 'ReplacementMap':
        return cls(signature, {sym.name: range(1, sym.arity + 1) for sym in signature})

    @classmethod
    def from_text(cls, signature: Signature, text: str) -> 'ReplacementMap':
        """
        Parse the textual form ``(f 1 2) (g) (cons 1)``
        """
        from .trs.grammar import parse_map_entries  # lazy-load

        return cls(signature, parse_map_entries(text))

    def __getitem__(self, name: str) -> t.FrozenSet[int]:
        return self._entries[name]

    def __iter__(self) -> t.Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReplacementMap):
            return NotImplemented

        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        return f'ReplacementMap({self.to_text() or "⊥"})'

    def _check_same_signature(self, other: 'ReplacementMap') -> None:
        if set(self._entries) != set(other._entries) or any(
            self.signature.arity(f) != other.signature.arity(f) for f in self._entries
        ):
            raise SignatureMismatch('Replacement maps are defined over different signatures')

    def join(self, other: 'ReplacementMap') -> 'ReplacementMap':
        self._check_same_signature(other)
        return ReplacementMap(self.signature, {f: self[f] | other[f] for f in self})

    def leq(self, other: 'ReplacementMap') -> bool:
        self._check_same_signature(other)
        return all(self[f] <= other[f] for f in self)

    __or__ = join
    __le__ = leq

    def to_text(self) -> str:
        return ' '.join(
            '(' + ' '.join([f, *(str(i) for i in sorted(indices))]) + ')'
            for f, indices in self._entries.items()
            if indices
        )

    def describe(self, name: str = 'μ', include_constants: bool = False) -> t.List[str]:
        lines = []
        for f, indices in self._entries.items():
            if not include_constants and self.signature.arity(f) == 0:
                continue
            value = '{' + ','.join(str(i) for i in sorted(indices)) + '}' if indices else '∅'
            lines.append(f'{name}({f}) = {value}')

        return lines


def replacing_positions(term: Term, mu: ReplacementMap) -> t.List[Position]:
    """
    Pos^μ(t), in lexicographic order
    """
    res = []

    def _visit(s: Term, prefix: Position) -> None:
        res.append(prefix)
        if isinstance(s, App):
            for i in sorted(mu[s.fun]):
                _visit(s.args[i - 1], (*prefix, i))

    _visit(term, ROOT)
    return res


def replacing_variables(term: Term, mu: ReplacementMap) -> t.List[Var]:
    """Var^μ(t)"""
    res: t.Dict[Var, None] = {}
    for p in replacing_positions(term, mu):
        s = subterm_at(term, p)
        if isinstance(s, Var):
            res.setdefault(s, None)

    return list(res)


def minimum_compatible_map(term: Term, signature: Signature) -> ReplacementMap:
    """
    μ_t, the least replacement map compatible with ``term``: every argument which is not a variable is replacing.
    """
    entries: t.Dict[str, t.Set[int]] = {}
    for _, s in subterms(term):
        if isinstance(s, App):
            entries.setdefault(s.fun, set()).update(
                i for i, arg in enumerate(s.args, start=1) if not isinstance(arg, Var)
            )

    return ReplacementMap(signature, entries)


def canonical_map(trs: Trs) -> ReplacementMap:
    """
    μcan, the join of the minimum compatible maps of all left-hand sides
    """
    res = ReplacementMap.bottom(trs.signature)
    for lhs in trs.lhss:
        res = res.join(minimum_compatible_map(lhs, trs.signature))

    return res


def canonical_map_direct(trs: Trs) -> ReplacementMap:
    """
    μcan computed on positions: i ∈ μcan(f) iff some left-hand side l has p ∈ Pos_F(l) with root(l|_p) = f and
    p.i ∈ Pos_F(l).
    """
    entries: t.Dict[str, t.Set[int]] = {}
    for lhs in trs.lhss:
        fun_positions = set(positions_f(lhs))
        for p in fun_positions:
            s = subterm_at(lhs, p)
            assert isinstance(s, App)
            for i in range(1, len(s.args) + 1):
                if (*p, i) in fun_positions:
                    entries.setdefault(s.fun, set()).add(i)

    return ReplacementMap(trs.signature, entries)


def is_canonical_for(mu: ReplacementMap, trs: Trs) -> bool:
    """μ ∈ CM_R"""
    return canonical_map(trs).leq(mu)


def mu_delta(trs: Trs) -> ReplacementMap:
    """
    μ_Δ: the data-sorted argument indices of every data constructor, ∅ for all other symbols
    """
    signature = trs.signature
    if not signature.is_sorted:
        raise UnsortedSignature('μ_Δ needs a sorted signature')

    entries = {}
    for name in trs.constructors:
        sym = signature.symbol(name)
        if signature.is_data(sym.result_sort):
            entries[name] = [i for i, s in enumerate(sym.arg_sorts, start=1) if signature.is_data(s)]

    return ReplacementMap(signature, entries)


def zr10_map(trs: Trs) -> ReplacementMap:
    """
    Every argument of a defined symbol, and the data-sorted arguments of constructors
    """
    signature = trs.signature
    if not signature.is_sorted:
        raise UnsortedSignature('the comparison map needs a sorted signature')

    entries = {}
    for sym in signature:
        if sym.name in trs.defined:
            entries[sym.name] = range(1, sym.arity + 1)
        else:
            entries[sym.name] = [i for i, s in enumerate(sym.arg_sorts, start=1) if signature.is_data(s)]

    return ReplacementMap(signature, entries)


def compatibility(mu: ReplacementMap, terms: t.Union[Term, t.Iterable[Term]]) -> Compatibility:
    """
    Compatible iff Pos_F(t) ⊆ Pos^μ(t), strongly compatible iff they are equal, for every given term.
    """
    if isinstance(terms, (Var, App)):
        terms = [terms]

    res = Compatibility.STRONGLY_COMPATIBLE
    for term in terms:
        fun_positions = set(positions_f(term))
        mu_positions = set(replacing_positions(term, mu))
        if not fun_positions <= mu_positions:
            return Compatibility.INCOMPATIBLE
        if fun_positions != mu_positions:
            res = Compatibility.COMPATIBLE

    return res
