# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Structural classification of rewrite systems.
"""

import itertools
import logging
import typing as t
from dataclasses import (
    dataclass,
    field,
)

from .constants import (
    MAX_WITNESSES,
    Answer,
    CompatClass,
    Compatibility,
    ProofStage,
)
from .log import (
    stage,
)
from .repmap import (
    canonical_map,
    compatibility,
    minimum_compatible_map,
)
from .term import (
    App,
    Position,
    Rule,
    Term,
    Trs,
    Var,
    format_term,
    is_linear,
    is_variant,
    positions_x,
    replace_at,
    subterm_at,
)
from .utils import (
    BaseModel,
)

LOGGER = logging.getLogger(__name__)


def is_left_linear(trs: Trs) -> bool:
    return all(is_linear(lhs) for lhs in trs.lhss)


def is_constructor_system(trs: Trs) -> bool:
    for lhs in trs.lhss:
        assert isinstance(lhs, App)
        if not all(trs.is_constructor_term(arg) for arg in lhs.args):
            return False

    return True


def is_collapsing_free(trs: Trs) -> bool:
    return not any(rule.is_collapsing for rule in trs.rules)


def is_orthogonal(trs: Trs) -> bool:
    return is_left_linear(trs) and not trs.critical_pairs


##################
# Exhaustiveness #
##################
@dataclass
class Exhaustiveness:
    answer: Answer
    witnesses: t.Dict[str, t.List[Term]] = field(default_factory=dict)
    reason: t.Optional[str] = None
    warnings: t.List[str] = field(default_factory=list)

    @property
    def witness(self) -> t.Optional[Term]:
        for ws in self.witnesses.values():
            if ws:
                return ws[0]

        return None

    def all_witnesses(self) -> t.List[Term]:
        return list(itertools.chain.from_iterable(self.witnesses.values()))


class _PatternMatrix:
    """
    Constructor splitting over the argument patterns of one defined symbol.

    Rows are tuples of patterns, one column per argument still to be inspected.
    """

    def __init__(self, trs: Trs) -> None:
        self.trs = trs
        self.warnings: t.List[str] = []
        self._counter = itertools.count(1)

    def fresh(self, sort: str) -> Var:
        return Var(f'x{next(self._counter)}', sort)

    def uncovered(self, rows: t.List[t.Tuple[Term, ...]], sorts: t.List[str]) -> t.List[t.Tuple[Term, ...]]:
        if not sorts:
            return [] if rows else [()]

        if not rows:
            return [tuple(self.fresh(s) for s in sorts)]

        sort, rest = sorts[0], sorts[1:]
        constructors = self.trs.constructors_of(sort)
        if not constructors:
            msg = f'Sort {sort} has no constructors, its arguments are treated as covered'
            if msg not in self.warnings:
                LOGGER.warning(msg)
                self.warnings.append(msg)
            return []

        present = {row[0].fun for row in rows if isinstance(row[0], App)}
        if not present:
            return [(self.fresh(sort), *w) for w in self.uncovered([row[1:] for row in rows], rest)]

        res: t.List[t.Tuple[Term, ...]] = []
        for c in constructors:
            if c.name not in present:
                continue

            specialized = []
            for row in rows:
                head = row[0]
                if isinstance(head, Var):
                    specialized.append((*(Var('_', s) for s in c.arg_sorts), *row[1:]))
                elif head.fun == c.name:
                    specialized.append((*head.args, *row[1:]))

            for w in self.uncovered(specialized, [*c.arg_sorts, *rest]):
                res.append((App(c.name, w[: c.arity]), *w[c.arity :]))
                if len(res) >= MAX_WITNESSES:
                    return res

        missing = [c for c in constructors if c.name not in present]
        if missing:
            defaults = self.uncovered([row[1:] for row in rows if isinstance(row[0], Var)], rest)
            for c in missing:
                for w in defaults:
                    res.append((App(c.name, tuple(self.fresh(s) for s in c.arg_sorts)), *w))
                    if len(res) >= MAX_WITNESSES:
                        return res

        return res


def is_exhaustive(trs: Trs) -> Exhaustiveness:
    """
    Every defined symbol applied to constructor terms must be a redex.

    Decided by constructor splitting of the left-hand side patterns, which only inspects finite prefixes of the
    arguments. Uncovered argument prefixes are returned as witnesses ``f(d1,...,dk)``.
    """
    if not is_constructor_system(trs):
        return Exhaustiveness(Answer.UNKNOWN, reason='not a constructor system')

    if not is_left_linear(trs):
        return Exhaustiveness(Answer.UNKNOWN, reason='not left-linear')

    matrix = _PatternMatrix(trs)
    witnesses = {}
    for name in trs.defined:
        sym = trs.signature.symbol(name)
        rows = []
        for rule in trs.rules_for(name):
            assert isinstance(rule.lhs, App)
            rows.append(rule.lhs.args)

        uncovered = matrix.uncovered(rows, list(sym.arg_sorts))
        if uncovered:
            witnesses[name] = [App(name, w) for w in uncovered]

    if witnesses:
        return Exhaustiveness(Answer.NO, witnesses, warnings=matrix.warnings)

    return Exhaustiveness(Answer.YES, warnings=matrix.warnings)


def ground_constructor_term(trs: Trs, sort: str, _visiting: t.Optional[t.Set[str]] = None) -> t.Optional[Term]:
    """
    A finite ground constructor term of ``sort``, preferring constants, or None if the sort has none.
    """
    visiting = _visiting or set()
    if sort in visiting:
        return None

    constructors = sorted(trs.constructors_of(sort), key=lambda c: c.arity)
    for c in constructors:
        args = []
        for s in c.arg_sorts:
            arg = ground_constructor_term(trs, s, visiting | {sort})
            if arg is None:
                break
            args.append(arg)
        else:
            return App(c.name, tuple(args))

    return None


###########
# Shallow #
###########
def _flat_constructor_pattern(trs: Trs, term: Term) -> bool:
    return isinstance(term, App) and trs.is_constructor(term.fun) and all(isinstance(a, Var) for a in term.args)


def is_shallow(trs: Trs) -> t.Tuple[bool, t.Dict[str, t.FrozenSet[int]]]:
    """
    :return: whether ``trs`` is shallow, and the index set I_f of every defined symbol whose rules agree on one
    """
    index_sets: t.Dict[str, t.FrozenSet[int]] = {}
    ok = True
    for name in trs.defined:
        found: t.Optional[t.FrozenSet[int]] = None
        consistent = True
        for rule in trs.rules_for(name):
            assert isinstance(rule.lhs, App)
            indices = set()
            for i, arg in enumerate(rule.lhs.args, start=1):
                if isinstance(arg, Var):
                    continue
                if not _flat_constructor_pattern(trs, arg):
                    consistent = False
                indices.add(i)

            if found is None:
                found = frozenset(indices)
            elif found != indices:
                consistent = False

        if consistent and found is not None:
            index_sets[name] = found
        else:
            ok = False

    return ok, index_sets


def is_proper(trs: Trs) -> bool:
    for lhs in trs.lhss:
        assert isinstance(lhs, App)
        for arg in lhs.args:
            if not isinstance(arg, Var) and not _flat_constructor_pattern(trs, arg):
                return False

    return True


def compatibility_class(trs: Trs) -> CompatClass:
    mu = canonical_map(trs)
    if compatibility(mu, trs.lhss) == Compatibility.STRONGLY_COMPATIBLE:
        return CompatClass.STRONGLY_COMPATIBLE

    if all(
        compatibility(minimum_compatible_map(lhs, trs.signature), lhs) == Compatibility.STRONGLY_COMPATIBLE
        for lhs in trs.lhss
    ):
        return CompatClass.WEAKLY_COMPATIBLE

    return CompatClass.NEITHER


############################
# Inductive sequentiality #
############################
@dataclass(frozen=True)
class DefinitionalTree:
    """
    A branch node splits ``pattern`` at ``position``, a leaf holds the single rule whose left-hand side is a variant of
    ``pattern``.
    """

    pattern: Term
    position: t.Optional[Position] = None
    rule: t.Optional[Rule] = None
    children: t.Tuple['DefinitionalTree', ...] = ()

    def leaves(self) -> t.List[Rule]:
        if self.rule is not None:
            return [self.rule]

        return [r for c in self.children for r in c.leaves()]


def inductive_argument(trs: Trs, rules: t.List[Rule]) -> t.Optional[int]:
    """
    The smallest argument index where every left-hand side has a constructor
    """
    lhss = [r.lhs for r in rules]
    assert all(isinstance(lhs, App) for lhs in lhss)
    arity = len(lhss[0].args)  # type: ignore
    for i in range(arity):
        if all(isinstance(lhs.args[i], App) and trs.is_constructor(lhs.args[i].fun) for lhs in lhss):  # type: ignore
            return i + 1

    return None


def definitional_tree(trs: Trs, name: str) -> t.Optional[DefinitionalTree]:
    """
    Build a definitional tree for the rules of ``name``, branching at the smallest inductive position.

    :return: the tree, or None if the rules admit none
    """
    sym = trs.signature.symbol(name)
    counter = itertools.count(1)

    def _fresh(sort: str) -> Var:
        return Var(f'_{next(counter)}', sort)

    def _build(pattern: Term, rules: t.List[Rule]) -> t.Optional[DefinitionalTree]:
        if len(rules) == 1 and is_variant(pattern, rules[0].lhs):
            return DefinitionalTree(pattern, rule=rules[0])

        for p in positions_x(pattern):
            heads = [subterm_at(r.lhs, p) for r in rules]
            if all(isinstance(h, App) and trs.is_constructor(h.fun) for h in heads):
                break
        else:
            return None

        constructors: t.Dict[str, t.List[Rule]] = {}
        for rule, head in zip(rules, heads):
            assert isinstance(head, App)
            constructors.setdefault(head.fun, []).append(rule)

        children = []
        for c, c_rules in constructors.items():
            c_sym = trs.signature.symbol(c)
            child_pattern = replace_at(pattern, p, App(c, tuple(_fresh(s) for s in c_sym.arg_sorts)))
            child = _build(child_pattern, c_rules)
            if child is None:
                return None
            children.append(child)

        return DefinitionalTree(pattern, position=p, children=tuple(children))

    root_pattern = App(name, tuple(_fresh(s) for s in sym.arg_sorts))
    return _build(root_pattern, trs.rules_for(name))


def is_inductively_sequential(trs: Trs) -> bool:
    if not is_constructor_system(trs):
        LOGGER.info('Not a constructor system, hence not inductively sequential')
        return False

    return all(definitional_tree(trs, name) is not None for name in trs.defined)


##########
# Report #
##########
class AnalysisReport(BaseModel):
    sorted: bool
    left_linear: bool
    constructor_system: bool
    orthogonal: bool
    collapsing_free: bool
    exhaustive: Answer
    exhaustive_witnesses: t.List[str] = []
    exhaustive_reason: t.Optional[str] = None
    shallow: bool
    index_sets: t.Dict[str, t.List[int]] = {}
    proper: bool
    strong_compat: bool
    weak_compat: bool
    compatibility_class: CompatClass
    inductively_sequential: bool
    tree_specification: bool
    critical_pairs: t.List[str] = []
    warnings: t.List[str] = []

    def summary(self) -> t.List[str]:
        def _b(v: bool) -> str:
            return 'yes' if v else 'no'

        lines = [
            f'sorted: {_b(self.sorted)}',
            f'left-linear: {_b(self.left_linear)}',
            f'constructor system: {_b(self.constructor_system)}',
            f'orthogonal: {_b(self.orthogonal)}',
            f'collapsing-free: {_b(self.collapsing_free)}',
            f'exhaustive: {self.exhaustive.value}',
        ]
        if self.exhaustive_witnesses:
            lines.append(f'  witness: {self.exhaustive_witnesses[0]}')
        if self.exhaustive_reason:
            lines.append(f'  reason: {self.exhaustive_reason}')
        lines.extend([
            f'shallow: {_b(self.shallow)}',
            f'proper: {_b(self.proper)}',
            f'compatibility: {self.compatibility_class.value}',
            f'inductively sequential: {_b(self.inductively_sequential)}',
            f'tree specification: {_b(self.tree_specification)}',
        ])
        return lines


def analyze(trs: Trs) -> AnalysisReport:
    extra = stage(ProofStage.ANALYSIS)
    exhaustiveness = is_exhaustive(trs)
    shallow, index_sets = is_shallow(trs)
    compat = compatibility_class(trs)
    left_linear = is_left_linear(trs)
    constructor_system = is_constructor_system(trs)
    orthogonal = left_linear and not trs.critical_pairs

    report = AnalysisReport(
        sorted=trs.signature.is_sorted,
        left_linear=left_linear,
        constructor_system=constructor_system,
        orthogonal=orthogonal,
        collapsing_free=is_collapsing_free(trs),
        exhaustive=exhaustiveness.answer,
        exhaustive_witnesses=[format_term(w) for w in exhaustiveness.all_witnesses()],
        exhaustive_reason=exhaustiveness.reason,
        shallow=shallow,
        index_sets={f: sorted(i) for f, i in index_sets.items()},
        proper=is_proper(trs),
        strong_compat=compat == CompatClass.STRONGLY_COMPATIBLE,
        weak_compat=compat in (CompatClass.STRONGLY_COMPATIBLE, CompatClass.WEAKLY_COMPATIBLE),
        compatibility_class=compat,
        inductively_sequential=is_inductively_sequential(trs),
        tree_specification=(
            trs.signature.is_sorted and orthogonal and exhaustiveness.answer == Answer.YES and constructor_system
        ),
        critical_pairs=[str(cp) for cp in trs.critical_pairs],
        warnings=exhaustiveness.warnings,
    )
    LOGGER.info(
        'left-linear=%s orthogonal=%s exhaustive=%s tree specification=%s',
        report.left_linear,
        report.orthogonal,
        report.exhaustive.value,
        report.tree_specification,
        extra=extra,
    )
    return report
