# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Shallowing: turn an inductively sequential constructor system into a shallow one.

Every symbol whose rules are not yet shallow is split at its inductive argument. One dispatcher rule per constructor
``c`` found there passes the arguments of ``c`` to a fresh symbol, which inherits the matching rules with the pattern
``c(...)`` flattened into its argument list::

    f(b, x:y:s) -> r      becomes      f(b, s) -> f_b(s)
                                       f_b(x:s) -> f_b:(x, s)
                                       f_b:(x, y:s) -> r
"""

import itertools
import logging
import typing as t
from collections import (
    deque,
)
from dataclasses import (
    dataclass,
    field,
)

from .analysis import (
    inductive_argument,
    is_inductively_sequential,
    is_shallow,
)
from .constants import (
    ProofStage,
)
from .csr import (
    one_step_reducts,
)
from .log import (
    stage,
)
from .repmap import (
    ReplacementMap,
)
from .term import (
    App,
    Rule,
    Signature,
    Symbol,
    Term,
    Trs,
    Var,
    format_term,
    match,
    root,
    substitute,
    variables,
)
from .utils import (
    NotInductivelySequential,
    UnsortedSignature,
)

LOGGER = logging.getLogger(__name__)


@dataclass
class ShallowingResult:
    output: Trs
    # fresh symbol -> (original symbol, constructors matched on the way)
    symbol_map: t.Dict[str, t.Tuple[str, t.Tuple[str, ...]]] = field(default_factory=dict)
    log: t.List[str] = field(default_factory=list)


def _rules_are_shallow(trs: Trs, rules: t.List[Rule]) -> bool:
    index_sets = set()
    for rule in rules:
        assert isinstance(rule.lhs, App)
        indices = []
        for i, arg in enumerate(rule.lhs.args, start=1):
            if isinstance(arg, Var):
                continue
            if not trs.is_constructor(arg.fun) or not all(isinstance(a, Var) for a in arg.args):
                return False
            indices.append(i)
        index_sets.add(tuple(indices))

    return len(index_sets) <= 1


def _rightmost_variable(term: Term) -> t.Optional[Var]:
    vs = variables(term)
    return vs[-1] if vs else None


class _Shallowing:
    def __init__(self, trs: Trs) -> None:
        self.trs = trs
        self.symbols: t.Dict[str, Symbol] = dict(trs.signature.symbols)
        self.result = ShallowingResult(trs)
        self.emitted: t.List[Rule] = []

    def fresh_name(self, origin: str, path: t.Tuple[str, ...]) -> str:
        name = f'{origin}_{"".join(path)}'
        while name in self.symbols:
            name += "'"

        return name

    @staticmethod
    def _pick_var(candidate: Term, sort: str, used: t.Set[str]) -> Var:
        """
        A variable for one dispatcher argument, named after the rules where possible
        """
        if isinstance(candidate, Var):
            var: t.Optional[Var] = candidate
        else:
            var = _rightmost_variable(candidate)
            if var is not None and var.sort != sort:
                var = None

        if var is None or var.name in used:
            n = 1
            while f'x{n}' in used:
                n += 1
            var = Var(f'x{n}', sort)

        used.add(var.name)
        return var

    def split(self, name: str, rules: t.List[Rule], origin: str, path: t.Tuple[str, ...]) -> None:
        if _rules_are_shallow(self.trs, rules):
            self.emitted.extend(rules)
            return

        i = inductive_argument(self.trs, rules)
        if i is None:
            raise NotInductivelySequential(f'No inductive argument for the rules of "{name}"')

        sym = self.symbols[name]
        groups: t.Dict[str, t.List[Rule]] = {}
        for rule in rules:
            assert isinstance(rule.lhs, App)
            head = rule.lhs.args[i - 1]
            assert isinstance(head, App)
            groups.setdefault(head.fun, []).append(rule)

        for c, c_rules in groups.items():
            c_sym = self.symbols[c]
            c_path = (*path, c)
            fresh = self.fresh_name(origin, c_path)
            self.symbols[fresh] = Symbol(
                fresh,
                (*sym.arg_sorts[: i - 1], *c_sym.arg_sorts, *sym.arg_sorts[i:]),
                sym.result_sort,
            )
            self.result.symbol_map[fresh] = (origin, c_path)

            first = c_rules[0].lhs
            assert isinstance(first, App)
            first_head = first.args[i - 1]
            assert isinstance(first_head, App)

            used: t.Set[str] = set()
            before = [self._pick_var(a, s, used) for a, s in zip(first.args[: i - 1], sym.arg_sorts[: i - 1])]
            inner = [self._pick_var(a, s, used) for a, s in zip(first_head.args, c_sym.arg_sorts)]
            after = [self._pick_var(a, s, used) for a, s in zip(first.args[i:], sym.arg_sorts[i:])]

            dispatcher = Rule(
                App(name, (*before, App(c, tuple(inner)), *after)),
                App(fresh, (*before, *inner, *after)),
            )
            self.emitted.append(dispatcher)
            self.result.log.append(f'split {name} at argument {i} on {c}: {dispatcher}')
            LOGGER.debug('New dispatcher %s', dispatcher, extra=stage(ProofStage.SHALLOWING))

            flattened = []
            for rule in c_rules:
                assert isinstance(rule.lhs, App)
                head = rule.lhs.args[i - 1]
                assert isinstance(head, App)
                lhs = App(fresh, (*rule.lhs.args[: i - 1], *head.args, *rule.lhs.args[i:]))
                flattened.append(Rule(lhs, rule.rhs))

            self.split(fresh, flattened, origin, c_path)

    def run(self) -> ShallowingResult:
        for name in self.trs.defined:
            self.split(name, self.trs.rules_for(name), name, ())

        signature = Signature(self.symbols.values(), self.trs.signature.sorts.values())
        self.result.output = Trs(signature, [Rule(r.lhs, r.rhs) for r in self.emitted])
        return self.result


def shallow_transform(trs: Trs) -> ShallowingResult:
    """
    Shallowing of an inductively sequential, sorted constructor system.

    Already shallow symbols are kept, so a shallow input is returned unchanged with an empty symbol map. Output rules
    are relabelled ``r1, r2, ...``.

    :raises UnsortedSignature: if ``trs`` is unsorted
    :raises NotInductivelySequential: if some defined symbol has no definitional tree
    """
    if not trs.signature.is_sorted:
        raise UnsortedSignature('shallowing needs a sorted signature')

    if not is_inductively_sequential(trs):
        raise NotInductivelySequential('The rewrite system is not inductively sequential')

    result = _Shallowing(trs).run()
    ok, _ = is_shallow(result.output)
    if not ok:
        raise AssertionError('shallowing produced a non-shallow system')

    LOGGER.info(
        'Shallowing introduced %s fresh symbols, %s rules in total',
        len(result.symbol_map),
        len(result.output.rules),
        extra=stage(ProofStage.SHALLOWING),
    )
    return result


def _root_step(term: Term, trs: Trs) -> t.Optional[Term]:
    if not isinstance(term, App):
        return None

    for rule in trs.rules_for(term.fun):
        sigma = match(rule.lhs, term)
        if sigma is not None:
            return substitute(rule.rhs, sigma)

    return None


def simulates(original: Trs, result: ShallowingResult) -> t.List[str]:
    """
    Check that every rule ``l -> r`` of ``original`` is derivable in the output by root steps whose intermediate
    terms are rooted by fresh symbols.

    :return: labels of the rules which are not simulated
    """
    failures = []
    for rule in original.rules:
        cur: t.Optional[Term] = rule.lhs
        ok = False
        for _ in range(len(result.symbol_map) + 1):
            cur = _root_step(cur, result.output)  # type: ignore
            if cur is None:
                break
            if cur == rule.rhs:
                ok = True
                break
            if not (isinstance(cur, App) and cur.fun in result.symbol_map):
                break

        if not ok:
            LOGGER.debug('Rule %s: %s is not simulated', rule.label, format_term(rule.lhs))
            failures.append(rule.label)

    return failures



def ground_terms(signature: Signature, sort: str, height: int) -> t.List[Term]:
    """
    Every ground term of ``sort`` over ``signature`` with at most ``height`` nested symbols
    """
    if height < 1:
        return []

    res: t.List[Term] = []
    for sym in signature.symbols_of_sort(sort):
        choices = [ground_terms(signature, s, height - 1) for s in sym.arg_sorts]
        res.extend(App(sym.name, tuple(args)) for args in itertools.product(*choices))

    return res


def reachable_constructor_roots(
    term: Term,
    trs: Trs,
    max_depth: int,
    free_rules: t.Collection[str] = (),
    max_terms: int = 2_000,
) -> t.Set[str]:
    """
    Roots of the constructor-rooted terms reachable from ``term`` by unrestricted rewriting in at most ``max_depth``
    steps, steps with a rule in ``free_rules`` not counting.
    """
    top = ReplacementMap.top(trs.signature)
    dist = {term: 0}
    queue = deque([term])
    while queue and len(dist) < max_terms:
        cur = queue.popleft()
        d = dist[cur]
        for record in one_step_reducts(cur, trs, top):
            free = record.rule_label in free_rules
            nd = d if free else d + 1
            if nd > max_depth or dist.get(record.after, nd + 1) <= nd:
                continue
            dist[record.after] = nd
            if free:
                queue.appendleft(record.after)
            else:
                queue.append(record.after)

    return {r for r in map(root, dist) if r is not None and trs.is_constructor(r)}


def ground_simulation_failures(
    original: Trs,
    result: ShallowingResult,
    seeds: t.Optional[t.Iterable[Term]] = None,
    depth: int = 4,
    max_terms: int = 2_000,
) -> t.List[Term]:
    """
    Ground seeds from which ``original`` and the shallowing reach different constructor roots within ``depth`` steps.
    Output steps by dispatcher rules, whose right-hand side is rooted by a fresh symbol, are free.

    :param seeds: ground terms over the original signature, by default all of height at most 3
    """
    if seeds is None:
        seeds = [u for s in original.signature.sorts for u in ground_terms(original.signature, s, 3)]

    output = result.output
    dispatchers = {r.label for r in output.rules if root(r.rhs) in result.symbol_map}
    failures = []
    for seed in seeds:
        want = reachable_constructor_roots(seed, original, depth, max_terms=max_terms)
        got = reachable_constructor_roots(seed, output, depth, dispatchers, max_terms)
        if want != got:
            LOGGER.debug(
                'Seed %s reaches constructor roots %s, the shallowing %s',
                format_term(seed),
                sorted(want),
                sorted(got),
                extra=stage(ProofStage.SHALLOWING),
            )
            failures.append(seed)

    return failures
