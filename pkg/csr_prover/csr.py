# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Context-sensitive rewriting: μ-steps, μ-normal forms and fuel-bounded μ-normalization.

Unrestricted rewriting is the special case ``ReplacementMap.top(signature)``.
"""

import enum
import logging
import typing as t
from collections import (
    deque,
)
from dataclasses import (
    dataclass,
    field,
)

from .constants import (
    DEFAULT_MAX_TERM_SIZE,
    TraceOutcome,
)
from .repmap import (
    ReplacementMap,
    replacing_positions,
)
from .term import (
    App,
    Position,
    Rule,
    Substitution,
    Term,
    Trs,
    format_position,
    format_term,
    is_prefix,
    match,
    replace_at,
    size,
    subterm_at,
    substitute,
)

LOGGER = logging.getLogger(__name__)


class RedexChoice(str, enum.Enum):
    LEFTMOST_INNERMOST = 'leftmost-innermost'
    LEFTMOST_OUTERMOST = 'leftmost-outermost'


Choice = t.Union[RedexChoice, int]


@dataclass(frozen=True)
class Redex:
    position: Position
    rule: Rule
    matcher: Substitution = field(compare=False, hash=False)


@dataclass(frozen=True)
class StepRecord:
    position: Position
    rule_label: str
    before: Term
    after: Term

    def to_text(self) -> str:
        return f'{format_position(self.position)} {self.rule_label} {format_term(self.after)}'


@dataclass
class Trace:
    initial: Term
    steps: t.List[StepRecord] = field(default_factory=list)
    outcome: TraceOutcome = TraceOutcome.NORMAL_FORM
    choice: str = RedexChoice.LEFTMOST_INNERMOST.value

    @property
    def final(self) -> Term:
        return self.steps[-1].after if self.steps else self.initial

    @property
    def exhausted_fuel(self) -> bool:
        return self.outcome == TraceOutcome.FUEL_EXHAUSTED

    def to_text(self) -> str:
        return '\n'.join(s.to_text() for s in self.steps)


def mu_redexes(term: Term, trs: Trs, mu: ReplacementMap) -> t.List[Redex]:
    """
    All redexes at μ-replacing positions, ordered by position (lexicographically), then by rule order.
    """
    res = []
    for p in replacing_positions(term, mu):
        s = subterm_at(term, p)
        if not isinstance(s, App):
            continue
        for rule in trs.rules:
            if rule.root != s.fun:
                continue
            sigma = match(rule.lhs, s)
            if sigma is not None:
                res.append(Redex(p, rule, sigma))

    return res


def _select(redexes: t.List[Redex], choice: Choice) -> Redex:
    if isinstance(choice, int) and not isinstance(choice, RedexChoice):
        return redexes[choice]

    if choice == RedexChoice.LEFTMOST_OUTERMOST:
        return redexes[0]

    for r in redexes:
        if not any(q.position != r.position and is_prefix(r.position, q.position) for q in redexes):
            return r

    raise AssertionError('unreachable: every finite redex set has an innermost element')


def contract(term: Term, redex: Redex) -> Term:
    return replace_at(term, redex.position, substitute(redex.rule.rhs, redex.matcher))


def step(
    term: Term,
    trs: Trs,
    mu: ReplacementMap,
    choice: Choice = RedexChoice.LEFTMOST_INNERMOST,
) -> t.Optional[StepRecord]:
    """
    One μ-step.

    :return: the step taken, or None if ``term`` is a μ-normal form
    """
    redexes = mu_redexes(term, trs, mu)
    if not redexes:
        return None

    redex = _select(redexes, choice)
    return StepRecord(redex.position, redex.rule.label, term, contract(term, redex))


def is_mu_normal_form(term: Term, trs: Trs, mu: ReplacementMap) -> bool:
    return not mu_redexes(term, trs, mu)


def normalize(
    term: Term,
    trs: Trs,
    mu: ReplacementMap,
    fuel: int,
    choice: Choice = RedexChoice.LEFTMOST_INNERMOST,
    max_term_size: int = DEFAULT_MAX_TERM_SIZE,
) -> Trace:
    """
    μ-rewrite ``term`` until a μ-normal form is reached, at most ``fuel`` steps.

    Stops early with outcome ``SizeBlowup`` when a reduct has more than ``max_term_size`` nodes.
    """
    if fuel < 1:
        raise ValueError('fuel must be at least 1')

    choice_str = choice.value if isinstance(choice, RedexChoice) else f'index {choice}'
    trace = Trace(term, choice=choice_str)
    cur = term
    for _ in range(fuel):
        record = step(cur, trs, mu, choice)
        if record is None:
            trace.outcome = TraceOutcome.NORMAL_FORM
            return trace

        trace.steps.append(record)
        cur = record.after
        if size(cur) > max_term_size:
            LOGGER.info('Term size exceeded %s nodes after %s steps', max_term_size, len(trace.steps))
            trace.outcome = TraceOutcome.SIZE_BLOWUP
            return trace

    trace.outcome = (
        TraceOutcome.NORMAL_FORM if is_mu_normal_form(cur, trs, mu) else TraceOutcome.FUEL_EXHAUSTED
    )
    return trace


def one_step_reducts(term: Term, trs: Trs, mu: ReplacementMap) -> t.List[StepRecord]:
    return [StepRecord(r.position, r.rule.label, term, contract(term, r)) for r in mu_redexes(term, trs, mu)]


def reachable(
    term: Term,
    trs: Trs,
    mu: ReplacementMap,
    max_depth: int,
    max_terms: int = 10_000,
) -> t.List[Term]:
    """
    Terms reachable from ``term`` in at most ``max_depth`` μ-steps, breadth-first, at most ``max_terms`` of them.
    """
    seen = {term: None}
    queue = deque([(term, 0)])
    while queue and len(seen) < max_terms:
        cur, d = queue.popleft()
        if d >= max_depth:
            continue
        for record in one_step_reducts(cur, trs, mu):
            if record.after not in seen:
                seen[record.after] = None
                queue.append((record.after, d + 1))
                if len(seen) >= max_terms:
                    break

    return list(seen)


def head_normal_form_violation(
    term: Term,
    trs: Trs,
    depth: int = 8,
    max_terms: int = 10_000,
) -> t.Optional[Term]:
    """
    Bounded head-normal-form check: look for a reduct of ``term`` (unrestricted rewriting, at most ``depth`` steps)
    which is a redex.

    :return: the first such reduct, or None if none was found within the bounds
    """
    top = ReplacementMap.top(trs.signature)
    for u in reachable(term, trs, top, depth, max_terms):
        if isinstance(u, App) and any(match(rule.lhs, u) is not None for rule in trs.rules_for(u.fun)):
            return u

    return None
