# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
μ-loops: finite derivations ``t ↪+ u`` where an instance of ``t`` occurs at a replacing position of ``u``.

Such a derivation repeats forever, so it witnesses μ-nontermination.
"""

import logging
import typing as t
from dataclasses import (
    dataclass,
    field,
)

from ..constants import (
    DEFAULT_LOOP_DEPTH,
    DEFAULT_LOOP_MAX_FRONTIER,
    DEFAULT_LOOP_MAX_TERM_SIZE,
    ProofStage,
)
from ..csr import (
    Redex,
    StepRecord,
    contract,
    one_step_reducts,
)
from ..log import (
    stage,
)
from ..repmap import (
    ReplacementMap,
    replacing_positions,
)
from ..term import (
    Position,
    Substitution,
    Term,
    Trs,
    Var,
    format_position,
    format_substitution,
    format_term,
    match,
    size,
    subterm_at,
    substitute,
)
from ..utils import (
    Deadline,
    SignatureMismatch,
)

LOGGER = logging.getLogger(__name__)


@dataclass
class LoopWitness:
    start: Term
    steps: t.List[StepRecord]
    reentry: Position
    matcher: Substitution = field(default_factory=dict)

    @property
    def end(self) -> Term:
        return self.steps[-1].after

    def to_text(self) -> str:
        lines = [f'start: {format_term(self.start)}']
        lines.extend(f'  {s.to_text()}' for s in self.steps)
        lines.append(f'reentry: {format_position(self.reentry)}')
        lines.append(f'matcher: {format_substitution(self.matcher)}')
        return '\n'.join(lines)


@dataclass
class LoopBounds:
    max_depth: int = DEFAULT_LOOP_DEPTH
    max_term_size: int = DEFAULT_LOOP_MAX_TERM_SIZE
    max_frontier: int = DEFAULT_LOOP_MAX_FRONTIER


@dataclass
class _Node:
    term: Term
    parent: t.Optional['_Node'] = None
    record: t.Optional[StepRecord] = None

    def path(self) -> t.List['_Node']:
        res = []
        node: t.Optional[_Node] = self
        while node is not None:
            res.append(node)
            node = node.parent

        return res[::-1]


def _reentry(
    u: Term,
    path: t.List[_Node],
    mu: ReplacementMap,
) -> t.Optional[t.Tuple[int, Position, Substitution]]:
    for p in replacing_positions(u, mu):
        sub = subterm_at(u, p)
        if isinstance(sub, Var):
            continue
        for j, node in enumerate(path):
            if isinstance(node.term, Var):
                continue
            sigma = match(node.term, sub)
            if sigma is not None:
                return j, p, sigma

    return None


def find_loop(
    trs: Trs,
    mu: ReplacementMap,
    bounds: t.Optional[LoopBounds] = None,
    deadline: t.Optional[Deadline] = None,
) -> t.Optional[LoopWitness]:
    """
    Breadth-first μ-rewriting from every left-hand side, all starts advancing level by level in rule order.

    Variables of the start terms are never instantiated. A loop is reported for the first reduct ``u`` with a
    replacing subterm matching an earlier term of its own derivation. Reducts larger than ``max_term_size`` are
    dropped, as are terms seen before, and each level keeps at most ``max_frontier`` terms.

    :return: a witness which passed :func:`replay_loop`, or None
    """
    bounds = bounds or LoopBounds()
    deadline = deadline or Deadline(None)
    extra = stage(ProofStage.LOOP_SEARCH)

    frontier = [_Node(lhs) for lhs in trs.lhss]
    seen = {n.term for n in frontier}
    for depth in range(1, bounds.max_depth + 1):
        next_frontier = []
        for node in frontier:
            if deadline.expired():
                LOGGER.info('Loop search stopped by the deadline at depth %s', depth, extra=extra)
                return None

            path = node.path()
            for record in one_step_reducts(node.term, trs, mu):
                u = record.after
                found = _reentry(u, path, mu)
                if found is not None:
                    j, p, sigma = found
                    steps = [n.record for n in path[j + 1 :] if n.record is not None] + [record]
                    witness = LoopWitness(path[j].term, steps, p, sigma)
                    if replay_loop(trs, mu, witness):
                        LOGGER.info(
                            'Found a loop of %s steps from %s',
                            len(steps),
                            format_term(witness.start),
                            extra=extra,
                        )
                        return witness
                    LOGGER.error('Discarding a loop candidate which does not replay', extra=extra)

                if u in seen or size(u) > bounds.max_term_size:
                    continue
                seen.add(u)
                if len(next_frontier) < bounds.max_frontier:
                    next_frontier.append(_Node(u, node, record))

        LOGGER.debug('Depth %s: %s terms in the frontier', depth, len(next_frontier), extra=extra)
        if not next_frontier:
            break
        frontier = next_frontier

    return None


def _replay_step(term: Term, record: StepRecord, trs: Trs, mu: ReplacementMap) -> bool:
    if record.before != term or record.position not in replacing_positions(term, mu):
        return False

    try:
        rule = trs.rule(record.rule_label)
    except SignatureMismatch:
        return False

    sigma = match(rule.lhs, subterm_at(term, record.position))
    if sigma is None:
        return False

    return contract(term, Redex(record.position, rule, sigma)) == record.after


def replay_derivation(trs: Trs, mu: ReplacementMap, start: Term, steps: t.Iterable[StepRecord]) -> t.Optional[Term]:
    """
    Re-check a recorded μ-derivation from ``start``.

    :return: its last term, or None if some step is not a μ-step
    """
    cur = start
    for record in steps:
        if not _replay_step(cur, record, trs, mu):
            return None
        cur = record.after

    return cur


def replay_loop(trs: Trs, mu: ReplacementMap, witness: LoopWitness) -> bool:
    """
    Re-check every step of ``witness`` and its re-entry: ``u|p = σ(start)`` with ``p`` a replacing position of the
    final term ``u``.
    """
    if not witness.steps:
        return False

    cur = replay_derivation(trs, mu, witness.start, witness.steps)
    if cur is None:
        return False

    if witness.reentry not in replacing_positions(cur, mu):
        return False

    return subterm_at(cur, witness.reentry) == substitute(witness.start, witness.matcher)


def unroll_loop(trs: Trs, mu: ReplacementMap, witness: LoopWitness, iterations: int = 2) -> t.List[StepRecord]:
    """
    The derivation obtained by running the loop ``iterations`` times, each round below the re-entry position of the
    previous one.
    """
    steps = list(witness.steps)
    cur = witness.end
    prefix = witness.reentry
    for _ in range(iterations - 1):
        for record in witness.steps:
            pos = (*prefix, *record.position)
            rule = trs.rule(record.rule_label)
            sigma = match(rule.lhs, subterm_at(cur, pos))
            if sigma is None:
                raise AssertionError(f'loop does not unroll at {format_position(pos)}')

            after = contract(cur, Redex(pos, rule, sigma))
            steps.append(StepRecord(pos, rule.label, cur, after))
            cur = after
        prefix = (*prefix, *witness.reentry)

    return steps
