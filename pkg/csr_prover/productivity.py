# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
Verdicts on constructor normalization and productivity.

A verdict carries the chain of theorem applications it rests on. Every step lists its premises, each one a named
check which :func:`verify_verdict` can re-run, plus the termination evidence (certificate or loop) it consumed.
"""

import logging
import typing as t
from dataclasses import (
    dataclass,
    field,
)

from .analysis import (
    ground_constructor_term,
    is_collapsing_free,
    is_constructor_system,
    is_exhaustive,
    is_inductively_sequential,
    is_left_linear,
    is_orthogonal,
    is_proper,
    is_shallow,
)
from .constants import (
    Answer,
    Compatibility,
    ProofStage,
    ProverMode,
    Question,
    Theorem,
)
from .log import (
    stage,
)
from .repmap import (
    ReplacementMap,
    canonical_map,
    compatibility,
    mu_delta,
    zr10_map,
)
from .term import (
    Trs,
    format_term,
    root,
    substitute,
    variables,
)
from .termination import (
    Certificate,
    LoopWitness,
    SearchBudget,
    TerminationOutcome,
    find_loop,
    prove,
)
from .transform import (
    shallow_transform,
)

LOGGER = logging.getLogger(__name__)


@dataclass
class Premise:
    name: str
    holds: bool
    detail: str = ''


@dataclass
class JustificationStep:
    theorem: Theorem
    premises: t.List[Premise]
    conclusion: str
    subject: t.Optional[Trs] = field(default=None, repr=False, compare=False)
    mu: t.Optional[ReplacementMap] = field(default=None, repr=False, compare=False)
    evidence: t.Optional[TerminationOutcome] = field(default=None, repr=False, compare=False)


@dataclass
class Verdict:
    question: Question
    answer: Answer
    chain: t.List[JustificationStep] = field(default_factory=list)
    used_map: t.Optional[ReplacementMap] = None
    evidence: t.Optional[TerminationOutcome] = None
    route: str = 'direct'
    reason: t.Optional[str] = None
    attempts: t.List['Verdict'] = field(default_factory=list)
    subject: t.Optional[Trs] = field(default=None, repr=False, compare=False)

    @property
    def loop(self) -> t.Optional[LoopWitness]:
        return self.evidence.loop if self.evidence is not None else None


############
# Premises #
############
def _sorted(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return trs.signature.is_sorted, ''


def _exhaustive(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    res = is_exhaustive(trs)
    if res.witness is not None:
        return res.answer == Answer.YES, f'witness {format_term(res.witness)}'

    return res.answer == Answer.YES, res.reason or ''


def _not_exhaustive(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    res = is_exhaustive(trs)
    if res.answer != Answer.NO:
        return False, res.reason or ''

    for w in res.all_witnesses():
        values = {}
        for x in variables(w):
            g = ground_constructor_term(trs, x.sort)
            if g is None:
                break
            values[x] = g
        else:
            return True, f'{format_term(substitute(w, values))} is a ground normal form'

    return False, 'no witness has a ground constructor instance'


def _left_linear(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return is_left_linear(trs), ''


def _orthogonal(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    ok = is_orthogonal(trs)
    if not ok and trs.critical_pairs:
        return False, f'critical pair {trs.critical_pairs[0]}'

    return ok, ''


def _constructor_system(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return is_constructor_system(trs), ''


def _canonical(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:
    assert mu is not None
    return canonical_map(trs).leq(mu), 'μcan ⊑ μ'


def _productivity_map(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:
    assert mu is not None
    return (canonical_map(trs) | mu_delta(trs)).leq(mu), 'μcan ⊔ μ_Δ ⊑ μ'


def _strongly_compatible(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return compatibility(canonical_map(trs), trs.lhss) == Compatibility.STRONGLY_COMPATIBLE, ''


def _rhs_constructors_frozen(trs: Trs) -> bool:
    mu = canonical_map(trs)
    roots = {root(r.rhs) for r in trs.rules}
    return all(not mu[c] for c in trs.constructors if c in roots)


def _constructor_condition(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    can = canonical_map(trs)
    if all(not can[c] for c in trs.constructors):
        return True, 'μcan(c) = ∅ for every constructor'

    if is_collapsing_free(trs) and _rhs_constructors_frozen(trs):
        return True, 'no collapsing rule, μcan(c) = ∅ for constructors rooting a right-hand side'

    return False, ''


def _collapsing_free(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return is_collapsing_free(trs), ''


def _rhs_roots_frozen(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return _rhs_constructors_frozen(trs), 'μcan(c) = ∅ for constructors rooting a right-hand side'


def _shallow(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return is_shallow(trs)[0], ''


def _tree_specification(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return is_tree_specification(trs), ''


def _proper(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return is_proper(trs), ''


def _zr10_map(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:
    return mu is not None and mu == zr10_map(trs), ''


def _inductively_sequential(trs: Trs, mu: t.Optional[ReplacementMap]) -> t.Tuple[bool, str]:  # noqa: ARG001
    return is_inductively_sequential(trs), ''


PREMISE_CHECKS: t.Dict[str, t.Callable[[Trs, t.Optional[ReplacementMap]], t.Tuple[bool, str]]] = {
    'sorted': _sorted,
    'exhaustive': _exhaustive,
    'not exhaustive': _not_exhaustive,
    'left-linear': _left_linear,
    'orthogonal': _orthogonal,
    'orthogonal (informational)': _orthogonal,
    'constructor system': _constructor_system,
    'canonical map': _canonical,
    'productivity map': _productivity_map,
    'strongly compatible': _strongly_compatible,
    'constructor condition': _constructor_condition,
    'no collapsing rules': _collapsing_free,
    'right-hand side constructors frozen': _rhs_roots_frozen,
    'shallow': _shallow,
    'tree specification': _tree_specification,
    'proper': _proper,
    'comparison map': _zr10_map,
    'inductively sequential': _inductively_sequential,
}

# premises consuming termination evidence rather than a structural check
TERMINATING = 'μ-terminating'
NONTERMINATING = 'μ-nonterminating'
INFORMATIONAL = ('orthogonal (informational)',)


def is_tree_specification(trs: Trs) -> bool:
    return (
        trs.signature.is_sorted
        and is_constructor_system(trs)
        and is_orthogonal(trs)
        and is_exhaustive(trs).answer == Answer.YES
    )


def _premises(trs: Trs, mu: t.Optional[ReplacementMap], names: t.Iterable[str]) -> t.List[Premise]:
    res = []
    for name in names:
        holds, detail = PREMISE_CHECKS[name](trs, mu)
        res.append(Premise(name, holds, detail))

    return res


def _evidence_premise(outcome: TerminationOutcome) -> Premise:
    if outcome.is_terminating:
        return Premise(TERMINATING, True, outcome.reason or '')

    if outcome.is_nonterminating:
        return Premise(NONTERMINATING, True, outcome.reason or '')

    return Premise(TERMINATING, False, outcome.reason or 'unknown')


def _blocking(premises: t.List[Premise]) -> t.List[Premise]:
    return [p for p in premises if not p.holds and p.name not in INFORMATIONAL]


def _unsorted(question: Question, trs: Trs) -> Verdict:
    return Verdict(question, Answer.UNKNOWN, reason='sorts required', subject=trs)


##############
# Operations #
##############
def disprove_constructor_normalizing(
    trs: Trs,
    budget: t.Optional[SearchBudget] = None,
    outcome: t.Optional[TerminationOutcome] = None,
) -> Verdict:
    """
    Contrapositive of "constructor normalizing implies μcan-terminating" for orthogonal strongly compatible systems.

    :param outcome: a termination outcome for μcan already at hand
    :return: No with a μcan-loop, or Unknown
    """
    mu = canonical_map(trs)
    premises = _premises(trs, mu, ['orthogonal', 'strongly compatible', 'constructor condition'])
    if _blocking(premises):
        step = JustificationStep(Theorem.CN_IMPLIES_CANONICAL_TERMINATION, premises, 'inapplicable', trs, mu)
        return Verdict(
            Question.CONSTRUCTOR_NORMALIZING,
            Answer.UNKNOWN,
            [step],
            used_map=mu,
            evidence=outcome,
            reason=f'premise "{_blocking(premises)[0].name}" does not hold',
            subject=trs,
        )

    outcome = outcome or prove(trs, mu, budget)
    premises.append(_evidence_premise(outcome))
    if outcome.is_nonterminating:
        step = JustificationStep(
            Theorem.CN_IMPLIES_CANONICAL_TERMINATION, premises, 'not constructor normalizing', trs, mu, outcome
        )
        return Verdict(Question.CONSTRUCTOR_NORMALIZING, Answer.NO, [step], mu, outcome, subject=trs)

    step = JustificationStep(Theorem.CN_IMPLIES_CANONICAL_TERMINATION, premises, 'no μcan-loop', trs, mu, outcome)
    return Verdict(
        Question.CONSTRUCTOR_NORMALIZING,
        Answer.UNKNOWN,
        [step],
        mu,
        outcome,
        reason='no μcan-loop found',
        subject=trs,
    )


def prove_constructor_normalizing(
    trs: Trs,
    mu: t.Optional[ReplacementMap] = None,
    budget: t.Optional[SearchBudget] = None,
    certificate: t.Optional[Certificate] = None,
) -> Verdict:
    """
    Constructor normalization from μ-termination, for exhaustive left-linear systems and μ ∈ CM_R (μcan by default).

    Non-exhaustive sorted orthogonal constructor systems whose witness has a ground instance are answered No, and
    μ-nontermination falls back to :func:`disprove_constructor_normalizing`.
    """
    question = Question.CONSTRUCTOR_NORMALIZING
    if not trs.signature.is_sorted:
        return _unsorted(question, trs)

    mu = mu or canonical_map(trs)
    exhaustiveness = is_exhaustive(trs)
    if exhaustiveness.answer == Answer.NO:
        premises = _premises(trs, mu, ['sorted', 'orthogonal', 'constructor system', 'not exhaustive'])
        if not _blocking(premises):
            step = JustificationStep(
                Theorem.CN_IMPLIES_EXHAUSTIVE, premises, 'not constructor normalizing', trs, mu
            )
            return Verdict(question, Answer.NO, [step], mu, subject=trs)

        step = JustificationStep(Theorem.CN_IMPLIES_EXHAUSTIVE, premises, 'inapplicable', trs, mu)
        witness = exhaustiveness.witness
        return Verdict(
            question,
            Answer.UNKNOWN,
            [step],
            mu,
            reason=f'not exhaustive, witness {format_term(witness)}' if witness is not None else 'not exhaustive',
            subject=trs,
        )

    premises = _premises(trs, mu, ['exhaustive', 'left-linear', 'canonical map'])
    blocking = _blocking(premises)
    if blocking:
        step = JustificationStep(Theorem.TERMINATION_IMPLIES_CN, premises, 'inapplicable', trs, mu)
        return Verdict(
            question, Answer.UNKNOWN, [step], mu, reason=f'premise "{blocking[0].name}" does not hold', subject=trs
        )

    outcome = prove(trs, mu, budget, certificate)
    premises.append(_evidence_premise(outcome))
    if outcome.is_terminating:
        step = JustificationStep(
            Theorem.TERMINATION_IMPLIES_CN, premises, 'constructor normalizing', trs, mu, outcome
        )
        return Verdict(question, Answer.YES, [step], mu, outcome, subject=trs)

    step = JustificationStep(Theorem.TERMINATION_IMPLIES_CN, premises, 'inapplicable', trs, mu, outcome)
    if outcome.is_nonterminating:
        disproof = disprove_constructor_normalizing(
            trs, budget, outcome if mu == canonical_map(trs) else None
        )
        if disproof.answer == Answer.NO:
            disproof.chain.insert(0, step)
            return disproof

    return Verdict(question, Answer.UNKNOWN, [step], mu, outcome, reason=outcome.reason, subject=trs)


def prove_productive(
    trs: Trs,
    mu: t.Optional[ReplacementMap] = None,
    budget: t.Optional[SearchBudget] = None,
    certificate: t.Optional[Certificate] = None,
) -> Verdict:
    """
    Productivity from μ-termination, for exhaustive left-linear systems and μcan ⊔ μ_Δ ⊑ μ.

    Never answers No: μ-nontermination does not contradict productivity.
    """
    question = Question.PRODUCTIVE
    if not trs.signature.is_sorted:
        return _unsorted(question, trs)

    mu = mu or (canonical_map(trs) | mu_delta(trs))
    premises = _premises(
        trs, mu, ['productivity map', 'exhaustive', 'left-linear', 'orthogonal (informational)']
    )
    blocking = _blocking(premises)
    if blocking:
        step = JustificationStep(Theorem.TERMINATION_IMPLIES_PRODUCTIVITY, premises, 'inapplicable', trs, mu)
        return Verdict(
            question, Answer.UNKNOWN, [step], mu, reason=f'premise "{blocking[0].name}" does not hold', subject=trs
        )

    outcome = prove(trs, mu, budget, certificate)
    premises.append(_evidence_premise(outcome))
    if outcome.is_terminating:
        step = JustificationStep(
            Theorem.TERMINATION_IMPLIES_PRODUCTIVITY, premises, 'productive', trs, mu, outcome
        )
        return Verdict(question, Answer.YES, [step], mu, outcome, subject=trs)

    step = JustificationStep(Theorem.TERMINATION_IMPLIES_PRODUCTIVITY, premises, 'inapplicable', trs, mu, outcome)
    reason = 'μ-nonterminating' if outcome.is_nonterminating else outcome.reason
    return Verdict(question, Answer.UNKNOWN, [step], mu, outcome, reason=reason, subject=trs)


def shallow_characterization(
    trs: Trs,
    budget: t.Optional[SearchBudget] = None,
    certificate: t.Optional[Certificate] = None,
) -> Verdict:
    """
    Shallow tree specifications, and strongly compatible tree specifications without collapsing rules whose
    right-hand side constructors are frozen, are constructor normalizing iff μcan-terminating.

    Other inputs are handed to :func:`prove_constructor_normalizing`.
    """
    question = Question.CONSTRUCTOR_NORMALIZING
    if not trs.signature.is_sorted:
        return _unsorted(question, trs)

    mu = canonical_map(trs)
    premises = _premises(trs, mu, ['shallow', 'tree specification'])
    theorem = Theorem.SHALLOW_CHARACTERIZATION
    if _blocking(premises):
        premises = _premises(
            trs,
            mu,
            ['strongly compatible', 'tree specification', 'no collapsing rules', 'right-hand side constructors frozen'],
        )
        theorem = Theorem.STRONGLY_COMPATIBLE_CHARACTERIZATION

    if _blocking(premises):
        step = JustificationStep(theorem, premises, 'characterization inapplicable', trs, mu)
        res = prove_constructor_normalizing(trs, mu, budget, certificate)
        res.chain.insert(0, step)
        return res

    outcome = prove(trs, mu, budget, certificate)
    premises.append(_evidence_premise(outcome))
    if outcome.is_terminating:
        step = JustificationStep(theorem, premises, 'constructor normalizing', trs, mu, outcome)
        return Verdict(question, Answer.YES, [step], mu, outcome, subject=trs)

    if outcome.is_nonterminating:
        step = JustificationStep(theorem, premises, 'not constructor normalizing', trs, mu, outcome)
        return Verdict(question, Answer.NO, [step], mu, outcome, subject=trs)

    step = JustificationStep(theorem, premises, 'μcan-termination unknown', trs, mu, outcome)
    return Verdict(question, Answer.UNKNOWN, [step], mu, outcome, reason=outcome.reason, subject=trs)


def zr10_productivity(
    trs: Trs,
    budget: t.Optional[SearchBudget] = None,
    certificate: t.Optional[Certificate] = None,
) -> Verdict:
    """
    Comparison mode: termination under the map with every argument of defined symbols and the data arguments of
    constructors replacing, for proper tree specifications.

    The underlying theorem concludes constructor normalization only, so the verdict answers that question whatever
    was asked.
    """
    question = Question.CONSTRUCTOR_NORMALIZING
    if not trs.signature.is_sorted:
        return _unsorted(question, trs)

    mu = zr10_map(trs)
    premises = _premises(trs, mu, ['proper', 'tree specification', 'comparison map'])
    blocking = _blocking(premises)
    if blocking:
        step = JustificationStep(Theorem.PROPER_ZR10_TERMINATION_IMPLIES_CN, premises, 'inapplicable', trs, mu)
        return Verdict(
            question,
            Answer.UNKNOWN,
            [step],
            mu,
            route='zr10',
            reason=f'premise "{blocking[0].name}" does not hold',
            subject=trs,
        )

    outcome = prove(trs, mu, budget, certificate)
    premises.append(_evidence_premise(outcome))
    if outcome.is_terminating:
        step = JustificationStep(
            Theorem.PROPER_ZR10_TERMINATION_IMPLIES_CN, premises, 'constructor normalizing', trs, mu, outcome
        )
        return Verdict(question, Answer.YES, [step], mu, outcome, route='zr10', subject=trs)

    step = JustificationStep(Theorem.PROPER_ZR10_TERMINATION_IMPLIES_CN, premises, 'inapplicable', trs, mu, outcome)
    reason = 'μ-nonterminating under the comparison map' if outcome.is_nonterminating else outcome.reason
    return Verdict(question, Answer.UNKNOWN, [step], mu, outcome, route='zr10', reason=reason, subject=trs)


def _shallow_nonproductive(trs: Trs, budget: t.Optional[SearchBudget]) -> t.Optional[Verdict]:
    """
    A μcan-loop in a shallow tree specification contradicts productivity
    """
    mu = canonical_map(trs)
    premises = _premises(trs, mu, ['shallow', 'tree specification'])
    if _blocking(premises):
        return None

    budget = budget or SearchBudget()
    loop = find_loop(trs, mu, budget.loop_bounds)
    if loop is None:
        return None

    outcome = TerminationOutcome.nonterminating(loop)
    premises.append(_evidence_premise(outcome))
    step = JustificationStep(
        Theorem.PRODUCTIVE_SHALLOW_IMPLIES_TERMINATION, premises, 'not productive', trs, mu, outcome
    )
    return Verdict(Question.PRODUCTIVE, Answer.NO, [step], mu, outcome, subject=trs)


def productivity_pipeline(
    trs: Trs,
    mu: t.Optional[ReplacementMap] = None,
    budget: t.Optional[SearchBudget] = None,
    mode: ProverMode = ProverMode.DEFAULT,
    shallowing: bool = True,
    certificate: t.Optional[Certificate] = None,
    question: Question = Question.PRODUCTIVE,
) -> Verdict:
    """
    Answer ``question`` for ``trs``, trying the routes in order:

    1. the termination criterion with ``mu`` (default μcan ⊔ μ_Δ for productivity, μcan for constructor
       normalization)
    2. for shallow tree specifications, the converse direction with a μcan-loop
    3. for other inductively sequential systems, the same on the shallowing of ``trs``
    """
    extra = stage(ProofStage.VERDICT)
    if mode == ProverMode.ZR10:
        if question == Question.PRODUCTIVE:
            LOGGER.warning('Comparison mode only decides constructor normalization', extra=extra)
        res = zr10_productivity(trs, budget, certificate)
        LOGGER.info('Comparison mode, constructor normalization: %s', res.answer.value, extra=extra)
        return res

    if question == Question.CONSTRUCTOR_NORMALIZING:
        if mu is None:
            res = shallow_characterization(trs, budget, certificate)
        else:
            res = prove_constructor_normalizing(trs, mu, budget, certificate)
        LOGGER.info('Constructor normalization: %s', res.answer.value, extra=extra)
        return res

    first = prove_productive(trs, mu, budget, certificate)
    if first.answer != Answer.UNKNOWN or not trs.signature.is_sorted:
        LOGGER.info('Productivity: %s', first.answer.value, extra=extra)
        return first

    disproof = _shallow_nonproductive(trs, budget)
    if disproof is not None:
        disproof.attempts = [first]
        LOGGER.info('Productivity: No, a shallow tree specification with a μcan-loop', extra=extra)
        return disproof

    if is_shallow(trs)[0] or not is_inductively_sequential(trs):
        return first

    if not shallowing:
        first.reason = f'{first.reason}; try the shallowing transformation (transform-shallow)'
        return first

    LOGGER.info('Retrying on the shallowing of the input', extra=stage(ProofStage.SHALLOWING))
    result = shallow_transform(trs)
    output = result.output
    step = JustificationStep(
        Theorem.SHALLOWING_PRESERVES_PRODUCTIVITY,
        _premises(trs, None, ['sorted', 'inductively sequential']),
        'productive iff the shallowing is productive',
        trs,
    )

    second = prove_productive(output, None, budget, certificate)
    if second.answer == Answer.UNKNOWN:
        second = _shallow_nonproductive(output, budget) or second

    res = Verdict(
        Question.PRODUCTIVE,
        second.answer,
        [step, *second.chain],
        second.used_map,
        second.evidence,
        route='shallowing',
        reason=second.reason,
        attempts=[first, second],
        subject=output,
    )
    LOGGER.info('Productivity via shallowing: %s', res.answer.value, extra=extra)
    return res


def verify_verdict(verdict: Verdict) -> bool:
    """
    Re-run the premise checks of every justification step and re-verify the termination evidence.
    """
    for step in verdict.chain:
        if step.subject is None:
            return False

        for premise in step.premises:
            if premise.name in (TERMINATING, NONTERMINATING):
                if step.evidence is None or step.mu is None:
                    return False
                if premise.holds and not step.evidence.verify(step.subject, step.mu):
                    return False
                continue

            holds, _ = PREMISE_CHECKS[premise.name](step.subject, step.mu)
            if holds != premise.holds:
                LOGGER.warning('Premise "%s" of %s does not replay', premise.name, step.theorem.value)
                return False

    if verdict.answer != Answer.UNKNOWN:
        final = verdict.chain[-1] if verdict.chain else None
        if final is None or _blocking(final.premises):
            return False

    return True
