# SPDX-FileCopyrightText: 2022-2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

import argparse
import logging
import os
import sys
import textwrap
import time
import typing as t

from .analysis import (
    analyze,
)
from .config import (
    InvalidTomlError,
    get_valid_config,
)
from .constants import (
    DEFAULT_BUDGET_MS,
    DEFAULT_FUEL,
    DEFAULT_LOOP_DEPTH,
    DEFAULT_LOOP_MAX_FRONTIER,
    DEFAULT_LOOP_MAX_TERM_SIZE,
    DEFAULT_MAX_CANDIDATES,
    DEFAULT_MAX_TERM_SIZE,
    Answer,
    ExitCode,
    ProverMode,
    Question,
    TerminationKind,
    TraceOutcome,
)
from .corpus import (
    run_corpus,
)
from .csr import (
    RedexChoice,
    normalize,
)
from .log import (
    setup_logging,
)
from .productivity import (
    productivity_pipeline,
)
from .repmap import (
    ReplacementMap,
    canonical_map,
    is_canonical_for,
    mu_delta,
)
from .report import (
    MapsModel,
    OutcomeModel,
    Report,
    VerdictModel,
    check_report,
)
from .term import (
    format_term,
)
from .termination import (
    Certificate,
    SearchBudget,
    check_certificate,
    prove,
)
from .transform import (
    shallow_transform,
)
from .trs import (
    SpecFile,
    load_spec,
    parse_term,
    print_spec,
)
from .utils import (
    CsrError,
    InvalidCommand,
    InvalidInput,
    MissingInterpretation,
)

LOGGER = logging.getLogger(__name__)

COMMANDS = (
    'analyze',
    'canonical',
    'normalize',
    'prove-termination',
    'prove-productivity',
    'transform-shallow',
    'check-cert',
    'corpus',
)


class CsrProverCliFormatter(argparse.HelpFormatter):
    LINE_SEP = '$LINE_SEP$'

    def _split_lines(self, text, width):
        parts = text.split(self.LINE_SEP)

        text = self._whitespace_matcher.sub(' ', parts[0]).strip()
        return textwrap.wrap(text, width) + parts[1:]

    def _get_help_string(self, action):
        """
        Add the default value, the config name and the config type to the option help message.
        """
        _help = action.help
        if _help is None:
            _help = ''

        if action.dest in ('config_file', 'file', 'help'):
            return _help

        if action.default is not argparse.SUPPRESS:
            if action.default is None:
                default_type = str
            else:
                default_type = type(action.default)

            if action.nargs in [argparse.ZERO_OR_MORE, argparse.ONE_OR_MORE]:
                _type = f'list[{default_type.__name__}]'
            else:
                _type = default_type.__name__

            defaulting_nargs = [argparse.OPTIONAL, argparse.ZERO_OR_MORE]
            if action.option_strings or action.nargs in defaulting_nargs:
                _help += f'{self.LINE_SEP} - default: %(default)s'

            _help += f'{self.LINE_SEP} - config name: {action.dest}'
            _help += f'{self.LINE_SEP} - config type: {_type}'

        return _help


class CsrProverArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 3, status 2 means Unknown"""

    def error(self, message: str) -> t.NoReturn:
        self.print_usage(sys.stderr)
        self.exit(ExitCode.ERROR, f'{self.prog}: error: {message}\n')


def get_parser(config: t.Optional[t.Dict[str, t.Any]] = None) -> argparse.ArgumentParser:
    """
    :param config: values from the configuration file, used as defaults of the matching options
    """
    parser = CsrProverArgumentParser(
        prog='csr-prover',
        description='Context-sensitive rewriting prover: replacement maps, μ-normalization, μ-termination and '
        'productivity of rewrite systems given in .trs files.\n'
        'Exit codes: 0 - Yes/Proved, 1 - No/Disproved, 2 - Unknown, 3 - usage, parse or input error.\n'
        'Replacement maps are chosen with --map:\n'
        '- strategy: the STRATEGY CONTEXTSENSITIVE block of the file (default when present)\n'
        '- canonical, delta, canonical+delta, top, bottom, zr10: computed from the system\n'
        '- file:PATH: a file holding a map like "(f 1 2) (g 1)"',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    actions = parser.add_subparsers(dest='action', parser_class=CsrProverArgumentParser)

    common_args = CsrProverArgumentParser(add_help=False)
    common_args.add_argument(
        '-c',
        '--config-file',
        help='Path to the default configuration file, toml file',
    )
    common_args.add_argument(
        '-v',
        '--verbose',
        default=0,
        action='count',
        help='Increase the logging level of the whole process. Can be specified multiple times. '
        'By default set to WARNING level. '
        'Specify once to set to INFO level. '
        'Specify twice or more to set to DEBUG level',
    )
    common_args.add_argument(
        '--log-file',
        help='Write the log to the specified file, instead of stderr',
    )
    common_args.add_argument(
        '--no-color',
        action='store_true',
        help='enable colored output by default on UNIX-like systems. enable this flag to make the logs uncolored.',
    )
    common_args.add_argument(
        '--json',
        nargs='?',
        const='-',
        help='Write the machine readable report to the specified file. Without a file, print the report to stdout '
        'instead of the summary',
    )

    file_args = CsrProverArgumentParser(add_help=False)
    file_args.add_argument('file', help='Path to the .trs file')

    map_args = CsrProverArgumentParser(add_help=False)
    map_args.add_argument(
        '--map',
        help='Replacement map to use: strategy, canonical, delta, canonical+delta, top, bottom, zr10 or file:PATH. '
        'The STRATEGY block of the file if present, else the default of the command',
    )

    budget_args = CsrProverArgumentParser(add_help=False)
    budget_args.add_argument(
        '--budget-ms',
        type=int,
        default=DEFAULT_BUDGET_MS,
        help='Wall-clock budget of the proof search in milliseconds. 0 means no limit',
    )
    budget_args.add_argument(
        '--max-candidates',
        type=int,
        default=DEFAULT_MAX_CANDIDATES,
        help='Maximum number of coefficient assignments visited by the certificate search',
    )
    budget_args.add_argument(
        '--loop-depth',
        type=int,
        default=DEFAULT_LOOP_DEPTH,
        help='Maximum length of the derivations explored by the loop search',
    )
    budget_args.add_argument(
        '--loop-max-term-size',
        type=int,
        default=DEFAULT_LOOP_MAX_TERM_SIZE,
        help='Terms bigger than this are dropped by the loop search',
    )
    budget_args.add_argument(
        '--loop-max-frontier',
        type=int,
        default=DEFAULT_LOOP_MAX_FRONTIER,
        help='Maximum number of terms kept per depth by the loop search',
    )
    budget_args.add_argument(
        '--cert',
        help='Certificate file, checked before any search',
    )

    subparsers = []

    def _add(name: str, parents: t.List[argparse.ArgumentParser], help_str: str) -> argparse.ArgumentParser:
        sub = actions.add_parser(
            name, parents=[common_args, *parents], help=help_str, formatter_class=CsrProverCliFormatter
        )
        subparsers.append(sub)
        return sub

    _add('analyze', [file_args], 'Syntactic properties of the system, exhaustiveness with witnesses')

    _add('canonical', [file_args], 'Canonical replacement map, and whether the STRATEGY map is canonical')

    normalize_parser = _add('normalize', [file_args, map_args], 'μ-normalize a term')
    normalize_parser.add_argument('--term', required=True, help='The term to normalize, e.g. "take(s(0),evenNs)"')
    normalize_parser.add_argument('--fuel', type=int, default=DEFAULT_FUEL, help='Maximum number of steps')
    normalize_parser.add_argument(
        '--max-term-size',
        type=int,
        default=DEFAULT_MAX_TERM_SIZE,
        help='Stop when a reduct has more nodes than this',
    )
    normalize_parser.add_argument(
        '--strategy',
        default=RedexChoice.LEFTMOST_INNERMOST.value,
        choices=[c.value for c in RedexChoice],
        help='Which μ-redex is contracted at each step',
    )

    _add('prove-termination', [file_args, map_args, budget_args], 'Prove or disprove μ-termination')

    productivity_parser = _add(
        'prove-productivity', [file_args, map_args, budget_args], 'Prove productivity or constructor normalization'
    )
    productivity_parser.add_argument(
        '--mode',
        default=ProverMode.DEFAULT.value,
        choices=[m.value for m in ProverMode],
        help='"zr10" uses the comparison map (all arguments of defined symbols, data arguments of constructors)',
    )
    productivity_parser.add_argument(
        '--question',
        default=Question.PRODUCTIVE.value,
        choices=[q.value for q in Question],
        help='The property to decide',
    )
    productivity_parser.add_argument(
        '--no-transform',
        action='store_true',
        help='Do not retry on the shallowing of a non-shallow inductively sequential system',
    )

    shallow_parser = _add('transform-shallow', [file_args], 'Shallowing of an inductively sequential system')
    shallow_parser.add_argument('-o', '--output', help='Write the transformed system to this file instead of stdout')

    cert_parser = _add('check-cert', [file_args, map_args], 'Check a certificate or replay the evidence of a report')
    cert_parser.add_argument(
        '--cert',
        required=True,
        help='Certificate file, or a JSON report written with --json',
    )

    corpus_parser = _add('corpus', [], 'Run the corpus against its golden expectations')
    corpus_parser.add_argument('dir', nargs='?', default='corpus', help='Corpus directory holding corpus.yml')
    corpus_parser.add_argument('--entry', nargs='+', help='Only check these entries')
    corpus_parser.add_argument(
        '--budget-ms',
        type=int,
        default=DEFAULT_BUDGET_MS,
        help='Wall-clock budget of every proof search in milliseconds. 0 means no limit',
    )

    if config:
        for sub in subparsers:
            sub.set_defaults(**config)

    return parser


def _config_dests(parser: argparse.ArgumentParser) -> t.Set[str]:
    res = set()
    for action in parser._actions:  # noqa: SLF001
        if isinstance(action, argparse._SubParsersAction):  # noqa: SLF001
            for sub in action.choices.values():
                res.update(_config_dests(sub))
        elif action.dest not in ('help', 'config_file'):
            res.add(action.dest)

    return res


def apply_config_args(parser: argparse.ArgumentParser, args: argparse.Namespace, argv: t.List[str]) -> argparse.Namespace:
    """
    Re-parse with the values of the configuration file as defaults, so that explicit options still win
    """
    config_dict = get_valid_config(custom_path=args.config_file)
    if config_dict:
        known = _config_dests(parser)
        unknown = sorted(k for k in config_dict if k not in known)
        if unknown:
            raise InvalidTomlError(args.config_file or 'config file', f'unknown keys {", ".join(unknown)}')

        args = get_parser(config_dict).parse_args(argv)

    setup_logging(args.verbose, args.log_file, not args.no_color)
    return args


def validate_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    # validate cli subcommands
    if args.action not in COMMANDS:
        parser.print_help()
        raise InvalidCommand(f'subcommand is required. {{{", ".join(COMMANDS)}}}')

    for name in ('fuel', 'loop_depth', 'max_candidates', 'max_term_size', 'loop_max_term_size', 'loop_max_frontier'):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            raise InvalidCommand(f'--{name.replace("_", "-")} must be at least 1')

    if getattr(args, 'budget_ms', None) is not None and args.budget_ms < 0:
        raise InvalidCommand('--budget-ms must not be negative')


###########
# Helpers #
###########
class _Timer:
    def __init__(self) -> None:
        self.timings: t.Dict[str, float] = {}

    def run(self, name: str, func: t.Callable[[], t.Any]) -> t.Any:
        start = time.perf_counter()
        try:
            return func()
        finally:
            self.timings[name] = round((time.perf_counter() - start) * 1000, 3)


def _budget(args: argparse.Namespace) -> SearchBudget:
    return SearchBudget(
        budget_ms=args.budget_ms or None,
        max_candidates=getattr(args, 'max_candidates', DEFAULT_MAX_CANDIDATES),
        loop_depth=getattr(args, 'loop_depth', DEFAULT_LOOP_DEPTH),
        loop_max_term_size=getattr(args, 'loop_max_term_size', DEFAULT_LOOP_MAX_TERM_SIZE),
        loop_max_frontier=getattr(args, 'loop_max_frontier', DEFAULT_LOOP_MAX_FRONTIER),
    )


def _maps(spec: SpecFile, used: t.Optional[ReplacementMap]) -> MapsModel:
    trs = spec.trs
    return MapsModel(
        canonical=canonical_map(trs).to_text(),
        delta=mu_delta(trs).to_text() if trs.signature.is_sorted else None,
        used=used.to_text() if used is not None else None,
    )


def _emit(args: argparse.Namespace, report: Report, lines: t.List[str]) -> None:
    if args.json == '-':
        print(report.to_json())
        return

    for line in lines:
        print(line)

    if args.json:
        dirname = os.path.dirname(os.path.realpath(args.json))
        os.makedirs(dirname, exist_ok=True)
        with open(args.json, 'w', encoding='utf-8') as fw:
            fw.write(report.to_json() + '\n')
        LOGGER.info('Report written to %s', args.json)


def _report(args: argparse.Namespace, spec: SpecFile, used: t.Optional[ReplacementMap], **kwargs: t.Any) -> Report:
    return Report.create(
        args.action,
        spec.text or '',
        print_spec(spec.trs, spec.strategy),
        _maps(spec, used),
        input_file=spec.filepath,
        **kwargs,
    )


def _load_certificate(path: t.Optional[str]) -> t.Optional[Certificate]:
    return Certificate.load(path) if path else None


############
# Commands #
############
def cmd_analyze(args: argparse.Namespace) -> int:
    spec = load_spec(args.file)
    timer = _Timer()
    report = timer.run('analysis', lambda: analyze(spec.trs))

    lines = report.summary()
    lines.extend(f'warning: {w}' for w in report.warnings)
    _emit(args, _report(args, spec, None, analysis=report, timings=timer.timings), lines)

    if (
        not report.sorted
        or not report.orthogonal
        or not report.constructor_system
        or report.exhaustive == Answer.NO
    ):
        return ExitCode.NO
    if report.exhaustive == Answer.UNKNOWN:
        return ExitCode.UNKNOWN
    return ExitCode.YES


def cmd_canonical(args: argparse.Namespace) -> int:
    spec = load_spec(args.file)
    trs = spec.trs
    mu = canonical_map(trs)

    lines = mu.describe('μcan')
    if trs.signature.is_sorted:
        lines.extend(mu_delta(trs).describe('μ_Δ'))

    code = ExitCode.YES
    if spec.strategy is not None:
        ok = is_canonical_for(spec.strategy, trs)
        lines.append(f'STRATEGY map in CM_R: {"yes" if ok else "no"}')
        if not ok:
            code = ExitCode.NO

    _emit(args, _report(args, spec, spec.strategy), lines)
    return code


def cmd_normalize(args: argparse.Namespace) -> int:
    spec = load_spec(args.file)
    trs = spec.trs
    mu = spec.resolve_map(args.map)
    term = parse_term(args.term, trs.signature)

    timer = _Timer()
    trace = timer.run(
        'normalize',
        lambda: normalize(term, trs, mu, args.fuel, RedexChoice(args.strategy), args.max_term_size),
    )

    lines = [f'start: {format_term(term)}']
    lines.extend(f'  {line}' for line in trace.to_text().splitlines())
    lines.append(f'{trace.outcome.value} after {len(trace.steps)} steps: {format_term(trace.final)}')
    _emit(args, _report(args, spec, mu, timings=timer.timings), lines)

    return ExitCode.YES if trace.outcome == TraceOutcome.NORMAL_FORM else ExitCode.UNKNOWN


def cmd_prove_termination(args: argparse.Namespace) -> int:
    spec = load_spec(args.file)
    trs = spec.trs
    mu = spec.resolve_map(args.map)
    certificate = _load_certificate(args.cert)

    timer = _Timer()
    outcome = timer.run('proof', lambda: prove(trs, mu, _budget(args), certificate))
    model = OutcomeModel.from_outcome(outcome)

    lines = [f'map: {mu.to_text() or "⊥"}', *model.summary()]
    _emit(args, _report(args, spec, mu, outcome=model, timings=timer.timings), lines)

    return {
        TerminationKind.TERMINATING: ExitCode.YES,
        TerminationKind.NONTERMINATING: ExitCode.NO,
        TerminationKind.UNKNOWN: ExitCode.UNKNOWN,
    }[outcome.kind]


def cmd_prove_productivity(args: argparse.Namespace) -> int:
    spec = load_spec(args.file)
    trs = spec.trs
    if not trs.signature.is_sorted:
        raise InvalidCommand(f'{args.file} is unsorted, productivity needs a SORTS block with data and codata sorts')

    mu = spec.resolve_map(args.map) if args.map else spec.strategy
    certificate = _load_certificate(args.cert)

    timer = _Timer()
    analysis = timer.run('analysis', lambda: analyze(trs))
    verdict = timer.run(
        'proof',
        lambda: productivity_pipeline(
            trs,
            mu,
            _budget(args),
            mode=ProverMode(args.mode),
            shallowing=not args.no_transform,
            certificate=certificate,
            question=Question(args.question),
        ),
    )
    model = VerdictModel.from_verdict(verdict)

    _emit(
        args,
        _report(args, spec, verdict.used_map, analysis=analysis, verdict=model, timings=timer.timings),
        model.summary(),
    )
    return ExitCode.from_answer(verdict.answer)


def cmd_transform_shallow(args: argparse.Namespace) -> int:
    spec = load_spec(args.file)
    result = shallow_transform(spec.trs)

    text = print_spec(result.output)
    if result.symbol_map:
        mapping = ' '.join(f'{fresh}={origin}[{" ".join(path)}]' for fresh, (origin, path) in result.symbol_map.items())
        text += f'(COMMENT fresh symbols: {mapping})\n'

    report = _report(args, spec, None)
    if args.output:
        with open(args.output, 'w', encoding='utf-8') as fw:
            fw.write(text)
        _emit(args, report, [f'{len(result.output.rules)} rules written to {args.output}'])
    else:
        _emit(args, report, [text.rstrip('\n')])

    return ExitCode.YES


def cmd_check_cert(args: argparse.Namespace) -> int:
    spec = load_spec(args.file)
    if not os.path.isfile(args.cert):
        raise InvalidInput(f'File "{args.cert}" does not exist')

    with open(args.cert, encoding='utf-8') as fr:
        text = fr.read()

    mu = None
    if text.lstrip().startswith('{'):
        report = Report.from_json(text)
        check = check_report(report)
    else:
        mu = spec.resolve_map(args.map)
        cert = Certificate.from_text(text, args.cert)
        try:
            check = check_certificate(spec.trs, mu, cert)
        except MissingInterpretation as e:
            raise InvalidInput(f'{args.cert}: {e}')

    lines = ['valid' if check.valid else 'invalid', *check.diagnostics]
    _emit(args, _report(args, spec, mu), lines)
    return ExitCode.YES if check.valid else ExitCode.NO


def cmd_corpus(args: argparse.Namespace) -> int:
    results = run_corpus(args.dir, SearchBudget(budget_ms=args.budget_ms or None), args.entry)
    for res in results:
        print(res.to_text())

    failed = [r for r in results if not r.passed]
    print(f'{len(results) - len(failed)}/{len(results)} checks passed')
    return ExitCode.NO if failed else ExitCode.YES


HANDLERS: t.Dict[str, t.Callable[[argparse.Namespace], int]] = {
    'analyze': cmd_analyze,
    'canonical': cmd_canonical,
    'normalize': cmd_normalize,
    'prove-termination': cmd_prove_termination,
    'prove-productivity': cmd_prove_productivity,
    'transform-shallow': cmd_transform_shallow,
    'check-cert': cmd_check_cert,
    'corpus': cmd_corpus,
}


def main(argv: t.Optional[t.List[str]] = None) -> None:
    argv = sys.argv[1:] if argv is None else argv
    parser = get_parser()
    args = parser.parse_args(argv)

    try:
        if args.action in COMMANDS:
            args = apply_config_args(parser, args, argv)
        validate_args(parser, args)

        code = HANDLERS[args.action](args)
    except (InvalidInput, InvalidCommand, InvalidTomlError) as e:
        print(e.code, file=sys.stderr)
        sys.exit(ExitCode.ERROR)
    except CsrError as e:
        print(f'Error: {e}', file=sys.stderr)
        sys.exit(ExitCode.ERROR)

    sys.exit(int(code))
