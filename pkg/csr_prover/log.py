# SPDX-FileCopyrightText: 2023-2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

import logging
import sys
import typing as t

from .constants import (
    ProofStage,
)

VERBOSITY_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


class ColoredFormatter(logging.Formatter):
    """
    ``<time> <level> [<proof stage>] <message>``, one ANSI colour per level

    Records without a ``proof_stage`` extra have no stage tag.
    """

    COLORS: t.Dict[int, str] = {
        logging.DEBUG: '\x1b[37;20m',
        logging.WARNING: '\x1b[33;20m',
        logging.ERROR: '\x1b[31;20m',
        logging.CRITICAL: '\x1b[31;1m',
    }
    RESET = '\x1b[0m'

    MARKERS: t.Dict[int, str] = {
        logging.WARNING: '>>> ',
        logging.ERROR: '>>> ',
        logging.CRITICAL: '!!! ',
    }

    def __init__(self, colored: bool = True) -> None:
        super().__init__(
            '%(asctime)s %(levelname)8s %(stage_tag)s%(marker)s%(message)s',
            datefmt='%Y-%m-%d %H:%M:%S',
        )
        # no ANSI support on the windows console
        self.colored = colored and sys.platform != 'win32'

    def format(self, record: logging.LogRecord) -> str:
        proof_stage = getattr(record, 'proof_stage', None)
        record.stage_tag = f'[{proof_stage:>{ProofStage.max_length()}}] ' if proof_stage else ''
        record.marker = self.MARKERS.get(record.levelno, '')

        line = super().format(record)
        color = self.COLORS.get(record.levelno)
        if self.colored and color:
            return f'{color}{line}{self.RESET}'

        return line


def stage(proof_stage: ProofStage) -> t.Dict[str, t.Any]:
    """
    ``extra`` mapping for log records emitted inside a proof stage

    >>> LOGGER.info('found a loop', extra=stage(ProofStage.LOOP_SEARCH))
    """
    return {'proof_stage': proof_stage.value}


def setup_logging(verbose: int = 0, log_file: t.Optional[str] = None, colored: bool = True) -> None:
    """
    Route the records of the package to stderr, or to ``log_file``

    :param verbose: 0 - WARNING, 1 - INFO, 2 or more - DEBUG
    :param log_file: log file path, written without colours
    :param colored: colored output or not
    """
    package_logger = logging.getLogger(__package__)
    package_logger.setLevel(VERBOSITY_LEVELS[min(verbose or 0, len(VERBOSITY_LEVELS) - 1)])

    handler: logging.Handler
    if log_file:
        handler = logging.FileHandler(log_file)
        colored = False
    else:
        handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(ColoredFormatter(colored))

    # calling it twice must not duplicate every line
    for old in list(package_logger.handlers):
        package_logger.removeHandler(old)
        old.close()
    package_logger.addHandler(handler)
    package_logger.propagate = False
