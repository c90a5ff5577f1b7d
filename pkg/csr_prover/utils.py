# SPDX-FileCopyrightText: 2022-2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

import hashlib
import time
import typing as t

from packaging.version import (
    Version,
)
from pydantic import BaseModel as _BaseModel


class CsrError(RuntimeError):
    """Misuse of the library API, e.g. an operation applied outside of its precondition"""


class InvalidPosition(CsrError):
    pass


class SortMismatch(CsrError):
    pass


class SignatureMismatch(CsrError):
    pass


class UnsortedSignature(CsrError):
    pass


class IndexOutOfRange(CsrError):
    pass


class NotInductivelySequential(CsrError):
    pass


class MissingInterpretation(CsrError):
    pass


class InvalidCommand(SystemExit):
    def __init__(self, msg: str) -> None:
        super().__init__('Invalid Command: ' + msg.strip())


class InvalidInput(SystemExit):
    """Invalid input from user"""


class InvalidSpecFile(InvalidInput):
    """Invalid rewrite system file"""

    def __init__(self, msg: str, filepath: t.Optional[str] = None, line: int = 0, col: int = 0) -> None:
        self.filepath = filepath
        self.line = line
        self.col = col

        location = filepath or '<string>'
        if line:
            location += f':{line}:{col}'
        super().__init__(f'{location}: {msg}')


class InvalidCertificate(InvalidInput):
    """Invalid certificate file"""


def to_version(s: t.Any) -> Version:
    if isinstance(s, Version):
        return s

    try:
        return Version(str(s))
    except ValueError:
        raise InvalidInput(f'Invalid version: {s}')


def text_digest(text: str) -> str:
    return 'sha256:' + hashlib.sha256(text.encode('utf-8')).hexdigest()


class Deadline:
    """
    Wall-clock budget shared by the search procedures.

    ``Deadline(None)`` never expires.
    """

    def __init__(self, time_ms: t.Optional[float]) -> None:
        self._start = time.monotonic()
        self.time_ms = time_ms

    @property
    def elapsed_ms(self) -> float:
        return (time.monotonic() - self._start) * 1000

    @property
    def remaining_ms(self) -> t.Optional[float]:
        if self.time_ms is None:
            return None

        return max(0.0, self.time_ms - self.elapsed_ms)

    def expired(self) -> bool:
        return self.time_ms is not None and self.elapsed_ms >= self.time_ms

    def slice(self, fraction: float) -> 'Deadline':
        remaining = self.remaining_ms
        return Deadline(None if remaining is None else remaining * fraction)


class BaseModel(_BaseModel):
    """
    Models compare by their dumped fields, except the ones named in ``__EQ_IGNORE_FIELDS__``
    """

    __EQ_IGNORE_FIELDS__: t.ClassVar[t.Tuple[str, ...]] = ()

    def comparable_dump(self) -> t.Dict[str, t.Any]:
        return self.model_dump(exclude=set(self.__EQ_IGNORE_FIELDS__))

    def __eq__(self, other: t.Any) -> bool:
        if isinstance(other, self.__class__):
            return self.comparable_dump() == other.comparable_dump()

        return NotImplemented
