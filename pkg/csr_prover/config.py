# SPDX-FileCopyrightText: 2023-2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

"""
TOML configuration. Keys are the destination names of the CLI options, values become the parser defaults.
"""

import logging
import os
import sys
import typing as t
from pathlib import (
    Path,
)

from .constants import (
    CSR_PROVER_TOML_FN,
    PYPROJECT_TOML_FN,
)

LOGGER = logging.getLogger(__name__)

PYPROJECT_SECTION = 'csr-prover'
# looked up in this order within one directory
CONFIG_FILE_NAMES = (PYPROJECT_TOML_FN, CSR_PROVER_TOML_FN)


class InvalidTomlError(SystemExit):
    def __init__(self, filepath: t.Union[str, Path], msg: str) -> None:
        super().__init__(f'Failed parsing toml file "{filepath}" with error: {msg}')


def to_absolute_path(s: str, rootpath: t.Optional[str] = None) -> str:
    path = Path(s).expanduser()
    if not path.is_absolute():
        path = Path(rootpath or '.').expanduser() / path

    return os.path.abspath(path)


def load_toml(filepath: t.Union[str, Path]) -> t.Dict[str, t.Any]:
    try:
        if sys.version_info >= (3, 11):
            import tomllib

            with open(filepath, 'rb') as fr:
                return tomllib.load(fr)

        import toml

        return toml.load(str(filepath))
    except (OSError, ValueError) as e:
        raise InvalidTomlError(filepath, str(e))


def _read_config(filepath: Path) -> t.Optional[t.Dict[str, t.Any]]:
    """None when a ``pyproject.toml`` has no ``[tool.csr-prover]`` section"""
    data = load_toml(filepath)
    if filepath.name == PYPROJECT_TOML_FN:
        return data.get('tool', {}).get(PYPROJECT_SECTION)

    return data


def _search_dirs(start: Path) -> t.Iterator[Path]:
    for d in (start, *start.parents):
        yield d

        if (d / '.git').exists():
            return


def get_valid_config(
    starts_from: t.Optional[str] = None, custom_path: t.Optional[str] = None
) -> t.Optional[t.Dict[str, t.Any]]:
    """
    Find the configuration of the prover.

    A custom path wins. Otherwise ``pyproject.toml`` (section ``[tool.csr-prover]``) and ``.csr_prover.toml`` are
    searched from ``starts_from`` upwards, stopping at the first directory holding a ``.git`` folder.

    :param starts_from: directory to start searching from, the current working directory by default
    :param custom_path: path of a toml file
    :return: the config dict, or None if no config file is found
    """
    if custom_path:
        filepath = Path(to_absolute_path(custom_path))
        if not filepath.is_file():
            raise InvalidTomlError(custom_path, 'file does not exist')

        config = _read_config(filepath)
        if config is not None:
            return config

    for d in _search_dirs(Path(to_absolute_path(starts_from or os.getcwd()))):
        for name in CONFIG_FILE_NAMES:
            filepath = d / name
            if not filepath.is_file():
                continue

            config = _read_config(filepath)
            if config is not None:
                LOGGER.debug('Using config file %s', filepath)
                return config

    return None
