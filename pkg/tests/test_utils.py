# SPDX-FileCopyrightText: 2022-2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import logging
import os
import time

import pytest
from packaging.version import (
    Version,
)

from csr_prover.config import (
    InvalidTomlError,
    get_valid_config,
    to_absolute_path,
)
from csr_prover.constants import (
    ProofStage,
)
from csr_prover.log import (
    ColoredFormatter,
    stage,
)
from csr_prover.utils import (
    BaseModel,
    Deadline,
    InvalidInput,
    text_digest,
    to_version,
)


def test_to_version():
    assert to_version('0.1.0') == Version('0.1.0')
    assert to_version(Version('1.2')) == Version('1.2')
    with pytest.raises(InvalidInput, match='Invalid version'):
        to_version('not a version')


def test_text_digest():
    assert text_digest('abc') == 'sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad'
    assert text_digest('abc') != text_digest('abd')


def test_deadline():
    assert not Deadline(None).expired()
    assert Deadline(None).remaining_ms is None
    assert Deadline(None).slice(0.5).time_ms is None

    d = Deadline(1)
    time.sleep(0.01)
    assert d.expired()
    assert d.remaining_ms == 0

    assert Deadline(10_000).slice(0.5).time_ms <= 5_000


class _Point(BaseModel):
    __EQ_IGNORE_FIELDS__ = ('label',)

    x: int
    y: int
    label: str = ''


def test_base_model():
    assert _Point(x=1, y=2, label='a') == _Point(x=1, y=2, label='b')
    assert _Point(x=1, y=2) != _Point(x=1, y=3)
    assert _Point(x=1, y=2).comparable_dump() == {'x': 1, 'y': 2}


class TestConfig:
    def test_csr_prover_toml(self, tmp_path):
        (tmp_path / '.git').mkdir()
        (tmp_path / '.csr_prover.toml').write_text('verbose = 1\nbudget_ms = 500\n')
        sub = tmp_path / 'a' / 'b'
        sub.mkdir(parents=True)

        assert get_valid_config(starts_from=str(sub)) == {'verbose': 1, 'budget_ms': 500}

    def test_pyproject_wins(self, tmp_path):
        (tmp_path / '.git').mkdir()
        (tmp_path / '.csr_prover.toml').write_text('verbose = 1\n')
        (tmp_path / 'pyproject.toml').write_text('[tool.csr-prover]\nfuel = 20\n')

        assert get_valid_config(starts_from=str(tmp_path)) == {'fuel': 20}

    def test_pyproject_without_section(self, tmp_path):
        (tmp_path / '.git').mkdir()
        (tmp_path / 'pyproject.toml').write_text('[tool.other]\nfuel = 20\n')

        assert get_valid_config(starts_from=str(tmp_path)) is None

    def test_stops_at_git_root(self, tmp_path):
        (tmp_path / '.csr_prover.toml').write_text('verbose = 1\n')
        repo = tmp_path / 'repo'
        (repo / '.git').mkdir(parents=True)

        assert get_valid_config(starts_from=str(repo)) is None

    def test_custom_path(self, tmp_path):
        fp = tmp_path / 'custom.toml'
        fp.write_text('loop_depth = 4\n')
        assert get_valid_config(custom_path=str(fp)) == {'loop_depth': 4}

        with pytest.raises(InvalidTomlError, match='file does not exist'):
            get_valid_config(custom_path=str(tmp_path / 'missing.toml'))

        fp.write_text('loop_depth = \n')
        with pytest.raises(InvalidTomlError, match='Failed parsing toml file'):
            get_valid_config(custom_path=str(fp))

    def test_to_absolute_path(self, tmp_path):
        assert to_absolute_path('a/b', str(tmp_path)) == os.path.join(str(tmp_path), 'a', 'b')
        assert to_absolute_path(str(tmp_path), '/elsewhere') == str(tmp_path)


def test_stage_in_log_format():
    formatter = ColoredFormatter(colored=False)
    record = logging.LogRecord('csr_prover', logging.WARNING, __file__, 1, 'found %s', ('it',), None)
    record.proof_stage = stage(ProofStage.LOOP_SEARCH)['proof_stage']

    line = formatter.format(record)
    assert 'Loop Search] >>> found it' in line
    assert line.endswith('>>> found it')
