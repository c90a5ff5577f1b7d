# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0
import os

import pytest
from hypothesis import (
    settings,
)

from csr_prover import (
    setup_logging,
)
from csr_prover.trs import (
    load_spec,
    parse_term,
)

settings.register_profile('csr', max_examples=1000, deadline=None, derandomize=True)
settings.register_profile('quick', max_examples=100, deadline=None, derandomize=True)
settings.load_profile(os.getenv('HYPOTHESIS_PROFILE', 'csr'))

CORPUS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'corpus')


@pytest.fixture(autouse=True)
def setup_logging_debug():
    setup_logging(1)


@pytest.fixture(scope='session')
def corpus_dir():
    return CORPUS_DIR


def _corpus_spec(name):
    return load_spec(os.path.join(CORPUS_DIR, f'{name}.trs'))


@pytest.fixture(scope='session')
def wallis():
    return _corpus_spec('wallis')


@pytest.fixture(scope='session')
def ordinals():
    return _corpus_spec('ordinals')


@pytest.fixture(scope='session')
def zip_alt_p():
    return _corpus_spec('zip_alt_p')


@pytest.fixture(scope='session')
def ex5_3():
    return _corpus_spec('ex5_3')


@pytest.fixture(scope='session')
def ex5_3_shallow():
    return _corpus_spec('ex5_3_shallow')


def term_of(spec, text):
    return parse_term(text, spec.trs.signature)
