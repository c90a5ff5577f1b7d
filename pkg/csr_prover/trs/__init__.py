# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

from .grammar import (
    parse_map_entries,
)
from .spec_file import (
    SpecFile,
    load_spec,
    parse_spec,
    parse_term,
    print_spec,
)

__all__ = [
    'SpecFile',
    'load_spec',
    'parse_map_entries',
    'parse_spec',
    'parse_term',
    'print_spec',
]
