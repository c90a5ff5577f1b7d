# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

import enum

UNSORTED_SORT = 'U'
ROOT_POSITION_STR = 'e'

DEFAULT_FUEL = 10_000
DEFAULT_MAX_TERM_SIZE = 100_000
DEFAULT_BUDGET_MS = 30_000
DEFAULT_MAX_CANDIDATES = 2_000_000
DEFAULT_LOOP_DEPTH = 12
DEFAULT_LOOP_MAX_TERM_SIZE = 200
DEFAULT_LOOP_MAX_FRONTIER = 5_000

# witnesses reported per defined symbol by the exhaustiveness check
MAX_WITNESSES = 64

PYPROJECT_TOML_FN = 'pyproject.toml'
CSR_PROVER_TOML_FN = '.csr_prover.toml'


class SortKind(str, enum.Enum):
    DATA = 'data'
    CODATA = 'codata'


class SymbolKind(str, enum.Enum):
    CONSTRUCTOR = 'constructor'
    DEFINED = 'defined'


class Answer(str, enum.Enum):
    YES = 'Yes'
    NO = 'No'
    UNKNOWN = 'Unknown'


class Compatibility(str, enum.Enum):
    INCOMPATIBLE = 'Incompatible'
    COMPATIBLE = 'Compatible'
    STRONGLY_COMPATIBLE = 'StronglyCompatible'


class CompatClass(str, enum.Enum):
    STRONGLY_COMPATIBLE = 'StronglyCompatible'
    WEAKLY_COMPATIBLE = 'WeaklyCompatible'
    NEITHER = 'Neither'


class TraceOutcome(str, enum.Enum):
    NORMAL_FORM = 'NormalForm'
    FUEL_EXHAUSTED = 'FuelExhausted'
    SIZE_BLOWUP = 'SizeBlowup'


class TerminationKind(str, enum.Enum):
    TERMINATING = 'Terminating'
    NONTERMINATING = 'Nonterminating'
    UNKNOWN = 'Unknown'


class Question(str, enum.Enum):
    CONSTRUCTOR_NORMALIZING = 'ConstructorNormalizing'
    PRODUCTIVE = 'Productive'


class ProverMode(str, enum.Enum):
    DEFAULT = 'default'
    ZR10 = 'zr10'


class Theorem(str, enum.Enum):
    CN_IMPLIES_EXHAUSTIVE = 'cn-implies-exhaustive'
    TERMINATION_IMPLIES_CN = 'termination-implies-cn'
    TERMINATION_IMPLIES_PRODUCTIVITY = 'termination-implies-productivity'
    CN_IMPLIES_CANONICAL_TERMINATION = 'cn-implies-canonical-termination'
    SHALLOW_IS_STRONGLY_COMPATIBLE = 'shallow-is-strongly-compatible'
    SHALLOW_CHARACTERIZATION = 'shallow-characterization'
    STRONGLY_COMPATIBLE_CHARACTERIZATION = 'strongly-compatible-characterization'
    PRODUCTIVE_SHALLOW_IMPLIES_TERMINATION = 'productive-shallow-implies-termination'
    PROPER_ZR10_TERMINATION_IMPLIES_CN = 'proper-zr10-termination-implies-cn'
    SHALLOWING_PRESERVES_PRODUCTIVITY = 'shallowing-preserves-productivity'


class ProofStage(str, enum.Enum):
    ANALYSIS = 'Analysis'
    LOOP_SEARCH = 'Loop Search'
    CERTIFICATE_SEARCH = 'Certificate Search'
    SHALLOWING = 'Shallowing'
    VERDICT = 'Verdict'

    @classmethod
    def max_length(cls) -> int:
        return max(len(v.value) for v in cls.__members__.values())


class ExitCode(enum.IntEnum):
    YES = 0
    NO = 1
    UNKNOWN = 2
    ERROR = 3

    @classmethod
    def from_answer(cls, answer: 'Answer') -> 'ExitCode':
        return {
            Answer.YES: cls.YES,
            Answer.NO: cls.NO,
            Answer.UNKNOWN: cls.UNKNOWN,
        }[Answer(answer)]
