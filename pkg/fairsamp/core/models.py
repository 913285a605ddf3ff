from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Spin(int, Enum):
    """Z eigenvalue of a spin; UP is bit 0."""
    UP = 1
    DOWN = -1

    @classmethod
    def parse(cls, value: Any) -> 'Spin':
        if isinstance(value, Spin):
            return value
        lookup = {'up': cls.UP, '↑': cls.UP, '0': cls.UP, '+1': cls.UP, '1': cls.DOWN,
                  'down': cls.DOWN, '↓': cls.DOWN, '-1': cls.DOWN}
        key = str(value).strip().lower()
        if key not in lookup:
            raise ValueError(f'unknown spin value: {value!r}')
        return lookup[key]


class ComplementMode(str, Enum):
    SEPARATE = 'separate'
    COMBINED = 'combined'


def complement(bitstring: str) -> str:
    return bitstring.translate(str.maketrans('01', '10'))


class IsingModel(BaseModel):
    """H_C = -sum J_ij Z_i Z_j - sum h_i Z_i over n spins.

    `offset` carries the constant dropped by spin fixing; energies never include it.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    quadratic: Tuple[Tuple[int, int, float], ...] = ()
    linear: Tuple[Tuple[int, float], ...] = ()
    offset: float = 0.0
    name: str = ''

    @field_validator('n')
    @classmethod
    def n_must_be_positive(cls, v):
        if v < 1:
            raise ValueError('n must be at least 1')
        return v

    @field_validator('quadratic', mode='before')
    @classmethod
    def quadratic_to_tuples(cls, v):
        if v is None:
            return ()
        return tuple((int(i), int(j), float(J)) for i, j, J in v)

    @field_validator('linear', mode='before')
    @classmethod
    def linear_to_tuples(cls, v):
        if v is None:
            return ()
        return tuple((int(i), float(h)) for i, h in v)

    @model_validator(mode='after')
    def check_indices(self):
        seen = set()
        for i, j, _ in self.quadratic:
            if not 0 <= i < j < self.n:
                raise ValueError(f'quadratic pair ({i}, {j}) must satisfy 0 <= i < j < n={self.n}')
            if (i, j) in seen:
                raise ValueError(f'duplicate quadratic pair ({i}, {j})')
            seen.add((i, j))
        fields = set()
        for i, _ in self.linear:
            if not 0 <= i < self.n:
                raise ValueError(f'linear index {i} out of range for n={self.n}')
            if i in fields:
                raise ValueError(f'duplicate linear term on qubit {i}')
            fields.add(i)
        return self

    def is_flip_symmetric(self) -> bool:
        """True when no linear terms exist, so every config and its complement share an energy."""
        return all(h == 0 for _, h in self.linear)


class GroundSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    states: Tuple[str, ...]
    energy: float
    complement_mode: ComplementMode = ComplementMode.SEPARATE

    @field_validator('states')
    @classmethod
    def states_must_not_be_empty(cls, v):
        if not v:
            raise ValueError('ground set cannot be empty')
        lengths = {len(s) for s in v}
        if len(lengths) != 1:
            raise ValueError('ground states must share one length')
        return v

    @property
    def n(self) -> int:
        return len(self.states[0])

    @property
    def is_complement_closed(self) -> bool:
        """True when every state's bitwise complement is also a ground state."""
        states = set(self.states)
        return all(complement(s) in states for s in states)

    @property
    def merges_complements(self) -> bool:
        """Combined mode only merges pairs for complement-closed sets; otherwise it scores as separate."""
        return self.complement_mode == ComplementMode.COMBINED and self.is_complement_closed

    def contains(self, bitstring: str) -> bool:
        # a complement-closed set holds x exactly when it holds complement(x), so
        # membership is the same in both modes
        return bitstring in self.states

    def with_mode(self, mode: ComplementMode) -> 'GroundSet':
        return self.model_copy(update={'complement_mode': mode})


class QaoaParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    betas: Tuple[float, ...]
    gammas: Tuple[float, ...]

    @model_validator(mode='after')
    def lengths_must_match(self):
        if len(self.betas) != len(self.gammas):
            raise ValueError(f'betas ({len(self.betas)}) and gammas ({len(self.gammas)}) differ in length')
        if len(self.betas) < 1:
            raise ValueError('at least one round is required')
        return self

    @property
    def p(self) -> int:
        return len(self.betas)

    @classmethod
    def single(cls, beta: float, gamma: float) -> 'QaoaParams':
        return cls(betas=(beta,), gammas=(gamma,))


class Statevector(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    amplitudes: np.ndarray

    @model_validator(mode='after')
    def check_shape_and_norm(self):
        if self.amplitudes.shape != (2 ** self.n,):
            raise ValueError(f'expected {2 ** self.n} amplitudes, got shape {self.amplitudes.shape}')
        norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f'statevector norm {norm} differs from 1')
        return self

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


class SampleCounts(BaseModel):
    model_config = ConfigDict(frozen=True)

    shots: int
    counts: Dict[str, int] = Field(default_factory=dict)

    @model_validator(mode='after')
    def counts_must_sum_to_shots(self):
        if any(c < 0 for c in self.counts.values()):
            raise ValueError('counts must be non-negative')
        if sum(self.counts.values()) != self.shots:
            raise ValueError(f'counts sum to {sum(self.counts.values())}, expected {self.shots}')
        if len({len(k) for k in self.counts}) > 1:
            raise ValueError('all bitstrings must share one length')
        return self

    def get(self, bitstring: str) -> int:
        return self.counts.get(bitstring, 0)


class CalibrationDefaults(BaseModel):
    single: Optional[float] = None
    two: Optional[float] = None
    readout: Optional[float] = None

    @field_validator('single', 'two', 'readout')
    @classmethod
    def rate_in_unit_interval(cls, v):
        if v is not None and not 0.0 <= v <= 1.0:
            raise ValueError(f'error rate must be in [0, 1], got {v}')
        return v


class CalibrationData(BaseModel):
    """Per-gate and per-qubit error rates. Keys use canonical gate names and sorted edges."""
    single_qubit: Dict[Tuple[str, int], float] = Field(default_factory=dict)
    two_qubit: Dict[Tuple[str, Tuple[int, int]], float] = Field(default_factory=dict)
    readout: Dict[int, float] = Field(default_factory=dict)
    defaults: CalibrationDefaults = Field(default_factory=CalibrationDefaults)

    @model_validator(mode='after')
    def rates_in_unit_interval(self):
        for table in (self.single_qubit, self.two_qubit, self.readout):
            for key, rate in table.items():
                if not 0.0 <= rate <= 1.0:
                    raise ValueError(f'error rate for {key} must be in [0, 1], got {rate}')
        return self


class FairnessConfig(BaseModel):
    inner_loops: int = 100_000
    significance: float = 0.05
    rejection_fraction: float = 0.95
    cap: int = 10_000_000

    @field_validator('inner_loops', 'cap')
    @classmethod
    def must_be_positive(cls, v):
        if v < 1:
            raise ValueError('must be at least 1')
        return v

    @field_validator('significance', 'rejection_fraction')
    @classmethod
    def must_be_probability(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError(f'must lie strictly between 0 and 1, got {v}')
        return v


class FairnessResult(BaseModel):
    shots: Optional[int] = None
    cap_reached: bool = False
    cap: int = 10_000_000

    def csv_value(self) -> str:
        if self.cap_reached:
            return f'>{self.cap}'
        if self.shots is None:
            return 'nan'
        return str(self.shots)

    def to_json(self) -> Any:
        if self.cap_reached:
            return {'cap_reached': True, 'cap': self.cap}
        return self.shots


class CommandResult(BaseModel):
    success: bool
    content: str
    status_update: str = ''
    artifacts_created: Dict[str, Any] = Field(default_factory=dict)

    @field_validator('content', 'status_update', mode='before')
    @classmethod
    def text_must_not_be_none(cls, v):
        if v is None:
            return ''
        return v


class ExperimentSpec(BaseModel):
    problem: str
    reduce: bool = True
    topology: Optional[str] = None
    gateset: str = 'ibm'
    beta: Optional[float] = None
    gamma: Optional[float] = None
    gridsearch: bool = False
    shots: int = 8192
    repeats: int = 20
    seed: int = 0
    out: Optional[str] = None
    calib: Optional[str] = None
    inner_loops: int = 100_000
    fairness_cap: int = 10_000_000
    ancilla_budget: Optional[int] = None
    mcp_strategy: str = 'auto'
    grid_steps: int = 60

    @field_validator('problem')
    @classmethod
    def problem_must_be_known(cls, v):
        v = v.strip().lower()
        if v not in {'a', 'b', 'c', 'd', 'e'}:
            raise ValueError(f'problem must be one of a-e, got {v!r}')
        return v

    @field_validator('shots', 'repeats', 'inner_loops', 'fairness_cap', 'grid_steps')
    @classmethod
    def counts_must_be_positive(cls, v):
        if v < 1:
            raise ValueError('must be at least 1')
        return v

    @field_validator('gateset')
    @classmethod
    def gateset_must_be_native(cls, v):
        if v not in {'ibm', 'generic'}:
            raise ValueError(f"gateset must be 'ibm' or 'generic', got {v!r}")
        return v

    @field_validator('mcp_strategy')
    @classmethod
    def strategy_must_be_known(cls, v):
        if v not in {'auto', 'ancilla', 'recursive'}:
            raise ValueError(f'unknown mcp strategy {v!r}')
        return v

    @model_validator(mode='after')
    def angles_given_together(self):
        if (self.beta is None) != (self.gamma is None):
            raise ValueError('beta and gamma must be given together')
        if self.gridsearch and self.beta is not None:
            raise ValueError('explicit angles and gridsearch are mutually exclusive')
        return self


class AnnealRow(BaseModel):
    time: float
    gsp: float
    fairness: FairnessResult
    energy: float
    norm: float = 1.0
    gsp_combined: Optional[float] = None
    fairness_combined: Optional[FairnessResult] = None
