"""Ising Hamiltonians: energies, exhaustive ground states and spin fixing.

Conventions: spin UP is bit 0 and Z eigenvalue +1. Bitstrings are written
qubit-0-first; statevector index x holds qubit i in bit i.
"""

import logging
from collections import defaultdict
from typing import Dict, Union

import numpy as np

from fairsamp.core.errors import ModelError, SizeLimitError
from fairsamp.core.models import ComplementMode, GroundSet, IsingModel, Spin
from fairsamp.utils.validation import ValidationError, Validator

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_QUBITS = 24


def bitstring_to_index(bitstring: str) -> int:
    return sum(1 << i for i, ch in enumerate(bitstring) if ch == '1')


def index_to_bitstring(index: int, n: int) -> str:
    return ''.join('1' if (index >> i) & 1 else '0' for i in range(n))


def energy(model: IsingModel, config: str) -> float:
    """Exact H_C value of one configuration (offset excluded)."""
    try:
        Validator.require_bitstring(config, model.n, 'config')
    except ValidationError as e:
        raise ModelError(str(e)) from e
    z = [1 if ch == '0' else -1 for ch in config]
    total = 0.0
    for i, j, J in model.quadratic:
        total -= J * z[i] * z[j]
    for i, h in model.linear:
        total -= h * z[i]
    return total


def energies(model: IsingModel) -> np.ndarray:
    """Energy of every basis state, indexed like a statevector."""
    if model.n > MAX_EXHAUSTIVE_QUBITS:
        raise SizeLimitError(f'{model.n} qubits exceeds the exhaustive limit of {MAX_EXHAUSTIVE_QUBITS}')
    # accumulated one term at a time
    idx = np.arange(2 ** model.n, dtype=np.int64)
    values = np.zeros(2 ** model.n)
    for i, j, J in model.quadratic:
        # Z_i Z_j is -1 exactly when bits i and j differ
        values -= J * (1.0 - 2.0 * (((idx >> i) ^ (idx >> j)) & 1))
    for i, h in model.linear:
        values -= h * (1.0 - 2.0 * ((idx >> i) & 1))
    return values


def ground_mask(model: IsingModel, atol: float = 1e-9) -> np.ndarray:
    values = energies(model)
    return values <= values.min() + atol


def enumerate_ground_states(model: IsingModel, atol: float = 1e-9) -> GroundSet:
    """All minimizers by exhaustive scan, ordered lexicographically on the qubit-0-first string."""
    values = energies(model)
    e_min = float(values.min())
    states = sorted(index_to_bitstring(int(x), model.n) for x in np.flatnonzero(values <= e_min + atol))
    logger.debug(f'{model.name or "model"}: {len(states)} ground states at energy {e_min}')
    return GroundSet(states=tuple(states), energy=e_min, complement_mode=ComplementMode.SEPARATE)


def fix_spin(model: IsingModel, qubit: int, value: Union[Spin, int, str]) -> IsingModel:
    """Substitute Z_qubit = value and drop the qubit.

    Couplings to the fixed qubit become fields on their partner; the fixed
    qubit's own field becomes a constant reported in `offset`.
    """
    if isinstance(qubit, bool) or not isinstance(qubit, int) or not 0 <= qubit < model.n:
        raise ModelError(f'qubit index {qubit!r} invalid for n={model.n}')
    if model.n < 2:
        raise ModelError('cannot fix the only qubit of a model')
    s = int(Spin.parse(value))

    def shift(k: int) -> int:
        return k - 1 if k > qubit else k

    fields: Dict[int, float] = defaultdict(float)
    for i, h in model.linear:
        if i != qubit:
            fields[shift(i)] += h
    offset = model.offset
    for i, h in model.linear:
        if i == qubit:
            offset -= h * s
    quadratic = []
    for i, j, J in model.quadratic:
        if i == qubit:
            fields[shift(j)] += J * s
        elif j == qubit:
            fields[shift(i)] += J * s
        else:
            quadratic.append((shift(i), shift(j), J))
    linear = sorted((i, h) for i, h in fields.items() if h != 0)
    name = f'{model.name}|q{qubit}={"up" if s == 1 else "down"}' if model.name else ''
    return IsingModel(n=model.n - 1, quadratic=quadratic, linear=linear, offset=offset, name=name)


def reduce_model(model: IsingModel) -> IsingModel:
    """Break the global flip symmetry by fixing q0 to UP."""
    return fix_spin(model, 0, Spin.UP)
