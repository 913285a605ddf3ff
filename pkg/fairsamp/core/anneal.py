"""Closed-system transverse-field annealing on logical qubits.

H(s) = -A(s) sum_i X_i + B(s) H_C with s = t / T, starting from |+...+>.
Time is dimensionless (hbar = 1).
"""

import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from fairsamp.core.errors import SizeLimitError
from fairsamp.core.ising import energies, enumerate_ground_states
from fairsamp.core.metrics import fairness_or_nan, ground_counts, gsp
from fairsamp.core.models import (
    AnnealRow,
    ComplementMode,
    FairnessConfig,
    IsingModel,
    Statevector,
)
from fairsamp.core.simulator import apply_1q, derive_seed, expectation_energy, sample
from fairsamp.utils.validation import Validator

logger = logging.getLogger(__name__)

MAX_ANNEAL_QUBITS = 14


def _linear_driver(s: float) -> float:
    return 1.0 - s


def _linear_problem(s: float) -> float:
    return s


class Schedule(BaseModel):
    """Driver weight A(s) and problem weight B(s) on s in [0, 1]."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    A: Callable[[float], float] = Field(default=_linear_driver)
    B: Callable[[float], float] = Field(default=_linear_problem)

    @classmethod
    def linear(cls) -> 'Schedule':
        return cls()


def evolve(model: IsingModel, total_time: float, steps: int, schedule: Optional[Schedule] = None) -> Statevector:
    """Second-order split-step integration with A and B sampled at each step midpoint.

    Each step applies half the problem phase, the transverse-field rotation on every
    qubit, then the other half of the problem phase.
    """
    if model.n > MAX_ANNEAL_QUBITS:
        raise SizeLimitError(f'annealing supports at most {MAX_ANNEAL_QUBITS} qubits, got {model.n}')
    Validator.require_non_negative(total_time, 'total_time')
    Validator.require_int(steps, 'steps')
    Validator.require_positive(steps, 'steps')
    schedule = schedule or Schedule.linear()

    n = model.n
    values = energies(model)
    psi = np.full(2 ** n, 1 / math.sqrt(2 ** n), dtype=complex)
    dt = total_time / steps
    if dt == 0.0:
        return Statevector(n=n, amplitudes=psi)
    for k in range(steps):
        s = (k + 0.5) / steps
        a, b = schedule.A(s), schedule.B(s)
        half = np.exp(-0.5j * b * dt * values)
        psi *= half
        # e^{+i A dt X}
        theta = a * dt
        rotation = np.array([[math.cos(theta), 1j * math.sin(theta)],
                             [1j * math.sin(theta), math.cos(theta)]])
        for q in range(n):
            apply_1q(psi, n, q, rotation)
        psi *= half
    return Statevector(n=n, amplitudes=psi)


def anneal_sweep(model: IsingModel, times: Sequence[float], steps_per_unit_time: int, shots: int,
                 seed: int, cfg: Optional[FairnessConfig] = None, schedule: Optional[Schedule] = None,
                 min_steps: int = 1) -> List[AnnealRow]:
    """Evolve, sample and score one row per annealing time.

    Flip-symmetric models also get combined-complement GSP and fairness columns.
    """
    Validator.require_non_empty_list(list(times), 'times')
    Validator.require_positive(steps_per_unit_time, 'steps_per_unit_time')
    cfg = cfg or FairnessConfig(inner_loops=1000)
    ground = enumerate_ground_states(model)
    combined = model.is_flip_symmetric() and model.n > 1
    rows = []
    for index, total_time in enumerate(times):
        Validator.require_non_negative(total_time, 'time')
        steps = max(min_steps, int(math.ceil(total_time * steps_per_unit_time)))
        state = evolve(model, total_time, steps, schedule)
        sub_seed = derive_seed(seed, index)
        counts = sample(state, shots, sub_seed)
        row = AnnealRow(
            time=float(total_time),
            gsp=gsp(counts, ground),
            fairness=fairness_or_nan(ground_counts(counts, ground, ComplementMode.SEPARATE), cfg, sub_seed),
            energy=expectation_energy(state, model),
            norm=state.norm(),
        )
        if combined:
            merged = ground.with_mode(ComplementMode.COMBINED)
            row = row.model_copy(update={
                'gsp_combined': gsp(counts, merged),
                'fairness_combined': fairness_or_nan(ground_counts(counts, merged), cfg, sub_seed),
            })
        logger.info(f'T={total_time}: gsp={row.gsp:.4f} energy={row.energy:.4f} fairness={row.fairness.csv_value()}')
        rows.append(row)
    return rows


def sweep_to_csv(rows: Sequence[AnnealRow]) -> str:
    combined = any(r.fairness_combined is not None for r in rows)
    header = ['time', 'gsp', 'fairness_shots', 'energy']
    if combined:
        header += ['gsp_combined', 'fairness_shots_combined']
    lines = [','.join(header)]
    for r in rows:
        cells = [repr(r.time), repr(r.gsp), r.fairness.csv_value(), repr(r.energy)]
        if combined:
            cells += [repr(r.gsp_combined), r.fairness_combined.csv_value()]
        lines.append(','.join(cells))
    return '\n'.join(lines) + '\n'
