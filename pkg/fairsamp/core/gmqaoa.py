"""Grover-mixer QAOA: circuit builders, a matrix-free statevector path and angle grid search."""

import itertools
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from fairsamp.core.circuit import Circuit, Gate, GateKind
from fairsamp.core.errors import SizeLimitError
from fairsamp.core.ising import MAX_EXHAUSTIVE_QUBITS, energies, ground_mask
from fairsamp.core.models import IsingModel, QaoaParams, Statevector
from fairsamp.utils.validation import ValidationError, Validator

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = math.pi / 60
DEFAULT_GRID_BUDGET = 2_000_000
TIE_TOLERANCE = 1e-12
# largest angle-by-basis-state phase table (complex entries) kept in memory
PHASE_TABLE_LIMIT = 2 ** 24


class GridSearchResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: QaoaParams
    energy: float
    gsp: float
    evaluations: int


def build_state_prep(n: int) -> Circuit:
    """U_S = H on every qubit: the uniform superposition |F> from |0...0>."""
    Validator.require_int(n, 'n')
    Validator.require_positive(n, 'n')
    return Circuit(n=n, gates=tuple(Gate.of(GateKind.H, q) for q in range(n)))


def phase_separator_gates(model: IsingModel, gamma: float) -> List[Gate]:
    gates = []
    for i, j, J in model.quadratic:
        gates.append(Gate.of(GateKind.CNOT, i, j))
        gates.append(Gate.of(GateKind.RZ, j, param=-2.0 * J * gamma))
        gates.append(Gate.of(GateKind.CNOT, i, j))
    for i, h in model.linear:
        gates.append(Gate.of(GateKind.RZ, i, param=-2.0 * h * gamma))
    return gates


def build_phase_separator(model: IsingModel, gamma: float) -> Circuit:
    """e^{-i gamma H_C} up to global phase: CNOT-Rz-CNOT per coupling, one Rz per field."""
    return Circuit(n=model.n, gates=tuple(phase_separator_gates(model, gamma)))


def grover_mixer_gates(n: int, beta: float) -> List[Gate]:
    gates = [Gate.of(GateKind.H, q) for q in range(n)]
    gates += [Gate.of(GateKind.X, q) for q in range(n)]
    gates.append(Gate.of(GateKind.MCPHASE, *range(n), param=-beta / math.pi))
    gates += [Gate.of(GateKind.X, q) for q in range(n)]
    gates += [Gate.of(GateKind.H, q) for q in range(n)]
    return gates


def build_grover_mixer(n: int, beta: float) -> Circuit:
    """U_S^dagger . multi-controlled Z^{-beta/pi} on |0...0> . U_S = Id - (1 - e^{-i beta})|F><F|."""
    Validator.require_int(n, 'n')
    Validator.require_positive(n, 'n')
    return Circuit(n=n, gates=tuple(grover_mixer_gates(n, beta)))


def assemble_qaoa(model: IsingModel, params: QaoaParams, measure: bool = True) -> Circuit:
    gates = list(build_state_prep(model.n).gates)
    for beta, gamma in zip(params.betas, params.gammas):
        gates += phase_separator_gates(model, gamma)
        gates += grover_mixer_gates(model.n, beta)
    if measure:
        gates += [Gate.of(GateKind.MEASURE, q) for q in range(model.n)]
    return Circuit(n=model.n, gates=tuple(gates))


def _check_size(model: IsingModel) -> None:
    if model.n > MAX_EXHAUSTIVE_QUBITS:
        raise SizeLimitError(f'{model.n} qubits exceeds the matrix-free limit of {MAX_EXHAUSTIVE_QUBITS}')


def fast_statevector(model: IsingModel, params: QaoaParams) -> Statevector:
    """Each round phases a_x by e^{-i gamma E(x)} then subtracts (1 - e^{-i beta}) mean(a) everywhere."""
    _check_size(model)
    values = energies(model)
    amps = np.full(2 ** model.n, 1 / math.sqrt(2 ** model.n), dtype=complex)
    for beta, gamma in zip(params.betas, params.gammas):
        amps *= np.exp(-1j * gamma * values)
        amps -= (1 - np.exp(-1j * beta)) * amps.mean()
    return Statevector(n=model.n, amplitudes=amps)


def state_metrics(model: IsingModel, state: Statevector) -> Tuple[float, float]:
    """(expected energy, ground state probability) of a state."""
    probs = state.probabilities()
    return float(probs @ energies(model)), float(probs[ground_mask(model)].sum())


def grid_angles(resolution: float = DEFAULT_RESOLUTION) -> np.ndarray:
    """Angles -pi, -pi + r, ..., excluding +pi."""
    Validator.require_positive(resolution, 'resolution')
    steps = int(round(2 * math.pi / resolution))
    if steps < 1 or abs(steps * resolution - 2 * math.pi) > 1e-9:
        raise ValidationError(f'resolution {resolution} does not divide 2*pi')
    return -math.pi + resolution * np.arange(steps)


def _first_argmin(values: np.ndarray) -> Tuple[int, ...]:
    flat = values.ravel()
    best = flat.min()
    k = int(np.flatnonzero(flat <= best + TIE_TOLERANCE)[0])
    return tuple(int(i) for i in np.unravel_index(k, values.shape))


def grid_search(model: IsingModel, resolution: float = DEFAULT_RESOLUTION, p: int = 1,
                budget: Optional[int] = DEFAULT_GRID_BUDGET) -> GridSearchResult:
    """Exhaustive scan of (beta, gamma) in [-pi, pi) minimizing the expected energy.

    Ties within 1e-12 go to the lexicographically smallest (betas, gammas) index vector.
    """
    _check_size(model)
    Validator.require_int(p, 'p')
    Validator.require_positive(p, 'p')
    angles = grid_angles(resolution)
    g = len(angles)
    total = g ** (2 * p)
    if budget is not None and total > budget:
        raise ValidationError(f'grid of {total} evaluations exceeds the budget of {budget}')

    values = energies(model)
    mask = ground_mask(model)
    uniform = np.full(2 ** model.n, 1 / math.sqrt(2 ** model.n), dtype=complex)
    mixer_weights = 1 - np.exp(-1j * angles)
    energy_total, ground_size = float(values.sum()), int(mask.sum())
    table = np.exp(-1j * np.outer(angles, values)) if g * values.size <= PHASE_TABLE_LIMIT else None

    def phase(k: int) -> np.ndarray:
        return table[k] if table is not None else np.exp(-1j * (angles[k] * values))

    energy_grid = np.empty((g,) * (2 * p))
    gsp_grid = np.empty_like(energy_grid)
    # outer indices cover beta_1..beta_{p-1} and gamma_1..gamma_p; beta_p is vectorized
    for outer in itertools.product(range(g), repeat=2 * p - 1):
        b_idx, g_idx = outer[:p - 1], outer[p - 1:]
        amps = uniform.copy()
        for r in range(p - 1):
            amps *= phase(g_idx[r])
            amps -= mixer_weights[b_idx[r]] * amps.mean()
        amps *= phase(g_idx[-1])
        # the last mixer shifts every amplitude by c = w * mean(a), so
        # sum |a_x - c|^2 f_x = sum |a_x|^2 f_x - 2 Re(conj(c) sum a_x f_x) + |c|^2 sum f_x
        shift = mixer_weights * amps.mean()
        probs = np.abs(amps) ** 2
        where = tuple(b_idx) + (slice(None),) + tuple(g_idx)
        energy_grid[where] = (
            probs @ values - 2 * np.real(np.conj(shift) * (amps @ values)) + np.abs(shift) ** 2 * energy_total)
        gsp_grid[where] = (
            probs[mask].sum() - 2 * np.real(np.conj(shift) * amps[mask].sum()) + np.abs(shift) ** 2 * ground_size)

    best = _first_argmin(energy_grid)
    params = QaoaParams(betas=tuple(float(angles[i]) for i in best[:p]),
                        gammas=tuple(float(angles[i]) for i in best[p:]))
    result = GridSearchResult(params=params, energy=float(energy_grid[best]),
                              gsp=float(gsp_grid[best]), evaluations=total)
    logger.info(f'Grid optimum for {model.name or "model"}: energy={result.energy:.4f} '
                f'gsp={result.gsp:.4f} at betas={params.betas} gammas={params.gammas}')
    return result
