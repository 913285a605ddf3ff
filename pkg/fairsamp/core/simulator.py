"""Dense statevector simulation.

Kernels update arrays of shape (2^n, *batch) in place, so the same code
evolves a single state or every column of a matrix.
"""

import logging
from typing import Dict, Iterable, Sequence

import numpy as np

from fairsamp.core.circuit import Circuit, Gate, GateKind
from fairsamp.core.errors import ModelError, SizeLimitError
from fairsamp.core.ising import energies, index_to_bitstring
from fairsamp.core.models import IsingModel, SampleCounts, Statevector
from fairsamp.utils.validation import Validator

logger = logging.getLogger(__name__)

MAX_SIM_QUBITS = 24

_S2 = 1 / np.sqrt(2)
_FIXED_1Q = {
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDG: np.diag([1, -1j]).astype(complex),
    GateKind.T: np.diag([1, np.exp(1j * np.pi / 4)]),
    GateKind.TDG: np.diag([1, np.exp(-1j * np.pi / 4)]),
}


def gate_matrix(gate: Gate) -> np.ndarray:
    """2x2 matrix of a single-qubit gate."""
    if gate.kind in _FIXED_1Q:
        return _FIXED_1Q[gate.kind]
    if gate.kind == GateKind.RZ:
        return np.diag([np.exp(-0.5j * gate.param), np.exp(0.5j * gate.param)])
    if gate.kind == GateKind.PHASE:
        return np.diag([1, np.exp(1j * np.pi * gate.param)])
    raise ValueError(f'{gate.kind.value} is not a single-qubit unitary')


def apply_1q(amps: np.ndarray, n: int, qubit: int, matrix: np.ndarray) -> None:
    if not amps.flags.c_contiguous:
        raise ValueError('amplitude array must be C-contiguous for in-place updates')
    view = amps.reshape((2 ** (n - qubit - 1), 2, 2 ** qubit) + amps.shape[1:])
    a0 = view[:, 0].copy()
    a1 = view[:, 1]
    view[:, 0] = matrix[0, 0] * a0 + matrix[0, 1] * a1
    view[:, 1] = matrix[1, 0] * a0 + matrix[1, 1] * a1


def apply_phase_mask(amps: np.ndarray, qubits: Sequence[int], t: float) -> None:
    """Multiply e^{i pi t} onto every index whose listed bits are all 1."""
    mask = sum(1 << q for q in qubits)
    idx = np.arange(amps.shape[0])
    amps[(idx & mask) == mask] *= np.exp(1j * np.pi * t)


def apply_controlled_x(amps: np.ndarray, controls: Sequence[int], target: int) -> None:
    cmask = sum(1 << q for q in controls)
    tmask = 1 << target
    idx = np.arange(amps.shape[0])
    lo = idx[((idx & cmask) == cmask) & ((idx & tmask) == 0)]
    hi = lo | tmask
    tmp = amps[lo].copy()
    amps[lo] = amps[hi]
    amps[hi] = tmp


def apply_swap(amps: np.ndarray, a: int, b: int) -> None:
    idx = np.arange(amps.shape[0])
    lo = idx[((idx >> a) & 1 == 1) & ((idx >> b) & 1 == 0)]
    hi = lo ^ ((1 << a) | (1 << b))
    tmp = amps[lo].copy()
    amps[lo] = amps[hi]
    amps[hi] = tmp


def apply_gate(amps: np.ndarray, n: int, gate: Gate) -> None:
    kind = gate.kind
    if kind == GateKind.MEASURE:
        return
    if kind == GateKind.CNOT:
        apply_controlled_x(amps, gate.qubits[:1], gate.qubits[1])
    elif kind == GateKind.TOFFOLI:
        apply_controlled_x(amps, gate.qubits[:2], gate.qubits[2])
    elif kind == GateKind.SWAP:
        apply_swap(amps, *gate.qubits)
    elif kind in (GateKind.PHASE, GateKind.CPHASE, GateKind.MCPHASE):
        apply_phase_mask(amps, gate.qubits, gate.param)
    else:
        apply_1q(amps, n, gate.qubits[0], gate_matrix(gate))


def apply_gates(amps: np.ndarray, n: int, gates: Iterable[Gate]) -> None:
    for gate in gates:
        apply_gate(amps, n, gate)


def simulate(circuit: Circuit) -> Statevector:
    """Evolve |0...0> through every gate; measurements are skipped."""
    if circuit.n > MAX_SIM_QUBITS:
        raise SizeLimitError(f'simulate supports at most {MAX_SIM_QUBITS} qubits, got {circuit.n}')
    amps = np.zeros(2 ** circuit.n, dtype=complex)
    amps[0] = 1.0
    apply_gates(amps, circuit.n, circuit.gates)
    logger.debug(f'Simulated {len(circuit.gates)} gates on {circuit.n} qubits')
    return Statevector(n=circuit.n, amplitudes=amps)


def sample(state: Statevector, shots: int, seed: int) -> SampleCounts:
    """Multinomial measurement draw with numpy's PCG64 generator."""
    Validator.require_int(shots, 'shots')
    Validator.require_positive(shots, 'shots')
    rng = np.random.default_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    drawn = rng.multinomial(shots, probs)
    counts = {index_to_bitstring(int(x), state.n): int(drawn[x]) for x in np.flatnonzero(drawn)}
    return SampleCounts(shots=shots, counts=dict(sorted(counts.items())))


def expectation_energy(state: Statevector, model: IsingModel) -> float:
    if state.n != model.n:
        raise ModelError(f'statevector has {state.n} qubits but the model has {model.n}')
    return float(state.probabilities() @ energies(model))


def remap_counts(counts: SampleCounts, positions: Sequence[int]) -> SampleCounts:
    """Read the bits at `positions` (one per logical qubit) out of every sampled string."""
    merged: Dict[str, int] = {}
    for bits, c in counts.counts.items():
        key = ''.join(bits[p] for p in positions)
        merged[key] = merged.get(key, 0) + c
    return SampleCounts(shots=counts.shots, counts=dict(sorted(merged.items())))


def derive_seed(seed: int, index: int) -> int:
    """Deterministic child seed for the index-th call or sweep point."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])
