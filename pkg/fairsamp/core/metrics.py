"""Evaluation metrics: ground state probability, shots-to-reject fairness, aggregate circuit error."""

import logging
import math
from typing import Dict, Mapping, Optional

import numpy as np
from scipy.special import gammaincc

from fairsamp.core.circuit import Circuit, Gate, GateKind
from fairsamp.core.errors import CalibrationError, FairnessError, MissingCalibrationError
from fairsamp.core.models import (
    CalibrationData,
    ComplementMode,
    FairnessConfig,
    FairnessResult,
    GroundSet,
    SampleCounts,
    complement,
)
from fairsamp.utils.validation import Validator

logger = logging.getLogger(__name__)

GATE_ALIASES = {
    'cx': 'cnot', 'cnot': 'cnot', 'sqrtx': 'sx', 'sx': 'sx', 'u1': 'p', 'phase': 'p',
    'toffoli': 'ccx', 'rz': 'rz', 'x': 'x', 'h': 'h',
}


def canonical_gate_name(name: str) -> str:
    key = name.strip().lower()
    return GATE_ALIASES.get(key, key)


def gsp(counts: SampleCounts, ground: GroundSet) -> float:
    """Fraction of shots landing in the ground set; both complement modes agree."""
    Validator.require_positive(counts.shots, 'shots')
    hits = sum(c for bits, c in counts.counts.items() if ground.contains(bits))
    return hits / counts.shots


def ground_counts(counts: SampleCounts, ground: GroundSet,
                  mode: Optional[ComplementMode] = None) -> Dict[str, int]:
    """Per-ground-state counts.

    Combined mode keys each complementary pair by its lexicographically smaller member
    and adds both counts. A ground set that is not complement-closed (a reduced model)
    has no pairs to merge and is counted as in separate mode.
    """
    mode = mode or ground.complement_mode
    if mode == ComplementMode.SEPARATE or not ground.is_complement_closed:
        return {s: counts.get(s) for s in sorted(ground.states)}
    merged: Dict[str, int] = {}
    for s in ground.states:
        key = min(s, complement(s))
        if key in merged:
            continue
        merged[key] = counts.get(key) + counts.get(complement(key))
    return dict(sorted(merged.items()))


def _rejects(probs: np.ndarray, shots: int, cfg: FairnessConfig, seed: int) -> bool:
    k = len(probs)
    rng = np.random.default_rng(np.random.SeedSequence([seed, shots]))
    samples = rng.multinomial(shots, probs, size=cfg.inner_loops)
    expected = shots / k
    chi2 = ((samples - expected) ** 2).sum(axis=1) / expected
    p_values = gammaincc((k - 1) / 2.0, chi2 / 2.0)
    return float(np.mean(p_values < cfg.significance)) >= cfg.rejection_fraction


def fairness_nstr(ground_counts: Mapping[str, int], cfg: Optional[FairnessConfig] = None,
                  seed: int = 0) -> FairnessResult:
    """Smallest shot count at which a chi-squared test rejects uniform sampling often enough.

    For a candidate N, n_i trials each draw N samples from the empirical ground-state
    distribution; N qualifies when at least `rejection_fraction` of the trials reject
    uniformity at `significance`. Candidates double until one qualifies, then a binary
    search finds the smallest. Trial seeds derive from (seed, N).
    """
    cfg = cfg or FairnessConfig()
    values = np.array([ground_counts[k] for k in sorted(ground_counts)], dtype=float)
    if len(values) < 2:
        raise FairnessError('fairness needs at least two ground states')
    if np.any(values < 0):
        raise FairnessError('ground counts must be non-negative')
    total = values.sum()
    if total < 1:
        raise FairnessError('no shots landed on a ground state')
    probs = values / total

    def qualifies(shots: int) -> bool:
        return _rejects(probs, shots, cfg, seed)

    lo, hi = 0, 1
    while not qualifies(hi):
        lo = hi
        if hi >= cfg.cap:
            logger.warning(f'Fairness search reached the cap of {cfg.cap} shots')
            return FairnessResult(shots=None, cap_reached=True, cap=cfg.cap)
        hi = min(hi * 2, cfg.cap)
    # lo fails (or is 0), hi qualifies
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if qualifies(mid):
            hi = mid
        else:
            lo = mid
    return FairnessResult(shots=hi, cap_reached=False, cap=cfg.cap)


def gate_error(gate: Gate, calib: CalibrationData) -> float:
    name = canonical_gate_name(gate.kind.value)
    if len(gate.qubits) == 1:
        rate = calib.single_qubit.get((name, gate.qubits[0]))
        if rate is None:
            rate = calib.defaults.single
    elif len(gate.qubits) == 2:
        edge = tuple(sorted(gate.qubits))
        rate = calib.two_qubit.get((name, edge))
        if rate is None:
            rate = calib.defaults.two
    else:
        raise CalibrationError(f'{gate} must be decomposed before its error can be estimated')
    if rate is None:
        raise MissingCalibrationError(f'no calibration entry or default for {name} on {gate.qubits}')
    return rate


def readout_error(qubit: int, calib: CalibrationData) -> float:
    rate = calib.readout.get(qubit)
    if rate is None:
        rate = calib.defaults.readout
    if rate is None:
        raise MissingCalibrationError(f'no readout calibration for qubit {qubit}')
    return rate


def aggregate_error(circuit: Circuit, calib: CalibrationData, include_readout: bool = True) -> float:
    """E_C = 1 - prod(1 - e_i) over every gate, plus one readout term per measured qubit."""
    success = 1.0
    for g in circuit.gates:
        if g.kind == GateKind.MEASURE:
            continue
        success *= 1.0 - gate_error(g, calib)
    if include_readout:
        for q in circuit.measured_qubits():
            success *= 1.0 - readout_error(q, calib)
    return min(1.0, max(0.0, 1.0 - success))


def summarize(values) -> Dict[str, float]:
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        return {'mean': math.nan, 'std': math.nan, 'min': math.nan, 'max': math.nan}
    return {'mean': float(arr.mean()), 'std': float(arr.std()), 'min': float(arr.min()), 'max': float(arr.max())}


def fairness_or_nan(ground_counts: Mapping[str, int], cfg: FairnessConfig, seed: int) -> FairnessResult:
    """fairness_nstr, reporting an undefined result instead of raising."""
    try:
        return fairness_nstr(ground_counts, cfg, seed)
    except FairnessError as e:
        logger.warning(f'Fairness undefined: {e}')
        return FairnessResult(shots=None, cap_reached=False, cap=cfg.cap)
