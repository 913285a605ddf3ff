#!/usr/bin/env python3
"""
Tests for the Grover-mixer QAOA builders, the matrix-free statevector and the angle grid search.
"""

import math
import sys
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsamp.core import gmqaoa
from fairsamp.core.circuit import unitary_of
from fairsamp.core.gmqaoa import (
    assemble_qaoa,
    build_grover_mixer,
    build_phase_separator,
    build_state_prep,
    fast_statevector,
    grid_angles,
    grid_search,
    state_metrics,
)
from fairsamp.core.ising import energies, reduce_model
from fairsamp.core.models import IsingModel, QaoaParams
from fairsamp.core.problems import PROBLEM_IDS, builtin_problem, problem_info
from fairsamp.core.simulator import simulate
from fairsamp.utils.validation import ValidationError


def _equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> bool:
    k = int(np.argmax(np.abs(b)))
    phase = a.flat[k] / b.flat[k]
    return abs(abs(phase) - 1.0) < 1e-9 and np.allclose(a, phase * b, atol=atol)


def test_state_prep():
    print("🧪 Testing state preparation...")

    one = simulate(build_state_prep(1))
    assert np.allclose(one.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    four = simulate(build_state_prep(4))
    assert np.allclose(four.amplitudes, np.full(16, 0.25))
    assert build_state_prep(4).count_ops() == {'h': 4}

    try:
        build_state_prep(0)
        assert False, "Should have raised ValidationError"
    except ValidationError:
        pass

    print("✅ State preparation test passed")


def test_phase_separator():
    print("🧪 Testing phase separator...")

    gamma = math.pi / 4
    model = IsingModel(n=2, quadratic=[(0, 1, 1.0)])
    u = unitary_of(build_phase_separator(model, gamma))
    expected = np.diag(np.exp(-1j * gamma * energies(model)))
    assert _equal_up_to_phase(u, expected)

    fielded = IsingModel(n=2, quadratic=[(0, 1, -0.5)], linear=[(1, 2.0)])
    u = unitary_of(build_phase_separator(fielded, 0.3))
    assert _equal_up_to_phase(u, np.diag(np.exp(-0.3j * energies(fielded))))

    identity = unitary_of(build_phase_separator(builtin_problem('e'), 0.0))
    assert _equal_up_to_phase(identity, np.eye(8))

    print("✅ Phase separator test passed")


def test_grover_mixer():
    print("🧪 Testing Grover mixer...")

    n, beta = 3, 0.9
    u = unitary_of(build_grover_mixer(n, beta))
    uniform = np.full(2 ** n, 1 / math.sqrt(2 ** n))
    assert np.allclose(u @ uniform, np.exp(-1j * beta) * uniform)

    # states orthogonal to |F> are untouched
    orthogonal = np.zeros(2 ** n)
    orthogonal[0], orthogonal[1] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    assert np.allclose(u @ orthogonal, orthogonal)

    projector = np.outer(uniform, uniform)
    assert np.allclose(u, np.eye(2 ** n) - (1 - np.exp(-1j * beta)) * projector)

    assert np.allclose(unitary_of(build_grover_mixer(2, 0.0)), np.eye(4))

    print("✅ Grover mixer test passed")


def test_reference_table_reproduced():
    """Grid search on each reduced problem lands on the tabulated optimum."""
    print("🧪 Testing grid search against reference optima...")

    for pid in PROBLEM_IDS:
        info = problem_info(pid)
        result = grid_search(reduce_model(info.model))
        assert abs(result.energy - info.optimum_energy) <= 1e-3, (pid, result.energy)
        assert abs(result.gsp - info.optimum_gsp) <= 1e-3, (pid, result.gsp)
        assert result.evaluations == 120 ** 2
        assert result.params.p == 1

    print("✅ Reference optima test passed")


def test_grid_angles_and_ties():
    print("🧪 Testing grid angles and tie breaking...")

    angles = grid_angles(math.pi / 2)
    assert np.allclose(angles, [-math.pi, -math.pi / 2, 0.0, math.pi / 2])
    try:
        grid_angles(1.0)
        assert False, "Should have raised ValidationError"
    except ValidationError:
        pass

    # every state is a ground state, so the first grid point wins
    flat = IsingModel(n=2)
    result = grid_search(flat, resolution=math.pi / 6)
    assert result.params == QaoaParams.single(-math.pi, -math.pi)
    assert abs(result.energy) < 1e-12
    assert abs(result.gsp - 1.0) < 1e-12

    print("✅ Grid angles and tie breaking test passed")


def test_multi_round_budget():
    print("🧪 Testing multi-round grid search...")

    e = reduce_model(builtin_problem('e'))
    result = grid_search(e, resolution=math.pi / 4, p=2)
    assert result.params.p == 2
    assert result.evaluations == 8 ** 4
    one_round = grid_search(e, resolution=math.pi / 4)
    assert result.energy <= one_round.energy + 1e-12

    try:
        grid_search(e, p=2)
        assert False, "Should have refused a grid over the budget"
    except ValidationError:
        pass

    print("✅ Multi-round grid search test passed")


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=4),
       st.lists(st.floats(-math.pi, math.pi), min_size=2, max_size=6).filter(lambda v: len(v) % 2 == 0))
def test_fast_statevector_matches_circuit(pid_index, angles):
    """The matrix-free path and the gate-level circuit agree up to global phase."""
    model = reduce_model(builtin_problem(PROBLEM_IDS[pid_index]))
    half = len(angles) // 2
    params = QaoaParams(betas=tuple(angles[:half]), gammas=tuple(angles[half:]))
    fast = fast_statevector(model, params)
    circuit = simulate(assemble_qaoa(model, params, measure=False))
    assert _equal_up_to_phase(circuit.amplitudes, fast.amplitudes, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=2, max_value=5),
       st.lists(st.integers(-2, 2), min_size=10, max_size=10),
       st.lists(st.integers(-1, 1), min_size=5, max_size=5),
       st.integers(min_value=1, max_value=3),
       st.lists(st.floats(-math.pi, math.pi), min_size=6, max_size=6))
def test_equal_energies_get_equal_probabilities(n, weights, fields, p, angles):
    """Grover-mixer QAOA samples every pair of equal-energy states with the same probability."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    model = IsingModel(n=n, quadratic=[(i, j, w) for (i, j), w in zip(pairs, weights) if w],
                       linear=[(i, h) for i, h in enumerate(fields[:n]) if h])
    params = QaoaParams(betas=tuple(angles[:p]), gammas=tuple(angles[3:3 + p]))
    probs = fast_statevector(model, params).probabilities()
    values = energies(model)
    for level in np.unique(values):
        group = probs[np.abs(values - level) < 1e-9]
        assert group.max() - group.min() <= 1e-9


def test_grid_search_matches_statevector():
    """Grid values agree with a direct simulation at the chosen angles, with or without the phase table."""
    print("🧪 Testing grid search values...")

    for model in (reduce_model(builtin_problem('a')), reduce_model(builtin_problem('c')), builtin_problem('e')):
        for p in (1, 2):
            result = grid_search(model, resolution=math.pi / 4, p=p)
            energy, ground_probability = state_metrics(model, fast_statevector(model, result.params))
            assert abs(result.energy - energy) < 1e-10
            assert abs(result.gsp - ground_probability) < 1e-10

            saved = gmqaoa.PHASE_TABLE_LIMIT
            gmqaoa.PHASE_TABLE_LIMIT = 0
            try:
                streamed = grid_search(model, resolution=math.pi / 4, p=p)
            finally:
                gmqaoa.PHASE_TABLE_LIMIT = saved
            assert streamed.params == result.params
            assert abs(streamed.energy - result.energy) < 1e-12

    print("✅ Grid search values test passed")


@settings(max_examples=100, deadline=None)
@given(p=st.integers(min_value=1, max_value=3),
       angles=st.lists(st.floats(-math.pi, math.pi), min_size=6, max_size=6))
def _assert_levels_sampled_evenly(problem, reduce, p, angles):
    model = builtin_problem(problem)
    if reduce:
        model = reduce_model(model)
    params = QaoaParams(betas=tuple(angles[:p]), gammas=tuple(angles[3:3 + p]))
    probs = fast_statevector(model, params).probabilities()
    values = energies(model)
    for level in np.unique(values):
        group = probs[np.abs(values - level) < 1e-9]
        assert group.max() - group.min() <= 1e-9, (problem, reduce, level)


def test_builtin_problems_sample_levels_evenly():
    """100 random angle vectors per builtin problem, reduced and unreduced."""
    print("🧪 Testing equal-energy sampling on builtin problems...")

    for problem in PROBLEM_IDS:
        for reduce in (True, False):
            _assert_levels_sampled_evenly(problem=problem, reduce=reduce)

    print("✅ Equal-energy sampling on builtin problems test passed")


def main():
    """Run all GM-QAOA tests."""
    print("🚀 Starting GM-QAOA tests...\n")

    try:
        test_state_prep()
        test_phase_separator()
        test_grover_mixer()
        test_reference_table_reproduced()
        test_grid_angles_and_ties()
        test_multi_round_budget()
        test_fast_statevector_matches_circuit()
        test_equal_energies_get_equal_probabilities()
        test_grid_search_matches_statevector()
        test_builtin_problems_sample_levels_evenly()

        print("\n🎉 All GM-QAOA tests passed!")
        return 0

    except Exception as e:
        print(f"\n❌ Test failed: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
