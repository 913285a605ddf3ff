#!/usr/bin/env python3
"""
Tests for topology-aware compilation: decomposition, routing, native emission and equivalence checking.
"""

import sys
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

import networkx as nx
import numpy as np

from fairsamp.core.circuit import Circuit, Gate, GateKind, Gateset, unitary_of, validate
from fairsamp.core.compiler import (
    CompiledCircuit,
    McpStrategy,
    _Router,
    cancel_adjacent,
    fold_phases,
    lower_swaps,
    optimize,
    route_and_lower,
    verify_equivalence,
    wrap_exponent,
)
from fairsamp.core.errors import AncillaBudgetError, CompilationError
from fairsamp.core.gmqaoa import assemble_qaoa, build_grover_mixer
from fairsamp.core.ising import reduce_model
from fairsamp.core.problems import PROBLEM_IDS, builtin_problem, problem_info
from fairsamp.core.simulator import simulate
from fairsamp.core.topology import Topology, builtin_topology, clique, embed_layout


def _problem_circuit(pid: str, measure: bool = True) -> Circuit:
    model = reduce_model(builtin_problem(pid))
    return assemble_qaoa(model, problem_info(pid).table_params, measure=measure)


def _target(name: str, n: int):
    return clique(n) if name == 'Clique' else builtin_topology(name)


def test_admitted_pairs_are_equivalent():
    """Every admitted (problem, topology) pair compiles to an equivalent native circuit."""
    print("🧪 Testing admitted problem/topology pairs...")

    for pid in PROBLEM_IDS:
        circuit = _problem_circuit(pid)
        for name in problem_info(pid).topologies:
            topology = _target(name, circuit.n)
            compiled = route_and_lower(circuit, topology, ancilla_budget=min(1, topology.size - circuit.n))
            assert validate(compiled.circuit, topology) == [], (pid, name)
            assert compiled.circuit.gateset == Gateset.IBM
            assert verify_equivalence(circuit, compiled), (pid, name)
            if topology.is_clique:
                assert compiled.swap_count == 0, (pid, name)

    print("✅ Admitted pairs test passed")


def test_unmeasured_compilation_is_unitary_equivalent():
    print("🧪 Testing strict unitary equivalence...")

    circuit = _problem_circuit('e', measure=False)
    compiled = route_and_lower(circuit, builtin_topology('LNN'))
    assert not compiled.boundary_simplified
    assert verify_equivalence(circuit, compiled)

    gates = list(compiled.circuit.gates)
    first_cnot = next(i for i, g in enumerate(gates) if g.kind == GateKind.CNOT)
    broken = compiled.model_copy(update={'circuit': compiled.circuit.with_gates(gates[:first_cnot] + gates[first_cnot + 1:])})
    assert not verify_equivalence(circuit, broken)

    mixer = build_grover_mixer(4, 0.7)
    compiled = route_and_lower(mixer, clique(5), ancilla_budget=1)
    assert compiled.ancilla
    assert verify_equivalence(mixer, compiled)

    print("✅ Strict unitary equivalence test passed")


def test_sparse_topology_needs_swaps():
    print("🧪 Testing SWAP routing on 6A...")

    circuit = _problem_circuit('c')
    compiled = route_and_lower(circuit, builtin_topology('6A'), ancilla_budget=1)
    assert compiled.swap_count >= 1
    assert verify_equivalence(circuit, compiled)
    report = compiled.report()
    assert report['topology'] == '6A'
    assert report['swap_count'] == compiled.swap_count
    assert report['cnot_count'] > 0
    assert sorted(report['layout_out']) == [str(q) for q in range(circuit.n)]

    print("✅ SWAP routing test passed")


def test_generic_gateset():
    print("🧪 Testing generic gateset emission...")

    circuit = _problem_circuit('d')
    topology = builtin_topology('LNN')
    compiled = route_and_lower(circuit, topology, gateset='generic')
    assert compiled.circuit.gateset == Gateset.GENERIC
    assert validate(compiled.circuit, topology) == []
    assert verify_equivalence(circuit, compiled)

    print("✅ Generic gateset test passed")


def test_mcp_strategies():
    print("🧪 Testing MCP decomposition strategies...")

    circuit = _problem_circuit('a')
    try:
        route_and_lower(circuit, clique(4), ancilla_budget=0, mcp_strategy=McpStrategy.ANCILLA)
        assert False, "Should have raised AncillaBudgetError"
    except AncillaBudgetError:
        pass

    recursive = route_and_lower(circuit, clique(5), ancilla_budget=1, mcp_strategy='recursive')
    assert recursive.ancilla == ()
    assert verify_equivalence(circuit, recursive)

    with_ancilla = route_and_lower(circuit, clique(5), ancilla_budget=1, mcp_strategy='ancilla')
    assert len(with_ancilla.ancilla) == 1
    assert verify_equivalence(circuit, with_ancilla)

    print("✅ MCP strategies test passed")


def test_compile_rejections():
    print("🧪 Testing compile rejections...")

    circuit = _problem_circuit('c')
    for kwargs in ({'topology': builtin_topology('LNN')},
                   {'topology': builtin_topology('6A'), 'ancilla_budget': 2},
                   {'topology': builtin_topology('6A'), 'gateset': 'abstract'},
                   {'topology': builtin_topology('6A'), 'ancilla_budget': -1}):
        try:
            route_and_lower(circuit, **kwargs)
            assert False, f"Should have rejected {kwargs}"
        except CompilationError:
            pass

    print("✅ Compile rejections test passed")


def test_layout_embedding():
    print("🧪 Testing layout embedding...")

    assert embed_layout(nx.complete_graph(4), builtin_topology('6A')) is None

    path = nx.path_graph(3)
    layout = embed_layout(path, builtin_topology('LNN'))
    assert layout is not None
    lnn = builtin_topology('LNN').graph()
    assert all(lnn.has_edge(layout[a], layout[b]) for a, b in path.edges)
    assert embed_layout(path, builtin_topology('5T'), seed=3) == embed_layout(path, builtin_topology('5T'), seed=3)

    print("✅ Layout embedding test passed")


def test_peephole_passes():
    print("🧪 Testing peephole passes...")

    assert wrap_exponent(2.0) == 0.0
    assert wrap_exponent(-1.0) == 1.0
    assert abs(wrap_exponent(2.5) - 0.5) < 1e-12

    gates = [Gate.of(GateKind.PHASE, 0, param=0.25), Gate.of(GateKind.CNOT, 0, 1),
             Gate.of(GateKind.CNOT, 0, 1), Gate.of(GateKind.PHASE, 0, param=-0.25)]
    assert cancel_adjacent(fold_phases(gates)) == []

    sx = [Gate.of(GateKind.SX, 0), Gate.of(GateKind.SX, 0)]
    assert cancel_adjacent(sx) == [Gate.of(GateKind.X, 0)]

    kept = [Gate.of(GateKind.H, 0), Gate.of(GateKind.PHASE, 0, param=0.5), Gate.of(GateKind.H, 0)]
    before = unitary_of(Circuit(n=1, gates=tuple(kept)))
    after = unitary_of(Circuit(n=1, gates=tuple(cancel_adjacent(fold_phases(kept)))))
    assert abs(abs((before.conj().T @ after).trace()) - 2.0) < 1e-9

    print("✅ Peephole passes test passed")


def test_compiled_report_is_serializable():
    print("🧪 Testing compile report...")

    compiled = route_and_lower(_problem_circuit('e'), builtin_topology('LNN'))
    assert isinstance(compiled, CompiledCircuit)
    report = compiled.report()
    for key in ('topology', 'gateset', 'gates', 'ops', 'cnot_count', 'swap_count', 'depth',
                'layout_in', 'layout_out', 'ancilla', 'boundary_simplified'):
        assert key in report
    assert report['boundary_simplified'] is True
    assert report['gates'] == len(compiled.circuit.gates)

    print("✅ Compile report test passed")


def _cnots(gates) -> int:
    return sum(1 for g in gates if g.kind == GateKind.CNOT)


def test_swap_beside_cnot_costs_one_cnot():
    """A SWAP sharing its edge with a neighbouring CNOT lowers to one extra CNOT, in either orientation."""
    print("🧪 Testing SWAP lowering beside a CNOT...")

    swap = Gate.of(GateKind.SWAP, 0, 1)
    assert _cnots(optimize(lower_swaps([swap]))) == 3
    for before, after in (([], [Gate.of(GateKind.CNOT, 0, 1)]), ([], [Gate.of(GateKind.CNOT, 1, 0)]),
                          ([Gate.of(GateKind.CNOT, 0, 1)], []), ([Gate.of(GateKind.CNOT, 1, 0)], [])):
        gates = before + [swap] + after
        lowered = optimize(lower_swaps(gates))
        assert _cnots(lowered) == 2, gates
        expected = unitary_of(Circuit(n=2, gates=tuple(gates)))
        assert np.allclose(unitary_of(Circuit(n=2, gates=tuple(lowered))), expected)

    print("✅ SWAP lowering beside a CNOT test passed")


def test_paired_toffolis_cancel():
    """Repeated Toffolis on one triple alternate their CCZ sign so the half-angle phases cancel."""
    print("🧪 Testing paired Toffoli cancellation...")

    toffoli = Gate.of(GateKind.TOFFOLI, 0, 1, 2)
    paired = Circuit(n=3, gates=(toffoli, toffoli))
    # the same gate with its controls listed the other way round gets no sign alternation
    unpaired = Circuit(n=3, gates=(toffoli, Gate.of(GateKind.TOFFOLI, 1, 0, 2)))
    alternating = route_and_lower(paired, clique(3))
    same_sign = route_and_lower(unpaired, clique(3))
    assert verify_equivalence(paired, alternating)
    assert verify_equivalence(unpaired, same_sign)
    assert alternating.report()['cnot_count'] == 0
    assert len(alternating.circuit.gates) < len(same_sign.circuit.gates)
    assert same_sign.report()['cnot_count'] > 0

    print("✅ Paired Toffoli cancellation test passed")


def test_abstract_gates_compile():
    print("🧪 Testing compilation of CP, Toffoli and SWAP...")

    gates = (Gate.of(GateKind.H, 0), Gate.of(GateKind.H, 1), Gate.of(GateKind.H, 2),
             Gate.of(GateKind.CPHASE, 0, 1, param=0.3), Gate.of(GateKind.TOFFOLI, 0, 2, 1),
             Gate.of(GateKind.PHASE, 2, param=-0.7), Gate.of(GateKind.CPHASE, 1, 2, param=1.25))
    circuit = Circuit(n=3, gates=gates)
    swapped = Circuit(n=3, gates=gates + (Gate.of(GateKind.SWAP, 0, 2),))
    for topology in (clique(3), builtin_topology('LNN')):
        for gateset in (Gateset.IBM, Gateset.GENERIC):
            compiled = route_and_lower(circuit, topology, gateset=gateset)
            assert validate(compiled.circuit, topology) == [], (topology.name, gateset)
            assert verify_equivalence(circuit, compiled), (topology.name, gateset)

            relabelled = route_and_lower(swapped, topology, gateset=gateset)
            assert verify_equivalence(swapped, relabelled), (topology.name, gateset)
            # a trailing logical SWAP only moves the output layout
            assert relabelled.report()['cnot_count'] == compiled.report()['cnot_count']
            assert relabelled.layout_out[0] == compiled.layout_out[2]

    print("✅ CP, Toffoli and SWAP compilation test passed")


def test_swap_into_idle_node_uses_two_cnots():
    print("🧪 Testing SWAP into an idle node...")

    path = Topology(name='path3', nodes=(0, 1, 2), edges=((0, 1), (1, 2)))
    router = _Router(path, {0: 0, 1: 2})
    routed = router.route([Gate.of(GateKind.H, 0), Gate.of(GateKind.CNOT, 0, 1)])
    assert routed == [Gate.of(GateKind.H, 0), Gate.of(GateKind.CNOT, 0, 1), Gate.of(GateKind.CNOT, 1, 0),
                      Gate.of(GateKind.CNOT, 1, 2)]
    assert router.swaps == 1
    assert router.l2p == {0: 1, 1: 2}

    # Bell pair on nodes 1 and 2, node 0 back in |0>
    probs = simulate(Circuit(n=3, gates=tuple(routed))).probabilities()
    assert abs(probs[0] - 0.5) < 1e-12 and abs(probs[0b110] - 0.5) < 1e-12

    print("✅ SWAP into an idle node test passed")


def test_ancilla_ends_without_phases():
    """Phases next to an ancilla's |0> boundaries are dropped even without measurement."""
    print("🧪 Testing ancilla boundary phases...")

    mixer = build_grover_mixer(4, 1.1)
    compiled = route_and_lower(mixer, clique(5), ancilla_budget=1)
    assert compiled.ancilla
    assert verify_equivalence(mixer, compiled)
    ancilla = compiled.ancilla[0]
    on_ancilla = [g for g in compiled.circuit.gates if ancilla in g.qubits]
    assert on_ancilla
    assert on_ancilla[0].kind != GateKind.RZ
    assert on_ancilla[-1].kind != GateKind.RZ

    print("✅ Ancilla boundary phases test passed")


def main():
    """Run all compiler tests."""
    print("🚀 Starting compiler tests...\n")

    try:
        test_admitted_pairs_are_equivalent()
        test_unmeasured_compilation_is_unitary_equivalent()
        test_sparse_topology_needs_swaps()
        test_generic_gateset()
        test_mcp_strategies()
        test_compile_rejections()
        test_layout_embedding()
        test_peephole_passes()
        test_compiled_report_is_serializable()
        test_swap_beside_cnot_costs_one_cnot()
        test_paired_toffolis_cancel()
        test_abstract_gates_compile()
        test_swap_into_idle_node_uses_two_cnots()
        test_ancilla_ends_without_phases()

        print("\n🎉 All compiler tests passed!")
        return 0

    except Exception as e:
        print(f"\n❌ Test failed: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
