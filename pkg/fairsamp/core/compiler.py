"""Topology-aware lowering of abstract circuits to native gatesets.

Pipeline: decompose multi-qubit phases and Toffolis, rewrite every diagonal
as Phase(t), commute H/X pairs, lower to the target gateset, fold phases,
place and route with SWAPs, lower SWAPs to CNOTs, fold again, and emit.
All rewrites hold up to global phase.
"""

import itertools
import logging
import math
from collections import defaultdict
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict

from fairsamp.core.circuit import Circuit, Gate, GateKind, Gateset, unitary_of, validate
from fairsamp.core.errors import AncillaBudgetError, CompilationError, SizeLimitError, UnroutableGateError
from fairsamp.core.simulator import apply_gates, simulate
from fairsamp.core.topology import Topology, embed_layout, greedy_layout

logger = logging.getLogger(__name__)

MAX_VERIFY_QUBITS = 10
PHASE_ATOL = 1e-12


class McpStrategy(str, Enum):
    AUTO = 'auto'
    ANCILLA = 'ancilla'
    RECURSIVE = 'recursive'


class CompiledCircuit(BaseModel):
    """A native, topology-valid circuit plus the layout bookkeeping needed to read it."""
    model_config = ConfigDict(frozen=True)

    circuit: Circuit
    topology: Topology
    n_logical: int
    layout_in: Dict[int, int]
    layout_out: Dict[int, int]
    ancilla: Tuple[int, ...] = ()
    swap_count: int = 0
    boundary_simplified: bool = False

    def report(self) -> Dict[str, object]:
        ops = self.circuit.count_ops()
        return {
            'topology': self.topology.name,
            'gateset': self.circuit.gateset.value,
            'gates': sum(ops.values()),
            'ops': ops,
            'cnot_count': ops.get(GateKind.CNOT.value, 0),
            'swap_count': self.swap_count,
            'depth': self.circuit.depth(),
            'layout_in': {str(k): v for k, v in sorted(self.layout_in.items())},
            'layout_out': {str(k): v for k, v in sorted(self.layout_out.items())},
            'ancilla': list(self.ancilla),
            'boundary_simplified': self.boundary_simplified,
        }


def _p(q: int, t: float) -> Gate:
    return Gate.of(GateKind.PHASE, q, param=t)


def _cx(c: int, t: int) -> Gate:
    return Gate.of(GateKind.CNOT, c, t)


def _h(q: int) -> Gate:
    return Gate.of(GateKind.H, q)


def controlled_phase_gates(t: float, a: int, b: int) -> List[Gate]:
    """Z^t on |11>: ab = (a + b - a^b) / 2."""
    return [_p(a, t / 2), _p(b, t / 2), _cx(a, b), _p(b, -t / 2), _cx(a, b)]


class _Decomposer:
    """Expands MCP, CP and Toffoli gates into Phase, CNOT and H."""

    def __init__(self, strategy: McpStrategy, ancillas: Sequence[int]):
        self.strategy = strategy
        self.ancillas = tuple(ancillas)
        self.used = set()
        self._toffoli_sign: Dict[Tuple[int, int, int], int] = {}

    def run(self, gates: Sequence[Gate]) -> List[Gate]:
        out: List[Gate] = []
        for g in gates:
            if g.kind == GateKind.MCPHASE:
                out += self.mcp(g.param, g.qubits, self.ancillas, top=True)
            elif g.kind == GateKind.CPHASE:
                out += controlled_phase_gates(g.param, *g.qubits)
            elif g.kind == GateKind.TOFFOLI:
                out += self.toffoli(*g.qubits)
            else:
                out.append(g)
        return out

    def toffoli(self, c1: int, c2: int, x: int) -> List[Gate]:
        # consecutive Toffolis on one triple alternate the CCZ sign so their
        # controlled-Z^{1/2} parts cancel once phases are folded
        key = (c1, c2, x)
        s = self._toffoli_sign.get(key, 1)
        self._toffoli_sign[key] = -s
        ccz = (controlled_phase_gates(s / 2, c1, c2) + controlled_phase_gates(s / 2, c1, x)
               + [_cx(c2, x)] + controlled_phase_gates(-s / 2, c1, x) + [_cx(c2, x)])
        return [_h(x)] + ccz + [_h(x)]

    def mcp(self, t: float, ops: Tuple[int, ...], free: Tuple[int, ...], top: bool = False) -> List[Gate]:
        m = len(ops)
        if m == 1:
            return [_p(ops[0], t)]
        if m == 2:
            return controlled_phase_gates(t, *ops)
        if m == 3:
            c1, c2, x = ops
            return (controlled_phase_gates(t / 2, c1, c2) + [_p(x, t / 2)] + self.toffoli(c1, c2, x)
                    + [_p(x, -t / 2)] + self.toffoli(c1, c2, x))
        if self.strategy != McpStrategy.RECURSIVE and free:
            anc = free[0]
            self.used.add(anc)
            compute = self.toffoli(ops[0], ops[1], anc)
            inner = self.mcp(t, (anc,) + tuple(ops[2:]), free[1:])
            return compute + inner + self.toffoli(ops[0], ops[1], anc)
        if self.strategy == McpStrategy.ANCILLA and top:
            raise AncillaBudgetError(f'{m}-qubit controlled phase needs an ancilla but none is available')
        head, b, x = tuple(ops[:-2]), ops[-2], ops[-1]
        # b x = (b + x - b^x) / 2 under the head controls
        return (self.mcp(t / 2, head + (b,), free) + self.mcp(t / 2, head + (x,), free) + [_cx(b, x)]
                + self.mcp(-t / 2, head + (x,), free) + [_cx(b, x)])


_DIAGONAL_EXPONENT = {GateKind.S: 0.5, GateKind.SDG: -0.5, GateKind.T: 0.25, GateKind.TDG: -0.25}


def normalize_phases(gates: Sequence[Gate]) -> List[Gate]:
    out = []
    for g in gates:
        if g.kind in _DIAGONAL_EXPONENT:
            out.append(_p(g.qubits[0], _DIAGONAL_EXPONENT[g.kind]))
        elif g.kind == GateKind.RZ:
            out.append(_p(g.qubits[0], g.param / math.pi))
        else:
            out.append(g)
    return out


def commute_hadamard_x(gates: Sequence[Gate]) -> List[Gate]:
    """H then X becomes Z then H; X then H becomes H then Z."""
    out: List[Gate] = []
    last: Dict[int, int] = {}
    for g in gates:
        q = g.qubits[0]
        if len(g.qubits) == 1 and q in last:
            before = out[last[q]]
            if g.kind == GateKind.X and before.kind == GateKind.H:
                out[last[q]] = _p(q, 1.0)
                out.append(_h(q))
                last[q] = len(out) - 1
                continue
            if g.kind == GateKind.H and before.kind == GateKind.X:
                out[last[q]] = _h(q)
                out.append(_p(q, 1.0))
                last[q] = len(out) - 1
                continue
        out.append(g)
        for w in g.qubits:
            last[w] = len(out) - 1
    return out


def lower_to_gateset(gates: Sequence[Gate], gateset: Gateset) -> List[Gate]:
    out: List[Gate] = []
    for g in gates:
        q = g.qubits[0]
        if gateset == Gateset.IBM and g.kind == GateKind.H:
            # S SX S = e^{i pi/4} H
            out += [_p(q, 0.5), Gate.of(GateKind.SX, q), _p(q, 0.5)]
        elif gateset == Gateset.GENERIC and g.kind == GateKind.X:
            out += [_h(q), _p(q, 1.0), _h(q)]
        elif gateset == Gateset.GENERIC and g.kind == GateKind.SX:
            out += [_h(q), _p(q, 0.5), _h(q)]
        else:
            out.append(g)
    return out


def wrap_exponent(t: float) -> float:
    """Phase exponent reduced to (-1, 1]; multiples of 2 become 0."""
    t = math.remainder(t, 2.0)
    if abs(t) < PHASE_ATOL:
        return 0.0
    if abs(t + 1.0) < PHASE_ATOL:
        return 1.0
    return t


def fold_phases(gates: Sequence[Gate]) -> List[Gate]:
    """Merge Phase gates acting on the same affine parity of path variables.

    CNOT, X and SWAP move parities between wires; any other non-diagonal gate
    starts a fresh variable on its wire. Each merged phase lands where its
    parity first appeared.
    """
    fresh = itertools.count()
    wires: Dict[int, Tuple[frozenset, int]] = {}

    def state(q: int) -> Tuple[frozenset, int]:
        if q not in wires:
            wires[q] = (frozenset({next(fresh)}), 0)
        return wires[q]

    slots: List[Optional[Gate]] = []
    terms: Dict[frozenset, list] = {}
    for g in gates:
        if g.kind == GateKind.PHASE:
            q = g.qubits[0]
            key, const = state(q)
            sign = -1.0 if const else 1.0
            if key in terms:
                terms[key][3] += sign * g.param
            else:
                terms[key] = [len(slots), q, sign, sign * g.param]
                slots.append(None)
            continue
        if g.kind == GateKind.CNOT:
            c, t = g.qubits
            kc, cc = state(c)
            kt, ct = state(t)
            wires[t] = (kc ^ kt, cc ^ ct)
        elif g.kind == GateKind.X:
            k, c = state(g.qubits[0])
            wires[g.qubits[0]] = (k, c ^ 1)
        elif g.kind == GateKind.SWAP:
            a, b = g.qubits
            sa, sb = state(a), state(b)
            wires[a], wires[b] = sb, sa
        else:
            for q in g.qubits:
                wires[q] = (frozenset({next(fresh)}), 0)
        slots.append(g)
    for pos, q, sign0, total in terms.values():
        t = wrap_exponent(sign0 * total)
        if t != 0.0:
            slots[pos] = _p(q, t)
    return [g for g in slots if g is not None]


def _cancels(before: Gate, after: Gate) -> bool:
    if before.kind != after.kind:
        return False
    if before.kind == GateKind.SWAP:
        return set(before.qubits) == set(after.qubits)
    if before.kind in (GateKind.CNOT, GateKind.X, GateKind.H):
        return before.qubits == after.qubits
    return False


def cancel_adjacent(gates: Sequence[Gate]) -> List[Gate]:
    """Remove self-inverse pairs that meet on every wire; SX SX merges into X."""
    slots: List[Optional[Gate]] = []
    prev: List[Dict[int, Optional[int]]] = []
    last: Dict[int, int] = {}
    for g in gates:
        heads = {last.get(q) for q in g.qubits}
        if len(heads) == 1:
            i = heads.pop()
            if i is not None and set(slots[i].qubits) == set(g.qubits):
                before = slots[i]
                if _cancels(before, g):
                    slots[i] = None
                    for q in before.qubits:
                        p = prev[i][q]
                        if p is None:
                            last.pop(q, None)
                        else:
                            last[q] = p
                    continue
                if before.kind == GateKind.SX and g.kind == GateKind.SX:
                    slots[i] = Gate.of(GateKind.X, *g.qubits)
                    continue
        prev.append({q: last.get(q) for q in g.qubits})
        slots.append(g)
        for q in g.qubits:
            last[q] = len(slots) - 1
    return [g for g in slots if g is not None]


def optimize(gates: Sequence[Gate]) -> List[Gate]:
    """Fold phases and cancel pairs until the gate count stops shrinking."""
    current = list(gates)
    while True:
        reduced = cancel_adjacent(fold_phases(current))
        if len(reduced) >= len(current):
            return reduced if len(reduced) == len(current) else current
        current = reduced


def drop_boundary_phases(gates: Sequence[Gate], zero_in: Iterable[int] = (), zero_out: Iterable[int] = (),
                         fixed_input: bool = True) -> List[Gate]:
    """Delete phases that act on basis states.

    A phase goes when it comes before any superposition on a wire that starts in a
    basis state, or when only basis permutations follow it before a Z measurement
    or before a wire that ends in |0>. `zero_in` and `zero_out` name wires known to
    start and end in |0> (ancillas, idle nodes); with `fixed_input` every wire starts
    in |0>, which only holds for measured circuits run from |0...0>.
    """
    classical: Dict[int, bool] = defaultdict(lambda: fixed_input)
    classical.update({q: True for q in zero_in})
    forward: List[Gate] = []
    for g in gates:
        if g.kind == GateKind.PHASE and classical[g.qubits[0]]:
            continue
        if g.kind == GateKind.CNOT:
            c, t = g.qubits
            if not classical[c]:
                classical[t] = False
        elif g.kind == GateKind.SWAP:
            a, b = g.qubits
            classical[a], classical[b] = classical[b], classical[a]
        elif g.kind not in (GateKind.X, GateKind.PHASE, GateKind.MEASURE):
            for q in g.qubits:
                classical[q] = False
        forward.append(g)

    # pending[q]: everything after this point on q is a basis permutation, then a
    # measurement or a known final |0>
    pending: Dict[int, bool] = defaultdict(bool)
    pending.update({q: True for q in zero_out})
    backward: List[Gate] = []
    for g in reversed(forward):
        if g.kind == GateKind.MEASURE:
            pending[g.qubits[0]] = True
        elif g.kind == GateKind.PHASE:
            if pending[g.qubits[0]]:
                continue
        elif g.kind == GateKind.CNOT:
            c, t = g.qubits
            pending[t] = pending[c] and pending[t]
        elif g.kind == GateKind.SWAP:
            a, b = g.qubits
            pending[a], pending[b] = pending[b], pending[a]
        elif g.kind != GateKind.X:
            for q in g.qubits:
                pending[q] = False
        backward.append(g)
    return backward[::-1]


class _Router:
    """Greedy SWAP insertion along shortest paths; layouts move instead of un-swapping."""

    def __init__(self, topology: Topology, layout: Dict[int, int]):
        self.graph = topology.graph()
        self.l2p = dict(layout)
        self.p2l = {p: q for q, p in layout.items()}
        self.origin = {p: p for p in topology.nodes}  # current node -> node its state started on
        self.out: List[Gate] = []
        self.swaps = 0

    def _swap(self, u: int, v: int) -> None:
        lu, lv = self.p2l.pop(u, None), self.p2l.pop(v, None)
        # a node holding no wire is still |0>: moving a state into it takes two CNOTs
        if lu is not None and lv is not None:
            self.out.append(Gate.of(GateKind.SWAP, u, v))
        elif lu is not None:
            self.out += [_cx(u, v), _cx(v, u)]
        elif lv is not None:
            self.out += [_cx(v, u), _cx(u, v)]
        self.swaps += 1
        if lu is not None:
            self.l2p[lu] = v
            self.p2l[v] = lu
        if lv is not None:
            self.l2p[lv] = u
            self.p2l[u] = lv
        self.origin[u], self.origin[v] = self.origin[v], self.origin[u]

    def route(self, gates: Sequence[Gate]) -> List[Gate]:
        for g in gates:
            if len(g.qubits) == 1:
                self.out.append(g.on(self.l2p[g.qubits[0]]))
            elif g.kind == GateKind.SWAP:
                a, b = g.qubits
                pa, pb = self.l2p[a], self.l2p[b]
                self.l2p[a], self.l2p[b] = pb, pa
                self.p2l[pa], self.p2l[pb] = b, a
            elif g.kind == GateKind.CNOT:
                a, b = g.qubits
                if not self.graph.has_edge(self.l2p[a], self.l2p[b]):
                    try:
                        path = nx.shortest_path(self.graph, self.l2p[a], self.l2p[b])
                    except nx.NetworkXNoPath as e:
                        raise UnroutableGateError(f'no path between the qubits of {g}') from e
                    for node in path[1:-1]:
                        self._swap(self.l2p[a], node)
                self.out.append(g.on(self.l2p[a], self.l2p[b]))
            else:
                raise CompilationError(f'router cannot place {g}; decompose it first')
        return self.out

    def out_permutation(self) -> Tuple[int, ...]:
        perm = [0] * len(self.origin)
        for node, start in self.origin.items():
            perm[start] = node
        return tuple(perm)


def _swap_orientation(pending: Sequence[Gate], emitted: Sequence[Gate], u: int, v: int) -> Tuple[int, int]:
    pair = {u, v}
    for g in pending:
        if pair & set(g.qubits):
            if g.kind == GateKind.CNOT and set(g.qubits) == pair:
                return g.qubits
            break
    for g in reversed(emitted):
        if pair & set(g.qubits):
            if g.kind == GateKind.CNOT and set(g.qubits) == pair:
                return g.qubits
            break
    return (min(u, v), max(u, v))


def lower_swaps(gates: Sequence[Gate]) -> List[Gate]:
    """SWAP -> three CNOTs, oriented so the outer CNOT can cancel a neighbouring one."""
    out: List[Gate] = []
    for k, g in enumerate(gates):
        if g.kind != GateKind.SWAP:
            out.append(g)
            continue
        c, t = _swap_orientation(gates[k + 1:], out, *g.qubits)
        out += [_cx(c, t), _cx(t, c), _cx(c, t)]
    return out


def emit_native(gates: Sequence[Gate], gateset: Gateset) -> List[Gate]:
    named = {0.5: GateKind.S, -0.5: GateKind.SDG, 0.25: GateKind.T, -0.25: GateKind.TDG}
    out = []
    for g in gates:
        if g.kind != GateKind.PHASE:
            out.append(g)
            continue
        t = wrap_exponent(g.param)
        q = g.qubits[0]
        kind = None
        if gateset == Gateset.GENERIC:
            kind = next((k for value, k in named.items() if abs(t - value) < PHASE_ATOL), None)
        out.append(Gate.of(kind, q) if kind else Gate.of(GateKind.RZ, q, param=math.pi * t))
    return out


def _interaction(gates: Sequence[Gate], wires: Sequence[int]) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(wires)
    for g in gates:
        if len(g.qubits) == 2 and g.kind != GateKind.SWAP:
            graph.add_edge(*g.qubits)
    return graph


def route_and_lower(circuit: Circuit, topology: Topology, gateset: Union[Gateset, str] = Gateset.IBM,
                    ancilla_budget: int = 0, mcp_strategy: Union[McpStrategy, str] = McpStrategy.AUTO,
                    seed: int = 0, simplify_boundaries: bool = True) -> CompiledCircuit:
    gateset = Gateset(gateset)
    strategy = McpStrategy(mcp_strategy)
    if gateset == Gateset.ABSTRACT:
        raise CompilationError('target gateset must be native (ibm or generic)')
    if circuit.gateset != Gateset.ABSTRACT:
        raise CompilationError(f'expected an abstract circuit, got {circuit.gateset.value}')
    if ancilla_budget < 0:
        raise AncillaBudgetError('ancilla budget cannot be negative')
    n = circuit.n
    if n > topology.size:
        raise CompilationError(f'{n} logical qubits do not fit on {topology.name} ({topology.size} nodes)')
    if n + ancilla_budget > topology.size:
        raise AncillaBudgetError(f'{n} logical qubits plus {ancilla_budget} ancillas exceed '
                                 f'{topology.name} ({topology.size} nodes)')

    decomposer = _Decomposer(strategy, range(n, n + ancilla_budget))
    gates = normalize_phases(decomposer.run(circuit.gates))
    gates = optimize(commute_hadamard_x(gates))
    gates = optimize(lower_to_gateset(gates, gateset))
    simplify = simplify_boundaries and circuit.has_measure()
    idle = sorted(decomposer.used)
    gates = optimize(drop_boundary_phases(gates, idle, idle, fixed_input=simplify))
    logger.debug(f'Logical lowering: {len(circuit.gates)} -> {len(gates)} gates')

    wires = list(range(n)) + sorted(decomposer.used)
    interaction = _interaction(gates, wires)
    layout = embed_layout(interaction, topology, seed=seed)
    if layout is None:
        logger.warning(f'No embedding into {topology.name}; using greedy layout with SWAP routing')
        layout = greedy_layout(interaction, topology)

    router = _Router(topology, layout)
    routed = router.route(gates)
    gates = optimize(lower_swaps(routed))
    # every node not holding a logical qubit starts and ends in |0>
    zero_in = set(topology.nodes) - {layout[q] for q in range(n)}
    zero_out = set(topology.nodes) - {router.l2p[q] for q in range(n)}
    gates = optimize(drop_boundary_phases(gates, zero_in, zero_out, fixed_input=simplify))

    native = Circuit(n=topology.size, gates=tuple(emit_native(gates, gateset)), gateset=gateset,
                     out_permutation=router.out_permutation())
    violations = validate(native, topology)
    if violations:
        raise CompilationError(f'compiled circuit is invalid: {violations[0]}')

    compiled = CompiledCircuit(
        circuit=native,
        topology=topology,
        n_logical=n,
        layout_in={q: layout[q] for q in range(n)},
        layout_out={q: router.l2p[q] for q in range(n)},
        ancilla=tuple(sorted(layout[a] for a in decomposer.used)),
        swap_count=router.swaps,
        boundary_simplified=simplify,
    )
    logger.info(f'Compiled onto {topology.name}/{gateset.value}: {len(native.gates)} gates, '
                f'{router.swaps} swaps, layout {compiled.layout_in} -> {compiled.layout_out}')
    return compiled


def _basis_index(x: int, n: int, layout: Dict[int, int]) -> int:
    return sum(((x >> i) & 1) << layout[i] for i in range(n))


def verify_equivalence(abstract: Circuit, compiled: CompiledCircuit, atol: float = 1e-8) -> bool:
    """Check the compiled circuit against the abstract one through its input and output layouts.

    Without measurements the logical block of the compiled unitary (ancillas and idle
    qubits in |0>) must equal the abstract unitary up to global phase. Measured circuits
    compare output distributions from |0...0>, since boundary phases may have been removed.
    """
    n, total = abstract.n, compiled.circuit.n
    if max(n, total) > MAX_VERIFY_QUBITS:
        raise SizeLimitError(f'verification supports at most {MAX_VERIFY_QUBITS} qubits, got {max(n, total)}')
    if n != compiled.n_logical:
        return False
    rows = np.array([_basis_index(x, n, compiled.layout_out) for x in range(2 ** n)])

    if abstract.has_measure():
        expected = simulate(abstract).probabilities()
        observed = simulate(compiled.circuit).probabilities()[rows]
        if 1.0 - observed.sum() > atol:
            return False
        return bool(np.allclose(observed, expected, atol=atol))

    expected = unitary_of(abstract)
    block = np.zeros((2 ** total, 2 ** n), dtype=complex)
    block[[_basis_index(x, n, compiled.layout_in) for x in range(2 ** n)], np.arange(2 ** n)] = 1.0
    apply_gates(block, total, compiled.circuit.gates)
    observed = block[rows, :]
    k = int(np.argmax(np.abs(expected)))
    phase = observed.flat[k] / expected.flat[k]
    if abs(abs(phase) - 1.0) > 1e-6:
        return False
    return bool(np.allclose(observed, phase * expected, atol=atol))
