"""Gate-level circuit IR.

Rz(theta) = diag(e^{-i theta/2}, e^{i theta/2}); Phase(t) = Z^t = diag(1, e^{i pi t}).
Controlled phases carry the same exponent t and act on the all-ones subspace
of their operands, so operand order never matters. Global phase is not tracked.
"""

import logging
from collections import Counter
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from fairsamp.core.errors import CircuitError, SizeLimitError

logger = logging.getLogger(__name__)

MAX_UNITARY_QUBITS = 10


class GateKind(str, Enum):
    H = 'h'
    X = 'x'
    SX = 'sx'
    S = 's'
    SDG = 'sdg'
    T = 't'
    TDG = 'tdg'
    RZ = 'rz'
    PHASE = 'p'
    CNOT = 'cnot'
    CPHASE = 'cp'
    TOFFOLI = 'ccx'
    MCPHASE = 'mcp'
    SWAP = 'swap'
    MEASURE = 'measure'


_ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.SX: 1, GateKind.S: 1, GateKind.SDG: 1,
    GateKind.T: 1, GateKind.TDG: 1, GateKind.RZ: 1, GateKind.PHASE: 1,
    GateKind.CNOT: 2, GateKind.CPHASE: 2, GateKind.SWAP: 2, GateKind.TOFFOLI: 3,
    GateKind.MEASURE: 1,
}
PARAMETRIC = frozenset({GateKind.RZ, GateKind.PHASE, GateKind.CPHASE, GateKind.MCPHASE})
DIAGONAL = frozenset({GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.RZ,
                      GateKind.PHASE, GateKind.CPHASE, GateKind.MCPHASE})

_TEXT_NAMES = {
    GateKind.H: 'H', GateKind.X: 'X', GateKind.SX: 'SX', GateKind.S: 'S', GateKind.SDG: 'SDG',
    GateKind.T: 'T', GateKind.TDG: 'TDG', GateKind.RZ: 'RZ', GateKind.PHASE: 'P',
    GateKind.CNOT: 'CNOT', GateKind.CPHASE: 'CP', GateKind.TOFFOLI: 'CCX',
    GateKind.MCPHASE: 'MCP', GateKind.SWAP: 'SWAP', GateKind.MEASURE: 'MEASURE',
}
_TEXT_ALIASES = {'SQRTX': GateKind.SX, 'CX': GateKind.CNOT, 'PHASE': GateKind.PHASE,
                 'TOFFOLI': GateKind.TOFFOLI, 'MEASURE': GateKind.MEASURE}


class Gate(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: GateKind
    qubits: Tuple[int, ...]
    param: Optional[float] = None

    @field_validator('qubits', mode='before')
    @classmethod
    def qubits_to_tuple(cls, v):
        return tuple(int(q) for q in v)

    @model_validator(mode='after')
    def check_operands(self):
        expected = _ARITY.get(self.kind)
        if expected is None:
            if len(self.qubits) < 1:
                raise ValueError('mcp needs at least one operand')
        elif len(self.qubits) != expected:
            raise ValueError(f'{self.kind.value} takes {expected} qubits, got {len(self.qubits)}')
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f'{self.kind.value} operands must be distinct: {self.qubits}')
        if any(q < 0 for q in self.qubits):
            raise ValueError('qubit indices must be non-negative')
        if self.kind in PARAMETRIC and self.param is None:
            raise ValueError(f'{self.kind.value} requires a parameter')
        if self.kind not in PARAMETRIC and self.param is not None:
            raise ValueError(f'{self.kind.value} takes no parameter')
        return self

    @classmethod
    def of(cls, kind: GateKind, *qubits: int, param: Optional[float] = None) -> 'Gate':
        return cls(kind=kind, qubits=qubits, param=param)

    def on(self, *qubits: int) -> 'Gate':
        return Gate(kind=self.kind, qubits=qubits, param=self.param)

    def inverse(self) -> Tuple['Gate', ...]:
        """Gates that undo this one, in application order."""
        if self.kind == GateKind.MEASURE:
            raise CircuitError('measurement has no inverse')
        if self.kind in PARAMETRIC:
            return (Gate(kind=self.kind, qubits=self.qubits, param=-self.param),)
        if self.kind == GateKind.SX:
            # SX^dagger = X SX
            return (self, Gate(kind=GateKind.X, qubits=self.qubits))
        swaps = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S,
                 GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T}
        return (Gate(kind=swaps.get(self.kind, self.kind), qubits=self.qubits),)

    def __str__(self) -> str:
        name = _TEXT_NAMES[self.kind]
        if self.param is not None:
            name = f'{name}({self.param!r})'
        return ' '.join([name] + [f'q{q}' for q in self.qubits])


class Gateset(str, Enum):
    ABSTRACT = 'abstract'
    IBM = 'ibm'
    GENERIC = 'generic'

    @property
    def kinds(self) -> frozenset:
        if self == Gateset.ABSTRACT:
            return frozenset(GateKind)
        if self == Gateset.IBM:
            return frozenset({GateKind.X, GateKind.SX, GateKind.RZ, GateKind.CNOT, GateKind.MEASURE})
        return frozenset({GateKind.H, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG,
                          GateKind.RZ, GateKind.CNOT, GateKind.MEASURE})


class Circuit(BaseModel):
    """Ordered gates on n qubits.

    out_permutation[q] is the wire that holds the state started on wire q once
    the circuit ends. Gateset membership is reported by validate(), not enforced here.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    gates: Tuple[Gate, ...] = ()
    gateset: Gateset = Gateset.ABSTRACT
    out_permutation: Tuple[int, ...] = ()

    @model_validator(mode='before')
    @classmethod
    def default_identity_permutation(cls, data):
        if isinstance(data, dict) and not data.get('out_permutation'):
            data = dict(data)
            data['out_permutation'] = tuple(range(int(data.get('n', 0))))
        return data

    @model_validator(mode='after')
    def check_structure(self):
        if self.n < 1:
            raise ValueError('a circuit needs at least one qubit')
        for g in self.gates:
            if max(g.qubits) >= self.n:
                raise ValueError(f'gate {g} addresses a qubit outside 0..{self.n - 1}')
        if sorted(self.out_permutation) != list(range(self.n)):
            raise ValueError(f'out_permutation {self.out_permutation} is not a bijection on {self.n} qubits')
        return self

    def has_measure(self) -> bool:
        return any(g.kind == GateKind.MEASURE for g in self.gates)

    def measured_qubits(self) -> List[int]:
        return sorted({g.qubits[0] for g in self.gates if g.kind == GateKind.MEASURE})

    def count_ops(self) -> Dict[str, int]:
        counts = Counter(g.kind.value for g in self.gates)
        return dict(sorted(counts.items()))

    def depth(self, include_measure: bool = False) -> int:
        level = [0] * self.n
        for g in self.gates:
            if g.kind == GateKind.MEASURE and not include_measure:
                continue
            d = max(level[q] for q in g.qubits) + 1
            for q in g.qubits:
                level[q] = d
        return max(level, default=0)

    def without_measure(self) -> 'Circuit':
        return self.model_copy(update={'gates': tuple(g for g in self.gates if g.kind != GateKind.MEASURE)})

    def with_gates(self, gates: Iterable[Gate]) -> 'Circuit':
        return Circuit(n=self.n, gates=tuple(gates), gateset=self.gateset, out_permutation=self.out_permutation)


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Exact 2^n x 2^n product of the gate matrices (out_permutation not applied)."""
    if circuit.n > MAX_UNITARY_QUBITS:
        raise SizeLimitError(f'unitary_of supports at most {MAX_UNITARY_QUBITS} qubits, got {circuit.n}')
    if circuit.has_measure():
        raise CircuitError('unitary_of is undefined for circuits with measurements')
    from fairsamp.core.simulator import apply_gates

    matrix = np.eye(2 ** circuit.n, dtype=complex)
    apply_gates(matrix, circuit.n, circuit.gates)
    return matrix


def dagger(circuit: Circuit) -> Circuit:
    if circuit.has_measure():
        raise CircuitError('cannot invert a circuit with measurements')
    gates: List[Gate] = []
    for g in reversed(circuit.gates):
        gates.extend(g.inverse())
    inverse_perm = [0] * circuit.n
    for q, p in enumerate(circuit.out_permutation):
        inverse_perm[p] = q
    return Circuit(n=circuit.n, gates=tuple(gates), gateset=circuit.gateset,
                   out_permutation=tuple(inverse_perm))


def compose(first: Circuit, second: Circuit) -> Circuit:
    """first, then second."""
    if first.n != second.n:
        raise CircuitError(f'cannot compose circuits on {first.n} and {second.n} qubits')
    gateset = first.gateset if first.gateset == second.gateset else Gateset.ABSTRACT
    perm = tuple(second.out_permutation[p] for p in first.out_permutation)
    return Circuit(n=first.n, gates=first.gates + second.gates, gateset=gateset, out_permutation=perm)


def validate(circuit: Circuit, topology=None) -> List[str]:
    """Gateset and connectivity violations; an empty list means the circuit is valid."""
    violations = []
    allowed = circuit.gateset.kinds
    graph = topology.graph() if topology is not None else None
    for pos, g in enumerate(circuit.gates):
        if g.kind not in allowed:
            violations.append(f'gate {pos} ({g}): {g.kind.value} is not in the {circuit.gateset.value} gateset')
        if graph is not None:
            missing = [q for q in g.qubits if q not in graph]
            if missing:
                violations.append(f'gate {pos} ({g}): qubits {missing} are not topology nodes')
            elif len(g.qubits) == 2 and not graph.has_edge(*g.qubits):
                violations.append(f'gate {pos} ({g}): ({g.qubits[0]}, {g.qubits[1]}) is not a topology edge')
            elif len(g.qubits) > 2 and not all(graph.has_edge(a, b) for i, a in enumerate(g.qubits)
                                               for b in g.qubits[i + 1:]):
                violations.append(f'gate {pos} ({g}): multi-qubit gate spans non-adjacent qubits')
    return violations


def interaction_graph(circuit: Circuit) -> nx.Graph:
    """Qubits as nodes; an edge wherever a multi-qubit gate couples two qubits."""
    graph = nx.Graph()
    graph.add_nodes_from(range(circuit.n))
    for g in circuit.gates:
        if len(g.qubits) > 1 and g.kind != GateKind.MEASURE:
            for i, a in enumerate(g.qubits):
                for b in g.qubits[i + 1:]:
                    graph.add_edge(a, b)
    return graph


def to_text(circuit: Circuit) -> str:
    lines = [
        f'# qubits: {circuit.n}',
        f'# gateset: {circuit.gateset.value}',
        f'# out_permutation: {" ".join(str(p) for p in circuit.out_permutation)}',
    ]
    lines.extend(str(g) for g in circuit.gates)
    return '\n'.join(lines) + '\n'


def _parse_gate(line: str, lineno: int) -> Gate:
    head, *operands = line.split()
    param = None
    name = head
    if '(' in head:
        if not head.endswith(')'):
            raise CircuitError(f'line {lineno}: malformed parameter in {head!r}')
        name, raw = head[:-1].split('(', 1)
        try:
            param = float(raw)
        except ValueError as e:
            raise CircuitError(f'line {lineno}: bad parameter {raw!r}') from e
    name = name.upper()
    kind = next((k for k, v in _TEXT_NAMES.items() if v == name), None) or _TEXT_ALIASES.get(name)
    if kind is None:
        raise CircuitError(f'line {lineno}: unknown gate {name!r}')
    qubits = []
    for op in operands:
        if not (op.startswith('q') and op[1:].isdigit()):
            raise CircuitError(f'line {lineno}: bad operand {op!r}')
        qubits.append(int(op[1:]))
    try:
        return Gate(kind=kind, qubits=tuple(qubits), param=param)
    except ValueError as e:
        raise CircuitError(f'line {lineno}: {e}') from e


def from_text(text: str) -> Circuit:
    n = None
    gateset = Gateset.ABSTRACT
    perm: Tuple[int, ...] = ()
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith('#'):
            key, _, value = line[1:].partition(':')
            key = key.strip().lower()
            if key == 'qubits':
                n = int(value)
            elif key == 'gateset':
                gateset = Gateset(value.strip().lower())
            elif key == 'out_permutation':
                perm = tuple(int(v) for v in value.split())
            continue
        gates.append(_parse_gate(line.split('#', 1)[0], lineno))
    if n is None:
        n = max((max(g.qubits) for g in gates), default=0) + 1
    try:
        return Circuit(n=n, gates=tuple(gates), gateset=gateset, out_permutation=perm)
    except ValueError as e:
        raise CircuitError(str(e)) from e