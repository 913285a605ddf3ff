"""JSON and CSV documents: Ising models, topologies, calibration data and sample counts."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pydantic

from fairsamp.core.circuit import Circuit, from_text
from fairsamp.core.errors import CalibrationError, CircuitError
from fairsamp.core.metrics import canonical_gate_name
from fairsamp.core.models import CalibrationData, CalibrationDefaults, IsingModel, SampleCounts
from fairsamp.core.topology import Topology, builtin_topology
from fairsamp.utils.validation import ValidationError, require_document

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

IGNORED_GATES = {'id', 'barrier', 'delay', 'reset'}


def _read_json(path: PathLike, name: str) -> Any:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f'{name} file not found: {p}')
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f'{name} file {p} is not valid JSON: {e}') from e


def ising_from_dict(data: Dict[str, Any]) -> IsingModel:
    require_document(data, ['n'], ['quadratic', 'linear', 'name'], 'Ising JSON')
    try:
        return IsingModel(
            n=data['n'],
            quadratic=data.get('quadratic') or [],
            linear=data.get('linear') or [],
            name=str(data.get('name') or ''),
        )
    except (pydantic.ValidationError, TypeError, ValueError) as e:
        raise ValidationError(f'invalid Ising model: {e}') from e


def load_ising(path: PathLike) -> IsingModel:
    return ising_from_dict(_read_json(path, 'Ising'))


def topology_from_dict(data: Dict[str, Any]) -> Topology:
    require_document(data, ['nodes', 'edges'], ['name'], 'Topology JSON')
    try:
        return Topology(name=str(data.get('name', 'custom')), nodes=tuple(data['nodes']),
                        edges=tuple(tuple(e) for e in data['edges']))
    except (pydantic.ValidationError, TypeError, ValueError) as e:
        raise ValidationError(f'invalid topology: {e}') from e


def resolve_topology(spec: str, n: Optional[int] = None) -> Topology:
    """A builtin name (LNN, 5T, 5P, 6A, 7H, Clique) or a path to a topology JSON file."""
    path = Path(spec)
    if path.suffix.lower() == '.json' or path.exists():
        return topology_from_dict(_read_json(path, 'Topology'))
    return builtin_topology(spec, n)


def _rate(entry: Dict[str, Any], where: str) -> float:
    if 'error' in entry:
        return float(entry['error'])
    if 'fidelity' in entry:
        return 1.0 - float(entry['fidelity'])
    raise CalibrationError(f'{where}: entry needs "error" or "fidelity": {entry}')


def calibration_from_dict(data: Dict[str, Any]) -> CalibrationData:
    if not isinstance(data, dict):
        raise CalibrationError('calibration JSON must be an object')
    single, two, readout = {}, {}, {}
    try:
        for entry in data.get('single_qubit', []):
            gate = canonical_gate_name(entry['gate'])
            if gate in IGNORED_GATES:
                continue
            single[(gate, int(entry['qubit']))] = _rate(entry, 'single_qubit')
        for entry in data.get('two_qubit', []):
            gate = canonical_gate_name(entry['gate'])
            a, b = (int(q) for q in entry['qubits'])
            two[(gate, (min(a, b), max(a, b)))] = _rate(entry, 'two_qubit')
        for entry in data.get('readout', []):
            readout[int(entry['qubit'])] = _rate(entry, 'readout')
        defaults = {}
        for key, raw in (data.get('defaults') or {}).items():
            if key.endswith('_fidelity'):
                defaults[key[:-len('_fidelity')]] = 1.0 - float(raw)
            else:
                defaults[key] = float(raw)
        return CalibrationData(single_qubit=single, two_qubit=two, readout=readout,
                               defaults=CalibrationDefaults(**defaults))
    except (KeyError, TypeError, ValueError) as e:
        raise CalibrationError(f'malformed calibration data: {e}') from e


def load_calibration(path: PathLike) -> CalibrationData:
    data = _read_json(path, 'Calibration')
    calib = calibration_from_dict(data)
    logger.info(f'Loaded calibration from {path}: {len(calib.single_qubit)} single-qubit, '
                f'{len(calib.two_qubit)} two-qubit, {len(calib.readout)} readout entries')
    return calib


def counts_to_json(counts: SampleCounts) -> str:
    return json.dumps(dict(sorted(counts.counts.items())), indent=2) + '\n'


def counts_to_csv(counts: SampleCounts) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['bitstring', 'count'])
    for bits, c in sorted(counts.counts.items()):
        writer.writerow([bits, c])
    return buffer.getvalue()


def counts_from_mapping(mapping: Dict[str, Any]) -> SampleCounts:
    try:
        counts = {str(k): int(v) for k, v in mapping.items()}
        return SampleCounts(shots=sum(counts.values()), counts=counts)
    except (pydantic.ValidationError, TypeError, ValueError) as e:
        raise ValidationError(f'invalid counts: {e}') from e


def read_counts(path: PathLike) -> SampleCounts:
    """Counts from a JSON map or a `bitstring,count` CSV."""
    p = Path(path)
    if not p.exists():
        raise ValidationError(f'counts file not found: {p}')
    text = p.read_text()
    if p.suffix.lower() == '.json' or text.lstrip().startswith('{'):
        return counts_from_mapping(_read_json(p, 'Counts'))
    rows = list(csv.reader(io.StringIO(text)))
    if rows and rows[0] and rows[0][0].strip().lower() == 'bitstring':
        rows = rows[1:]
    mapping: Dict[str, int] = {}
    for row in rows:
        if not row:
            continue
        if len(row) != 2:
            raise ValidationError(f'counts CSV rows need two columns, got {row}')
        mapping[row[0].strip()] = mapping.get(row[0].strip(), 0) + int(row[1])
    return counts_from_mapping(mapping)


def load_circuit(path: PathLike) -> Circuit:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f'circuit file not found: {p}')
    try:
        return from_text(p.read_text())
    except CircuitError as e:
        raise ValidationError(f'{p}: {e}') from e
