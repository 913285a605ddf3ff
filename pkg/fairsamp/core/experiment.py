"""The sampling protocol: build, optionally compile, simulate, then score repeated calls."""

import csv
import io
import logging
import math
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from fairsamp.core.circuit import Circuit, to_text
from fairsamp.core.compiler import CompiledCircuit, route_and_lower
from fairsamp.core.errors import ExperimentError
from fairsamp.core.gmqaoa import assemble_qaoa, fast_statevector, grid_search, state_metrics
from fairsamp.core.ising import bitstring_to_index, energies, enumerate_ground_states, reduce_model
from fairsamp.core.metrics import aggregate_error, fairness_or_nan, ground_counts, gsp, summarize
from fairsamp.core.models import (
    ComplementMode,
    ExperimentSpec,
    FairnessConfig,
    FairnessResult,
    GroundSet,
    IsingModel,
    QaoaParams,
    SampleCounts,
)
from fairsamp.core.problems import admits_topology, builtin_problem, problem_info
from fairsamp.core.simulator import derive_seed, remap_counts, sample, simulate
from fairsamp.core.state import ResultWriter
from fairsamp.core.topology import BUILTIN_TOPOLOGY_NAMES, Topology
from fairsamp.integrations.file_formats import load_calibration, resolve_topology

logger = logging.getLogger(__name__)

SUMMARY_FILE = 'summary.json'
CALLS_FILE = 'calls.csv'
CIRCUIT_FILE = 'circuit.txt'


class CallResult(BaseModel):
    """Scores of one sampling call."""
    model_config = ConfigDict(frozen=True)

    index: int
    seed: int
    gsp: float
    fairness: FairnessResult
    energy: float
    gsp_combined: Optional[float] = None
    fairness_combined: Optional[FairnessResult] = None


class ExperimentOutcome(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    summary: Dict[str, Any]
    calls: Tuple[CallResult, ...]
    circuit: Circuit
    compiled: Optional[CompiledCircuit] = None

    def calls_csv(self) -> str:
        combined = any(c.fairness_combined is not None for c in self.calls)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        header = ['call', 'seed', 'gsp', 'fairness_shots', 'energy']
        if combined:
            header += ['gsp_combined', 'fairness_shots_combined']
        writer.writerow(header)
        for c in self.calls:
            row = [c.index, c.seed, repr(c.gsp), c.fairness.csv_value(), repr(c.energy)]
            if combined:
                row += [repr(c.gsp_combined), c.fairness_combined.csv_value()]
            writer.writerow(row)
        return buffer.getvalue()

    def write(self, out_dir: str) -> List[str]:
        writer = ResultWriter(out_dir)
        writer.stage_json(SUMMARY_FILE, self.summary)
        writer.stage(CALLS_FILE, self.calls_csv())
        writer.stage(CIRCUIT_FILE, to_text(self.circuit))
        return [str(p) for p in writer.commit()]


def problem_model(problem: str, reduce: bool) -> IsingModel:
    model = builtin_problem(problem)
    return reduce_model(model) if reduce else model


def choose_params(model: IsingModel, problem: Optional[str], reduce: bool, beta: Optional[float],
                  gamma: Optional[float], gridsearch: bool, grid_steps: int) -> Tuple[QaoaParams, str]:
    """Explicit angles, a grid search, or the reference optimum of a reduced benchmark problem."""
    if beta is not None and gamma is not None:
        return QaoaParams.single(beta, gamma), 'explicit'
    if problem is not None and reduce and not gridsearch:
        return problem_info(problem).table_params, 'reference'
    result = grid_search(model, resolution=math.pi / grid_steps)
    return result.params, 'gridsearch'


def _sampled_energy(counts: SampleCounts, values) -> float:
    total = sum(c * values[bitstring_to_index(bits)] for bits, c in counts.counts.items())
    return float(total / counts.shots)


def check_topology(problem: str, topology_arg: str, topology: Topology) -> None:
    builtin = topology_arg.strip().lower().startswith('clique') or \
        topology_arg.strip().upper() in BUILTIN_TOPOLOGY_NAMES
    if builtin and not admits_topology(problem, topology.name):
        allowed = ', '.join(problem_info(problem).topologies)
        raise ExperimentError(f'problem ({problem}) runs on {allowed}, not {topology.name}')


def score_call(index: int, seed: int, counts: SampleCounts, ground: GroundSet, values,
               cfg: FairnessConfig, combined: bool) -> CallResult:
    result = CallResult(
        index=index,
        seed=seed,
        gsp=gsp(counts, ground),
        fairness=fairness_or_nan(ground_counts(counts, ground, ComplementMode.SEPARATE), cfg, seed),
        energy=_sampled_energy(counts, values),
    )
    if combined:
        merged = ground.with_mode(ComplementMode.COMBINED)
        result = result.model_copy(update={
            'gsp_combined': gsp(counts, merged),
            'fairness_combined': fairness_or_nan(ground_counts(counts, merged), cfg, seed),
        })
    return result


def run_experiment(spec: ExperimentSpec) -> ExperimentOutcome:
    """Run every call of an experiment; files are written only after all calls succeed."""
    model = problem_model(spec.problem, spec.reduce)
    params, source = choose_params(model, spec.problem, spec.reduce, spec.beta, spec.gamma,
                                   spec.gridsearch, spec.grid_steps)
    logger.info(f'Problem ({spec.problem}) n={model.n}: {source} angles beta={params.betas} gamma={params.gammas}')
    abstract = assemble_qaoa(model, params, measure=True)

    compiled = None
    topology_arg = spec.topology
    if topology_arg is None and spec.calib is not None:
        logger.info('Calibration given without a topology; compiling onto a clique')
        topology_arg = f'Clique({model.n})'
    if topology_arg is not None:
        topology = resolve_topology(topology_arg, model.n)
        check_topology(spec.problem, topology_arg, topology)
        budget = spec.ancilla_budget
        if budget is None:
            budget = min(1, topology.size - model.n)
        compiled = route_and_lower(abstract, topology, gateset=spec.gateset, ancilla_budget=budget,
                                   mcp_strategy=spec.mcp_strategy, seed=spec.seed)

    circuit = compiled.circuit if compiled else abstract
    state = simulate(circuit)
    positions = [compiled.layout_out[q] for q in range(model.n)] if compiled else None

    ground = enumerate_ground_states(model)
    combined = not spec.reduce and model.is_flip_symmetric()
    values = energies(model)
    cfg = FairnessConfig(inner_loops=spec.inner_loops, cap=spec.fairness_cap)
    calls = []
    for r in range(spec.repeats):
        seed = derive_seed(spec.seed, r)
        counts = sample(state, spec.shots, seed)
        if positions is not None:
            counts = remap_counts(counts, positions)
        call = score_call(r, seed, counts, ground, values, cfg, combined)
        logger.info(f'Call {r}: gsp={call.gsp:.4f} fairness={call.fairness.csv_value()}')
        calls.append(call)

    exact_energy, exact_gsp = state_metrics(model, fast_statevector(model, params))
    summary: Dict[str, Any] = {
        'problem': spec.problem,
        'reduced': spec.reduce,
        'n': model.n,
        'angle_source': source,
        'betas': list(params.betas),
        'gammas': list(params.gammas),
        'shots': spec.shots,
        'repeats': spec.repeats,
        'seed': spec.seed,
        'inner_loops': spec.inner_loops,
        'ground_states': list(ground.states),
        'ground_energy': ground.energy,
        'exact': {'energy': exact_energy, 'gsp': exact_gsp},
        'gsp': summarize(c.gsp for c in calls),
        'fairness_shots': [c.fairness.to_json() for c in calls],
    }
    if combined:
        summary['gsp_combined'] = summarize(c.gsp_combined for c in calls)
        summary['fairness_shots_combined'] = [c.fairness_combined.to_json() for c in calls]
    if compiled is not None:
        summary['compile'] = compiled.report()
    if spec.calib is not None:
        summary['aggregate_error'] = aggregate_error(compiled.circuit, load_calibration(spec.calib))

    outcome = ExperimentOutcome(summary=summary, calls=tuple(calls), circuit=circuit, compiled=compiled)
    if spec.out:
        outcome.write(spec.out)
    return outcome
