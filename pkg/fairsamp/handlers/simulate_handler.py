import argparse
import logging

from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.ising import enumerate_ground_states
from fairsamp.core.metrics import gsp
from fairsamp.core.models import CommandResult
from fairsamp.core.simulator import remap_counts, sample, simulate
from fairsamp.core.state import ResultWriter
from fairsamp.handlers.base import (
    BaseHandler,
    add_angle_arguments,
    add_compile_arguments,
    add_model_arguments,
    compile_onto,
    resolve_circuit,
    setting,
)
from fairsamp.integrations.file_formats import counts_to_csv, counts_to_json
from fairsamp.utils.output_formatter import OutputFormatter

logger = logging.getLogger(__name__)

SHOWN_OUTCOMES = 16


class SimulateHandler(BaseHandler):
    def __init__(self):
        super().__init__(name='simulate', description='Simulate a circuit and sample measurement counts')

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_model_arguments(parser, allow_circuit=True)
        add_angle_arguments(parser)
        add_compile_arguments(parser)
        parser.add_argument('--shots', type=int, help='shots to sample (default FAIRSAMP_SHOTS)')
        parser.add_argument('--seed', type=int, help='sampling seed (default FAIRSAMP_SEED)')
        parser.add_argument('--out', help='directory for counts.json and counts.csv')

    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        model, circuit = resolve_circuit(args, settings)
        seed = setting(args.seed, settings.seed)
        shots = setting(args.shots, settings.shots)
        positions = None
        if args.topology:
            compiled = compile_onto(args, circuit, seed)
            circuit = compiled.circuit
            positions = [compiled.layout_out[q] for q in range(compiled.n_logical)]

        state = simulate(circuit)
        counts = sample(state, shots, seed)
        if positions is not None:
            counts = remap_counts(counts, positions)

        report = {'qubits': len(next(iter(counts.counts))), 'shots': counts.shots, 'outcomes': len(counts.counts)}
        if model is not None:
            report['gsp'] = gsp(counts, enumerate_ground_states(model))
        top = sorted(counts.counts.items(), key=lambda kv: (-kv[1], kv[0]))[:SHOWN_OUTCOMES]
        content = OutputFormatter.format_key_values(report) + '\n' + OutputFormatter.format_table(
            ['bitstring', 'count'], top)

        if args.out:
            writer = ResultWriter(args.out)
            writer.stage('counts.json', counts_to_json(counts))
            writer.stage('counts.csv', counts_to_csv(counts))
            writer.commit()
        return CommandResult(success=True, content=content, status_update='completed',
                             artifacts_created={**report, 'counts': counts.counts})
