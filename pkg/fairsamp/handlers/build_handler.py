import argparse

from fairsamp.core.circuit import to_text
from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.models import CommandResult
from fairsamp.core.state import ResultWriter
from fairsamp.handlers.base import BaseHandler, add_angle_arguments, add_model_arguments, resolve_circuit
from fairsamp.utils.output_formatter import OutputFormatter


class BuildHandler(BaseHandler):
    def __init__(self):
        super().__init__(name='build', description='Assemble the abstract Grover-mixer QAOA circuit')

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_model_arguments(parser)
        add_angle_arguments(parser)
        parser.add_argument('--no-measure', action='store_true', help='leave out the final measurements')
        parser.add_argument('--out', help='directory for circuit.txt (printed when omitted)')

    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        _, circuit = resolve_circuit(args, settings, measure=not args.no_measure)
        text = to_text(circuit)
        if not args.out:
            return CommandResult(success=True, content=text.rstrip('\n'), status_update='completed')
        writer = ResultWriter(args.out)
        writer.stage('circuit.txt', text)
        written = writer.commit()
        summary = {'qubits': circuit.n, 'gates': len(circuit.gates), 'depth': circuit.depth(),
                   'written': [str(p) for p in written]}
        return CommandResult(success=True, content=OutputFormatter.format_key_values(summary),
                             status_update='completed', artifacts_created=summary)
