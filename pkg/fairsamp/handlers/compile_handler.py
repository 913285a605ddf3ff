import argparse
import logging

from fairsamp.core.circuit import to_text
from fairsamp.core.compiler import verify_equivalence
from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.metrics import aggregate_error
from fairsamp.core.models import CommandResult
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
from fairsamp.integrations.file_formats import load_calibration
from fairsamp.utils.output_formatter import OutputFormatter

logger = logging.getLogger(__name__)


class CompileHandler(BaseHandler):
    def __init__(self):
        super().__init__(name='compile', description='Route and lower a circuit onto a topology and native gate set')

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_model_arguments(parser, allow_circuit=True)
        add_angle_arguments(parser)
        add_compile_arguments(parser, topology_required=True)
        parser.add_argument('--seed', type=int, help='layout selection seed (default FAIRSAMP_SEED)')
        parser.add_argument('--no-measure', action='store_true', help='compile without final measurements')
        parser.add_argument('--verify', action='store_true', help='check equivalence with the abstract circuit')
        parser.add_argument('--calib', help='calibration JSON for the aggregate error')
        parser.add_argument('--out', help='directory for circuit.txt and compile.json')

    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        _, abstract = resolve_circuit(args, settings, measure=not args.no_measure)
        compiled = compile_onto(args, abstract, setting(args.seed, settings.seed))
        report = compiled.report()
        if args.calib:
            report['aggregate_error'] = aggregate_error(compiled.circuit, load_calibration(args.calib))
        if args.verify:
            report['equivalent'] = verify_equivalence(abstract, compiled)
            if not report['equivalent']:
                logger.error(f'Compiled circuit differs from the abstract one on {compiled.topology.name}')

        content = OutputFormatter.format_key_values(report)
        if args.verify and not report['equivalent']:
            return CommandResult(success=False, content=content + '\n' + OutputFormatter.format_error(
                'compiled circuit is not equivalent to the abstract circuit'), status_update='not-equivalent',
                artifacts_created=report)
        if args.out:
            writer = ResultWriter(args.out)
            writer.stage('circuit.txt', to_text(compiled.circuit))
            writer.stage_json('compile.json', report)
            writer.commit()
        return CommandResult(success=True, content=content, status_update='completed', artifacts_created=report)
