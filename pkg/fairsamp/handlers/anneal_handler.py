import argparse
import logging

from fairsamp.core.anneal import anneal_sweep, sweep_to_csv
from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.models import CommandResult, FairnessConfig
from fairsamp.core.state import ResultWriter
from fairsamp.handlers.base import BaseHandler, add_model_arguments, resolve_model, setting
from fairsamp.utils.output_formatter import OutputFormatter

logger = logging.getLogger(__name__)

DEFAULT_TIMES = (0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)


class AnnealHandler(BaseHandler):
    def __init__(self):
        super().__init__(name='anneal', description='Sweep simulated annealing time and report GSP, fairness and energy')

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_model_arguments(parser, reduce_default=False)
        parser.add_argument('--times', type=float, nargs='+', default=list(DEFAULT_TIMES),
                            help='total annealing times (dimensionless)')
        parser.add_argument('--steps-per-time', type=int, default=20, help='integration steps per unit time')
        parser.add_argument('--shots', type=int, help='shots per point (default FAIRSAMP_SHOTS)')
        parser.add_argument('--seed', type=int, help='sweep seed (default FAIRSAMP_SEED)')
        parser.add_argument('--ni', type=int, help='fairness inner loops (default FAIRSAMP_NI_ANNEAL)')
        parser.add_argument('--fairness-cap', type=int, help='largest shot count searched for fairness')
        parser.add_argument('--out', help='directory for anneal.csv')

    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        model = resolve_model(args)
        cfg = FairnessConfig(inner_loops=setting(args.ni, settings.ni_anneal),
                             cap=setting(args.fairness_cap, settings.fairness_cap))
        rows = anneal_sweep(model, args.times, args.steps_per_time, setting(args.shots, settings.shots),
                            setting(args.seed, settings.seed), cfg=cfg)
        csv_text = sweep_to_csv(rows)
        if args.out:
            writer = ResultWriter(args.out)
            writer.stage('anneal.csv', csv_text)
            writer.commit()

        combined = rows[0].gsp_combined is not None
        header = ['time', 'gsp', 'fairness shots', 'energy']
        if combined:
            header += ['gsp (combined)', 'fairness shots (combined)']
        table = []
        for r in rows:
            cells = [r.time, r.gsp, r.fairness.csv_value(), r.energy]
            if combined:
                cells += [r.gsp_combined, r.fairness_combined.csv_value()]
            table.append(cells)
        return CommandResult(success=True, content=OutputFormatter.format_table(header, table),
                             status_update='completed', artifacts_created={'csv': csv_text})
