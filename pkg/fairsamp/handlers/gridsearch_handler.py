import argparse
import logging
import math

from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.gmqaoa import DEFAULT_GRID_BUDGET, grid_search
from fairsamp.core.models import CommandResult
from fairsamp.core.state import ResultWriter
from fairsamp.handlers.base import BaseHandler, add_model_arguments, resolve_model, setting
from fairsamp.utils.output_formatter import OutputFormatter

logger = logging.getLogger(__name__)


class GridSearchHandler(BaseHandler):
    def __init__(self):
        super().__init__(name='gridsearch', description='Find energy-minimizing angles on a uniform grid over [-pi, pi)')

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_model_arguments(parser)
        parser.add_argument('--steps', type=int, help='grid resolution is pi/STEPS (default FAIRSAMP_GRID_STEPS)')
        parser.add_argument('--p', type=int, default=1, help='QAOA rounds')
        parser.add_argument('--budget', type=int, default=DEFAULT_GRID_BUDGET, help='maximum grid evaluations')
        parser.add_argument('--out', help='directory for gridsearch.json')

    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        model = resolve_model(args)
        steps = setting(args.steps, settings.grid_steps)
        if steps < 1:
            raise ValueError('--steps must be at least 1')
        result = grid_search(model, resolution=math.pi / steps, p=args.p, budget=args.budget)
        report = {
            'energy': result.energy,
            'gsp': result.gsp,
            'betas': list(result.params.betas),
            'gammas': list(result.params.gammas),
            'betas_over_pi': [b / math.pi for b in result.params.betas],
            'gammas_over_pi': [g / math.pi for g in result.params.gammas],
            'evaluations': result.evaluations,
        }
        if args.out:
            writer = ResultWriter(args.out)
            writer.stage_json('gridsearch.json', report)
            writer.commit()
        return CommandResult(success=True, content=OutputFormatter.format_key_values(report),
                             status_update='completed', artifacts_created=report)
