import argparse
import logging

from fairsamp.core.compiler import McpStrategy
from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.experiment import run_experiment
from fairsamp.core.models import CommandResult, ExperimentSpec
from fairsamp.core.problems import PROBLEM_IDS
from fairsamp.handlers.base import BaseHandler, add_angle_arguments, setting
from fairsamp.utils.output_formatter import OutputFormatter

logger = logging.getLogger(__name__)


class RunHandler(BaseHandler):
    def __init__(self):
        super().__init__(name='run', description='Run the repeated-call sampling experiment and score every call')

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--problem', required=True, choices=list(PROBLEM_IDS))
        parser.add_argument('--reduce', action=argparse.BooleanOptionalAction, default=True,
                            help='fix qubit 0 to up before building')
        add_angle_arguments(parser)
        parser.add_argument('--topology', help='compile onto LNN, 5T, 5P, 6A, 7H, Clique or a topology JSON file')
        parser.add_argument('--gateset', choices=['ibm', 'generic'], default='ibm')
        parser.add_argument('--ancilla', type=int, help='ancilla budget for the mixer decomposition')
        parser.add_argument('--mcp-strategy', choices=[s.value for s in McpStrategy], default=McpStrategy.AUTO.value)
        parser.add_argument('--shots', type=int, help='shots per call (default FAIRSAMP_SHOTS)')
        parser.add_argument('--repeats', type=int, help='number of calls (default FAIRSAMP_REPEATS)')
        parser.add_argument('--seed', type=int, help='experiment seed (default FAIRSAMP_SEED)')
        parser.add_argument('--ni', type=int, help='fairness inner loops (default FAIRSAMP_NI_GATE)')
        parser.add_argument('--fairness-cap', type=int, help='largest shot count searched for fairness')
        parser.add_argument('--calib', help='calibration JSON for the aggregate error')
        parser.add_argument('--out', help='directory for summary.json, calls.csv and circuit.txt')

    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        spec = ExperimentSpec(
            problem=args.problem,
            reduce=args.reduce,
            topology=args.topology,
            gateset=args.gateset,
            beta=args.beta,
            gamma=args.gamma,
            gridsearch=args.gridsearch,
            shots=setting(args.shots, settings.shots),
            repeats=setting(args.repeats, settings.repeats),
            seed=setting(args.seed, settings.seed),
            out=args.out,
            calib=args.calib,
            inner_loops=setting(args.ni, settings.ni_gate),
            fairness_cap=setting(args.fairness_cap, settings.fairness_cap),
            ancilla_budget=args.ancilla,
            mcp_strategy=args.mcp_strategy,
            grid_steps=settings.grid_steps,
        )
        outcome = run_experiment(spec)
        summary = outcome.summary
        shown = {
            'problem': summary['problem'],
            'angles': summary['angle_source'],
            'exact gsp': summary['exact']['gsp'],
            'exact energy': summary['exact']['energy'],
            'gsp mean': summary['gsp']['mean'],
            'gsp std': summary['gsp']['std'],
        }
        if 'aggregate_error' in summary:
            shown['aggregate error'] = summary['aggregate_error']
        if 'compile' in summary:
            shown['swap count'] = summary['compile']['swap_count']
        rows = [[c.index, c.gsp, c.fairness.csv_value(), c.energy] for c in outcome.calls]
        content = OutputFormatter.format_key_values(shown) + '\n' + OutputFormatter.format_table(
            ['call', 'gsp', 'fairness shots', 'energy'], rows)
        if args.out:
            content += '\n' + OutputFormatter.format_success(f'results written to {args.out}')
        return CommandResult(success=True, content=content, status_update='completed', artifacts_created=summary)
