import argparse
import logging

from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.ising import enumerate_ground_states
from fairsamp.core.models import CommandResult
from fairsamp.core.problems import PROBLEM_IDS, problem_info
from fairsamp.handlers.base import BaseHandler
from fairsamp.utils.output_formatter import OutputFormatter

logger = logging.getLogger(__name__)


class ProblemsHandler(BaseHandler):
    def __init__(self):
        super().__init__(name='problems', description='List the benchmark problems and check their ground sets by brute force')

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--problem', choices=list(PROBLEM_IDS), help='show a single problem')

    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        ids = [args.problem] if args.problem else list(PROBLEM_IDS)
        rows, catalogue, mismatches = [], {}, []
        for pid in ids:
            info = problem_info(pid)
            ground = enumerate_ground_states(info.model)
            matches = ground.states == info.full_ground_states()
            if not matches:
                mismatches.append(pid)
                logger.warning(f'Problem ({pid}): brute-force ground set differs from the listed states')
            beta, gamma = info.angles_over_pi
            rows.append([pid, info.model.n, len(info.model.quadratic), ground.energy, info.optimum_energy_bound,
                         len(ground.states), f'{beta:.4g}pi', f'{gamma:.4g}pi', info.optimum_energy,
                         info.optimum_gsp, '/'.join(info.topologies), 'ok' if matches else 'MISMATCH'])
            catalogue[pid] = {
                'n': info.model.n,
                'ground_energy': ground.energy,
                'ground_states': list(ground.states),
                'listed_ground_states': list(info.listed_ground_states),
                'optimum_energy': info.optimum_energy,
                'optimum_gsp': info.optimum_gsp,
                'topologies': list(info.topologies),
            }
        table = OutputFormatter.format_table(
            ['id', 'n', 'couplings', 'E0', 'bound', '|G|', 'beta', 'gamma', 'opt energy', 'opt gsp',
             'topologies', 'ground set'],
            rows,
        )
        if mismatches:
            return CommandResult(success=False, content=table + '\n' + OutputFormatter.format_error(
                f'ground sets disagree for {", ".join(mismatches)}'), status_update='mismatch',
                artifacts_created=catalogue)
        return CommandResult(success=True, content=table, status_update='completed', artifacts_created=catalogue)
