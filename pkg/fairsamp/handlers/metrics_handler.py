import argparse
import logging
import math
from typing import Any, Dict

from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.ising import enumerate_ground_states
from fairsamp.core.metrics import aggregate_error, fairness_or_nan, ground_counts, gsp
from fairsamp.core.models import CommandResult, ComplementMode, FairnessConfig, GroundSet
from fairsamp.handlers.base import BaseHandler, resolve_model, setting
from fairsamp.integrations.file_formats import load_calibration, load_circuit, read_counts
from fairsamp.utils.output_formatter import OutputFormatter
from fairsamp.utils.validation import ValidationError, Validator

logger = logging.getLogger(__name__)


class MetricsHandler(BaseHandler):
    def __init__(self):
        super().__init__(name='metrics', description='Score saved counts (GSP, fairness) or a compiled circuit (aggregate error)')

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--counts', help='counts JSON or bitstring,count CSV')
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--problem', help='builtin problem whose ground set scores the counts')
        source.add_argument('--ising', help='Ising model JSON whose ground set scores the counts')
        source.add_argument('--ground', nargs='+', help='explicit ground-state bitstrings')
        parser.add_argument('--reduce', action=argparse.BooleanOptionalAction, default=True)
        parser.add_argument('--mode', choices=['separate', 'combined', 'both'], default='separate',
                            help='complement handling for fairness and GSP')
        parser.add_argument('--ni', type=int, help='fairness inner loops (default FAIRSAMP_NI_GATE)')
        parser.add_argument('--fairness-cap', type=int, help='largest shot count searched for fairness')
        parser.add_argument('--seed', type=int, help='fairness seed (default FAIRSAMP_SEED)')
        parser.add_argument('--circuit', help='compiled circuit text file for the aggregate error')
        parser.add_argument('--calib', help='calibration JSON for the aggregate error')
        parser.add_argument('--no-readout', action='store_true', help='leave readout out of the aggregate error')

    def _ground(self, args: argparse.Namespace) -> GroundSet:
        if args.ground:
            for s in args.ground:
                Validator.require_bitstring(s, len(args.ground[0]), 'ground state')
            return GroundSet(states=tuple(sorted(set(args.ground))), energy=math.nan)
        if args.problem or args.ising:
            return enumerate_ground_states(resolve_model(args))
        raise ValidationError('--counts needs a ground set: --problem, --ising or --ground')

    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        if not args.counts and not (args.circuit and args.calib):
            raise ValidationError('give --counts, or --circuit with --calib')
        report: Dict[str, Any] = {}
        if args.counts:
            counts = read_counts(args.counts)
            ground = self._ground(args)
            cfg = FairnessConfig(inner_loops=setting(args.ni, settings.ni_gate),
                                 cap=setting(args.fairness_cap, settings.fairness_cap))
            seed = setting(args.seed, settings.seed)
            modes = [ComplementMode.SEPARATE, ComplementMode.COMBINED] if args.mode == 'both' \
                else [ComplementMode(args.mode)]
            report['shots'] = counts.shots
            for mode in modes:
                scoped = ground.with_mode(mode)
                if mode == ComplementMode.COMBINED and not scoped.merges_complements:
                    logger.warning(f'Ground set of {len(ground.states)} states is not complement-closed; '
                                   f'combined mode scores it as separate')
                suffix = '' if len(modes) == 1 else f' ({mode.value})'
                per_state = ground_counts(counts, scoped, mode)
                report[f'gsp{suffix}'] = gsp(counts, scoped)
                report[f'ground counts{suffix}'] = per_state
                report[f'fairness shots{suffix}'] = fairness_or_nan(per_state, cfg, seed).csv_value()
        if args.circuit or args.calib:
            if not (args.circuit and args.calib):
                raise ValidationError('aggregate error needs both --circuit and --calib')
            circuit = load_circuit(args.circuit)
            report['aggregate error'] = aggregate_error(circuit, load_calibration(args.calib),
                                                        include_readout=not args.no_readout)
        return CommandResult(success=True, content=OutputFormatter.format_key_values(report),
                             status_update='completed', artifacts_created=report)
