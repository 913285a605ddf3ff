import argparse
import logging
from abc import ABC, abstractmethod
from typing import Optional, Tuple

from fairsamp.core.circuit import Circuit
from fairsamp.core.compiler import CompiledCircuit, McpStrategy, route_and_lower
from fairsamp.core.config import WorkbenchSettings
from fairsamp.core.errors import WorkbenchError
from fairsamp.core.experiment import check_topology, choose_params, problem_model
from fairsamp.core.gmqaoa import assemble_qaoa
from fairsamp.core.ising import reduce_model
from fairsamp.core.models import CommandResult, IsingModel, QaoaParams
from fairsamp.integrations.file_formats import load_circuit, load_ising, resolve_topology
from fairsamp.utils.output_formatter import OutputFormatter

logger = logging.getLogger(__name__)


class BaseHandler(ABC):
    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        pass

    @abstractmethod
    def execute(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        pass

    def run(self, args: argparse.Namespace, settings: WorkbenchSettings) -> CommandResult:
        """execute() with workbench and input errors turned into a failed result."""
        try:
            return self.execute(args, settings)
        except (WorkbenchError, ValueError) as e:
            logger.debug(f'{self.name} failed', exc_info=True)
            return CommandResult(success=False, content=OutputFormatter.format_error(str(e)),
                                 status_update=type(e).__name__)

    def get_capabilities(self) -> dict:
        return {'name': self.name, 'description': self.description}


def add_model_arguments(parser: argparse.ArgumentParser, reduce_default: bool = True,
                        allow_circuit: bool = False) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--problem', help='builtin problem id (a-e)')
    source.add_argument('--ising', help='Ising model JSON file')
    if allow_circuit:
        source.add_argument('--circuit', help='circuit text file written by build')
    parser.add_argument('--reduce', action=argparse.BooleanOptionalAction, default=reduce_default,
                        help='fix qubit 0 to up before building (breaks the global flip symmetry)')


def add_angle_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--beta', type=float, help='mixer angle in radians (needs --gamma)')
    parser.add_argument('--gamma', type=float, help='phase separator angle in radians (needs --beta)')
    parser.add_argument('--gridsearch', action='store_true', help='pick angles by grid search')


def add_compile_arguments(parser: argparse.ArgumentParser, topology_required: bool = False) -> None:
    parser.add_argument('--topology', required=topology_required,
                        help='LNN, 5T, 5P, 6A, 7H, Clique or a topology JSON file')
    parser.add_argument('--gateset', choices=['ibm', 'generic'], default='ibm')
    parser.add_argument('--ancilla', type=int, help='ancilla qubits for the mixer decomposition '
                                                    '(default: one if the topology has a spare node)')
    parser.add_argument('--mcp-strategy', choices=[s.value for s in McpStrategy], default=McpStrategy.AUTO.value)


def resolve_model(args: argparse.Namespace) -> IsingModel:
    if getattr(args, 'ising', None):
        model = load_ising(args.ising)
        return reduce_model(model) if args.reduce and model.n > 1 else model
    return problem_model(args.problem, args.reduce)


def resolve_params(args: argparse.Namespace, model: IsingModel, settings: WorkbenchSettings) -> Tuple[QaoaParams, str]:
    if (args.beta is None) != (args.gamma is None):
        raise ValueError('--beta and --gamma must be given together')
    if args.gridsearch and args.beta is not None:
        raise ValueError('--gridsearch cannot be combined with explicit angles')
    problem: Optional[str] = getattr(args, 'problem', None)
    return choose_params(model, problem, args.reduce, args.beta, args.gamma, args.gridsearch, settings.grid_steps)


def resolve_circuit(args: argparse.Namespace, settings: WorkbenchSettings,
                    measure: bool = True) -> Tuple[Optional[IsingModel], Circuit]:
    """The model (None for a circuit file) and the abstract circuit a command works on."""
    if getattr(args, 'circuit', None):
        return None, load_circuit(args.circuit)
    model = resolve_model(args)
    params, source = resolve_params(args, model, settings)
    logger.info(f'Using {source} angles beta={params.betas} gamma={params.gammas}')
    return model, assemble_qaoa(model, params, measure=measure)


def compile_onto(args: argparse.Namespace, circuit: Circuit, seed: int) -> CompiledCircuit:
    topology = resolve_topology(args.topology, circuit.n)
    if getattr(args, 'problem', None):
        check_topology(args.problem, args.topology, topology)
    budget = args.ancilla
    if budget is None:
        budget = min(1, max(0, topology.size - circuit.n))
    return route_and_lower(circuit, topology, gateset=args.gateset, ancilla_budget=budget,
                           mcp_strategy=args.mcp_strategy, seed=seed)


def setting(value, default):
    """A command-line value, falling back to the configured default when omitted."""
    return default if value is None else value
