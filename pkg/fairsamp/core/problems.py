"""Catalogue of the five degenerate-ground-state benchmark problems."""

import logging
import math
from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict

from fairsamp.core.errors import ModelError
from fairsamp.core.models import IsingModel, QaoaParams, complement

logger = logging.getLogger(__name__)


class ProblemInfo(BaseModel):
    """Reference data for one benchmark problem.

    Angles are stored as multiples of pi. Ground states list only lq0 = UP;
    the full set adds their complements.
    """
    model_config = ConfigDict(frozen=True)

    id: str
    model: IsingModel
    listed_ground_states: Tuple[str, ...]
    optimum_energy_bound: float
    angles_over_pi: Tuple[float, float]
    optimum_energy: float
    optimum_gsp: float
    topologies: Tuple[str, ...]

    @property
    def table_params(self) -> QaoaParams:
        beta, gamma = self.angles_over_pi
        return QaoaParams.single(beta * math.pi, gamma * math.pi)

    def full_ground_states(self) -> Tuple[str, ...]:
        states = set(self.listed_ground_states)
        states.update(complement(s) for s in self.listed_ground_states)
        return tuple(sorted(states))


def _model(pid: str, n: int, couplings: Dict[Tuple[int, int], float]) -> IsingModel:
    quadratic = [(i, j, J) for (i, j), J in sorted(couplings.items())]
    return IsingModel(n=n, quadratic=quadratic, name=pid)


# Problem (b): the Z1 couplings are J12=-2, J13=-1, J14=1; with these the ground
# set is exactly the six listed states plus complements at -5.
_PROBLEMS: Dict[str, ProblemInfo] = {
    'a': ProblemInfo(
        id='a',
        model=_model('a', 5, {(0, 1): 1, (0, 2): 1, (0, 3): -1, (1, 2): 1, (1, 4): -1,
                              (2, 3): 1, (2, 4): 1, (3, 4): 1}),
        listed_ground_states=('00000', '00011', '00111'),
        optimum_energy_bound=-4.0,
        angles_over_pi=(1 / 2, 11 / 12),
        optimum_energy=-2.682,
        optimum_gsp=0.498,
        topologies=('5T', 'Clique'),
    ),
    'b': ProblemInfo(
        id='b',
        model=_model('b', 5, {(0, 1): 2, (0, 2): 1, (0, 3): 2, (0, 4): 1, (1, 2): -2,
                              (1, 3): -1, (1, 4): 1, (2, 3): 1, (2, 4): 2, (3, 4): -2}),
        listed_ground_states=('00000', '00010', '00101', '00110', '01000', '01001'),
        optimum_energy_bound=-5.0,
        angles_over_pi=(11 / 15, 17 / 60),
        optimum_energy=-4.228,
        optimum_gsp=0.846,
        topologies=('5T', '5P', 'Clique'),
    ),
    'c': ProblemInfo(
        id='c',
        model=_model('c', 6, {(0, 2): 1, (1, 3): 1, (2, 3): -1, (2, 4): 1, (2, 5): -1,
                              (3, 4): 1, (3, 5): -1, (4, 5): 1}),
        listed_ground_states=('000001', '010100', '010111'),
        optimum_energy_bound=-4.0,
        angles_over_pi=(23 / 60, -1 / 15),
        optimum_energy=-1.563,
        optimum_gsp=0.215,
        topologies=('6A', '7H', 'Clique'),
    ),
    'd': ProblemInfo(
        id='d',
        model=_model('d', 4, {(0, 1): 1, (1, 2): -1, (1, 3): -1, (2, 3): -1}),
        listed_ground_states=('0001', '0010', '0011'),
        optimum_energy_bound=-2.0,
        angles_over_pi=(5 / 12, -1 / 10),
        optimum_energy=-1.319,
        optimum_gsp=0.702,
        topologies=('LNN', 'Clique'),
    ),
    'e': ProblemInfo(
        id='e',
        model=_model('e', 3, {(0, 1): -1, (0, 2): -1, (1, 2): -1}),
        listed_ground_states=('001', '010', '011'),
        optimum_energy_bound=-1.0,
        angles_over_pi=(23 / 60, -3 / 5),
        optimum_energy=-0.999,
        optimum_gsp=1.000,
        topologies=('LNN', 'Clique'),
    ),
}

PROBLEM_IDS = tuple(_PROBLEMS)


def problem_info(pid: str) -> ProblemInfo:
    key = str(pid).strip().lower()
    if key not in _PROBLEMS:
        raise ModelError(f'unknown problem {pid!r}; expected one of {", ".join(PROBLEM_IDS)}')
    return _PROBLEMS[key]


def builtin_problem(pid: str) -> IsingModel:
    """The full, unreduced model of a benchmark problem."""
    return problem_info(pid).model


def admits_topology(pid: str, topology_name: str) -> bool:
    name = topology_name.strip()
    allowed = {t.lower() for t in problem_info(pid).topologies}
    if name.lower().startswith('clique'):
        return 'clique' in allowed
    return name.lower() in allowed
