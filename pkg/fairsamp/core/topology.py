"""Hardware connectivity graphs and logical-to-physical layout search."""

import logging
import re
from itertools import islice
from typing import Dict, Optional, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import GraphMatcher
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from fairsamp.core.errors import CompilationError

logger = logging.getLogger(__name__)

MAX_EMBEDDINGS = 512

_BUILTIN_EDGES = {
    'LNN': (3, ((0, 1), (1, 2))),
    '5T': (5, ((0, 1), (1, 4), (1, 2), (2, 3))),
    '5P': (5, ((0, 1), (0, 3), (1, 2), (2, 3), (1, 4))),
    '6A': (6, ((0, 1), (0, 3), (1, 2), (2, 3), (1, 4), (2, 5))),
    '7H': (7, ((0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (3, 6))),
}


class Topology(BaseModel):
    """Undirected connected graph over physical qubits 0..N-1."""
    model_config = ConfigDict(frozen=True)

    name: str
    nodes: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]

    @field_validator('edges', mode='before')
    @classmethod
    def normalize_edges(cls, v):
        return tuple(sorted({tuple(sorted((int(a), int(b)))) for a, b in v}))

    @model_validator(mode='after')
    def check_graph(self):
        if not self.nodes:
            raise ValueError('topology needs at least one node')
        if sorted(self.nodes) != list(range(len(self.nodes))):
            raise ValueError('topology nodes must be numbered 0..N-1')
        node_set = set(self.nodes)
        for a, b in self.edges:
            if a == b:
                raise ValueError(f'self-loop on node {a}')
            if a not in node_set or b not in node_set:
                raise ValueError(f'edge ({a}, {b}) references an unknown node')
        if not nx.is_connected(self.graph()):
            raise ValueError(f'topology {self.name} is not connected')
        return self

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def is_clique(self) -> bool:
        k = self.size
        return len(self.edges) == k * (k - 1) // 2

    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(sorted(self.nodes))
        graph.add_edges_from(self.edges)
        return graph


def clique(n: int) -> Topology:
    return Topology(name=f'Clique({n})', nodes=tuple(range(n)),
                    edges=tuple((a, b) for a in range(n) for b in range(a + 1, n)))


def builtin_topology(name: str, n: Optional[int] = None) -> Topology:
    """LNN, 5T, 5P, 6A, 7H, or Clique / Clique(k); a bare Clique needs `n`."""
    key = name.strip()
    match = re.fullmatch(r'(?i)clique(?:\((\d+)\)|(\d+))?', key)
    if match:
        size = match.group(1) or match.group(2)
        if size is None and n is None:
            raise CompilationError('Clique topology needs a size')
        return clique(int(size) if size else n)
    upper = key.upper()
    if upper not in _BUILTIN_EDGES:
        raise CompilationError(f'unknown topology {name!r}; expected one of {", ".join(_BUILTIN_EDGES)} or Clique')
    size, edges = _BUILTIN_EDGES[upper]
    return Topology(name=upper, nodes=tuple(range(size)), edges=edges)


BUILTIN_TOPOLOGY_NAMES = tuple(_BUILTIN_EDGES) + ('Clique',)


def embed_layout(interaction: nx.Graph, topology: Topology, seed: int = 0) -> Optional[Dict[int, int]]:
    """Logical -> physical map placing every interaction edge on a topology edge, or None.

    Candidates come from VF2 subgraph monomorphisms, sorted, and one is picked by a
    seeded generator so the result depends only on the inputs and the seed.
    """
    logical = sorted(interaction.nodes)
    if len(logical) > topology.size:
        return None
    if topology.is_clique:
        return {q: p for q, p in zip(logical, sorted(topology.nodes))}
    matcher = GraphMatcher(topology.graph(), interaction)
    candidates = []
    for mapping in islice(matcher.subgraph_monomorphisms_iter(), MAX_EMBEDDINGS):
        inverse = {q: p for p, q in mapping.items()}
        candidates.append(tuple(inverse[q] for q in logical))
    if not candidates:
        logger.info(f'No embedding of the interaction graph into {topology.name}')
        return None
    candidates.sort()
    rng = np.random.default_rng(seed)
    chosen = candidates[int(rng.integers(len(candidates)))]
    return dict(zip(logical, chosen))


def greedy_layout(interaction: nx.Graph, topology: Topology) -> Dict[int, int]:
    """Place high-degree qubits first, each on the free node touching most placed neighbours."""
    graph = topology.graph()
    order = sorted(interaction.nodes, key=lambda q: (-interaction.degree(q), q))
    layout: Dict[int, int] = {}
    free = set(graph.nodes)
    for q in order:
        placed = [layout[m] for m in interaction.neighbors(q) if m in layout]

        def score(p: int):
            adjacent = sum(1 for m in placed if graph.has_edge(p, m))
            distance = sum(nx.shortest_path_length(graph, p, m) for m in placed)
            return (-adjacent, distance, -graph.degree(p), p)

        node = min(free, key=score)
        layout[q] = node
        free.remove(node)
    return layout
