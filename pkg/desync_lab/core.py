"""Shared model types: system constants, gap/phase states, topologies and perception."""
import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ConfigError, DegenerateStateError, DomainError, StorageError

logger = logging.getLogger(__name__)

COUPLING_SCALE = 38.597
COUPLING_EXPONENT = -1.874
AMPLIFICATION_SCALE = COUPLING_SCALE / 1000.0
AMPLIFICATION_EXPONENT = 2.0 + COUPLING_EXPONENT
ZETA_2 = math.pi ** 2 / 6.0
SUM_TOLERANCE = 1e-9


def _check_node_count(n: int, minimum: int = 2) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"node count must be an integer, got {n!r}")
    if n < minimum:
        raise DomainError(f"node count must be >= {minimum}, got {n}")


def _check_period(period: float) -> None:
    if not (np.isfinite(period) and period > 0):
        raise DomainError(f"period must be positive and finite, got {period!r}")


def coupling_constant(n: int, period: float) -> float:
    """Coupling constant K = 38.597 * n^-1.874 * T / 1000."""
    _check_node_count(n)
    _check_period(period)
    return COUPLING_SCALE * float(n) ** COUPLING_EXPONENT * period / 1000.0


def amplification(n: int) -> float:
    """Amplification A = K n^2 / T = 0.038597 * n^0.126 (independent of T)."""
    _check_node_count(n)
    return AMPLIFICATION_SCALE * float(n) ** AMPLIFICATION_EXPONENT


def force_reach(n: int) -> int:
    """Number of neighbours that push on a node from each side: ceil(n/2) - 1."""
    _check_node_count(n)
    return (n - 1) // 2


def inverse_square_sum(start: int, stop: int) -> float:
    """Sum of 1/i^2 for i in [start, stop]; 0 for an empty range."""
    if start < 1:
        raise DomainError(f"summation start must be >= 1, got {start}")
    if stop < start:
        return 0.0
    # smallest terms first
    terms = 1.0 / np.arange(stop, start - 1, -1, dtype=float) ** 2
    return float(np.sum(terms))


def partial_inverse_square_sum(s: int, n: int) -> float:
    """Sum of 1/i^2 for i from s up to the force reach of n."""
    if s < 1:
        raise DomainError(f"summation start must be >= 1, got {s}")
    return inverse_square_sum(s, force_reach(n))


@dataclass(frozen=True)
class SystemConfig:
    """Node count, period (ms) and coupling constant of one system.

    ``coupling`` is derived from ``n`` and ``period`` unless given explicitly.
    """

    n: int
    period: float = 1000.0
    coupling: Optional[float] = None

    def __post_init__(self):
        _check_node_count(self.n)
        _check_period(self.period)
        object.__setattr__(self, "period", float(self.period))
        if self.coupling is None:
            object.__setattr__(self, "coupling", coupling_constant(self.n, self.period))
        elif not (np.isfinite(self.coupling) and self.coupling > 0):
            raise DomainError(f"coupling must be positive, got {self.coupling!r}")

    @property
    def amplification(self) -> float:
        return self.coupling * self.n ** 2 / self.period

    @property
    def reach(self) -> int:
        return force_reach(self.n)

    @property
    def equilibrium_gap(self) -> float:
        return self.period / self.n


def _frozen_array(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GapVector:
    """Phase intervals between consecutive nodes on the period ring.

    ``gaps[i]`` is the interval from node i to node i+1 (mod n).
    """

    gaps: np.ndarray
    period: float

    def __post_init__(self):
        _check_period(self.period)
        gaps = _frozen_array(self.gaps)
        if gaps.ndim != 1 or gaps.size < 2:
            raise DomainError(f"a gap vector needs at least two entries, got shape {gaps.shape}")
        if not np.all(np.isfinite(gaps)):
            raise DegenerateStateError("gap vector contains non-finite entries")
        if np.any(gaps <= 0):
            index = int(np.argmax(gaps <= 0))
            raise DegenerateStateError(f"gap {index} is not positive ({gaps[index]!r})")
        total = float(np.sum(gaps))
        if abs(total - self.period) > SUM_TOLERANCE * self.period:
            raise DomainError(f"gaps sum to {total!r}, expected the period {self.period!r}")
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "period", float(self.period))

    @property
    def n(self) -> int:
        return int(self.gaps.size)

    def __len__(self) -> int:
        return self.n

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(float(g) for g in self.gaps)

    def rotated(self, shift: int) -> "GapVector":
        return GapVector(np.roll(self.gaps, shift), self.period)

    def mirrored(self) -> "GapVector":
        return GapVector(self.gaps[::-1], self.period)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Firing phases in [0, period), one per node."""

    phases: np.ndarray
    period: float

    def __post_init__(self):
        _check_period(self.period)
        phases = _frozen_array(self.phases)
        if phases.ndim != 1 or phases.size < 2:
            raise DomainError(f"a phase vector needs at least two entries, got shape {phases.shape}")
        if not np.all(np.isfinite(phases)) or np.any(phases < 0) or np.any(phases >= self.period):
            raise DomainError(f"phases must lie in [0, {self.period!r})")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "period", float(self.period))

    @property
    def n(self) -> int:
        return int(self.phases.size)


def equilibrium_gaps(n: int, period: float = 1000.0) -> GapVector:
    _check_node_count(n)
    _check_period(period)
    return GapVector(np.full(n, period / n), period)


def ring_gaps(phases: PhaseVector) -> GapVector:
    """Gaps in ring order, starting at input node 0.

    Nodes are ordered by phase distance ahead of node 0, so phases
    (900, 100, 500) on T=1000 give gaps (200, 400, 400).
    """
    period = phases.period
    relative = np.mod(phases.phases - phases.phases[0], period)
    order = np.argsort(relative, kind="stable")
    ordered = relative[order]
    gaps = np.diff(np.append(ordered, period))
    if np.any(gaps <= 0):
        raise DegenerateStateError("duplicate phases cannot be ordered on the ring")
    return GapVector(gaps, period)


def gap_phases(gaps: GapVector, anchor: float = 0.0) -> PhaseVector:
    """Inverse of ring_gaps: node 0 sits at ``anchor``."""
    offsets = np.concatenate(([0.0], np.cumsum(gaps.gaps[:-1])))
    return PhaseVector(np.mod(anchor + offsets, gaps.period), gaps.period)


def perturb(gaps: GapVector, node: int, magnitude: float) -> GapVector:
    """Shift one node's phase forward by ``magnitude``.

    The gap before the node grows and the gap after it shrinks by the same amount.
    """
    n = gaps.n
    if not 0 <= node < n:
        raise DomainError(f"node index {node} outside 0..{n - 1}")
    shifted = np.array(gaps.gaps)
    shifted[(node - 1) % n] += magnitude
    shifted[node] -= magnitude
    return GapVector(shifted, gaps.period)


class TopologyKind(str, Enum):
    STAR = "star"
    CHAIN = "chain"
    FULL = "full"
    RING = "ring"


class PerceptionMode(str, Enum):
    ONE_HOP = "one-hop"
    TWO_HOP = "two-hop"


@dataclass(frozen=True, eq=False)
class Topology:
    """Symmetric adjacency without self-loops. Connectivity is reported, not required."""

    adjacency: np.ndarray

    def __post_init__(self):
        adjacency = _frozen_array(self.adjacency, dtype=bool)
        if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
            raise ConfigError(f"adjacency must be square, got shape {adjacency.shape}")
        if adjacency.shape[0] < 2:
            raise ConfigError("a topology needs at least two nodes")
        if np.any(np.diag(adjacency)):
            raise ConfigError("adjacency has self-loops")
        if not np.array_equal(adjacency, adjacency.T):
            raise ConfigError("adjacency is not symmetric")
        object.__setattr__(self, "adjacency", adjacency)

    @property
    def n(self) -> int:
        return int(self.adjacency.shape[0])

    def components(self) -> int:
        count, _ = connected_components(self.adjacency.astype(np.int8), directed=False)
        return int(count)

    @property
    def is_connected(self) -> bool:
        return self.components() == 1

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Sequence[int]]) -> "Topology":
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise ConfigError(f"topology node count must be an integer >= 2, got {n!r}")
        adjacency = np.zeros((n, n), dtype=bool)
        for edge in edges:
            if len(edge) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in edge):
                raise ConfigError(f"edge must be a pair of node indices, got {edge!r}")
            i, j = edge
            if not (0 <= i < n and 0 <= j < n):
                raise ConfigError(f"edge {edge!r} references a node outside 0..{n - 1}")
            if i == j:
                raise ConfigError(f"self edge {edge!r}")
            if adjacency[i, j]:
                raise ConfigError(f"duplicate edge {edge!r}")
            adjacency[i, j] = adjacency[j, i] = True
        return cls(adjacency)


def builtin_topology(kind: Union[TopologyKind, str], n: int) -> Topology:
    """Star (hub 0), chain, full mesh or ring on n nodes."""
    try:
        kind = TopologyKind(kind)
    except ValueError:
        raise ConfigError(f"unknown topology {kind!r}; expected one of {[k.value for k in TopologyKind]}")
    if n < 2:
        raise ConfigError(f"a topology needs at least two nodes, got {n}")
    adjacency = np.zeros((n, n), dtype=bool)
    nodes = np.arange(n)
    if kind is TopologyKind.STAR:
        adjacency[0, 1:] = adjacency[1:, 0] = True
    elif kind is TopologyKind.CHAIN:
        adjacency[nodes[:-1], nodes[1:]] = True
    elif kind is TopologyKind.RING:
        adjacency[nodes, (nodes + 1) % n] = True
    else:
        adjacency[:] = True
    adjacency |= adjacency.T
    np.fill_diagonal(adjacency, False)
    return Topology(adjacency)


def load_topology(path: Union[str, Path]) -> Topology:
    """Read a topology file of the form {"n": int, "edges": [[i, j], ...]}."""
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise StorageError(f"cannot read topology ({e.strerror or e})", str(path)) from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"topology file {path} is not valid JSON: {e.msg}") from e
    if not isinstance(document, dict) or "n" not in document or "edges" not in document:
        raise ConfigError(f"topology file {path} must be an object with 'n' and 'edges'")
    if not isinstance(document["edges"], list):
        raise ConfigError(f"'edges' in {path} must be a list")
    topology = Topology.from_edges(document["n"], document["edges"])
    components = topology.components()
    if components > 1:
        logger.info("Topology %s is disconnected (%d components)", path, components)
    return topology


@dataclass(frozen=True, eq=False)
class PerceptionMatrix:
    """Which nodes know each other's relative phase (c[i, j])."""

    c: np.ndarray
    mode: Optional[PerceptionMode] = None

    def __post_init__(self):
        c = _frozen_array(self.c, dtype=bool)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ConfigError(f"perception matrix must be square, got shape {c.shape}")
        if np.any(np.diag(c)):
            raise ConfigError("a node cannot perceive itself")
        object.__setattr__(self, "c", c)
        if self.mode is not None:
            object.__setattr__(self, "mode", PerceptionMode(self.mode))

    @property
    def n(self) -> int:
        return int(self.c.shape[0])

    @classmethod
    def full(cls, n: int) -> "PerceptionMatrix":
        c = np.ones((n, n), dtype=bool)
        np.fill_diagonal(c, False)
        return cls(c)

    @classmethod
    def empty(cls, n: int) -> "PerceptionMatrix":
        return cls(np.zeros((n, n), dtype=bool))


def perception_matrix(topology: Topology, mode: Union[PerceptionMode, str] = PerceptionMode.TWO_HOP) -> PerceptionMatrix:
    mode = PerceptionMode(mode)
    adjacency = topology.adjacency
    if mode is PerceptionMode.ONE_HOP:
        c = adjacency.copy()
    else:
        hops = adjacency.astype(np.int64)
        c = adjacency | (hops @ hops > 0)
    np.fill_diagonal(c, False)
    return PerceptionMatrix(c, mode)
