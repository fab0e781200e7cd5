"""Multi-hop force algebra and the synchronous multi-hop transition.

Node i feels negative forces from nodes ahead of it (i+d) and positive forces
from nodes behind it (i-d), for distances d = 1..reach. Which of those count is
decided by the perception matrix through three masks per side:

* closest: the nearest perceived node,
* resistance: a perceived node followed by a farther perceived node,
* absorption: a perceived node preceded by a nearer perceived node.

The effective weight of the node at distance d is ``c*R + S - T``.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple, Union

import numpy as np

from .core import GapVector, PerceptionMatrix, SystemConfig, force_reach
from .errors import DomainError, OvershootError

logger = logging.getLogger(__name__)


class ForceDirection(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


def _side_masks(perceived: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    c = np.asarray(perceived, dtype=bool)
    seen = np.logical_or.accumulate(c)
    nearer = np.concatenate(([False], seen[:-1]))
    farther = np.concatenate((np.logical_or.accumulate(c[::-1])[::-1][1:], [False]))
    return ~nearer, c & farther, c & nearer


@dataclass(frozen=True, eq=False)
class ForceMasks:
    """Masks seen by one observer, ordered by distance d = 1..reach.

    ``minus_nodes[d-1]`` is node i+d and ``plus_nodes[d-1]`` is node i-d.
    The closest mask R is not gated by perception; the closest term uses c*R.
    """

    observer: int
    plus_nodes: np.ndarray
    minus_nodes: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    r_plus: np.ndarray
    s_plus: np.ndarray
    t_plus: np.ndarray
    r_minus: np.ndarray
    s_minus: np.ndarray
    t_minus: np.ndarray

    @property
    def reach(self) -> int:
        return int(self.minus_nodes.size)

    def weights(self, direction: Union[ForceDirection, str]) -> np.ndarray:
        if ForceDirection(direction) is ForceDirection.POSITIVE:
            c, r, s, t = self.c_plus, self.r_plus, self.s_plus, self.t_plus
        else:
            c, r, s, t = self.c_minus, self.r_minus, self.s_minus, self.t_minus
        return (c & r).astype(np.int64) + s.astype(np.int64) - t.astype(np.int64)


def _check_perception(perception: PerceptionMatrix) -> None:
    if perception.n < 4:
        raise DomainError(f"multi-hop forces need n >= 4, got {perception.n}")


def force_masks(perception: PerceptionMatrix, i: int) -> ForceMasks:
    _check_perception(perception)
    n = perception.n
    if not 0 <= i < n:
        raise DomainError(f"node index {i} outside 0..{n - 1}")
    distances = np.arange(1, force_reach(n) + 1)
    minus_nodes = (i + distances) % n
    plus_nodes = (i - distances) % n
    c_minus = perception.c[i, minus_nodes]
    c_plus = perception.c[i, plus_nodes]
    r_minus, s_minus, t_minus = _side_masks(c_minus)
    r_plus, s_plus, t_plus = _side_masks(c_plus)
    return ForceMasks(
        observer=i,
        plus_nodes=plus_nodes,
        minus_nodes=minus_nodes,
        c_plus=c_plus,
        c_minus=c_minus,
        r_plus=r_plus,
        s_plus=s_plus,
        t_plus=t_plus,
        r_minus=r_minus,
        s_minus=s_minus,
        t_minus=t_minus,
    )


@dataclass(frozen=True, eq=False)
class ForceTable:
    """Effective weights for every observer: ``w_plus[i, d-1]`` and ``w_minus[i, d-1]``."""

    w_plus: np.ndarray
    w_minus: np.ndarray

    @property
    def n(self) -> int:
        return int(self.w_plus.shape[0])

    @property
    def reach(self) -> int:
        return int(self.w_plus.shape[1])


def force_table(perception: PerceptionMatrix) -> ForceTable:
    masks = [force_masks(perception, i) for i in range(perception.n)]
    w_plus = np.array([m.weights(ForceDirection.POSITIVE) for m in masks], dtype=np.int64)
    w_minus = np.array([m.weights(ForceDirection.NEGATIVE) for m in masks], dtype=np.int64)
    return ForceTable(w_plus=w_plus.reshape(perception.n, -1), w_minus=w_minus.reshape(perception.n, -1))


@dataclass(frozen=True)
class PairwiseForce:
    direction: ForceDirection
    magnitude: float


def _span(n: int, start: int, count: int) -> np.ndarray:
    return (start + np.arange(count)) % n


def pairwise_force(gaps: GapVector, i: int, j: int, direction: Union[ForceDirection, str]) -> PairwiseForce:
    """Force of node j on node i: T over the cyclic gap sum between them."""
    n = gaps.n
    if not (0 <= i < n and 0 <= j < n):
        raise DomainError(f"node indices ({i}, {j}) outside 0..{n - 1}")
    if i == j:
        raise DomainError("a node exerts no force on itself")
    direction = ForceDirection(direction)
    if direction is ForceDirection.POSITIVE:
        span = _span(n, j, (i - j) % n)
    else:
        span = _span(n, i, (j - i) % n)
    return PairwiseForce(direction, gaps.period / float(np.sum(gaps.gaps[span])))


@dataclass(frozen=True)
class TotalForce:
    """Signed force on one node and its per-component sums."""

    value: float
    breakdown: Dict[str, float]


def _directional_forces(x: np.ndarray, reach: int, period: float) -> Tuple[np.ndarray, np.ndarray]:
    """Per-node force magnitudes from behind (plus) and ahead (minus), shape (n, reach)."""
    n = x.size
    nodes = np.arange(n)[:, None]
    distances = np.arange(reach)[None, :]
    ahead = np.cumsum(x[(nodes + distances) % n], axis=1)
    behind = np.cumsum(x[(nodes - 1 - distances) % n], axis=1)
    return period / behind, period / ahead


def total_force(gaps: GapVector, perception: PerceptionMatrix, i: int, config: SystemConfig) -> TotalForce:
    validate_state(gaps, perception, config)
    masks = force_masks(perception, i)
    f_plus, f_minus = _directional_forces(gaps.gaps, masks.reach, gaps.period)
    f_plus, f_minus = f_plus[i], f_minus[i]
    breakdown = {
        "closest_plus": float(np.sum(f_plus[masks.c_plus & masks.r_plus])),
        "resistance_plus": float(np.sum(f_plus[masks.s_plus])),
        "absorption_plus": float(np.sum(f_plus[masks.t_plus])),
        "closest_minus": float(np.sum(f_minus[masks.c_minus & masks.r_minus])),
        "resistance_minus": float(np.sum(f_minus[masks.s_minus])),
        "absorption_minus": float(np.sum(f_minus[masks.t_minus])),
    }
    positive = breakdown["closest_plus"] + breakdown["resistance_plus"] - breakdown["absorption_plus"]
    negative = breakdown["closest_minus"] + breakdown["resistance_minus"] - breakdown["absorption_minus"]
    return TotalForce(value=positive - negative, breakdown=breakdown)


def multihop_forces(x: np.ndarray, table: ForceTable, period: float) -> np.ndarray:
    """F_i for every node at state ``x`` (dimensionless)."""
    x = np.asarray(x, dtype=float)
    f_plus, f_minus = _directional_forces(x, table.reach, period)
    return np.sum(table.w_plus * f_plus, axis=1) - np.sum(table.w_minus * f_minus, axis=1)


def as_force_table(perception: Union[PerceptionMatrix, ForceTable]) -> ForceTable:
    if isinstance(perception, ForceTable):
        return perception
    return force_table(perception)


def multihop_map(x: np.ndarray, perception: Union[PerceptionMatrix, ForceTable], config: SystemConfig) -> np.ndarray:
    """Raw synchronous map gap_i' = gap_i + K F_{i+1} - K F_i, without validation."""
    x = np.asarray(x, dtype=float)
    forces = multihop_forces(x, as_force_table(perception), config.period)
    return x + config.coupling * (np.roll(forces, -1) - forces)


def validate_state(gaps: GapVector, perception: Union[PerceptionMatrix, ForceTable], config: SystemConfig) -> None:
    if not gaps.n == perception.n == config.n:
        raise DomainError(f"size mismatch: gaps n={gaps.n}, perception n={perception.n}, system n={config.n}")
    if gaps.period != config.period:
        raise DomainError(f"gap vector period {gaps.period!r} differs from system period {config.period!r}")
    if config.n < 4:
        raise DomainError(f"multi-hop dynamics need n >= 4, got {config.n}")


def advance_multihop(
    gaps: GapVector,
    perception: Union[PerceptionMatrix, ForceTable],
    config: SystemConfig,
) -> Tuple[GapVector, np.ndarray]:
    """One synchronous transition and the per-node phase adjustments K*F_i."""
    validate_state(gaps, perception, config)
    table = as_force_table(perception)
    forces = multihop_forces(gaps.gaps, table, config.period)
    adjustments = config.coupling * forces
    updated = gaps.gaps + np.roll(adjustments, -1) - adjustments
    if np.any(updated <= 0):
        index = int(np.argmax(updated <= 0))
        raise OvershootError(f"gap {index} would become {updated[index]!r}", index=index, value=float(updated[index]))
    return GapVector(updated, gaps.period), adjustments


def step_multihop(gaps: GapVector, perception: Union[PerceptionMatrix, ForceTable], config: SystemConfig) -> GapVector:
    return advance_multihop(gaps, perception, config)[0]
