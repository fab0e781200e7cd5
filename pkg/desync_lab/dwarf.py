"""Single-hop dynamics: every node hears every other node directly.

The state is seen from the node about to fire: ``gaps[0]`` is the interval to
its successor and ``gaps[-1]`` the interval from its predecessor. After a
firing the successor becomes the firing node, so the vector is relabelled by
one position.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .core import GapVector, SystemConfig, force_reach
from .errors import DomainError, OvershootError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SingleHopForce:
    """Signed phase adjustment of the firing node (same units as the period).

    ``contributions`` lists ``(offset, term)`` pairs; positive offsets are
    successors, negative offsets are predecessors.
    """

    value: float
    contributions: Tuple[Tuple[int, float], ...]


def _force_terms(x: np.ndarray, coupling: float, period: float) -> Tuple[np.ndarray, np.ndarray]:
    reach = force_reach(x.size)
    ahead = coupling * period / np.cumsum(x[:reach])
    behind = coupling * period / np.cumsum(x[::-1][:reach])
    return -ahead, behind


def _check_inputs(gaps: GapVector, config: SystemConfig) -> None:
    if gaps.n != config.n:
        raise DomainError(f"gap vector has {gaps.n} entries but the system has n={config.n}")
    if gaps.period != config.period:
        raise DomainError(f"gap vector period {gaps.period!r} differs from system period {config.period!r}")
    if config.n < 3:
        raise DomainError(f"single-hop dynamics need n >= 3, got {config.n}")


def single_hop_force(gaps: GapVector, config: SystemConfig) -> SingleHopForce:
    _check_inputs(gaps, config)
    ahead, behind = _force_terms(gaps.gaps, config.coupling, config.period)
    contributions = tuple((m + 1, float(t)) for m, t in enumerate(ahead))
    contributions += tuple((-(m + 1), float(t)) for m, t in enumerate(behind))
    return SingleHopForce(value=float(behind.sum() + ahead.sum()), contributions=contributions)


def single_hop_map(x: np.ndarray, config: SystemConfig) -> np.ndarray:
    """Raw single-hop map on an array, without state validation."""
    x = np.asarray(x, dtype=float)
    ahead, behind = _force_terms(x, config.coupling, config.period)
    force = behind.sum() + ahead.sum()
    return np.concatenate((x[1:-1], [x[-1] + force, x[0] - force]))


def advance_single_hop(gaps: GapVector, config: SystemConfig) -> Tuple[GapVector, SingleHopForce]:
    """One firing: the next state together with the force that produced it."""
    force = single_hop_force(gaps, config)
    x = gaps.gaps
    before = x[-1] + force.value
    after = x[0] - force.value
    if before <= 0:
        raise OvershootError(f"gap before the firing node would become {before!r}", index=config.n - 2, value=float(before))
    if after <= 0:
        raise OvershootError(f"gap after the firing node would become {after!r}", index=config.n - 1, value=float(after))
    return GapVector(np.concatenate((x[1:-1], [before, after])), gaps.period), force


def step_single_hop(gaps: GapVector, config: SystemConfig) -> GapVector:
    return advance_single_hop(gaps, config)[0]


def sweep_single_hop(gaps: GapVector, config: SystemConfig) -> GapVector:
    """n consecutive firings, i.e. one full period; labels return to the start."""
    for _ in range(config.n):
        gaps = step_single_hop(gaps, config)
    return gaps
