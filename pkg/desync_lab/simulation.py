"""Round-based simulation of the single-hop and multi-hop maps."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import (
    GapVector,
    PerceptionMatrix,
    PerceptionMode,
    SystemConfig,
    Topology,
    TopologyKind,
    builtin_topology,
    equilibrium_gaps,
    load_topology,
    perception_matrix,
    perturb,
)
from .dwarf import advance_single_hop
from .errors import ConfigError, DesyncError, OvershootError
from .mdwarf import ForceTable, advance_multihop, force_table

logger = logging.getLogger(__name__)

DESYNC_METRIC = "desync_error = max_i |gap_i - T/n|"
MAX_RANDOM_DRAWS = 10_000


class SimulationMode(str, Enum):
    SINGLE_HOP = "single-hop"
    MULTI_HOP = "multi-hop"


class InitialState(str, Enum):
    EQUILIBRIUM = "equilibrium"
    RANDOM = "random"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one run.

    ``topology`` is a builtin kind (star, chain, full, ring), a path to a
    topology file or a Topology; it is only used in multi-hop mode.
    ``tolerance`` defaults to 1e-6 * period.
    """

    mode: SimulationMode
    n: int
    period: float = 1000.0
    rounds: int = 1
    coupling: Optional[float] = None
    topology: Union[str, Path, Topology] = TopologyKind.STAR.value
    perception_mode: PerceptionMode = PerceptionMode.TWO_HOP
    initial: InitialState = InitialState.EQUILIBRIUM
    seed: Optional[int] = None
    gaps: Optional[Tuple[float, ...]] = None
    perturbation: Optional[float] = None
    perturb_node: int = 0
    stride: int = 1
    tolerance: Optional[float] = None
    sweep: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", SimulationMode(self.mode))
            object.__setattr__(self, "perception_mode", PerceptionMode(self.perception_mode))
            object.__setattr__(self, "initial", InitialState(self.initial))
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if self.n < 3:
            raise ConfigError(f"simulation needs n >= 3, got {self.n}")
        if self.mode is SimulationMode.MULTI_HOP and self.n < 4:
            raise ConfigError(f"multi-hop simulation needs n >= 4, got {self.n}")
        if not self.period > 0:
            raise ConfigError(f"period must be positive, got {self.period!r}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        if self.perturbation is not None:
            if abs(self.perturbation) >= self.period / self.n:
                raise ConfigError(f"perturbation {self.perturbation!r} must be smaller than T/n = {self.period / self.n!r}")
            if not 0 <= self.perturb_node < self.n:
                raise ConfigError(f"perturb node {self.perturb_node} outside 0..{self.n - 1}")
        if self.gaps is not None:
            object.__setattr__(self, "gaps", tuple(float(g) for g in self.gaps))
            if self.initial is InitialState.RANDOM:
                raise ConfigError("explicit gaps cannot be combined with a random initial state")
            object.__setattr__(self, "initial", InitialState.EXPLICIT)
        if self.initial is InitialState.EXPLICIT:
            if self.gaps is None or len(self.gaps) != self.n:
                raise ConfigError(f"explicit initial state needs exactly {self.n} gaps")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance!r}")

    @property
    def convergence_threshold(self) -> float:
        return self.tolerance if self.tolerance is not None else 1e-6 * self.period

    @property
    def period_rounds(self) -> int:
        """Rounds per firing period; a swept single-hop round already is one."""
        if self.mode is SimulationMode.SINGLE_HOP and not self.sweep:
            return self.n
        return 1

    def system(self) -> SystemConfig:
        return SystemConfig(self.n, self.period, self.coupling)

    def resolve_topology(self) -> Topology:
        source = self.topology
        if isinstance(source, Topology):
            topology = source
        elif isinstance(source, str) and source in {k.value for k in TopologyKind}:
            topology = builtin_topology(source, self.n)
        else:
            topology = load_topology(source)
        if topology.n != self.n:
            raise ConfigError(f"topology has {topology.n} nodes but the simulation has n={self.n}")
        if not topology.is_connected:
            logger.info("Simulating on a disconnected topology (%d components)", topology.components())
        return topology

    def perception(self) -> PerceptionMatrix:
        return perception_matrix(self.resolve_topology(), self.perception_mode)


@dataclass(frozen=True)
class TraceRecord:
    round: int
    gaps: Tuple[float, ...]
    desync_error: float
    max_force: float


@dataclass(frozen=True)
class RunResult:
    mode: SimulationMode
    n: int
    period: float
    coupling: float
    trace: Tuple[TraceRecord, ...]
    converged: bool
    final_error: float
    rounds_executed: int
    envelope: Tuple[float, ...]
    failure: Optional[Dict[str, Any]] = None
    metric: str = DESYNC_METRIC

    @property
    def initial_error(self) -> float:
        return self.trace[0].desync_error


def desync_error(gaps: GapVector, period: Optional[float] = None) -> float:
    """Distance from equilibrium: max_i |gap_i - T/n|."""
    period = gaps.period if period is None else period
    return float(np.max(np.abs(gaps.gaps - period / gaps.n)))


def random_gaps(n: int, period: float, rng: np.random.Generator) -> GapVector:
    """Uniform draw on the simplex, rejecting states with a gap below T/(10 n^2)."""
    floor = period / (10.0 * n ** 2)
    for attempt in range(1, MAX_RANDOM_DRAWS + 1):
        gaps = rng.dirichlet(np.ones(n)) * period
        if np.all(gaps >= floor):
            # renormalise so the sum is exact to rounding
            gaps *= period / np.sum(gaps)
            return GapVector(gaps, period)
        logger.info("Rejected random initial state %d: smallest gap %.6g < %.6g", attempt, float(gaps.min()), floor)
    raise ConfigError(f"no admissible random state after {MAX_RANDOM_DRAWS} draws")


def initial_gaps(config: SimConfig, rng: Optional[np.random.Generator] = None) -> GapVector:
    if config.initial is InitialState.EXPLICIT:
        try:
            gaps = GapVector(np.array(config.gaps), config.period)
        except DesyncError as e:
            raise ConfigError(f"explicit gaps rejected: {e.message}") from e
    elif config.initial is InitialState.RANDOM:
        gaps = random_gaps(config.n, config.period, rng or np.random.default_rng(config.seed))
    else:
        gaps = equilibrium_gaps(config.n, config.period)
    if config.perturbation:
        try:
            gaps = perturb(gaps, config.perturb_node, config.perturbation)
        except DesyncError as e:
            raise ConfigError(f"perturbation rejected: {e.message}") from e
    return gaps


def _envelope(errors: Sequence[float], block: int) -> Tuple[float, ...]:
    # errors[0] is the initial state; blocks start at round 1
    values = np.asarray(errors[1:], dtype=float)
    return tuple(float(values[k:k + block].max()) for k in range(0, values.size, block))


def run_simulation(config: SimConfig) -> RunResult:
    """Iterate the configured map for ``config.rounds`` rounds.

    A single-hop round is one firing (or one full period when ``sweep`` is
    set); a multi-hop round is one synchronous transition. Overshoot stops the
    run and is reported in ``failure`` rather than raised.
    """
    system = config.system()
    rng = np.random.default_rng(config.seed)
    table: Optional[ForceTable] = None
    if config.mode is SimulationMode.MULTI_HOP:
        table = force_table(config.perception())
    gaps = initial_gaps(config, rng)

    errors: List[float] = [desync_error(gaps)]
    trace: List[TraceRecord] = [TraceRecord(0, gaps.as_tuple(), errors[0], 0.0)]
    failure: Optional[Dict[str, Any]] = None
    executed = 0
    last_force = 0.0

    for round_index in range(1, config.rounds + 1):
        try:
            gaps, max_force = _advance(gaps, system, config, table)
        except OvershootError as e:
            failure = {"round": round_index, "index": e.index, "value": e.value, "message": e.message}
            logger.info("Run stopped at round %d: %s", round_index, e.message)
            break
        executed = round_index
        last_force = max_force
        errors.append(desync_error(gaps))
        if round_index % config.stride == 0 or round_index == config.rounds:
            trace.append(TraceRecord(round_index, gaps.as_tuple(), errors[-1], max_force))
            logger.debug("Round %d: desync error %.6g", round_index, errors[-1])

    if trace[-1].round != executed:
        trace.append(TraceRecord(executed, gaps.as_tuple(), errors[-1], last_force))
    final_error = errors[-1]
    return RunResult(
        mode=config.mode,
        n=config.n,
        period=system.period,
        coupling=system.coupling,
        trace=tuple(trace),
        converged=failure is None and final_error <= config.convergence_threshold,
        final_error=final_error,
        rounds_executed=executed,
        envelope=_envelope(errors, config.period_rounds),
        failure=failure,
    )


def _advance(
    gaps: GapVector,
    system: SystemConfig,
    config: SimConfig,
    table: Optional[ForceTable],
) -> Tuple[GapVector, float]:
    if table is not None:
        gaps, adjustments = advance_multihop(gaps, table, system)
        return gaps, float(np.max(np.abs(adjustments)))
    steps = system.n if config.sweep else 1
    largest = 0.0
    for _ in range(steps):
        gaps, force = advance_single_hop(gaps, system)
        largest = max(largest, abs(force.value))
    return gaps, largest
