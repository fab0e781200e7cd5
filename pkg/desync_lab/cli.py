"""``desync`` command line."""
import argparse
import logging
import os
import sys
from functools import partial
from pathlib import Path
from typing import List, Optional, Sequence

from .core import (
    PerceptionMode,
    SystemConfig,
    TopologyKind,
    builtin_topology,
    equilibrium_gaps,
    load_topology,
    perception_matrix,
)
from .dwarf import single_hop_map
from .errors import ConfigError, DesyncError, NumericalError
from .export import ExportFormat, dumps, export
from .jacobian import (
    JacobianMatrix,
    Parity,
    StarVariant,
    fd_check,
    jacobian_multihop,
    jacobian_single_hop,
    jacobian_star,
)
from .ledger import FD_TOLERANCE, discrepancy_ledger
from .mdwarf import force_table, multihop_map
from .simulation import InitialState, SimConfig, SimulationMode, run_simulation
from .spectral import StabilityMode, stability_report, stability_thresholds

logger = logging.getLogger(__name__)

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
ANALYSIS_MODES = ("single-even", "single-odd", "star", "general")
STABILITY_MODES = {
    "single-even": StabilityMode.SINGLE_HOP_EVEN,
    "single-odd": StabilityMode.SINGLE_HOP_ODD,
    "star": StabilityMode.STAR,
    "general": StabilityMode.GENERAL,
}
SIMULATION_MODES = {"single": SimulationMode.SINGLE_HOP, "multi": SimulationMode.MULTI_HOP}


def configure_logging(env: Optional[dict] = None) -> None:
    env = os.environ if env is None else env
    name = env.get("DESYNC_LOG", "error").strip().lower()
    level = LOG_LEVELS.get(name, logging.ERROR)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
    if name not in LOG_LEVELS:
        logger.error("Unknown DESYNC_LOG value %r; using 'error'", name)


def _parse_gaps(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"gaps must be comma-separated numbers, got {text!r}")


def _add_system_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True, help="node count")
    parser.add_argument("--period", type=float, default=1000.0, help="period length in ms (default: 1000)")
    parser.add_argument("--k", type=float, default=None, dest="coupling", help="override the coupling constant")
    parser.add_argument(
        "--topology",
        default=TopologyKind.STAR.value,
        help="topology file or builtin kind: star, chain, full, ring (default: star)",
    )
    parser.add_argument(
        "--perception",
        choices=[m.value for m in PerceptionMode],
        default=PerceptionMode.TWO_HOP.value,
        help="perception mode (default: two-hop)",
    )


def _add_output_arguments(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--out", type=Path, required=required, help="output path")
    parser.add_argument("--format", choices=[f.value for f in ExportFormat], default=None,
                        help="output format (default: from the file suffix, else json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="desync", description="Desynchronization dynamics and stability analysis")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="iterate the single-hop or multi-hop map")
    simulate.add_argument("--mode", choices=sorted(SIMULATION_MODES), required=True)
    _add_system_arguments(simulate)
    simulate.add_argument("--init", choices=[InitialState.EQUILIBRIUM.value, InitialState.RANDOM.value],
                          default=InitialState.EQUILIBRIUM.value)
    simulate.add_argument("--gaps", type=_parse_gaps, default=None, help="explicit initial gaps, comma separated")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--perturb", type=float, default=None, help="phase shift applied to one node")
    simulate.add_argument("--perturb-node", type=int, default=0)
    simulate.add_argument("--rounds", type=int, required=True)
    simulate.add_argument("--stride", type=int, default=1)
    simulate.add_argument("--tolerance", type=float, default=None, help="convergence threshold (default: 1e-6 * period)")
    simulate.add_argument("--sweep", action="store_true", help="one single-hop round = n firings")
    _add_output_arguments(simulate)
    simulate.set_defaults(handler=_simulate)

    jacobian = commands.add_parser("jacobian", help="analytic Jacobian at equilibrium")
    jacobian.add_argument("--mode", choices=ANALYSIS_MODES, required=True)
    _add_system_arguments(jacobian)
    jacobian.add_argument("--variant", choices=[v.value for v in StarVariant], default=StarVariant.MASK_EXACT.value)
    jacobian.add_argument("--fd-check", action="store_true", help="compare against the finite-difference oracle")
    _add_output_arguments(jacobian)
    jacobian.set_defaults(handler=_jacobian)

    stability = commands.add_parser("stability", help="spectrum, certificates and verdict")
    stability.add_argument("--mode", choices=ANALYSIS_MODES, required=True)
    _add_system_arguments(stability)
    stability.add_argument("--variant", choices=[v.value for v in StarVariant], default=StarVariant.MASK_EXACT.value)
    _add_output_arguments(stability)
    stability.set_defaults(handler=_stability)

    thresholds = commands.add_parser("thresholds", help="closed-form node-count thresholds")
    _add_output_arguments(thresholds, required=False)
    thresholds.set_defaults(handler=_thresholds)

    ledger = commands.add_parser("ledger", help="which analytic forms the FD oracle confirms")
    ledger.add_argument("--period", type=float, default=1000.0)
    ledger.add_argument("--out", type=Path, default=None)
    ledger.set_defaults(handler=_ledger)
    return parser


def _perception(args: argparse.Namespace):
    if args.topology in {k.value for k in TopologyKind}:
        topology = builtin_topology(args.topology, args.n)
    else:
        topology = load_topology(args.topology)
        if topology.n != args.n:
            raise ConfigError(f"topology has {topology.n} nodes but --n is {args.n}")
    return perception_matrix(topology, args.perception)


def _emit(obj, args: argparse.Namespace) -> None:
    if args.out is None:
        sys.stdout.write(dumps(obj))
    else:
        export(obj, args.out, getattr(args, "format", None))


def _simulate(args: argparse.Namespace) -> int:
    config = SimConfig(
        mode=SIMULATION_MODES[args.mode],
        n=args.n,
        period=args.period,
        rounds=args.rounds,
        coupling=args.coupling,
        topology=args.topology,
        perception_mode=args.perception,
        initial=args.init,
        seed=args.seed,
        gaps=args.gaps,
        perturbation=args.perturb,
        perturb_node=args.perturb_node,
        stride=args.stride,
        tolerance=args.tolerance,
        sweep=args.sweep,
    )
    result = run_simulation(config)
    _emit(result, args)
    if result.failure is not None:
        raise NumericalError(f"run stopped by overshoot at round {result.failure['round']}: {result.failure['message']}")
    return 0


def _analytic_jacobian(args: argparse.Namespace, config: SystemConfig) -> JacobianMatrix:
    if args.mode == "single-even":
        return jacobian_single_hop(config, Parity.EVEN)
    if args.mode == "single-odd":
        return jacobian_single_hop(config, Parity.ODD)
    if args.mode == "star":
        return jacobian_star(config, args.variant)
    return jacobian_multihop(equilibrium_gaps(config.n, config.period), _perception(args), config)


def _jacobian(args: argparse.Namespace) -> int:
    config = SystemConfig(args.n, args.period, args.coupling)
    matrix = _analytic_jacobian(args, config)
    _emit(matrix, args)
    if args.fd_check:
        if args.mode.startswith("single"):
            step_map = partial(single_hop_map, config=config)
        else:
            perception = perception_matrix(builtin_topology("star", config.n)) if args.mode == "star" else _perception(args)
            step_map = partial(multihop_map, perception=force_table(perception), config=config)
        error = fd_check(matrix, step_map, equilibrium_gaps(config.n, config.period))
        print(f"fd-check max-abs error: {error:.6g}")
        if error > FD_TOLERANCE:
            raise NumericalError(f"finite-difference check failed ({error:.3g} > {FD_TOLERANCE:g})", provenance=matrix.label)
    return 0


def _stability(args: argparse.Namespace) -> int:
    config = SystemConfig(args.n, args.period, args.coupling)
    mode = STABILITY_MODES[args.mode]
    perception = _perception(args) if mode is StabilityMode.GENERAL else None
    report = stability_report(config, mode, perception, variant=args.variant)
    _emit(report, args)
    return 0


def _thresholds(args: argparse.Namespace) -> int:
    _emit(stability_thresholds(), args)
    return 0


def _ledger(args: argparse.Namespace) -> int:
    args.format = ExportFormat.JSON.value
    _emit(discrepancy_ledger(period=args.period), args)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except DesyncError as e:
        print(f"desync: error: {e.message}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
