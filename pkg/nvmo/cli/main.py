"""
``nvmo`` command line front end.

Commands:
    simulate <scenario> [--out DIR] [--seed N] [--svg] [--dt X] [--horizon T]
    bounds <scenario> [--epsilon E] [--c C]
    graph <scenario>
    config [--write PATH]

Exit codes: 0 success, 1 validation or assumption failure, 2 runtime failure.
Verbosity follows the ``NVMO_LOG`` environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from ..config import get_settings
from ..errors import NvmoError, SimulationError
from ..network.graph import compute_W, validate_assumption1
from ..sim.runner import averaging_report, run, tracking_report
from ..sim.scenario import load_scenario
from ..utils.log_common import LOG_ENV_VAR, build_logger
from ..utils.serialization import to_json
from .output import metrics_frame, orientation_frame, write_outputs

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

logger = build_logger()


@dataclass(frozen=True)
class RunConfig:
    scenario_path: Path
    output_dir: Path = Path("out")
    seed: Optional[int] = None
    emit_svg: bool = False
    dt: Optional[float] = None
    horizon: Optional[float] = None


def _print_key_values(title: str, data: dict) -> None:
    print(f"[{title}]")
    width = max(len(k) for k in data)
    for k, v in data.items():
        text = f"{v:.6g}" if isinstance(v, float) else str(v)
        print(f"  {k:<{width}} : {text}")


def cmd_simulate(cfg: RunConfig) -> int:
    settings = get_settings()
    sc = load_scenario(cfg.scenario_path).with_overrides(cfg.dt, cfg.horizon, cfg.seed)
    build_logger("nvmo", level=_settings_log_level(), log_path=str(cfg.output_dir))
    records = run(sc, settings)
    paths = write_outputs(records, cfg.output_dir)
    if cfg.emit_svg:
        from .plotting import plot_energies, plot_orientation

        plot_energies(metrics_frame(records), cfg.output_dir / "energies.svg")
        plot_orientation(orientation_frame(records), cfg.output_dir / "orientation.svg")
    logger.info(f"wrote {', '.join(str(p) for p in paths.values())}")
    print(paths["summary"].read_text(encoding="utf-8"), end="")
    return EXIT_OK


def cmd_bounds(
    scenario_path: Path, epsilon: Optional[float] = None, c: Optional[float] = None
) -> int:
    settings = get_settings()
    sc = load_scenario(scenario_path)
    averaging = averaging_report(sc, settings, epsilon=epsilon, c=c)
    _print_key_values("averaging", averaging.model_dump())
    payload = {"averaging": averaging}
    if not sc.is_static:
        tracking = tracking_report(sc, settings)
        _print_key_values("tracking", tracking.model_dump())
        payload["tracking"] = tracking
    print(to_json(payload))
    return EXIT_OK


def cmd_graph(scenario_path: Path) -> int:
    settings = get_settings()
    g = load_scenario(scenario_path).digraph()
    flags = validate_assumption1(g)
    print(f"nodes: {g.n}")
    print(f"balanced: {str(flags.balanced).lower()}")
    print(f"strongly_connected: {str(flags.strongly_connected).lower()}")
    result = compute_W(g, settings.enumeration_limit)
    witness = result.witness
    print(f"W: {result.w}")
    print(f"witness root: {witness.root}")
    for e in witness.tree_edges:
        print(f"  {e[0]} - {e[1]}  load {witness.per_edge_load[e]}")
    if not flags.ok:
        logger.error("communication graph fails balance or strong connectivity")
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_config(write: Optional[Path] = None) -> int:
    template = get_settings().create_template_file(write_file=write)
    if write is None:
        print(template, end="")
    else:
        logger.info(f"wrote settings template to {write}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvmo", description="Networked visual motion observer simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Run a scenario and write metrics")
    p.add_argument("scenario", type=Path)
    p.add_argument("--out", type=Path, default=Path("out"), help="Output directory")
    p.add_argument("--seed", type=int, help="Override the noise seed of the scenario")
    p.add_argument("--svg", action="store_true", help="Write SVG plots")
    p.add_argument("--dt", type=float, help="Override the integration step")
    p.add_argument("--horizon", type=float, help="Override the horizon")

    p = sub.add_parser("bounds", help="Print averaging and tracking bounds")
    p.add_argument("scenario", type=Path)
    p.add_argument("--epsilon", type=float, help="Slack epsilon of the averaging bounds")
    p.add_argument("--c", type=float, help="Slack c of beta")

    p = sub.add_parser("graph", help="Check the graph and compute W")
    p.add_argument("scenario", type=Path)

    p = sub.add_parser("config", help="Print or write the settings template")
    p.add_argument("--write", type=Path, help="Write the template to this path")
    return parser


def _settings_log_level():
    """Level from the settings file, used only when NVMO_LOG is unset."""
    if os.environ.get(LOG_ENV_VAR):
        return None
    return get_settings().log_level


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if (level := _settings_log_level()) is not None:
            build_logger(level=level)
        if args.command == "simulate":
            return cmd_simulate(
                RunConfig(
                    scenario_path=args.scenario,
                    output_dir=args.out,
                    seed=args.seed,
                    emit_svg=args.svg,
                    dt=args.dt,
                    horizon=args.horizon,
                )
            )
        if args.command == "bounds":
            return cmd_bounds(args.scenario, args.epsilon, args.c)
        if args.command == "graph":
            return cmd_graph(args.scenario)
        return cmd_config(args.write)
    except SimulationError as e:
        logger.error(f"simulation failed: {e}")
        return EXIT_RUNTIME
    except NvmoError as e:
        logger.error(str(e))
        return EXIT_VALIDATION
    except Exception as e:
        logger.exception(f"unexpected failure: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
