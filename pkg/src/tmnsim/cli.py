"""Command line: ``tmnsim {validate,simulate,circularity,compare,optimize}``.

Errors go to stderr as a single ``error[<Code>]: <message>`` line and make
the process exit with status 1.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from .circularity import CircularityReport, circularity
from .errors import MixedDelta, TMNError
from .mechanics import Trajectory
from .optimize import argmax_circularity, enumerate_scenarios
from .scenario_io import ScenarioFile, load_scenario_file
from .simulate import JourneyLog, run_journey


def _horizon(text: str) -> float:
    if text in ("unbounded", "inf"):
        return math.inf
    try:
        phi = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not phi > 0:
        raise argparse.ArgumentTypeError("horizon must be > 0")
    return phi


def fmt_horizon(phi: float) -> str:
    return "unbounded" if math.isinf(phi) else repr(phi)


def _journey(sf: ScenarioFile, record_every: int = 1) -> JourneyLog:
    sc = sf.scenario
    return run_journey(
        sc.network, sc.element, sc.route, sf.sim.dt,
        max_time=sf.sim.max_time, record_every=record_every,
    )


def write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(Trajectory.COLUMNS)
        for row in traj.samples:
            w.writerow([repr(v) for v in row])


def read_trajectory_csv(path: Path) -> dict[str, list[float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if tuple(header) != Trajectory.COLUMNS:
        raise ValueError(f"{path}: unexpected header {header}")
    return {name: [float(r[i]) for r in body] for i, name in enumerate(header)}


def render_report(rep: CircularityReport, mass: float, label: str = "") -> str:
    lines = []
    if label:
        lines.append(f"scenario: {label}")
    lines.append(f"horizon: {fmt_horizon(rep.horizon)}")
    lines.append(f"delta = {rep.delta:g} s")
    lines.append(f"{'kind':<28}{'node':>6}{'time [s]':>22}{'mass [kg]':>16}")
    for e, m in rep.batch_contributions:
        lines.append(f"{e.kind.value:<28}{e.compartment:>6}{e.time:>22.9g}{m:>16.9g}")
    lines.append(f"continuous contribution = {rep.continuous_contribution:.6e} kg")
    lines.append(f"lambda = {rep.lambda_ / mass:.6e} * m_kg  (m_kg = {mass:g})")
    lines.append(f"lambda = {rep.lambda_:.6e} kg")
    return "\n".join(lines)


def cmd_validate(args) -> int:
    sf = load_scenario_file(args.file)
    print(f"{args.file}: ok  {sf.scenario.network.summary()}")
    return 0


def cmd_simulate(args) -> int:
    sf = load_scenario_file(args.file)
    log = _journey(sf, record_every=args.record_every)
    for label, t in log.milestones.items():
        print(f"{label} = {t!r} s")
    if args.traj_dir:
        out = Path(args.traj_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, traj in log.trajectories.items():
            write_trajectory_csv(out / f"arc_{k}.csv", traj)
        print(f"wrote {len(log.trajectories)} trajectory file(s) to {out}")
    return 0


def cmd_circularity(args) -> int:
    sf = load_scenario_file(args.file)
    sc = sf.scenario
    phi = args.phi if args.phi is not None else sf.sim.horizon
    log = _journey(sf, record_every=1 << 30)
    rep = circularity(log, sc.network, sc.flows, phi, sf.sim.delta)
    if args.json:
        print(json.dumps({"scenario": sc.label, **rep.as_dict()}, indent=2))
    else:
        print(render_report(rep, sc.element.mass, sc.label))
    return 0


def cmd_compare(args) -> int:
    files = [load_scenario_file(f) for f in args.files]
    deltas = {sf.sim.delta for sf in files}
    if len(deltas) > 1:
        raise MixedDelta(f"scenario files use different delta values {sorted(deltas)}")
    print(f"{'file':<32}{'label':<20}{'lambda [kg]':>16}{'lambda/m':>12}{'t5 [s]':>20}  horizon")
    for path, sf in zip(args.files, files):
        sc = sf.scenario
        phi = args.phi if args.phi is not None else sf.sim.horizon
        log = _journey(sf, record_every=1 << 30)
        rep = circularity(log, sc.network, sc.flows, phi, sf.sim.delta)
        t5 = log.milestones.get("t5", math.nan)
        print(
            f"{Path(path).name:<32}{sc.label:<20}{rep.lambda_:>16.6e}"
            f"{rep.lambda_ / sc.element.mass:>12.6g}{t5:>20.9g}  {fmt_horizon(phi)}"
        )
    return 0


def cmd_optimize(args) -> int:
    sf = load_scenario_file(args.file)
    phi = args.phi if args.phi is not None else sf.sim.horizon
    scenarios = enumerate_scenarios(sf.scenario, sf.menu)
    ranked = argmax_circularity(
        scenarios, phi, sf.sim.delta, sf.sim.dt, max_time=sf.sim.max_time, workers=args.workers
    )
    print(f"horizon: {fmt_horizon(phi)}")
    print(f"{'rank':>4}  {'label':<28}{'lambda [kg]':>16}  {'horizon':<20}  strategies")
    for rank, (sc, rep) in enumerate(ranked, start=1):
        strategies = ", ".join(s.tag for s in sc.applied) or "-"
        mark = "  N*" if rank == 1 else ""
        print(f"{rank:>4}  {sc.label:<28}{rep.lambda_:>16.6e}  {fmt_horizon(phi):<20}  {strategies}{mark}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tmnsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a scenario file and print the network size")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("simulate", help="run the journey and print milestone times")
    s.add_argument("file")
    s.add_argument("--traj-dir", help="write one CSV per arc into this directory")
    s.add_argument("--record-every", type=int, default=1, help="keep every n-th integration step")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("circularity", help="print the circularity report")
    c.add_argument("file")
    c.add_argument("--phi", type=_horizon, help="horizon in seconds or 'unbounded'")
    c.add_argument("--json", action="store_true", help="machine-readable output")
    c.set_defaults(func=cmd_circularity)

    m = sub.add_parser("compare", help="circularity of several scenario files side by side")
    m.add_argument("files", nargs="+")
    m.add_argument("--phi", type=_horizon)
    m.set_defaults(func=cmd_compare)

    o = sub.add_parser("optimize", help="rank the strategy menu of a scenario file")
    o.add_argument("file")
    o.add_argument("--phi", type=_horizon)
    o.add_argument("--workers", type=int, default=1)
    o.set_defaults(func=cmd_optimize)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TMNError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
