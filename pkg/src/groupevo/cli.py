"""Command-line entry point.

Exit codes: 0 success, 1 input error, 2 verification failure, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import date
from io import StringIO
from pathlib import Path
from typing import List, Optional

from . import io
from .errors import GroupEvoError, InputError
from .ged import GedParams
from .harness import RunConfig, read_truth, run_experiment, verify_scenario
from .synth import (
    ScenarioScript,
    churn_scenario,
    figure1_scenario,
    generate,
    random_scenario,
    stable_scenario,
)
from .temporal import WindowScheme, WindowSpec


def percent_list(text: str) -> List[float]:
    """``"50,60,70"`` -> ``[0.5, 0.6, 0.7]``; a trailing ``%`` is allowed."""
    try:
        values = [float(p.strip().rstrip("%")) / 100.0 for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad percentage list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty percentage list")
    return values


def percent(text: str) -> float:
    values = percent_list(text)
    if len(values) != 1:
        raise argparse.ArgumentTypeError(f"expected one percentage, got {text!r}")
    return values[0]


def window_specs(args) -> List[WindowSpec]:
    specs = [WindowSpec.from_label(lbl) for lbl in (args.windows or "").split(",") if lbl.strip()]
    if args.window_type:
        scheme = WindowScheme(args.window_type)
        if scheme is WindowScheme.INCREASING:
            specs.append(WindowSpec.increasing(args.offset or 30))
        else:
            size = args.size or 30
            offset = args.offset or size
            specs.append(WindowSpec(scheme, size, offset))
    return specs or [WindowSpec.disjoint(30)]


def _add_ged_flags(p: argparse.ArgumentParser, sweep: bool) -> None:
    if sweep:
        p.add_argument("--alpha", type=percent_list, default=[0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
                       help="alpha values in percent, comma separated (default 50..100)")
        p.add_argument("--beta", type=percent_list, default=[0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
                       help="beta values in percent, comma separated (default 50..100)")
    else:
        p.add_argument("--alpha", type=percent, default=0.5, help="alpha in percent (default 50)")
        p.add_argument("--beta", type=percent, default=0.5, help="beta in percent (default 50)")
    p.add_argument("--threshold", type=percent, default=0.10,
                   help="forming/dissolving threshold in percent (default 10)")
    p.add_argument("--match-threshold", type=percent, default=0.10,
                   help="inclusion needed for two groups to count as a match, in percent (default 10)")
    p.add_argument("--importance", choices=["degree", "social-position"], default="social-position")
    p.add_argument("--epsilon", type=float, default=0.9)
    p.add_argument("--max-iter", type=int, default=200, help="social position sweep limit")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groupevo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="slice a log, detect groups and sweep alpha/beta")
    run.add_argument("input", type=Path, help="interaction log (CSV) or scenario script (.json)")
    run.add_argument("--windows", help="comma separated labels such as s90o90,s60o30,s_o30")
    run.add_argument("--window-type", choices=[s.value for s in WindowScheme])
    run.add_argument("--size", type=int, help="window size in days")
    run.add_argument("--offset", type=int, help="window offset in days")
    run.add_argument("--k", type=int, default=5, help="clique size for percolation (default 5)")
    run.add_argument("--report-alpha", type=percent, default=0.7)
    run.add_argument("--report-beta", type=percent, default=0.7)
    run.add_argument("--out", type=Path, help="output directory")
    run.add_argument("--keep-partial", action="store_true", help="keep trailing partial windows")
    run.add_argument("--write-frames", action="store_true", help="also write per-frame edge lists")
    run.add_argument("--groups", type=Path, help="use an external groups file instead of CPM")
    run.add_argument("--importance-file", type=Path, help="use external importance values")
    run.add_argument("--timestamp-format", choices=["auto", "iso", "epoch"], default="auto")
    run.add_argument("--span-start", type=date.fromisoformat)
    run.add_argument("--span-end", type=date.fromisoformat)
    _add_ged_flags(run, sweep=True)

    ver = sub.add_parser("verify", help="check a scenario script against its planted history")
    ver.add_argument("script", type=Path)
    ver.add_argument("--truth", type=Path, help="expected events (CSV or JSON) overriding the script's")
    ver.add_argument("--out", type=Path, help="write verdict.json and the generated log here")
    _add_ged_flags(ver, sweep=False)

    gen = sub.add_parser("generate", help="write the interaction log for a scenario script")
    gen.add_argument("script", type=Path)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, help="log file (default stdout)")

    scn = sub.add_parser("scenario", help="write a canned scenario script")
    scn.add_argument("name", choices=["figure1", "stable", "churn", "random"])
    scn.add_argument("--k", type=int, default=5)
    scn.add_argument("--frames", type=int, help="frame count (stable/churn/random)")
    scn.add_argument("--nodes", type=int, default=200, help="node count (random)")
    scn.add_argument("--seed", type=int, default=0)
    scn.add_argument("--out", type=Path, help="script file (default stdout)")
    return parser


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_run(args) -> int:
    config = RunConfig(
        input_path=args.input,
        windows=window_specs(args),
        k=args.k,
        importance=args.importance,
        epsilon=args.epsilon,
        max_iter=args.max_iter,
        alphas=args.alpha,
        betas=args.beta,
        report_alpha=args.report_alpha,
        report_beta=args.report_beta,
        form_dissolve_threshold=args.threshold,
        match_threshold=args.match_threshold,
        out_dir=args.out,
        keep_partial=args.keep_partial,
        seed=args.seed,
        timestamp_format=args.timestamp_format,
        span_start=args.span_start,
        span_end=args.span_end,
        groups_path=args.groups,
        importance_path=args.importance_file,
        write_frames=args.write_frames,
    )
    report = run_experiment(config)
    print(report.format_table())
    return 0


def cmd_verify(args) -> int:
    script = ScenarioScript.load(args.script)
    truth = read_truth(args.truth) if args.truth else None
    params = GedParams(args.alpha, args.beta, args.threshold, args.match_threshold)
    result = verify_scenario(
        script, args.seed, params, args.importance, args.epsilon, truth, args.max_iter
    )
    print(result.summary())
    if args.out:
        log, _ = generate(script, args.seed)
        args.out.mkdir(parents=True, exist_ok=True)
        with open(args.out / "log.csv", "w", encoding="utf-8", newline="") as fh:
            io.write_event_log(log, fh)
        with open(args.out / "events.csv", "w", encoding="utf-8", newline="") as fh:
            io.write_events(result.events, fh)
        _emit(json.dumps(result.as_dict(), indent=2, sort_keys=True) + "\n", args.out / "verdict.json")
    return 0 if result.passed else 2


def cmd_generate(args) -> int:
    log, _ = generate(ScenarioScript.load(args.script), args.seed)
    buf = StringIO()
    io.write_event_log(log, buf)
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_scenario(args) -> int:
    if args.name == "figure1":
        script = figure1_scenario(args.k)
    elif args.name == "stable":
        script = stable_scenario(args.frames or 3, k=args.k)
    elif args.name == "churn":
        script = churn_scenario(args.frames or 6, k=args.k)
    else:
        script = random_scenario(args.nodes, args.frames or 6, k=args.k, seed=args.seed)
    _emit(json.dumps(script.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
    return 0


COMMANDS = {"run": cmd_run, "verify": cmd_verify, "generate": cmd_generate, "scenario": cmd_scenario}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except GroupEvoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
