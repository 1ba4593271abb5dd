import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from agents.bench_agent import load_config, run_bench, summarize
from agents.planner_agent import DIVIDE_AND_CONQUER, STANDARD
from agents.plot_agent import render_svg
from apis.file_formats import (
    make_solution,
    read_instance,
    read_solution,
    serialize_instance,
    serialize_solution,
)
from main import solve, solve_summary
from models.errors import InputError, MergeFailure, SolveFailure, UnsolvableInstance, VerificationError
from models.instance import Objective
from models.params import SolveParams, WeightVariant
from utils.generators import DISTRIBUTIONS, generate_instance
from utils.helpers import DEFAULT_HOPS, DEFAULT_PEN, DNC_GRID, DNC_THRESHOLD, POLYG_LOG_LEVEL
from utils.verification import check_solution, score

logger = logging.getLogger("polyg")

EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_UNSOLVABLE = 3
EXIT_SOLVER = 4


def parse_hood(text: str) -> Union[int, str, None]:
    value = text.strip().lower()
    if value == "auto":
        return None
    if value in ("inf", "infinity", "∞"):
        return "inf"
    try:
        hood = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"hood must be an integer, 'inf' or 'auto', got {text!r}") from None
    if hood < 0:
        raise argparse.ArgumentTypeError("hood must be >= 0")
    return hood


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("Wrote %s", out)
    else:
        sys.stdout.write(text)


def cmd_solve(args: argparse.Namespace) -> int:
    instance = read_instance(args.instance)
    params = SolveParams(
        objective=args.obj,
        pen=args.pen,
        hops=args.hops,
        hood=args.hood,
        sigma=args.sigma,
        seed=args.seed,
        weight_variant=args.weight_variant,
    )
    logger.info("Solving %s (%d points) with %s", instance.name, instance.n, params.describe())
    state = solve(instance, params, restarts=args.restarts, strategy=args.strategy,
                  dnc_grid=args.dnc_grid, dnc_threshold=args.dnc_threshold)
    summary = solve_summary(state)
    logger.info("Done: %s", json.dumps(summary, default=str))
    solution = make_solution(instance, state["polygon"], params.objective, state["report"])
    _emit(serialize_solution(solution), args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    instance = read_instance(args.instance)
    solution = read_solution(args.solution)
    if solution.instance != instance.name:
        raise VerificationError(f"solution is for {solution.instance!r}, instance is {instance.name!r}")
    report = check_solution(instance, solution.cycle, stored_score=solution.score)
    print(report.model_dump_json())
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    instance = read_instance(args.instance)
    solution = read_solution(args.solution)
    report = score(solution.cycle, instance, naive=True)
    print(report.model_dump_json())
    return 0 if report.valid else EXIT_VERIFICATION


def cmd_generate(args: argparse.Namespace) -> int:
    instance = generate_instance(args.n, args.distribution, args.seed, args.name)
    _emit(serialize_instance(instance), args.out)
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    instance = read_instance(args.instance)
    cycle, value = None, None
    if args.solution:
        solution = read_solution(args.solution)
        cycle, value = solution.cycle, solution.score
    _emit(render_svg(instance, cycle, value), args.out)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    frame = run_bench(config, progress=not args.no_progress)
    _emit(frame.to_csv(index=False), args.out)
    if args.summary:
        summarize(config, frame).to_csv(args.summary, index=False)
        logger.info("Wrote %s", args.summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyg", description="Maximum- and minimum-area polygonalization of planar point sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a polygon and write a solution file")
    p.add_argument("instance", help="instance file")
    p.add_argument("--obj", choices=[o.value for o in Objective], default=Objective.MAX.value, help="objective")
    p.add_argument("--pen", type=float, default=DEFAULT_PEN, help="1/alpha, edge-length penalty divisor ('inf' disables)")
    p.add_argument("--hops", type=int, default=DEFAULT_HOPS, help="longest path moved by local search")
    p.add_argument("--hood", type=parse_hood, default=None, help="candidate neighborhood in grid cells: int, 'inf' or 'auto'")
    p.add_argument("--sigma", type=float, default=0.0, help="standard deviation of the weight noise")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=1, help="independent attempts, best kept")
    p.add_argument("--weight-variant", choices=[w.value for w in WeightVariant], default=WeightVariant.MINUS.value)
    p.add_argument("--strategy", choices=[STANDARD, DIVIDE_AND_CONQUER], default=None,
                   help="force a strategy instead of the size threshold")
    p.add_argument("--dnc-grid", type=int, default=DNC_GRID, help="cells per side for divide and conquer")
    p.add_argument("--dnc-threshold", type=int, default=DNC_THRESHOLD, help="use divide and conquer above this many points")
    p.add_argument("--out", help="solution path (default: stdout)")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", help="check a solution independently of the solver")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("score", help="print the score report of a solution")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("n", type=int)
    p.add_argument("--distribution", choices=sorted(DISTRIBUTIONS), default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("plot", help="render an instance and optional solution as SVG")
    p.add_argument("instance")
    p.add_argument("solution", nargs="?")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_plot)

    p = sub.add_parser("bench", help="run a benchmark config and write a CSV of records")
    p.add_argument("config", help="JSON bench config")
    p.add_argument("--out", help="records CSV (default: stdout)")
    p.add_argument("--summary", help="experiment summary CSV")
    p.add_argument("--no-progress", action="store_true")
    p.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=POLYG_LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except VerificationError as exc:
        if exc.report is not None:
            print(exc.report.model_dump_json())
        logger.error("Verification failed: %s", exc)
        return EXIT_VERIFICATION
    except (InputError, ValidationError) as exc:
        logger.error("Invalid input: %s", exc)
        return EXIT_INPUT
    except UnsolvableInstance as exc:
        logger.error("Unsolvable instance: %s", exc)
        return EXIT_UNSOLVABLE
    except (SolveFailure, MergeFailure) as exc:
        logger.error("Solver failed: %s", exc)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
