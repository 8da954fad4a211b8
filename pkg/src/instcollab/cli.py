"""Command line entry point: ``pipeline run|stage|evaluate``."""

from __future__ import annotations

import argparse
import logging
import sys

from .evaluation import evaluate_fixture, read_frequency_fixture
from .exceptions import InstCollabError
from .pipeline import STAGES, PipelineConfig, run_pipeline, run_stage

log = logging.getLogger("instcollab")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pipeline",
        description="Institutional thematic strengths, collaboration recommendations and their evaluation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every stage")
    run.add_argument("--config", required=True)

    stage = sub.add_parser("stage", help="run a single stage on existing artifacts")
    stage.add_argument("name", choices=STAGES)
    stage.add_argument("--config", required=True)

    ev = sub.add_parser("evaluate", help="score a frequency/group fixture file")
    ev.add_argument("--fixtures", required=True, help="TSV: institution, frequency, group")
    ev.add_argument("--targets", required=True, type=int, help="number of target institutions")
    ev.add_argument("--classes", type=int, default=4, help="number of groups (default 4)")
    return parser


def _evaluate(args) -> int:
    with open(args.fixtures, encoding="utf-8") as fh:
        F, groups = read_frequency_fixture(fh)
    result = evaluate_fixture(F, groups, args.targets, args.classes)
    for key, value in result.items():
        if isinstance(value, float):
            value = f"{value:.6f}"
        print(f"{key} = {value}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "evaluate":
            return _evaluate(args)
        cfg = PipelineConfig.from_file(args.config)
        if args.command == "run":
            run_pipeline(cfg)
        else:
            run_stage(cfg, args.name)
    except (InstCollabError, ValueError, KeyError, OSError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
