"""``lodscope`` command line.

Usage::

    lodscope --config run.ini [--output-dir DIR] [--seed N] <command>

Commands: probe, extract, merge, reuse, communities, report, all, simulate.
Failures print one JSON line ``{"error", "module", "message"}`` to stderr
and exit with status 1 (2 for usage errors).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__, pipeline
from .config import RunConfig, load_config
from .errors import ConfigError, LodscopeError

logger = logging.getLogger("lodscope")

COMMANDS = {
    "probe": "probe endpoint capabilities (capabilities.tsv)",
    "extract": "extract schema fragments per endpoint (fragments/*.json)",
    "merge": "merge fragments into the schema graph (schema/)",
    "reuse": "vocabulary reuse, links, variants and mismatch (reuse/)",
    "communities": "label similarity network and communities (communities/)",
    "report": "summarise on-disk artifacts (report.txt)",
    "all": "run probe through report in order",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lodscope", description="Schema profiling for SPARQL endpoints.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", required=True,
                        help="INI run configuration (package:cloud/cloud.ini for the bundled cloud)")
    common.add_argument("-o", "--output-dir", type=Path, help="override [run] output_dir")
    common.add_argument("--seed", type=int, help="override [run] seed")
    common.add_argument("--sample-n", type=int, help="override [run] sample_n")
    common.add_argument("--threshold", type=float, dest="similarity_threshold",
                        help="override [run] similarity_threshold")
    common.add_argument("--workers", type=int, help="override [run] workers")
    for name, text in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text, description=text)

    sim = sub.add_parser("simulate", help="serve an N-Quads fixture as a SPARQL endpoint",
                         description="Serve an N-Quads fixture until interrupted.")
    sim.add_argument("fixture", type=Path)
    sim.add_argument("--port", type=int, default=8890)
    sim.add_argument("--host", default="127.0.0.1")
    sim.add_argument("--seed", type=int, default=0, help="seed for server-side RAND() sampling")
    sim.add_argument("--log", type=Path, help="write the request log TSV here on exit")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config)
    return config.with_overrides(output_dir=args.output_dir, seed=args.seed, sample_n=args.sample_n,
                                 similarity_threshold=args.similarity_threshold, workers=args.workers)


def _simulate(args: argparse.Namespace) -> None:
    from .simulator import FaultScript, load_fixture, serve

    try:
        store = load_fixture(args.fixture)
    except OSError as exc:
        raise ConfigError(f"cannot read fixture {args.fixture}: {exc}") from None
    handle = serve(store, FaultScript(seed=args.seed), port=args.port, host=args.host)
    print(f"serving {args.fixture} ({store.quad_count()} quads) at {handle.url}", flush=True)
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        handle.stop()
        if args.log:
            handle.write_log(args.log)


def _error_line(exc: BaseException) -> str:
    module = getattr(exc, "module", "lodscope")
    return json.dumps({"error": type(exc).__name__, "module": module, "message": str(exc)})


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "simulate":
            _simulate(args)
            return 0
        config = _config(args)
        if args.command == "all":
            written = pipeline.run_all(config)
        else:
            written = pipeline.STEPS[args.command](config)
        for path in written:
            logger.info("wrote %s", path)
        return 0
    except LodscopeError as exc:
        print(_error_line(exc), file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(_error_line(ConfigError(str(exc))), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
