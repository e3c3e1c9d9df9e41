"""Command-line interface: ``bench run | rmf | report | synth``.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from .cohog import CohogParams
from .errors import ConfigError, DataError, FormatError, NotFound, VprBenchError
from .harness import RunConfig, run_benchmark
from .hog import HogParams
from .report import check_consistency, emit_report, read_report, summary_table
from .rmf import compute_rmf

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3

log = logging.getLogger("vprbench")


def _resolution(text):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def build_parser():
    p = argparse.ArgumentParser(prog="bench", description="Visual place recognition benchmark")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a benchmark and write a report")
    r.add_argument("--config", help="JSON file with run settings; command-line flags take precedence")
    r.add_argument("--technique", choices=["hog", "cohog", "external"])
    r.add_argument("--dataset", help="directory with query/ and ref/ subdirectories")
    r.add_argument("--gt", help="ground-truth CSV (default DATASET/ground_truth.csv)")
    r.add_argument("--desc", help="external query descriptor file")
    r.add_argument("--ref-desc", dest="ref_desc", help="external reference descriptor file")
    r.add_argument("--resolution", type=_resolution, help="working resolution WxH (default 512x512)")
    r.add_argument("--fps", type=float, help="camera frame rate F (default 50)")
    r.add_argument("--k", type=float, help="down-sampling constant K (default 1)")
    r.add_argument("--frames-per-meter", dest="frames_per_meter", type=float, help="D (default 10)")
    r.add_argument("--velocity", type=float, help="platform speed V in m/s (default 2)")
    r.add_argument("--tolerance", type=int, help="ground-truth tolerance in frames (default 0)")
    r.add_argument("--entropy-threshold", dest="entropy_threshold", type=float, help="CoHOG threshold in bits")
    r.add_argument("--region-size", dest="region_size", type=int, help="CoHOG region size in pixels")
    r.add_argument("--power-log", dest="power_log", help="power meter CSV")
    r.add_argument("--power-offset", dest="power_clock_offset_s", type=float,
                   help="seconds added to power-log timestamps to reach the benchmark clock")
    r.add_argument("--workers", type=int, help="reference-encoding threads (default 1)")
    r.add_argument("--interval", type=float, help="telemetry sampling interval in s (default 0.1)")
    r.add_argument("--out", help="report path (default: print JSON to stdout)")
    r.add_argument("--format", choices=["json", "csv"])
    r.add_argument("--summary", action="store_true", help="also print the summary table to stderr")

    m = sub.add_parser("rmf", help="evaluate RMF on a saved matches list")
    m.add_argument("--matches", required=True, help="report JSON, JSON array, or whitespace/comma separated 0/1")
    m.add_argument("--g", type=int, required=True, help="frame interval G (>= 1)")

    s = sub.add_parser("report", help="inspect a saved JSON report")
    s.add_argument("--in", dest="path", required=True)
    s.add_argument("--summary", action="store_true", help="print the summary table (default)")
    s.add_argument("--check", action="store_true", help="verify stored accuracy/RMF against recomputation")

    y = sub.add_parser("synth", help="write a synthetic dataset")
    y.add_argument("--out", required=True)
    y.add_argument("-n", type=int, default=10)
    y.add_argument("--resolution", type=_resolution, default=(512, 512))
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--perturb", action="store_true", help="queries are noisy revisits instead of copies")
    return p


_RUN_KEYS = (
    "technique", "dataset", "gt", "desc", "ref_desc", "resolution", "fps", "k", "frames_per_meter",
    "velocity", "tolerance", "power_log", "power_clock_offset_s", "workers", "interval", "out", "format",
)


def config_from_args(args):
    settings = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"no such config file: {path}")
        try:
            settings = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    for key in _RUN_KEYS + ("entropy_threshold", "region_size"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    for key in ("technique", "dataset"):
        if key not in settings:
            raise ConfigError(f"--{key} is required")
    hog = HogParams(**settings.pop("hog", {}))
    cohog_kw = dict(settings.pop("cohog", {}))
    for key in ("entropy_threshold", "region_size"):
        if key in settings:
            cohog_kw[key] = settings.pop(key)
    cohog = CohogParams(hog=hog, **cohog_kw)
    unknown = set(settings) - set(_RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    if "resolution" in settings:
        settings["resolution"] = tuple(settings["resolution"])
    return RunConfig(hog=hog, cohog=cohog, **settings)


def read_matches(path):
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no such file: {path}")
    text = path.read_text().strip()
    values = None
    if text.startswith("{") or text.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
        values = data.get("matches_list") if isinstance(data, dict) else data
        if values is None:
            raise FormatError(f"{path}: JSON object has no 'matches_list'")
    else:
        values = [t for t in re.split(r"[\s,]+", text) if t]
    try:
        out = [int(v) for v in values]
    except (TypeError, ValueError):
        raise FormatError(f"{path}: matches must be 0/1 integers") from None
    if any(v not in (0, 1) for v in out):
        raise FormatError(f"{path}: matches must be 0/1 integers")
    return out


def _cmd_run(args):
    config = config_from_args(args)
    report = run_benchmark(config)
    if config.out:
        emit_report(report, config.out, config.format)
        log.info("report written to %s", config.out)
    else:
        json.dump(report.to_dict(), sys.stdout, indent=2)
        sys.stdout.write("\n")
    if args.summary:
        print(summary_table(report), file=sys.stderr)


def _cmd_rmf(args):
    matches = read_matches(args.matches)
    m_q, rmf = compute_rmf(matches, args.g)
    print(json.dumps({"N_q": len(matches), "M_q": m_q, "G": args.g, "RMF": rmf}))


def _cmd_report(args):
    report = read_report(args.path)
    if args.check:
        bad = check_consistency(report)
        if bad:
            print(f"inconsistent fields: {', '.join(bad)}")
            return EXIT_DATA
        print("report is self-consistent")
    if args.summary or not args.check:
        print(summary_table(report))
    return EXIT_OK


def _cmd_synth(args):
    from .synthetic import make_dataset

    make_dataset(args.out, n=args.n, size=args.resolution, seed=args.seed, identical=not args.perturb)
    print(args.out)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "rmf": _cmd_rmf, "report": _cmd_report, "synth": _cmd_synth}[args.command]
    try:
        return handler(args) or EXIT_OK
    except ConfigError as exc:
        print(f"bench: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"bench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except VprBenchError as exc:
        print(f"bench: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
