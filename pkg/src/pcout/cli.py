"""Command-line front end.

Subcommands: detect (run one detector on a CSV), sweep (dimension sweep of
averaged error rates on simulated contamination), bench (wall-clock
comparison), plotdata (turn a saved report into long-format figure data).

Exit codes: 0 success, 2 input error, 3 numeric/degeneracy error,
4 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time

import numpy as np

from . import baselines, evalsim
from .dataio import (
    DataMatrix,
    InputDataError,
    PLOT_KINDS,
    detection_result_document,
    document_to_csv,
    document_to_json,
    emit_plot_data,
    load_csv,
    weight_report_document,
)
from .prcmpout import DetectorConfig, detect

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_CONFIG = 4

METHODS = ("prcmpout", "classical", "ogk", "sign2")

_DETECTOR_FIELDS = [f.name for f in dataclasses.fields(DetectorConfig)]


class ConfigError(ValueError):
    """Invalid flag combination or parameter value."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; those are configuration
    # problems under this tool's exit-code contract
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcout", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect", help="run a detector on a CSV file")
    p_detect.add_argument("--input", required=True, help="CSV file with a header row")
    p_detect.add_argument("--method", required=True, choices=METHODS)
    p_detect.add_argument("--alpha", type=float, default=None, help="cutoff level for classical/ogk/sign2")
    p_detect.add_argument("--beta", type=float, default=None, help="ogk reweighting level (default 0.9)")
    p_detect.add_argument("--format", choices=("json", "csv"), default="json")
    p_detect.add_argument("--output", default=None, help="report path (stdout when omitted)")
    p_detect.add_argument("--plot-data", default=None, help="also write figure data to this path")
    for name in _DETECTOR_FIELDS:
        p_detect.add_argument(f"--{name.replace('_', '-')}", type=float, default=None)

    p_sweep = sub.add_parser("sweep", help="dimension sweep over simulated contamination")
    p_sweep.add_argument("--method", default="prcmpout", choices=METHODS)
    p_sweep.add_argument("--alpha", type=float, default=None)
    p_sweep.add_argument("--p-values", default="10,20,30,40", help="comma-separated dimensions")
    p_sweep.add_argument("--replications", type=int, default=16)
    p_sweep.add_argument("--n", type=int, default=100)
    p_sweep.add_argument(
        "--outlier-indices",
        default=",".join(str(i) for i in sorted(evalsim.REFERENCE_OUTLIER_ROWS)),
        help="1-based planted outlier rows (empty string for none)",
    )
    p_sweep.add_argument("--shift", type=float, default=1.5, help="per-coordinate location shift")
    p_sweep.add_argument("--scatter-factor", type=float, default=1.0)
    p_sweep.add_argument("--seed", type=int, default=evalsim.DEFAULT_SEED)
    p_sweep.add_argument("--format", choices=("json", "csv"), default="csv")
    p_sweep.add_argument("--output", default=None)
    p_sweep.add_argument("--plot-data", default=None)

    p_bench = sub.add_parser("bench", help="median wall-clock comparison of detectors")
    p_bench.add_argument("--methods", default="prcmpout,ogk", help="comma-separated method names")
    p_bench.add_argument("--alpha", type=float, default=0.05)
    p_bench.add_argument("--n", type=int, default=100)
    p_bench.add_argument("--p", type=int, default=400)
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=evalsim.DEFAULT_SEED)
    p_bench.add_argument("--format", choices=("json", "csv"), default="csv")
    p_bench.add_argument("--output", default=None)

    p_plot = sub.add_parser("plotdata", help="figure data from a saved JSON report")
    p_plot.add_argument("--report", required=True, help="JSON report from detect or sweep")
    p_plot.add_argument("--kind", required=True, choices=PLOT_KINDS)
    p_plot.add_argument("--output", default=None)

    return parser


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _detector_config(args) -> DetectorConfig:
    overrides = {}
    for name in _DETECTOR_FIELDS:
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    try:
        return DetectorConfig(**overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _make_handle(method: str, alpha: float, cfg: DetectorConfig):
    if method == "prcmpout":
        return lambda X: detect(X, cfg).flags
    if method == "classical":
        return lambda X: baselines.classical_detect(X, alpha).flags
    if method == "ogk":
        return lambda X: baselines.ogk_detect(X, alpha).flags
    if method == "sign2":
        return lambda X: baselines.sign2_detect(X, alpha).flags
    raise ConfigError(f"unknown method {method!r}")


def _cmd_detect(args) -> int:
    if args.alpha is not None and not 0.0 < args.alpha < 1.0:
        raise ConfigError(f"--alpha must be in (0, 1), got {args.alpha}")
    if args.beta is not None and not 0.0 < args.beta < 1.0:
        raise ConfigError(f"--beta must be in (0, 1), got {args.beta}")
    if args.method == "prcmpout":
        if args.alpha is not None:
            raise ConfigError("--alpha does not apply to the prcmpout method")
        if args.beta is not None:
            raise ConfigError("--beta only applies to the ogk method")
        cfg = _detector_config(args)
    else:
        set_overrides = [n for n in _DETECTOR_FIELDS if getattr(args, n) is not None]
        if set_overrides:
            raise ConfigError(
                f"detector options {set_overrides} only apply to the prcmpout method"
            )
        if args.beta is not None and args.method != "ogk":
            raise ConfigError("--beta only applies to the ogk method")

    dm = load_csv(args.input)
    start = time.perf_counter()
    if args.method == "prcmpout":
        report = detect(dm.values, cfg)
        config_echo = {"input": args.input, "method": "prcmpout", **dataclasses.asdict(cfg)}
        doc = weight_report_document(dm, report, config_echo)
    else:
        alpha = 0.05 if args.alpha is None else args.alpha
        config_echo = {"input": args.input, "method": args.method, "alpha": alpha}
        if args.method == "classical":
            result = baselines.classical_detect(dm.values, alpha)
        elif args.method == "ogk":
            beta = 0.9 if args.beta is None else args.beta
            config_echo["beta"] = beta
            result = baselines.ogk_detect(dm.values, alpha, beta=beta)
        else:
            result = baselines.sign2_detect(dm.values, alpha)
        doc = detection_result_document(dm, result, config_echo)
    elapsed = time.perf_counter() - start

    _write(document_to_json(doc) if args.format == "json" else document_to_csv(doc), args.output)
    if args.plot_data is not None:
        kind = "weight_panels" if args.method == "prcmpout" else "distance_index"
        _write(emit_plot_data(doc, kind), args.plot_data)
    print(
        f"{args.method}: flagged {doc['header']['flagged']} of {dm.n_rows} rows "
        f"in {elapsed:.3f}s",
        file=sys.stderr,
    )
    return EXIT_OK


def _parse_int_list(text: str, what: str) -> list[int]:
    if not text.strip():
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad {what}: {text!r}") from exc


def _cmd_sweep(args) -> int:
    if args.method == "prcmpout" and args.alpha is not None:
        raise ConfigError("--alpha does not apply to the prcmpout method")
    alpha = args.alpha if args.method != "prcmpout" else None
    if args.method != "prcmpout" and alpha is None:
        alpha = 0.05
    p_values = _parse_int_list(args.p_values, "--p-values")
    if not p_values:
        raise ConfigError("--p-values must name at least one dimension")
    if any(p < 1 for p in p_values):
        raise ConfigError(f"--p-values must be positive, got {p_values}")
    indices = _parse_int_list(args.outlier_indices, "--outlier-indices")
    try:
        base_spec = evalsim.SimSpec(
            n=args.n,
            p=p_values[0],
            outlier_indices=frozenset(indices),
            location_shift=args.shift,
            scatter_factor=args.scatter_factor,
            seed=args.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    handle = _make_handle(args.method, alpha if alpha is not None else 0.05, DetectorConfig())
    rows = evalsim.dimension_sweep(
        handle, p_values, args.replications, base_spec, detector_name=args.method, alpha=alpha
    )
    text = (
        evalsim.sweep_to_csv(rows)
        if args.format == "csv"
        else evalsim.sweep_to_json(rows, base_spec)
    )
    _write(text, args.output)
    if args.plot_data is not None:
        doc = json.loads(evalsim.sweep_to_json(rows, base_spec))
        _write(emit_plot_data(doc, "sweep_curves"), args.plot_data)
    for row in rows:
        fn = "n/a" if row.mean_fn is None else f"{row.mean_fn:.3f}"
        fp = "n/a" if row.mean_fp is None else f"{row.mean_fp:.3f}"
        print(f"p={row.p}: mean FN {fn}, mean FP {fp}", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise ConfigError("--methods must name at least one method")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}")
    try:
        spec = evalsim.SimSpec(n=args.n, p=args.p, seed=args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    handles = {m: _make_handle(m, args.alpha, DetectorConfig()) for m in methods}
    rows = evalsim.time_detectors(handles, spec, repeats=args.repeats)
    text = (
        evalsim.timing_to_csv(rows)
        if args.format == "csv"
        else evalsim.timing_to_json(rows, spec)
    )
    _write(text, args.output)
    for row in rows:
        print(f"{row.detector}: median {row.median_seconds:.4f}s", file=sys.stderr)
    return EXIT_OK


def _cmd_plotdata(args) -> int:
    try:
        with open(args.report, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputDataError(f"cannot read {args.report}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{args.report} is not valid JSON: {exc}") from exc
    try:
        text = emit_plot_data(doc, args.kind)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputDataError(f"{args.report} does not match kind {args.kind!r}: {exc}") from exc
    _write(text, args.output)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "detect":
            return _cmd_detect(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "plotdata":
            return _cmd_plotdata(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"pcout: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputDataError as exc:
        print(f"pcout: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"pcout: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"pcout: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
