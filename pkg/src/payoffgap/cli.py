"""Command-line front end.

Subcommands are thin adapters over the library: `conflate`, `classify`,
`score`, `payoff`, `simulate`, `table`, and `report`. Exit codes: 0 ok,
2 usage or validation error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import conflation, distributions as dists, payoffs as po, report, simulate
from .distributions import DistributionSpec, Family
from .errors import (
    DomainError,
    EstimationError,
    InfiniteMeanError,
    PayoffGapError,
    SeriesTruncationError,
    ValidationError,
)
from .scoring import (
    ForecastSeries,
    SurvivalConfig,
    brier,
    m4_score,
    m5_extrema_score,
    pl_score,
    read_forecast_csv,
    tally,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

TABLE_PS = (1e-1, 1e-2, 1e-3, 1e-4)


def _parse_dist(args) -> DistributionSpec:
    if args.dist_file:
        return DistributionSpec.from_json(Path(args.dist_file).read_text())
    name = args.dist
    if name is None:
        raise ValidationError("missing --dist (family name) or --dist-file")
    params = json.loads(args.params) if args.params else {}
    try:
        family = Family(name)
    except ValueError:
        raise ValidationError(
            f"unknown family {name!r}; choose from {[f.value for f in Family]}"
        ) from None
    return DistributionSpec.from_json(json.dumps({"family": family.value, "params": params}))


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_conflate(args) -> int:
    dist = _parse_dist(args)
    ps = [float(tok) for tok in args.ps.split(",") if tok]
    if not ps:
        raise ValidationError("--ps must list at least one probability")
    rows = conflation.pseudo_table(dist, ps)
    text = (
        conflation.pseudo_table_json(rows)
        if args.format == "json"
        else conflation.pseudo_table_csv(rows)
    )
    _emit(text, args.output)
    return EXIT_OK


def _cmd_table(args) -> int:
    if args.preset == "gaussian":
        dist = dists.gaussian()
    else:
        dist = dists.pareto(alpha=args.alpha)
    rows = conflation.pseudo_table(dist, TABLE_PS)
    text = (
        conflation.pseudo_table_json(rows)
        if args.format == "json"
        else conflation.pseudo_table_csv(rows)
    )
    _emit(text, args.output)
    return EXIT_OK


def _cmd_classify(args) -> int:
    dist = _parse_dist(args)
    result = dists.classify_tail(dist)
    obj = {
        "lambda": result.lambda_estimate,
        "class": result.tail_class.value,
    }
    if result.mu_excess is not None:
        obj["mu_excess"] = result.mu_excess
    _emit(json.dumps(obj), args.output)
    return EXIT_OK


def _cmd_score(args) -> int:
    series = read_forecast_csv(args.input)
    metric = args.metric
    if metric == "brier":
        rep = brier(series)
    elif metric == "tally":
        if series.hits is None:
            raise ValidationError("tally needs f,hit records")
        rep = tally(series.hits)
    elif metric in ("m4_smape", "m4_mase"):
        variant = "s1_smape" if metric == "m4_smape" else "s2_mase"
        rep = m4_score(series, variant=variant, naive_errors=args.naive_error)
    elif metric == "m5":
        if series.realizations is None:
            raise ValidationError("m5 needs forecast,realized records")
        if args.forecast_min is None or args.forecast_max is None:
            raise ValidationError("m5 needs --forecast-min and --forecast-max")
        rep = m5_extrema_score(
            args.forecast_min, args.forecast_max, series.realizations
        )
    elif metric == "pl":
        if series.realizations is None:
            raise ValidationError("pl needs forecast,realized records (realized = payoff stream)")
        cfg = SurvivalConfig(b=args.barrier, initial=args.initial)
        rep = pl_score(series.realizations, cfg)
    else:
        raise ValidationError(f"unknown metric {metric!r}")
    _emit(rep.to_json(), args.output)
    return EXIT_OK


def _cmd_payoff(args) -> int:
    if args.spec:
        g = po.PayoffFunction.from_json(Path(args.spec).read_text())
    elif args.structure:
        params = json.loads(args.params) if args.params else {}
        g = po.build_structure(args.structure, **params)
    else:
        raise ValidationError("need --spec FILE or --structure NAME")
    if args.x is not None:
        _emit(json.dumps({"x": args.x, "payoff": g(args.x)}), args.output)
    elif args.emit_spec:
        _emit(g.to_json(), args.output)
    else:
        raise ValidationError("need --x VALUE or --emit-spec")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    text = Path(args.config).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed config: {exc}") from exc
    if "streams" in obj:
        g = po.PayoffFunction.from_json(json.dumps(obj["payoff"]))
        survival = SurvivalConfig(
            b=float(obj.get("survival", {}).get("b", float("-inf"))),
            initial=float(obj.get("survival", {}).get("initial", 0.0)),
        )
        reports = simulate.replay(obj["streams"], g, survival)
        out = json.dumps(
            [
                {"final": r.value, "absorbed": r.absorbed, "absorbed_at": r.absorbed_at}
                for r in reports
            ]
        )
        _emit(out, args.output)
        return EXIT_OK
    cfg = simulate.config_from_json(text)
    if args.seed is not None:
        cfg = simulate.SimulationConfig(
            generator=cfg.generator, payoffs=cfg.payoffs, horizon=cfg.horizon,
            paths=cfg.paths, seed=args.seed, survival=cfg.survival,
        )
    result = simulate.run(cfg, keep_paths=args.format == "csv")
    _emit(result.to_csv() if args.format == "csv" else result.to_json(), args.output)
    return EXIT_OK


def _cmd_report(args) -> int:
    written = report.render_all(Path(args.out), seed=args.seed)
    for path in written:
        sys.stdout.write(f"{path}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="payoffgap",
        description="Statistical gap between binary forecasts and continuous payoffs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None, help="write here instead of stdout")

    def add_dist(p):
        p.add_argument("--dist", default=None, help="family name (gaussian, pareto, ...)")
        p.add_argument("--params", default=None, help="JSON object of family parameters")
        p.add_argument("--dist-file", default=None, help="JSON distribution spec file")

    p = sub.add_parser("conflate", help="pseudo-overestimation rows for given probabilities")
    add_dist(p)
    p.add_argument("--ps", required=True, help="comma-separated exceedance probabilities")
    add_common(p)
    p.set_defaults(func=_cmd_conflate)

    p = sub.add_parser("table", help="preset pseudo-overestimation tables")
    p.add_argument("--preset", choices=("gaussian", "pareto"), required=True)
    p.add_argument("--alpha", type=float, default=1.1, help="Pareto tail index for the preset")
    add_common(p)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("classify", help="tail classification of a distribution")
    add_dist(p)
    add_common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("score", help="score a forecast CSV")
    p.add_argument("--metric", required=True,
                   choices=("brier", "tally", "m4_smape", "m4_mase", "m5", "pl"))
    p.add_argument("--input", required=True, help="CSV with f,hit or forecast,realized")
    p.add_argument("--naive-error", type=float, default=None, help="MASE scale for m4_mase")
    p.add_argument("--forecast-min", type=float, default=None)
    p.add_argument("--forecast-max", type=float, default=None)
    p.add_argument("--barrier", type=float, default=float("-inf"), help="survival mark for pl")
    p.add_argument("--initial", type=float, default=0.0, help="starting P/L for pl")
    add_common(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("payoff", help="evaluate or emit a payoff function")
    p.add_argument("--spec", default=None, help="payoff JSON file")
    p.add_argument("--structure", default=None,
                   help="named structure (call, put, christmas_tree, butterfly, ...)")
    p.add_argument("--params", default=None, help="JSON structure parameters")
    p.add_argument("--x", type=float, default=None, help="point at which to evaluate")
    p.add_argument("--emit-spec", action="store_true", help="print the payoff JSON")
    add_common(p)
    p.set_defaults(func=_cmd_payoff)

    p = sub.add_parser("simulate", help="run a simulation config (JSON)")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("report", help="render figures and CSVs into a directory")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (InfiniteMeanError, SeriesTruncationError, EstimationError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except (ValidationError, DomainError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except PayoffGapError as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
