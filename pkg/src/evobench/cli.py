"""``evobench`` command line.

Settings resolve in three layers, later ones winning: built-in defaults,
then ``--config FILE``, then flags given on the command line.  Experiment
subcommands write their CSVs plus the fully resolved ``config.txt`` into the
output directory.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

from . import stats
from .harness import (
    ConfigError,
    ExperimentConfig,
    ExperimentId,
    _convert,
    _param_types,
    load_config,
    save_config,
    write_records,
)
from .plotting import PlotError, PlotSpec, emit_plot


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a flag absent unless given, wherever it appears
    p.add_argument("--seed", default=argparse.SUPPRESS, help="master seed")
    p.add_argument("--workers", default=argparse.SUPPRESS, help="worker processes")
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory (file for fit/plot)")
    p.add_argument("--config", default=argparse.SUPPRESS, help="experiment config file")


# flag dest -> params field; "runs" goes to the top level
EXPERIMENT_FLAGS = {
    "ap-atsp": (ExperimentId.AP_ATSP, {
        "n": "n", "matrices": "runs", "randmax": "rand_max", "inclusive": "inclusive", "solver": "solver",
    }),
    "ttp": (ExperimentId.TTP, {"teams": "teams", "samples": "runs", "max_streak": "max_streak"}),
    "bent": (ExperimentId.BENT, {
        "n": "n", "depth": "depth", "lam": "lam", "op": "operators", "mr": "mr", "mc": "mc",
        "runs": "runs", "budget": "budget", "init": "init", "var_bias": "var_bias", "op_bound": "op_bound",
    }),
    "byzantine": (ExperimentId.BYZANTINE, {
        "problem": "problems", "model": "models", "p": "p", "mu": "mu", "len": "length",
        "px": "px", "runs": "runs", "budget": "budget",
    }),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evobench", description="Batch experiments on evolutionary benchmark studies.")
    _add_common(parser)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS

    p = sub.add_parser("ap-atsp", help="assignment solutions read as ATSP tours")
    p.add_argument("--n", default=S)
    p.add_argument("--matrices", default=S, help="matrices per rand_max value")
    p.add_argument("--randmax", default=S, help="comma list or 'ladder'")
    p.add_argument("--inclusive", action="store_const", const="true", default=S)
    p.add_argument("--solver", default=S, choices=("native", "scipy"))
    _add_common(p)

    p = sub.add_parser("ttp", help="violation counts of random TTP schedules")
    p.add_argument("--teams", default=S, help="start:stop:step or comma list")
    p.add_argument("--samples", default=S, help="schedules per team count")
    p.add_argument("--max-streak", dest="max_streak", default=S)
    _add_common(p)

    p = sub.add_parser("bent", help="GP search for bent Boolean functions")
    p.add_argument("--n", default=S)
    p.add_argument("--depth", default=S)
    p.add_argument("--lambda", dest="lam", default=S)
    p.add_argument("--op", default=S, help="semantic|uniform|point|single|all or a comma list")
    p.add_argument("--mr", default=S)
    p.add_argument("--mc", default=S)
    p.add_argument("--runs", default=S, help="runs per operator")
    p.add_argument("--budget", default=S)
    p.add_argument("--init", default=S, choices=("single", "full"))
    p.add_argument("--var-bias", dest="var_bias", default=S, choices=("fewest", "linear"))
    p.add_argument("--op-bound", dest="op_bound", default=S, choices=("local", "global"))
    _add_common(p)

    p = sub.add_parser("byzantine", help="GA under corrupted fitness values")
    p.add_argument("--problem", default=S, help="onemax|leadingones|both")
    p.add_argument("--model", default=S, help="inverter|randomizer|none|both")
    p.add_argument("--p", default=S, help="start:stop:step or comma list")
    p.add_argument("--mu", default=S)
    p.add_argument("--len", default=S)
    p.add_argument("--px", default=S)
    p.add_argument("--runs", default=S, help="runs per cell")
    p.add_argument("--budget", default=S)
    _add_common(p)

    p = sub.add_parser("fit", help="least-squares polynomial over two CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--degree", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("plot", help="static SVG from a result CSV")
    p.add_argument("csv")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True, help="one or more columns, comma separated")
    p.add_argument("--kind", default="line", choices=("line", "scatter", "box"))
    p.add_argument("--log-x", action="store_true")
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--title", default="")
    p.add_argument("--xlabel", default="")
    p.add_argument("--ylabel", default="")
    _add_common(p)
    return parser


def _expand(dest: str, text: str) -> str:
    if dest == "op" and text.strip() == "all":
        from .bent.operators import OPERATORS

        return ",".join(OPERATORS)
    if dest == "problem" and text.strip() == "both":
        return "onemax,leadingones"
    if dest == "model" and text.strip() == "both":
        return "randomizer,inverter"
    return text


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    exp, mapping = EXPERIMENT_FLAGS[args.command]
    ptype = _param_types()[exp]
    if hasattr(args, "config"):
        base = load_config(args.config)
        if base.experiment_id != exp:
            raise ConfigError(f"experiment_id: config is for {base.experiment_id.value!r}, not {exp.value!r}")
    else:
        base = ExperimentConfig(exp, ptype())

    kinds = {f.name: f.metadata["kind"] for f in dataclasses.fields(ptype)}
    values = {name: getattr(base.params, name) for name in kinds}
    runs = base.runs
    for dest, key in mapping.items():
        if not hasattr(args, dest):
            continue
        text = _expand(dest, getattr(args, dest))
        if key == "runs":
            runs = _convert("runs", text, "int")
        else:
            values[key] = _convert(key, text, kinds[key])
    params = ptype(**values)

    top = {"master_seed": base.master_seed, "worker_count": base.worker_count, "output_dir": base.output_dir}
    if hasattr(args, "seed"):
        top["master_seed"] = _convert("master_seed", args.seed, "int")
    if hasattr(args, "workers"):
        top["worker_count"] = _convert("worker_count", args.workers, "int")
    if hasattr(args, "out"):
        top["output_dir"] = args.out
    return ExperimentConfig(exp, params, runs=runs, **top)


def run_experiment(cfg: ExperimentConfig) -> list[str]:
    """Run ``cfg`` and write its CSVs; returns short summary lines."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_config(cfg, out / "config.txt")
    workers = cfg.effective_workers()
    p = cfg.params
    lines = []

    if cfg.experiment_id == ExperimentId.AP_ATSP:
        from .assignment import ap_atsp_ensemble

        records = ap_atsp_ensemble(p.n, p.rand_max_values(), cfg.runs, cfg.master_seed, p.inclusive, p.solver, workers)
        write_records(records, out / "ap_atsp.csv", "ap_atsp")
        for r in records:
            lines.append(
                f"rand_max={r.payload['rand_max']} tours={100 * r.payload['tour_fraction']:.2f}% "
                f"mean_subtours={r.payload['mean_subtours']:.3f}"
            )

    elif cfg.experiment_id == ExperimentId.TTP:
        from .ttp import ttp_ensemble

        records, fits = ttp_ensemble(p.teams, cfg.runs, cfg.master_seed, p.max_streak, workers)
        write_records(records, out / "ttp.csv", "ttp")
        write_records(fits, out / "ttp_fits.csv", "ttp_fits")
        for f in fits:
            q = f.payload
            lines.append(f"{q['constraint']}: {q['c2']:.4f} n^2 + {q['c1']:.4f} n + {q['c0']:.4f} (rmse {q['rmse']:.4f})")

    elif cfg.experiment_id == ExperimentId.BENT:
        from .bent.search import bent_experiment

        report = bent_experiment(p, cfg.runs, cfg.master_seed, workers)
        write_records(report.records, out / "bent.csv", "bent")
        write_records(report.pairs, out / "bent_report.csv", "bent_report")
        for op, med in report.medians.items():
            lines.append(f"{op}: median evaluations {med:g}")
        if report.semantic_reduction is not None:
            lines.append(f"semantic reduction vs best other: {100 * report.semantic_reduction:.1f}%")

    else:
        from .byzantine import byzantine_experiment

        result = byzantine_experiment(p, cfg.runs, cfg.master_seed, workers)
        write_records(result.records, out / "byzantine.csv", "byzantine")
        write_records(result.summary, out / "byzantine_summary.csv", "byzantine_summary")
        for r in result.summary:
            q = r.payload
            lines.append(f"{q['problem']} {q['model']} p={q['p']:g}: mean best {q['mean_final_best_true']:.2f}")

    lines.append(f"wrote results to {out}")
    return lines


def _read_points(path: str, x: str, y: str) -> list[tuple[float, float]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ValueError(f"cannot read CSV {path}: {exc}") from None
    points = []
    for i, row in enumerate(rows, 1):
        for col in (x, y):
            if col not in row:
                raise ValueError(f"column {col!r} not in {path}")
        if row[x] in ("", "NA") or row[y] in ("", "NA"):
            continue
        try:
            points.append((float(row[x]), float(row[y])))
        except ValueError:
            raise ValueError(f"row {i}: non-numeric value in {x!r} or {y!r}") from None
    return points


def cmd_fit(args) -> list[str]:
    fit = stats.polyfit(_read_points(args.csv, args.x, args.y), args.degree)
    names = [f"c{fit.degree - i}" for i in range(fit.degree + 1)]
    line = " ".join(f"{n}={c:.6g}" for n, c in zip(names, fit.coefficients)) + f" rmse={fit.rmse:.6g}"
    if hasattr(args, "out"):
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["degree", *names, "rmse"])
            w.writerow([fit.degree, *(f"{c:.6f}" for c in fit.coefficients), f"{fit.rmse:.6f}"])
    return [line]


def cmd_plot(args) -> list[str]:
    if not hasattr(args, "out"):
        raise ValueError("plot needs --out FILE.svg")
    spec = PlotSpec(
        kind=args.kind,
        x_column=args.x,
        y_columns=[c.strip() for c in args.y.split(",") if c.strip()],
        log_x=args.log_x,
        log_y=args.log_y,
        title=args.title,
        x_label=args.xlabel,
        y_label=args.ylabel,
    )
    emit_plot(args.csv, spec, args.out)
    return [f"wrote {args.out}"]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            lines = cmd_fit(args)
        elif args.command == "plot":
            lines = cmd_plot(args)
        else:
            lines = run_experiment(resolve_config(args))
    except (ConfigError, PlotError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"evobench: error: {msg}", file=sys.stderr)
        return 1
    for line in lines:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
