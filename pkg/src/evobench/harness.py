"""Experiment plumbing shared by the four study engines.

Configuration files
-------------------
A config is plain text, one ``key = value`` per line.  ``#`` starts a
comment; blank lines are ignored.  Top-level keys come first, followed by at
most one ``[block]`` header whose name must equal ``experiment_id``::

    experiment_id = bent
    master_seed = 7
    runs = 100

    [bent]
    n = 12
    depth = 7

Values are untyped text converted by the target field: integers accept
``1_000_000`` and ``1e6``; lists are comma separated; integer or float ranges
may be written ``start:stop:step`` (``stop`` inclusive); booleans are
``true``/``false``.  Omitted keys take their documented defaults.

Randomness
----------
Every random draw comes from a ``numpy.random.Generator`` over PCG64, seeded
with :func:`derive_run_seed` of ``(master_seed, run_index)``.  The seed mixer
is the SplitMix64 finalizer.  Work units are seeded independently of the
worker that executes them, so ``worker_count`` never changes results.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
FLOAT_FORMAT = "{:.6f}"
WORKERS_ENV = "EVOBENCH_WORKERS"


class ConfigError(ValueError):
    """Raised for unreadable, unknown or out-of-range configuration entries."""


class ExperimentId(str, enum.Enum):
    AP_ATSP = "ap_atsp"
    TTP = "ttp"
    BENT = "bent"
    BYZANTINE = "byzantine"


# ---------------------------------------------------------------------------
# seeding


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit avalanche mix."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_run_seed(master_seed: int, run_index: int) -> int:
    """Per-run 64-bit seed.

    ``mix64(mix64(master) + (run_index + 1) * GOLDEN_GAMMA)``.  For a fixed
    master seed the map is a bijection of ``run_index`` modulo 2**64.
    """
    if master_seed < 0 or run_index < 0:
        raise ValueError("seeds and run indices are unsigned")
    inner = mix64(master_seed)
    return mix64((inner + (run_index + 1) * GOLDEN_GAMMA) & MASK64)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def uniform_below(rng: np.random.Generator, k: int, size=None):
    """Unbiased draw(s) from {0, ..., k-1} (numpy's rejection sampler)."""
    if k < 1:
        raise ValueError("k must be positive")
    return rng.integers(0, k, size=size)


# ---------------------------------------------------------------------------
# config


@dataclass
class ExperimentConfig:
    experiment_id: ExperimentId
    params: Any
    master_seed: int = 0
    runs: int | None = None
    worker_count: int = 1
    output_dir: str = "results"

    def __post_init__(self):
        self.experiment_id = ExperimentId(self.experiment_id)
        if self.runs is None:
            self.runs = type(self.params).default_runs
        _check("master_seed", self.master_seed, 0 <= self.master_seed <= MASK64)
        _check("runs", self.runs, self.runs >= 1)
        _check("worker_count", self.worker_count, self.worker_count >= 1)

    def effective_workers(self) -> int:
        return resolve_workers(self.worker_count)


def resolve_workers(requested: int) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV}: not an integer: {env!r}") from None
        _check(WORKERS_ENV, value, value >= 1)
        return value
    return requested


def _check(key: str, value, ok: bool):
    if not ok:
        raise ConfigError(f"{key}: out of range: {value!r}")


def _param_types() -> dict[ExperimentId, type]:
    from .assignment import ApAtspParams
    from .bent.search import BentParams
    from .byzantine import ByzantineParams
    from .ttp import TtpParams

    return {
        ExperimentId.AP_ATSP: ApAtspParams,
        ExperimentId.TTP: TtpParams,
        ExperimentId.BENT: BentParams,
        ExperimentId.BYZANTINE: ByzantineParams,
    }


_TOP_KEYS = ("experiment_id", "master_seed", "runs", "worker_count", "output_dir")


def parse_int(text: str) -> int:
    text = text.strip().replace("_", "")
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"not an integer: {text!r}") from None
        return int(value)


def parse_range(text: str, conv=float) -> list:
    """``start:stop:step`` with inclusive stop, or a comma separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (conv(p) for p in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(max(count, 0))]
        if conv is float:
            values = [round(v, 12) for v in values]
        return values
    return [conv(p) for p in text.split(",") if p.strip()]


def _convert(key: str, text: str, ftype: str):
    try:
        if ftype == "int":
            return parse_int(text)
        if ftype == "float":
            return float(text)
        if ftype == "bool":
            low = text.strip().lower()
            if low not in ("true", "false"):
                raise ValueError("expected true or false")
            return low == "true"
        if ftype == "str":
            return text.strip()
        if ftype == "list[int]":
            return parse_range(text, parse_int)
        if ftype == "list[float]":
            return parse_range(text, float)
        if ftype == "list[str]":
            return [p.strip() for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: bad value {text!r} ({exc})") from None
    raise TypeError(f"unsupported field type {ftype!r} for {key}")


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    return str(value)


def parse_config_text(text: str) -> ExperimentConfig:
    top: dict[str, str] = {}
    block: dict[str, str] = {}
    block_name = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed block header {raw!r}")
            if block_name is not None:
                raise ConfigError(f"line {lineno}: only one experiment block is allowed")
            block_name = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        target = block if block_name is not None else top
        if key in target:
            raise ConfigError(f"{key}: duplicate key")
        target[key] = value

    for key in top:
        if key not in _TOP_KEYS:
            raise ConfigError(f"{key}: unknown key")
    if "experiment_id" not in top:
        raise ConfigError("experiment_id: missing")
    try:
        exp = ExperimentId(top["experiment_id"])
    except ValueError:
        raise ConfigError(f"experiment_id: unknown experiment {top['experiment_id']!r}") from None
    if block_name is not None and block_name != exp.value:
        raise ConfigError(f"[{block_name}]: block does not match experiment_id {exp.value!r}")

    ptype = _param_types()[exp]
    fields = {f.name: f for f in dataclasses.fields(ptype)}
    kwargs = {}
    for key, value in block.items():
        if key not in fields:
            raise ConfigError(f"{key}: unknown key for [{exp.value}]")
        kwargs[key] = _convert(key, value, fields[key].metadata["kind"])
    params = ptype(**kwargs)

    top_kwargs = {}
    if "master_seed" in top:
        top_kwargs["master_seed"] = _convert("master_seed", top["master_seed"], "int")
    if "runs" in top:
        top_kwargs["runs"] = _convert("runs", top["runs"], "int")
    if "worker_count" in top:
        top_kwargs["worker_count"] = _convert("worker_count", top["worker_count"], "int")
    if "output_dir" in top:
        top_kwargs["output_dir"] = top["output_dir"]
    return ExperimentConfig(experiment_id=exp, params=params, **top_kwargs)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text())


def dump_config(cfg: ExperimentConfig) -> str:
    """Canonical text form: every key written, fixed order."""
    lines = [
        f"experiment_id = {cfg.experiment_id.value}",
        f"master_seed = {cfg.master_seed}",
        f"runs = {cfg.runs}",
        f"worker_count = {cfg.worker_count}",
        f"output_dir = {cfg.output_dir}",
        "",
        f"[{cfg.experiment_id.value}]",
    ]
    for f in dataclasses.fields(cfg.params):
        lines.append(f"{f.name} = {_format(getattr(cfg.params, f.name))}")
    return "\n".join(lines) + "\n"


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(dump_config(cfg))


def param(default, kind: str, **kw):
    """dataclass field carrying the config conversion kind."""
    if isinstance(default, list):
        return field(default_factory=lambda: list(default), metadata={"kind": kind, **kw})
    return field(default=default, metadata={"kind": kind, **kw})


# ---------------------------------------------------------------------------
# records and CSV


SCHEMAS: dict[str, tuple[str, ...]] = {
    "ap_atsp": (
        "rand_max", "n", "matrices", "tour_fraction", "mean_subtours", "max_subtours",
        "q1_subtours", "q3_subtours", "mean_subtour_len", "q1_len", "q3_len",
    ),
    "ttp": (
        "n_teams", "samples", "drr_min", "drr_mean", "drr_max", "streak_min",
        "streak_mean", "streak_max", "norep_min", "norep_mean", "norep_max",
    ),
    "ttp_fits": ("constraint", "degree", "c2", "c1", "c0", "rmse"),
    "bent": ("operator", "run_index", "seed", "evaluations_used", "success", "final_nl"),
    "bent_report": ("operator_a", "operator_b", "u", "p"),
    "byzantine": (
        "problem", "model", "p", "run_index", "seed", "final_best_true",
        "evals_to_q90", "evals_to_q95", "evals_to_q99", "evals_to_q100", "min_entropy",
    ),
    "byzantine_summary": (
        "problem", "model", "p", "runs", "mean_final_best_true", "mean_min_entropy",
        "effort_q90", "effort_q95", "effort_q99", "effort_q100",
    ),
}


@dataclass
class RunRecord:
    experiment_id: str
    run_index: int
    derived_seed: int
    payload: dict = field(default_factory=dict)


def format_value(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        if np.isnan(value):
            return "NA"
        return FLOAT_FORMAT.format(float(value))
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


def records_to_csv(records: Sequence[RunRecord], schema: str | None = None) -> str:
    kinds = {r.experiment_id for r in records}
    if len(kinds) > 1:
        raise ValueError(f"records mix experiments: {sorted(kinds)}")
    if schema is None:
        if not kinds:
            raise ValueError("schema required for an empty record set")
        schema = kinds.pop()
    columns = SCHEMAS[schema]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in sorted(records, key=lambda r: r.run_index):
        row = []
        for col in columns:
            if col == "run_index":
                row.append(rec.run_index)
            elif col == "seed":
                row.append(rec.derived_seed)
            else:
                row.append(format_value(rec.payload[col]))
        writer.writerow(row)
    return buf.getvalue()


def write_records(records: Sequence[RunRecord], path, schema: str | None = None) -> None:
    """Write records as CSV, rows sorted by run_index, floats to 6 decimals."""
    text = records_to_csv(records, schema)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------------------
# execution


def run_parallel(func: Callable, tasks: Iterable, workers: int = 1) -> list:
    """Map ``func`` over ``tasks`` and return results in task order."""
    tasks = list(tasks)
    workers = resolve_workers(workers)
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(func, tasks))
