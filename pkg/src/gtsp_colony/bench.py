"""Experiment harness: multi-run gap tables and expected-utility ranking."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DomainError, InputError
from .ingest import generate_random_instance, read_instance
from .model import Instance
from .oracle import exact_optimum_dp
from .solvers import ALGORITHMS, SolverParams, run

# Golden-Assad utility constants
EUF_GAMMA = 500.0
EUF_BETA = 100.0
EUF_T = 0.05


def gap(solution_cost: float, reference_cost: float) -> float:
    """Percentage deviation of ``solution_cost`` above ``reference_cost``."""
    if not reference_cost > 0:
        raise InputError(f"reference cost must be positive, got {reference_cost}")
    return 100.0 * (solution_cost - reference_cost) / reference_cost


@dataclass
class GapRecord:
    problem: str
    algorithm: str
    runs: list[float]
    reference_optimum: float

    @property
    def gaps(self) -> list[float]:
        return [gap(c, self.reference_optimum) for c in self.runs]

    @property
    def mean_gap(self) -> float:
        return float(np.mean(self.gaps))


@dataclass
class RunRecord:
    instance: str
    algorithm: str
    run: int
    seed: int
    best_cost: float
    iterations: int
    wall_time: float
    reference_optimum: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass
class EufStats:
    x_bar: float
    s2: float
    b_hat: float
    c_hat: float
    euf: float
    count: int = 0
    rank: int | None = None
    flag: str | None = None


# -- expected utility ----------------------------------------------------------

def euf_from_moments(x_bar: float, s2: float, count: int = 0) -> EufStats:
    """Gamma-fit parameters and utility from a mean and (population) variance."""
    if x_bar < 0:
        raise InputError(f"mean deviation must be non-negative, got {x_bar}")
    if s2 < 0:
        raise InputError(f"variance must be non-negative, got {s2}")
    if x_bar == 0:
        return EufStats(x_bar, s2, 0.0, math.nan, EUF_GAMMA - EUF_BETA, count,
                        flag="zero mean deviation: utility set to its limit")
    b_hat = s2 / x_bar
    if s2 == 0:
        return EufStats(x_bar, s2, 0.0, math.inf, EUF_GAMMA - EUF_BETA, count,
                        flag="zero variance: utility set to its limit")
    c_hat = x_bar * x_bar / s2
    base = 1.0 - b_hat * EUF_T
    if base <= 0:
        raise DomainError(f"1 - b*t = {base:.6g} <= 0; expected utility undefined")
    euf = EUF_GAMMA - EUF_BETA * base ** (-c_hat)
    return EufStats(x_bar, s2, b_hat, c_hat, euf, count)


def expected_utility(deviations: Sequence[float], translate: float = 0.0) -> EufStats:
    """Expected utility of a list of percentage deviations (one per problem or run).

    Moments use the 1/N normalisation.  ``translate`` is added to every
    deviation first.
    """
    if len(deviations) == 0:
        raise InputError("need at least one deviation")
    x = np.asarray(deviations, dtype=np.float64) + translate
    x_bar = float(x.mean())
    s2 = float(((x - x_bar) ** 2).mean())
    return euf_from_moments(x_bar, s2, len(x))


def rank_algorithms(stats: Mapping[str, EufStats]) -> list[tuple[str, EufStats]]:
    """Order by descending utility, then ascending mean deviation; fills ``rank``."""
    ordered = sorted(stats.items(), key=lambda kv: (-kv[1].euf, kv[1].x_bar))
    for r, (_, s) in enumerate(ordered, start=1):
        s.rank = r
    return ordered


def deviations_by_algorithm(records: Iterable[GapRecord], per_run: bool = False) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {}
    for rec in sorted(records, key=lambda r: (r.problem, r.algorithm)):
        values = rec.gaps if per_run else [rec.mean_gap]
        out.setdefault(rec.algorithm, []).extend(values)
    return out


def euf_table(records: Iterable[GapRecord], per_run: bool = False, translate: float = 0.0):
    devs = deviations_by_algorithm(records, per_run)
    stats = {alg: expected_utility(x, translate) for alg, x in devs.items()}
    return rank_algorithms(stats)


# -- reports -------------------------------------------------------------------

def _algorithm_columns(names: Iterable[str]) -> list[str]:
    present = set(names)
    cols = [a for a in ALGORITHMS if a in present]
    return cols + sorted(present - set(ALGORITHMS))


def _gap_rows(records: Sequence[GapRecord]):
    cols = _algorithm_columns(r.algorithm for r in records) if records else list(ALGORITHMS)
    cells: dict[str, dict[str, float]] = {}
    for rec in records:
        cells.setdefault(rec.problem, {})[rec.algorithm] = rec.mean_gap
    problems = sorted(cells, key=_problem_sort_key)
    return cols, [(p, [cells[p].get(a) for a in cols]) for p in problems]


def _problem_sort_key(name: str):
    # "16pr76" < "22pr107": order by leading cluster count, then name
    digits = ""
    for ch in name:
        if not ch.isdigit():
            break
        digits += ch
    return (int(digits) if digits else math.inf, name)


def _md_num(v, digits=2):
    if v is None:
        return ""
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return f"{v:.{digits}f}"


def _csv_num(v):
    return "" if v is None else repr(float(v))


def emit_report(table, fmt: str = "csv") -> str:
    """Render a gap table (list of :class:`GapRecord`) or a ranked utility table
    (list of ``(algorithm, EufStats)``) as CSV or markdown."""
    if fmt not in ("csv", "markdown"):
        raise InputError(f"unknown report format {fmt!r}")
    table = list(table)
    if table and isinstance(table[0], tuple):
        header = ["Algorithm", "x_bar", "s2", "b_hat", "c_hat", "euf", "Rk"]
        rows = [
            [name, s.x_bar, s.s2, s.b_hat, s.c_hat, s.euf, s.rank]
            for name, s in table
        ]
        md_digits = [None, 4, 4, 4, 4, 4, None]
    elif not table or isinstance(table[0], GapRecord):
        cols, gap_rows = _gap_rows(table)
        header = ["Problem", *cols]
        rows = [[p, *vals] for p, vals in gap_rows]
        md_digits = [None] + [2] * len(cols)
    else:
        raise InputError(f"cannot render {type(table[0]).__name__}")

    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([
                v if d is None else _csv_num(v) for v, d in zip(row, md_digits)
            ])
        return buf.getvalue()

    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    for row in rows:
        cells = [str(v) if d is None else _md_num(v, d) for v, d in zip(row, md_digits)]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def parse_gap_csv(text: str) -> dict[tuple[str, str], float]:
    """Inverse of the CSV gap report: ``{(problem, algorithm): mean_gap}``."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    out = {}
    for row in reader:
        for alg, value in zip(header[1:], row[1:]):
            if value != "":
                out[(row[0], alg)] = float(value)
    return out


# -- experiment config -----------------------------------------------------------

@dataclass
class InstanceSpec:
    """Where an instance comes from and how its reference optimum is obtained."""

    path: str | None = None
    random: dict | None = None
    optimum: float | str | None = None  # number, "exact", or None -> optima table

    def load(self, base: Path | None = None) -> Instance:
        if self.path is not None:
            p = Path(self.path)
            if base is not None and not p.is_absolute():
                p = base / p
            return read_instance(p)
        if self.random is not None:
            return generate_random_instance(**self.random)
        raise ConfigError("instance entry needs 'path' or 'random'")


@dataclass
class ExperimentConfig:
    instances: list[InstanceSpec]
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    runs: int = 5
    max_iterations: int = 1000
    time_limit: float | None = None
    master_seed: int = 0
    translate: float = 0.0
    per_run: bool = False
    jobs: int = 1
    optima: dict[str, float] = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    base_dir: Path | None = None

    def validate(self) -> "ExperimentConfig":
        if not self.instances:
            raise ConfigError("no instances configured")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        bad = [a for a in self.algorithms if a.upper() not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithms {bad}")
        self.algorithms = [a.upper() for a in self.algorithms]
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        unknown = set(self.params) - set(SolverParams.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown solver parameters {sorted(unknown)}")
        return self


def load_optima(path) -> dict[str, float]:
    """Read ``name,optimum`` rows; ``#`` starts a comment."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, _, value = line.partition(",")
        if name.strip().lower() == "name":
            continue
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"bad optimum line {raw!r} in {path}") from None
    return out


def load_config(path) -> ExperimentConfig:
    import tomli

    path = Path(path)
    try:
        data = tomli.loads(path.read_text())
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.parent
    known = {
        "instances", "algorithms", "runs", "max_iterations", "time_limit",
        "master_seed", "translate", "per_run", "jobs", "optima", "optima_file", "params",
    }
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    specs = []
    for entry in data.get("instances", []):
        if not isinstance(entry, dict) or not ({"path", "random"} & entry.keys()):
            raise ConfigError(f"bad instance entry {entry!r}")
        specs.append(InstanceSpec(entry.get("path"), entry.get("random"), entry.get("optimum")))
    optima = {}
    if "optima_file" in data:
        optima.update(load_optima(base / data["optima_file"]))
    optima.update({k: float(v) for k, v in data.get("optima", {}).items()})
    cfg = ExperimentConfig(
        instances=specs,
        algorithms=list(data.get("algorithms", ALGORITHMS)),
        runs=int(data.get("runs", 5)),
        max_iterations=int(data.get("max_iterations", 1000)),
        time_limit=data.get("time_limit"),
        master_seed=int(data.get("master_seed", 0)),
        translate=float(data.get("translate", 0.0)),
        per_run=bool(data.get("per_run", False)),
        jobs=int(data.get("jobs", 1)),
        optima=optima,
        params=dict(data.get("params", {})),
        base_dir=base,
    )
    return cfg.validate()


# -- execution -----------------------------------------------------------------

def derive_seed(master_seed: int, instance_index: int, algorithm: str, run_index: int) -> int:
    """Per-run seed: SeedSequence keyed by (master, instance, algorithm, run) counters."""
    alg_index = ALGORITHMS.index(algorithm) if algorithm in ALGORITHMS else len(ALGORITHMS)
    ss = np.random.SeedSequence([master_seed, instance_index, alg_index, run_index])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _resolve_optimum(spec: InstanceSpec, instance: Instance, optima: Mapping[str, float]) -> float:
    if isinstance(spec.optimum, (int, float)) and not isinstance(spec.optimum, bool):
        return float(spec.optimum)
    if spec.optimum == "exact":
        return exact_optimum_dp(instance).optimum_cost
    if spec.optimum is not None:
        raise ConfigError(f"bad optimum {spec.optimum!r} for {instance.name}")
    if instance.name in optima:
        return float(optima[instance.name])
    raise ConfigError(f"no reference optimum for instance {instance.name!r}")


def _run_cell(args) -> RunRecord:
    instance, algorithm, run_index, seed, params, reference = args
    res = run(algorithm, instance, params.with_(seed=seed))
    return RunRecord(
        instance=instance.name,
        algorithm=algorithm,
        run=run_index,
        seed=seed,
        best_cost=res.best_cost,
        iterations=res.iterations_used,
        wall_time=res.wall_time,
        reference_optimum=reference,
    )


@dataclass
class ExperimentResult:
    records: list[GapRecord]
    runs: list[RunRecord]
    config: ExperimentConfig

    def euf(self):
        return euf_table(self.records, self.config.per_run, self.config.translate)


def records_from_runs(runs: Iterable[RunRecord]) -> list[GapRecord]:
    grouped: dict[tuple[str, str], GapRecord] = {}
    for r in sorted(runs, key=lambda r: (r.instance, r.algorithm, r.run)):
        key = (r.instance, r.algorithm)
        if key not in grouped:
            grouped[key] = GapRecord(r.instance, r.algorithm, [], r.reference_optimum)
        grouped[key].runs.append(r.best_cost)
    return list(grouped.values())


def run_experiment(config: ExperimentConfig, jobs: int | None = None) -> ExperimentResult:
    """Execute every (instance, algorithm, run) cell and aggregate gap records.

    Output order is independent of ``jobs``: cells are sorted before
    aggregation.
    """
    config.validate()
    base_params = SolverParams(
        max_iterations=config.max_iterations, time_limit=config.time_limit
    ).with_(**config.params)
    base_params.validate()
    cells = []
    for idx, spec in enumerate(config.instances):
        instance = spec.load(config.base_dir)
        reference = _resolve_optimum(spec, instance, config.optima)
        for alg in config.algorithms:
            for r in range(config.runs):
                seed = derive_seed(config.master_seed, idx, alg, r)
                cells.append((instance, alg, r, seed, base_params, reference))

    jobs = jobs or config.jobs
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cells), os.cpu_count() or 1)) as pool:
            runs = list(pool.map(_run_cell, cells))
    else:
        runs = [_run_cell(c) for c in cells]
    runs.sort(key=lambda r: (r.instance, r.algorithm, r.run))
    return ExperimentResult(records_from_runs(runs), runs, config)


def write_run_log(runs: Iterable[RunRecord], path) -> None:
    Path(path).write_text("".join(r.to_json() + "\n" for r in runs))


def read_run_log(path) -> list[RunRecord]:
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(RunRecord(**json.loads(line)))
        except (json.JSONDecodeError, TypeError) as exc:
            raise InputError(f"{path}:{lineno}: bad run record ({exc})") from None
    return out
