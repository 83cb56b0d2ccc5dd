"""Multi-seed experiment runs: train, sample, score, write artifacts."""

from __future__ import annotations

import configparser
import dataclasses
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import evaluation
from .datasets import preset as get_preset
from .datasets import write_points_csv
from .models import VARIANTS, TrainingConfig, train
from .plotting import plot_density

log = logging.getLogger(__name__)

SEED_STRIDE = 1_000_003  # large odd stride between per-run seeds
N_TRAIN = 10_000


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    preset: str = "example1"
    variants: tuple[str, ...] = VARIANTS
    runs: int = 10
    seed: int = 0
    out: str = "results"
    workers: int | None = None
    n_train: int = N_TRAIN
    n_samples: int = evaluation.N_SAMPLES
    subset_size: int = evaluation.SUBSET_SIZE
    n_subsets: int = evaluation.N_SUBSETS
    write_history: bool = False
    training: dict = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.variants, str):
            self.variants = tuple(v.strip() for v in self.variants.split(",") if v.strip())
        self.variants = tuple(self.variants)
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        bad = [v for v in self.variants if v not in VARIANTS]
        if bad or not self.variants:
            raise ConfigError(f"unknown variants {bad}; choose from {VARIANTS}")
        try:
            get_preset(self.preset)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        known = {f.name for f in dataclasses.fields(TrainingConfig)} - {"variant", "seed"}
        extra = set(self.training) - known
        if extra:
            raise ConfigError(f"unknown training options {sorted(extra)}")
        for v in self.variants:
            self.training_config(v, 0)

    def run_seed(self, run: int) -> int:
        return self.seed + run * SEED_STRIDE

    def training_config(self, variant: str, run: int) -> TrainingConfig:
        try:
            return TrainingConfig(variant=variant, seed=self.run_seed(run), **self.training)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def _coerce(text: str, like):
    if isinstance(like, bool):
        low = text.strip().lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"not a boolean: {text!r}")
        return low in ("true", "1", "yes")
    if isinstance(like, tuple):
        return tuple(int(v) for v in text.replace(",", " ").split())
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    return text.strip()


def load_config(path=None, **overrides) -> ExperimentConfig:
    """Read an INI-style config with ``[experiment]``, ``[training]`` and ``[evaluation]`` sections.

    Keyword overrides that are not None win over file values.
    """
    values: dict = {}
    training: dict = {}
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        defaults = ExperimentConfig.__dataclass_fields__
        for section in ("experiment", "evaluation"):
            if parser.has_section(section):
                for key, text in parser.items(section):
                    if key not in defaults or key == "training":
                        raise ConfigError(f"unknown option [{section}] {key}")
                    like = defaults[key].default
                    if key == "variants":
                        values[key] = text
                    elif key == "workers":
                        values[key] = int(text)
                    else:
                        try:
                            values[key] = _coerce(text, like)
                        except ValueError as exc:
                            raise ConfigError(f"[{section}] {key}: {exc}") from exc
        if parser.has_section("training"):
            tdefaults = {f.name: f.default for f in dataclasses.fields(TrainingConfig)}
            for key, text in parser.items("training"):
                if key not in tdefaults or key in ("variant", "seed"):
                    raise ConfigError(f"unknown option [training] {key}")
                try:
                    training[key] = _coerce(text, tdefaults[key])
                except ValueError as exc:
                    raise ConfigError(f"[training] {key}: {exc}") from exc
        unknown = set(parser.sections()) - {"experiment", "training", "evaluation"}
        if unknown:
            raise ConfigError(f"unknown sections {sorted(unknown)}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(training=training, **values)


@dataclass
class RunResult:
    variant: str
    run: int
    samples: np.ndarray | None
    report: evaluation.ScoreReport | None
    error: str | None = None


def run_single(config: ExperimentConfig, variant: str, run: int) -> RunResult:
    """Train one model and score ``n_samples`` draws from it."""
    preset = get_preset(config.preset)
    seed = config.run_seed(run)
    tcfg = config.training_config(variant, run)
    try:
        data = preset.sample(config.n_train, seed=seed)
        model = train(tcfg, data, preset.quality)
        samples = model.sample(config.n_samples, rng=seed + 1)
        report = evaluation.score_samples(
            samples,
            preset.quality,
            preset.descriptor,
            subset_size=config.subset_size,
            n_subsets=config.n_subsets,
            kernel=tcfg.similarity,
            seed=seed + 2,
        )
    except Exception as exc:  # one failed run must not sink the experiment
        log.exception("%s run %d failed", variant, run)
        return RunResult(variant, run, None, None, f"{type(exc).__name__}: {exc}")
    if config.write_history:
        Path(config.out).mkdir(parents=True, exist_ok=True)
        model.write_history(Path(config.out) / f"history_{variant}_{run}.csv")
    return RunResult(variant, run, samples, report)


def _run_single_args(args):
    return run_single(*args)


def run_trials(config: ExperimentConfig) -> list[RunResult]:
    jobs = [(config, v, r) for v in config.variants for r in range(config.runs)]
    workers = config.workers or os.cpu_count() or 1
    if workers <= 1 or len(jobs) == 1:
        return [run_single(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_single_args, jobs))


def summarize(reports) -> dict:
    reports = list(reports)
    if len(reports) >= 2:
        return evaluation.aggregate_runs(reports)
    # a single run has a mean but no spread
    nan = float("nan")
    out = {}
    for name in evaluation.SCORE_NAMES:
        v = getattr(reports[0], name)
        out[name] = None if v is None else evaluation.ScoreSummary(float(v), nan, nan, nan, 1)
    return out


def run_experiment(config: ExperimentConfig) -> int:
    """Run every (variant, run) pair and write samples, scores, plots and ``table1.csv``.

    Returns the process exit status: 0 if every run succeeded, 1 otherwise.
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    preset = get_preset(config.preset)
    results = run_trials(config)

    table = {}
    failures = []
    for variant in config.variants:
        ok = [r for r in results if r.variant == variant and r.error is None]
        failures += [r for r in results if r.variant == variant and r.error is not None]
        for r in ok:
            write_points_csv(out / f"samples_{variant}_{r.run}.csv", r.samples, preset.quality.evaluate(r.samples))
            (out / f"scores_{variant}_{r.run}.json").write_text(r.report.to_json())
        if ok:
            pooled = np.vstack([r.samples for r in ok])
            plot_density(pooled, preset, out / f"density_{variant}.svg", title=f"{preset.name} {variant}")
            table[variant] = summarize(r.report for r in ok)
    evaluation.write_table(out / "table1.csv", table)
    if failures:
        (out / "failures.json").write_text(
            json.dumps([{"variant": f.variant, "run": f.run, "error": f.error} for f in failures], indent=2) + "\n"
        )
        return 1
    return 0
