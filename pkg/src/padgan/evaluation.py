"""Diversity, quality and mode-coverage scores for generated samples."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .dpp import SimilarityKernel
from .quality import GaussianMixtureQuality

LOG_DET_FLOOR = np.log(1e-300)

# evaluation protocol defaults: |Y|, |S_i|, n
N_SAMPLES = 1000
SUBSET_SIZE = 10
N_SUBSETS = 1000


def diversity_score(
    samples,
    subset_size: int = SUBSET_SIZE,
    n_subsets: int = N_SUBSETS,
    kernel: SimilarityKernel | None = None,
    seed=None,
    return_all: bool = False,
):
    """Mean log-determinant of similarity matrices over random subsets.

    Each subset is drawn without replacement; subsets are independent of each
    other. Determinants below 1e-300 (including non-positive ones from
    round-off) are floored.
    """
    kernel = kernel or SimilarityKernel()
    y = np.asarray(samples, dtype=float)
    if subset_size < 2:
        raise ValueError("subset_size must be at least 2")
    if subset_size > len(y):
        raise ValueError(f"subset_size {subset_size} exceeds sample count {len(y)}")
    rng = np.random.default_rng(seed)
    idx = np.stack([rng.choice(len(y), subset_size, replace=False) for _ in range(n_subsets)])
    sign, logdet = np.linalg.slogdet(kernel.matrix(y[idx]))
    values = np.where((sign > 0) & (logdet > LOG_DET_FLOOR), logdet, LOG_DET_FLOOR)
    return values if return_all else float(values.mean())


def quality_score(samples, quality) -> float:
    y = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(y) == 0:
        raise ValueError("no samples")
    return float(np.mean(quality.evaluate(y)))


def mode_counts(samples, quality: GaussianMixtureQuality) -> np.ndarray:
    """Samples within one sigma of each component, ties going to the nearest center."""
    y = np.atleast_2d(np.asarray(samples, dtype=float))
    d = np.linalg.norm(y[:, None, :] - quality.centers[None, :, :], axis=2)
    nearest = d.argmin(axis=1)
    inside = d[np.arange(len(y)), nearest] <= quality.sigma
    return np.bincount(nearest[inside], minlength=quality.n_components)


def entropy_of_counts(counts, total: int) -> float:
    p = np.asarray(counts, dtype=float) / total
    p = p[p > 0]
    return float(-(p * np.log(p)).sum()) + 0.0  # no negative zero


def overall_score(samples, quality: GaussianMixtureQuality) -> tuple[float, np.ndarray]:
    counts = mode_counts(samples, quality)
    return entropy_of_counts(counts, len(np.atleast_2d(samples))), counts


def novelty_split(samples, descriptor, quality, threshold: float = 0.5) -> tuple[float, float]:
    """Fractions of all samples lying outside the training support, split by quality.

    Returns ``(outside and q >= threshold, outside and q < threshold)``.
    """
    if not hasattr(descriptor, "contains"):
        raise TypeError(f"descriptor {descriptor!r} defines no support membership")
    y = np.atleast_2d(np.asarray(samples, dtype=float))
    outside = ~descriptor.contains(y)
    high = quality.evaluate(y) >= threshold
    n = len(y)
    return float((outside & high).sum() / n), float((outside & ~high).sum() / n)


@dataclass
class ScoreReport:
    diversity_score: float
    quality_score: float
    overall_score: float | None = None
    mode_counts: list[int] = field(default_factory=list)
    novelty_high_q: float | None = None
    novelty_low_q: float | None = None
    eval_seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ScoreReport:
        return cls(**json.loads(text))

    @property
    def max_mode_share(self) -> float:
        total = sum(self.mode_counts)
        return 0.0 if not self.mode_counts else max(self.mode_counts) / max(total, 1)


def score_samples(
    samples,
    quality,
    descriptor=None,
    subset_size: int = SUBSET_SIZE,
    n_subsets: int = N_SUBSETS,
    kernel: SimilarityKernel | None = None,
    seed=None,
) -> ScoreReport:
    y = np.asarray(samples, dtype=float)
    report = ScoreReport(
        diversity_score=diversity_score(y, subset_size, n_subsets, kernel, seed),
        quality_score=quality_score(y, quality),
        eval_seed=seed,
    )
    if isinstance(quality, GaussianMixtureQuality):
        score, counts = overall_score(y, quality)
        report.overall_score = score
        report.mode_counts = [int(c) for c in counts]
    if descriptor is not None:
        report.novelty_high_q, report.novelty_low_q = novelty_split(y, descriptor, quality)
    return report


@dataclass
class ScoreSummary:
    mean: float
    std: float
    ci_low: float
    ci_high: float
    n: int

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2


SCORE_NAMES = ("diversity_score", "quality_score", "overall_score")


def aggregate_runs(reports) -> dict[str, ScoreSummary | None]:
    """Mean, sample std and mean +/- 1.96 std for each score across runs."""
    reports = list(reports)
    if len(reports) < 2:
        raise ValueError("need at least two runs to aggregate")
    out: dict[str, ScoreSummary | None] = {}
    for name in SCORE_NAMES:
        vals = [getattr(r, name) for r in reports]
        if any(v is None for v in vals):
            out[name] = None
            continue
        arr = np.asarray(vals, dtype=float)
        mean, std = float(arr.mean()), float(arr.std(ddof=1))
        out[name] = ScoreSummary(mean, std, mean - 1.96 * std, mean + 1.96 * std, len(arr))
    return out


def write_table(path, rows: dict[str, dict[str, ScoreSummary | None]]):
    """Write ``model,diversity,quality,overall`` with ``mean +/- half-width`` cells."""

    def cell(s):
        return "N/A" if s is None else f"{s.mean:.4f} +/- {s.half_width:.4f}"

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "diversity", "quality", "overall"])
        for model, agg in rows.items():
            w.writerow([model, *(cell(agg[n]) for n in SCORE_NAMES)])


def parse_cell(text: str) -> tuple[float, float] | None:
    """Parse a ``mean +/- half-width`` cell (``±`` also accepted); ``N/A`` gives None."""
    text = text.strip()
    if text.upper() == "N/A":
        return None
    for sep in ("+/-", "±"):
        if sep in text:
            mean, hw = text.split(sep)
            return float(mean), float(hw)
    raise ValueError(f"not a mean +/- half-width cell: {text!r}")


def read_table(path) -> dict[str, dict[str, tuple[float, float] | None]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {
        r["model"]: {name: parse_cell(r[name.split("_")[0]]) for name in SCORE_NAMES}
        for r in rows
    }
