"""Synthetic 2-D training sets and the three benchmark presets."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .quality import GaussianMixtureQuality, ring_centers

GRID_CENTERS = np.array([(x, y) for x in (-0.4, 0.0, 0.4) for y in (-0.4, 0.0, 0.4)])


@dataclass(frozen=True)
class Annulus:
    r_in: float
    r_out: float
    kind: str = "ring"  # or "thin_ring"; only a label

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise ValueError(f"need 0 < r_in < r_out, got {self.r_in}, {self.r_out}")

    def contains(self, points) -> np.ndarray:
        r = np.linalg.norm(np.atleast_2d(points), axis=1)
        return (r >= self.r_in) & (r <= self.r_out)


@dataclass(frozen=True, eq=False)
class GridClusters:
    centers: np.ndarray
    cluster_std: float
    kind: str = "grid"
    # membership ball radius, in units of cluster_std
    support_radius: float = 3.5
    # samples are redrawn beyond this many stds so the support is bounded
    truncate: float = 6.0

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        d = np.linalg.norm(pts[:, None, :] - self.centers[None, :, :], axis=2)
        return d.min(axis=1) <= self.support_radius * self.cluster_std


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    points: np.ndarray
    descriptor: Annulus | GridClusters
    seed: int | None = None

    def __len__(self):
        return self.points.shape[0]

    def to_csv(self, path):
        write_points_csv(path, self.points)


def sample_ring(r_in: float, r_out: float, n: int, seed=None, kind: str = "ring") -> SyntheticDataset:
    """Points uniform by area between two origin-centred circles."""
    desc = Annulus(r_in, r_out, kind)
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    r = np.sqrt(rng.uniform(r_in**2, r_out**2, n))
    # sqrt rounding can step a hair outside the closed interval
    r = np.clip(r, r_in, r_out)
    return SyntheticDataset(np.column_stack([r * np.cos(theta), r * np.sin(theta)]), desc, seed)


def sample_grid(centers, cluster_std: float, n: int, seed=None) -> SyntheticDataset:
    centers = np.asarray(centers, dtype=float)
    if n < 1:
        raise ValueError("n must be at least 1")
    if cluster_std < 0:
        raise ValueError("cluster_std must be nonnegative")
    desc = GridClusters(centers, float(cluster_std))
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, len(centers), n)
    offsets = rng.normal(0.0, cluster_std, size=(n, 2))
    if cluster_std > 0:
        limit = desc.truncate * cluster_std
        bad = np.linalg.norm(offsets, axis=1) > limit
        while bad.any():
            offsets[bad] = rng.normal(0.0, cluster_std, size=(int(bad.sum()), 2))
            bad = np.linalg.norm(offsets, axis=1) > limit
    return SyntheticDataset(centers[labels] + offsets, desc, seed)


@dataclass(frozen=True, eq=False)
class ExperimentPreset:
    name: str
    descriptor: Annulus | GridClusters
    quality: GaussianMixtureQuality

    def sample(self, n: int = 10_000, seed=None) -> SyntheticDataset:
        d = self.descriptor
        if isinstance(d, Annulus):
            return sample_ring(d.r_in, d.r_out, n, seed, kind=d.kind)
        return sample_grid(d.centers, d.cluster_std, n, seed)


_ALIASES = {
    "i": "example1", "1": "example1", "example1": "example1",
    "ii": "example2", "2": "example2", "example2": "example2",
    "iii": "example3", "3": "example3", "example3": "example3",
}
_CACHE: dict[str, ExperimentPreset] = {}


def preset(example) -> ExperimentPreset:
    """Look up a benchmark by ``"example1"``/``"I"``/``1`` style names."""
    key = _ALIASES.get(str(example).strip().lower())
    if key is None:
        raise KeyError(f"unknown preset {example!r}")
    if key not in _CACHE:
        _CACHE[key] = _build_preset(key)
    return _CACHE[key]


def _build_preset(name: str) -> ExperimentPreset:
    if name == "example2":
        q = GaussianMixtureQuality(ring_centers(4, 0.4), 0.16).normalize()
        return ExperimentPreset(name, GridClusters(GRID_CENTERS, 0.04), q)
    q = GaussianMixtureQuality(ring_centers(6, 0.4), 0.10).normalize()
    if name == "example1":
        return ExperimentPreset(name, Annulus(0.25, 0.5, "ring"), q)
    return ExperimentPreset(name, Annulus(0.325, 0.375, "thin_ring"), q)


def write_points_csv(path, points, qualities=None):
    pts = np.asarray(points, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if qualities is None:
            w.writerow(["x1", "x2"])
            w.writerows((repr(float(a)), repr(float(b))) for a, b in pts)
        else:
            w.writerow(["x1", "x2", "quality"])
            w.writerows(
                (repr(float(a)), repr(float(b)), repr(float(c)))
                for (a, b), c in zip(pts, np.asarray(qualities, dtype=float))
            )


def read_points_csv(path) -> np.ndarray:
    """Read the ``x1,x2`` columns of a points or samples CSV."""
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x1", "x2"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected x1,x2 columns, got {reader.fieldnames}")
        rows = [(float(r["x1"]), float(r["x2"])) for r in reader]
    return np.array(rows, dtype=float).reshape(-1, 2)
