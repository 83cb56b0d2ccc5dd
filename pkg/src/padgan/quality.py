"""Gaussian-mixture quality landscapes on the plane."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

DEFAULT_DOMAIN = ((-0.7, 0.7), (-0.7, 0.7))


def ring_centers(count: int, radius: float) -> np.ndarray:
    """``count`` points evenly spaced on a circle, starting on the +x axis."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if radius <= 0:
        raise ValueError("radius must be positive")
    angles = 2.0 * np.pi * np.arange(count) / count
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


@dataclass(frozen=True)
class GaussianMixtureQuality:
    """Sum of isotropic unnormalised Gaussian bumps divided by ``normalizer``.

    Call :meth:`normalize` to scale the landscape so its maximum over the
    design domain is 1.
    """

    centers: np.ndarray
    sigma: float
    normalizer: float = 1.0
    domain: tuple = field(default=DEFAULT_DOMAIN)

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "centers", centers)
        if centers.shape[0] < 1:
            raise ValueError("need at least one center")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.normalizer <= 0:
            raise ValueError("normalizer must be positive")

    @property
    def n_components(self) -> int:
        return self.centers.shape[0]

    def _bumps(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        diff = self.centers[None, :, :] - x[:, None, :]
        sq = np.einsum("nkd,nkd->nk", diff, diff)
        return np.exp(-sq / (2.0 * self.sigma**2)), diff

    def raw(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float)
        bumps, _ = self._bumps(np.atleast_2d(pts))
        out = bumps.sum(axis=1)
        return out[0] if pts.ndim == 1 else out

    def evaluate(self, x):
        """Normalised quality at one point ``(2,)`` or many ``(n, 2)``."""
        return self.raw(x) / self.normalizer

    __call__ = evaluate

    def gradient(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float)
        bumps, diff = self._bumps(np.atleast_2d(pts))
        grad = np.einsum("nk,nkd->nd", bumps, diff) / (self.sigma**2 * self.normalizer)
        return grad[0] if pts.ndim == 1 else grad

    def normalize(self, domain=None, grid_size: int = 512) -> GaussianMixtureQuality:
        """Return a copy whose maximum over ``domain`` is exactly 1.

        The raw maximum is located on a ``grid_size`` square grid, then polished
        with a bounded quasi-Newton ascent from the best grid node.
        """
        domain = tuple(tuple(map(float, b)) for b in (domain or self.domain))
        (x0, x1), (y0, y1) = domain
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"degenerate domain {domain}")
        gx = np.linspace(x0, x1, grid_size)
        gy = np.linspace(y0, y1, grid_size)
        xx, yy = np.meshgrid(gx, gy, indexing="ij")
        grid = np.column_stack([xx.ravel(), yy.ravel()])
        unit = replace(self, normalizer=1.0)
        values = np.concatenate([unit.raw(chunk) for chunk in np.array_split(grid, 64)])
        best = grid[np.argmax(values)]
        res = minimize(
            lambda p: -unit.raw(p),
            best,
            jac=lambda p: -unit.gradient(p),
            method="L-BFGS-B",
            bounds=domain,
        )
        peak = max(float(values.max()), float(-res.fun))
        return replace(self, normalizer=peak, domain=domain)


def realisticity_weighted_quality(d_out, q_raw):
    """Discount a predicted quality by the discriminator's belief that the design is real."""
    return np.asarray(d_out) * np.asarray(q_raw)
