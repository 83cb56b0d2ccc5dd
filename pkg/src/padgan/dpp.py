"""Quality-weighted DPP kernels and the performance-augmented log-det loss."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.linalg import cho_factor, cho_solve


class KernelFactorizationError(np.linalg.LinAlgError):
    """The batch kernel is not numerically positive definite, usually a collapsed batch."""


@dataclass(frozen=True)
class SimilarityKernel:
    kind: str = "rbf"
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.kind != "rbf":
            raise ValueError(f"unsupported kernel {self.kind!r}")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")

    def __call__(self, x, y) -> float:
        return rbf_similarity(x, y, self.bandwidth)

    def matrix(self, points: np.ndarray) -> np.ndarray:
        return rbf_matrix(points, self.bandwidth)


def rbf_similarity(x, y, bandwidth: float = 1.0) -> float:
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return float(np.exp(-0.5 * np.dot(d, d) / bandwidth**2))


def rbf_matrix(points: np.ndarray, bandwidth: float = 1.0) -> np.ndarray:
    """Pairwise RBF similarities; works on ``(n, d)`` or batched ``(..., n, d)``."""
    x = np.asarray(points, dtype=float)
    diff = x[..., :, None, :] - x[..., None, :, :]
    sq = np.einsum("...ijd,...ijd->...ij", diff, diff)
    return np.exp(-0.5 * sq / bandwidth**2)


@dataclass(frozen=True, eq=False)
class BatchKernel:
    """L_B(i, j) = k(x_i, x_j) * (q_i q_j)^gamma0, plus ``jitter`` on the diagonal."""

    matrix: np.ndarray
    similarity: np.ndarray
    qualities: np.ndarray
    gamma0: float
    jitter: float
    kernel: SimilarityKernel

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def factor(self):
        try:
            return cho_factor(self.matrix, lower=True, check_finite=True)
        except np.linalg.LinAlgError as exc:
            raise KernelFactorizationError(f"batch kernel is not positive definite: {exc}") from exc

    def logdet(self) -> float:
        c, _ = self.factor
        return 2.0 * float(np.sum(np.log(np.diag(c))))

    def inverse(self) -> np.ndarray:
        return cho_solve(self.factor, np.eye(self.size))


def build_kernel(
    points,
    qualities,
    gamma0: float = 2.0,
    kernel: SimilarityKernel | None = None,
    jitter: float = 1e-6,
) -> BatchKernel:
    kernel = kernel or SimilarityKernel()
    x = np.atleast_2d(np.asarray(points, dtype=float))
    q = np.asarray(qualities, dtype=float).ravel()
    if x.shape[0] == 0:
        raise ValueError("empty batch")
    if q.shape[0] != x.shape[0]:
        raise ValueError("one quality per point is required")
    if np.any(q < 0):
        raise ValueError("qualities must be nonnegative")
    if gamma0 < 0:
        raise ValueError("gamma0 must be nonnegative")
    sim = kernel.matrix(x)
    if gamma0 == 0:
        mat = sim.copy()
    else:
        w = q**gamma0
        mat = sim * np.outer(w, w)
    mat[np.diag_indices_from(mat)] += jitter
    return BatchKernel(mat, sim, q, float(gamma0), float(jitter), kernel)


def pad_loss(kernel: BatchKernel) -> float:
    """-(1/|B|) log det L_B from the Cholesky factor."""
    return -kernel.logdet() / kernel.size


def pad_loss_partials(kernel: BatchKernel, points) -> tuple[np.ndarray, np.ndarray]:
    """Partial derivatives of the loss with positions and qualities held separate.

    Returns ``(d_loss/d_x, d_loss/d_q)``. The first is the similarity channel
    only (qualities frozen); the second is per point and must be chained with
    dq/dx by the caller.
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    n = kernel.size
    # d(-logdet/n)/dL = -L^{-1}/n, symmetric
    g = -kernel.inverse() / n
    core = kernel.matrix.copy()
    core[np.diag_indices_from(core)] -= kernel.jitter
    m = g * core

    h2 = kernel.kernel.bandwidth**2
    # d k_ij / d x_i = -k_ij (x_i - x_j) / h^2; the pair appears as (i,j) and (j,i)
    dx = -(2.0 / h2) * (m.sum(axis=1)[:, None] * x - m @ x)

    if kernel.gamma0 == 0:
        dq = np.zeros(n)
    else:
        q = kernel.qualities
        w = q**kernel.gamma0
        dw = kernel.gamma0 * q ** (kernel.gamma0 - 1.0)
        # L_ij = s_ij w_i w_j, so dL_ij/dq_a picks up row a and column a
        dq = 2.0 * dw * ((g * kernel.similarity) @ w)
    return dx, dq


def pad_loss_gradients(kernel: BatchKernel, points, quality_gradients) -> np.ndarray:
    """Total gradient of the loss with respect to each point.

    ``quality_gradients[j]`` is dq/dx evaluated at point j; the quality channel
    is chained through it and added to the similarity channel.
    """
    dx, dq = pad_loss_partials(kernel, points)
    return dx + dq[:, None] * np.asarray(quality_gradients, dtype=float)


def subset_probability(matrix, subset) -> float:
    """L-ensemble probability det(L_S) / det(L + I) of drawing exactly ``subset``."""
    mat = np.asarray(matrix, dtype=float)
    idx = list(subset)
    num = np.linalg.det(mat[np.ix_(idx, idx)]) if idx else 1.0
    return float(num / np.linalg.det(mat + np.eye(mat.shape[0])))


def all_subsets(n: int):
    for r in range(n + 1):
        yield from combinations(range(n), r)
