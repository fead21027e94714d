"""PCA by power iteration and exact t-SNE for 2-D corpus projections.

PCA follows the covariance-eigendecomposition route: population
covariance, then dominant eigenpairs extracted one at a time by power
iteration with deflation. t-SNE is the exact O(n^2) algorithm: Gaussian
input affinities with per-point bandwidths tuned by bisection to a
target perplexity, Student-t low-dimensional affinities, and momentum
gradient descent on the KL divergence with early exaggeration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    PerplexityInfeasible,
    TooFewPoints,
)


@dataclass(frozen=True)
class CovarianceMatrix:
    matrix: np.ndarray  # d x d, symmetric PSD
    means: np.ndarray  # d


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray  # unit norm; largest-magnitude component positive


def covariance(data: np.ndarray) -> CovarianceMatrix:
    """Population covariance (divide by n) of row-vector data."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch(2, x.ndim)
    if x.shape[0] < 2:
        raise TooFewPoints(f"need at least 2 points, got {x.shape[0]}")
    means = x.mean(axis=0)
    centered = x - means
    k = centered.T @ centered / x.shape[0]
    return CovarianceMatrix((k + k.T) / 2.0, means)


def _spectral_radius_estimate(
    k: np.ndarray, rng: np.random.Generator, iterations: int = 200
) -> float:
    v = rng.standard_normal(k.shape[0])
    v /= np.linalg.norm(v)
    radius = 0.0
    for _ in range(iterations):
        w = k @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        radius = norm
        v = w / norm
    return radius


def top_eigenpairs(
    k: np.ndarray,
    m: int,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    seed: int = 0,
) -> list[EigenPair]:
    """The m algebraically largest eigenpairs of a symmetric matrix.

    Power iteration runs on K + cI with c slightly above the spectral
    radius, making the algebraically largest remaining eigenvalue also
    the dominant one; found components are deflated to zero. Iteration
    stops on direction change below ``tol`` or once the true residual
    ||Kv - lambda v|| clears the 1e-6 ||K||_F acceptance bound.
    """
    k = np.asarray(k, dtype=np.float64)
    dim = k.shape[0]
    if k.shape != (dim, dim) or np.abs(k - k.T).max() > 1e-9 * max(1.0, np.abs(k).max()):
        raise ValueError("matrix must be square and symmetric")
    if not 1 <= m <= dim:
        raise ValueError(f"m must lie in 1..{dim}, got {m}")
    scale = np.linalg.norm(k)
    residual_bound = 1e-6 * max(scale, 1e-300)
    rng = np.random.default_rng(seed)
    shift = 1.1 * _spectral_radius_estimate(k, rng) + 1e-9 * max(scale, 1.0)
    working = k + shift * np.eye(dim)
    pairs: list[EigenPair] = []
    for component in range(m):
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        for iteration in range(max_iter):
            w = working @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:
                # v fell entirely into the deflated null space; restart.
                v = rng.standard_normal(dim)
                v /= np.linalg.norm(v)
                continue
            v_next = w / norm
            converged = np.linalg.norm(v_next - v) < tol
            v = v_next
            if converged:
                break
            if iteration % 10 == 9:
                rayleigh = float(v @ k @ v)
                if np.linalg.norm(k @ v - rayleigh * v) <= 1e-4 * residual_bound:
                    break
        value = float(v @ k @ v)
        residual = float(np.linalg.norm(k @ v - value * v))
        if residual > residual_bound:
            raise ConvergenceFailure(component, residual)
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        pairs.append(EigenPair(value, v))
        working -= (value + shift) * np.outer(v, v)
    pairs.sort(key=lambda pair: -pair.value)
    return pairs


def pca_project(data: np.ndarray, m: int = 2) -> np.ndarray:
    """Project centered data onto its top-m principal axes."""
    cov = covariance(data)
    pairs = top_eigenpairs(cov.matrix, m)
    basis = np.stack([p.vector for p in pairs], axis=1)  # d x m
    return (np.asarray(data, dtype=np.float64) - cov.means) @ basis


# ---------------------------------------------------------------------------
# t-SNE
# ---------------------------------------------------------------------------


def _squared_distances(x: np.ndarray) -> np.ndarray:
    sq = (x**2).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def _row_affinities(d2_row: np.ndarray, beta: float) -> np.ndarray:
    # Shift by the smallest distance for numerical range; cancels in the ratio.
    shifted = d2_row - d2_row.min()
    p = np.exp(-shifted * beta)
    return p / p.sum()


def _row_perplexity(p: np.ndarray) -> float:
    nz = p[p > 0]
    entropy = float(-(nz * np.log2(nz)).sum())
    return 2.0**entropy


def tsne_affinities(
    data: np.ndarray,
    perplexity: float = 30.0,
    tol: float = 1e-5,
    max_tries: int = 50,
) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized joint affinities P and the per-point bandwidths sigma.

    Each point's Gaussian precision is tuned by bisection (with bracket
    expansion) until the conditional distribution's perplexity matches
    the target within ``tol``.
    """
    x = np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    if n < 4:
        raise TooFewPoints(f"need at least 4 points, got {n}")
    if not 1.0 < perplexity < n - 1:
        raise PerplexityInfeasible(
            f"perplexity must lie in (1, {n - 1}) for {n} points, got {perplexity}"
        )
    d2 = _squared_distances(x)
    conditionals = np.zeros((n, n))
    sigmas = np.zeros(n)
    off_diag = ~np.eye(n, dtype=bool)
    for i in range(n):
        row = d2[i][off_diag[i]]
        beta = 1.0 / (2.0 * max(np.median(row), 1e-12))
        beta_min, beta_max = 0.0, np.inf
        p = _row_affinities(row, beta)
        for _ in range(max_tries):
            gap = _row_perplexity(p) - perplexity
            if abs(gap) <= tol:
                break
            if gap > 0:  # too spread out: sharpen
                beta_min = beta
                beta = beta * 2.0 if np.isinf(beta_max) else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = beta / 2.0 if beta_min == 0.0 else (beta + beta_min) / 2.0
            p = _row_affinities(row, beta)
        conditionals[i][off_diag[i]] = p
        sigmas[i] = np.sqrt(1.0 / (2.0 * beta))
    joint = (conditionals + conditionals.T) / (2.0 * n)
    return joint, sigmas


def student_t_affinities(y: np.ndarray) -> np.ndarray:
    """Joint Student-t affinities Q of low-dimensional positions."""
    w = 1.0 / (1.0 + _squared_distances(np.asarray(y, dtype=np.float64)))
    np.fill_diagonal(w, 0.0)
    return w / w.sum()


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float((p[mask] * np.log(p[mask] / np.maximum(q[mask], 1e-12))).sum())


@dataclass
class TsneResult:
    positions: np.ndarray  # n x 2
    kl_history: list[float]
    clamped_steps: int


def tsne_optimize(
    p: np.ndarray,
    iterations: int = 1000,
    seed: int = 0,
    learning_rate: float = 200.0,
    early_exaggeration: float = 12.0,
    exaggeration_iters: int = 250,
    momentum_start: float = 0.5,
    momentum_final: float = 0.8,
    momentum_switch: int = 250,
    init_scale: float = 1e-4,
    grad_norm_clamp: float = 1e6,
) -> TsneResult:
    """Momentum gradient descent on KL(P || Q) from a tiny Gaussian init.

    The gradient at point i is 4 sum_j (p_ij - q_ij)(y_i - y_j) /
    (1 + ||y_i - y_j||^2). Affinities are multiplied by the exaggeration
    factor for the first ``exaggeration_iters`` iterations. Per-coordinate
    gains (+0.2 on sign disagreement with the velocity, x0.8 on agreement,
    floored at 0.01) follow the original reference implementation and keep
    the fixed learning rate stable late in the run. KL against the
    unexaggerated P is recorded every iteration.
    """
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0]
    rng = np.random.default_rng(seed)
    y = rng.normal(0.0, init_scale, size=(n, 2))
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    kl_history: list[float] = []
    clamped = 0
    for it in range(iterations):
        p_eff = p * early_exaggeration if it < exaggeration_iters else p
        w = 1.0 / (1.0 + _squared_distances(y))
        np.fill_diagonal(w, 0.0)
        q = w / w.sum()
        m = (p_eff - q) * w
        grad = 4.0 * (np.diag(m.sum(axis=1)) - m) @ y
        norm = np.linalg.norm(grad)
        if norm > grad_norm_clamp:
            grad *= grad_norm_clamp / norm
            clamped += 1
        same_sign = (grad > 0) == (velocity > 0)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        momentum = momentum_start if it < momentum_switch else momentum_final
        velocity = momentum * velocity - learning_rate * (gains * grad)
        y = y + velocity
        y = y - y.mean(axis=0)
        kl_history.append(kl_divergence(p, q))
    return TsneResult(y, kl_history, clamped)


def format_projection(
    labels: list[str], coords: np.ndarray
) -> str:
    """TSV rows ``label\\tx\\ty`` with 17-significant-digit floats."""
    lines = [
        f"{label}\t{coords[i, 0]:.17g}\t{coords[i, 1]:.17g}"
        for i, label in enumerate(labels)
    ]
    return "\n".join(lines) + "\n"
