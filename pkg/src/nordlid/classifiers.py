"""The four classical classifiers: KNN, logistic regression, Naive Bayes, SVM.

All models consume dense float vectors and integer class indices
(0..5, matching the canonical label order) and predict label codes.
Training is deterministic: full-batch methods are order-independent,
stochastic ones take an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import LABELS
from .errors import DimensionMismatch, NegativeCount

N_CLASSES = len(LABELS)


def _check_dim(x: np.ndarray, expected: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != expected:
        raise DimensionMismatch(expected, x.shape[-1] if x.ndim else 0)
    return x


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _one_hot(y: np.ndarray) -> np.ndarray:
    out = np.zeros((len(y), N_CLASSES))
    out[np.arange(len(y)), y] = 1.0
    return out


# ---------------------------------------------------------------------------
# K nearest neighbors
# ---------------------------------------------------------------------------


@dataclass
class KnnModel:
    k: int
    vectors: np.ndarray  # n x d
    labels: np.ndarray  # n, class indices


def train_knn(train_x: np.ndarray, train_y: np.ndarray, k: int = 3) -> KnnModel:
    train_x = np.asarray(train_x, dtype=np.float64)
    train_y = np.asarray(train_y, dtype=np.int64)
    if k < 1 or k > len(train_y):
        raise ValueError(f"k must lie in 1..{len(train_y)}, got {k}")
    return KnnModel(k, train_x, train_y)


def knn_predict(model: KnnModel, x: np.ndarray) -> str:
    """Majority label among the k nearest training points.

    Distance ties resolve by training-set order (stable sort); vote ties
    by smallest summed distance, then by label order.
    """
    x = _check_dim(x, model.vectors.shape[1])
    if model.k > len(model.labels):
        raise ValueError("k exceeds training set size")
    distances = np.sqrt(((model.vectors - x) ** 2).sum(axis=1))
    nearest = np.argsort(distances, kind="stable")[: model.k]
    votes = np.zeros(N_CLASSES)
    sums = np.zeros(N_CLASSES)
    for i in nearest:
        votes[model.labels[i]] += 1
        sums[model.labels[i]] += distances[i]
    candidates = np.flatnonzero(votes == votes.max())
    best = min(candidates, key=lambda c: (sums[c], c))
    return LABELS[best]


# ---------------------------------------------------------------------------
# Multinomial logistic regression
# ---------------------------------------------------------------------------


@dataclass
class LogRegModel:
    theta: np.ndarray  # 6 x (d+1), bias folded into the last column
    learning_rate: float
    epochs: int


def _augment(x: np.ndarray) -> np.ndarray:
    ones = np.ones((*x.shape[:-1], 1))
    return np.concatenate([x, ones], axis=-1)


def logreg_loss(theta: np.ndarray, x_aug: np.ndarray, y: np.ndarray) -> float:
    """Mean categorical cross-entropy of softmax(x theta^T) against y."""
    posterior = _softmax_rows(x_aug @ theta.T)
    picked = np.clip(posterior[np.arange(len(y)), y], 1e-12, None)
    return float(-np.log(picked).mean())


def logreg_gradient(theta: np.ndarray, x_aug: np.ndarray, y: np.ndarray) -> np.ndarray:
    posterior = _softmax_rows(x_aug @ theta.T)
    return (posterior - _one_hot(y)).T @ x_aug / len(y)


def train_logreg(
    train_x: np.ndarray,
    train_y: np.ndarray,
    learning_rate: float = 0.5,
    epochs: int = 500,
) -> LogRegModel:
    """Full-batch gradient descent on cross-entropy, zero-initialized weights."""
    x_aug = _augment(np.asarray(train_x, dtype=np.float64))
    y = np.asarray(train_y, dtype=np.int64)
    theta = np.zeros((N_CLASSES, x_aug.shape[1]))
    for _ in range(epochs):
        theta -= learning_rate * logreg_gradient(theta, x_aug, y)
    return LogRegModel(theta, learning_rate, epochs)


def logreg_posterior(model: LogRegModel, x: np.ndarray) -> np.ndarray:
    x = _check_dim(x, model.theta.shape[1] - 1)
    return _softmax_rows(model.theta @ np.append(x, 1.0))


def logreg_predict(model: LogRegModel, x: np.ndarray) -> tuple[str, np.ndarray]:
    posterior = logreg_posterior(model, x)
    return LABELS[int(np.argmax(posterior))], posterior


# ---------------------------------------------------------------------------
# Multinomial Naive Bayes
# ---------------------------------------------------------------------------


@dataclass
class NbModel:
    log_priors: np.ndarray  # 6
    log_likelihoods: np.ndarray  # 6 x V
    alpha: float


def train_nb(
    train_x: np.ndarray, train_y: np.ndarray, alpha: float = 1.0
) -> NbModel:
    """Multinomial NB with Laplace smoothing.

    p(feature i | class k) = (count(i,k) + alpha) / (total(k) + alpha * V);
    priors come from class frequencies. alpha = 0 is allowed: unseen
    features then score -inf at prediction time.
    """
    x = np.asarray(train_x, dtype=np.float64)
    y = np.asarray(train_y, dtype=np.int64)
    if (x < 0).any():
        raise NegativeCount("feature counts must be non-negative")
    vocab_size = x.shape[1]
    feature_totals = np.zeros((N_CLASSES, vocab_size))
    class_sizes = np.zeros(N_CLASSES)
    for k in range(N_CLASSES):
        mask = y == k
        class_sizes[k] = mask.sum()
        if mask.any():
            feature_totals[k] = x[mask].sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_priors = np.log(class_sizes / len(y))
        smoothed = feature_totals + alpha
        log_likelihoods = np.log(smoothed) - np.log(
            feature_totals.sum(axis=1, keepdims=True) + alpha * vocab_size
        )
    # classes absent from training (prior 0) get -inf rather than nan
    log_likelihoods[class_sizes == 0] = -np.inf
    return NbModel(log_priors, log_likelihoods, alpha)


def nb_scores(model: NbModel, x: np.ndarray) -> np.ndarray:
    x = _check_dim(x, model.log_likelihoods.shape[1])
    if (x < 0).any():
        raise NegativeCount("feature counts must be non-negative")
    # 0 * log(0) is taken as 0: absent features contribute nothing.
    with np.errstate(invalid="ignore"):
        contributions = np.where(x > 0, x * model.log_likelihoods, 0.0)
    return model.log_priors + contributions.sum(axis=1)


def nb_predict(model: NbModel, x: np.ndarray) -> tuple[str, np.ndarray]:
    scores = nb_scores(model, x)
    return LABELS[int(np.argmax(scores))], scores


# ---------------------------------------------------------------------------
# Linear SVM (one-vs-rest, Pegasos-style subgradient training)
# ---------------------------------------------------------------------------


@dataclass
class SvmModel:
    weights: np.ndarray  # 6 x d
    biases: np.ndarray  # 6
    lam: float
    epochs: int
    seed: int
    objective_history: list[float] = field(default_factory=list)


def svm_objective(
    weights: np.ndarray,
    biases: np.ndarray,
    lam: float,
    x: np.ndarray,
    y_signs: np.ndarray,
) -> float:
    """Sum over classes of (lam/2)||w||^2 + mean hinge loss."""
    margins = y_signs * (x @ weights.T + biases)
    hinge = np.maximum(0.0, 1.0 - margins).mean(axis=0)
    return float((0.5 * lam * (weights**2).sum(axis=1) + hinge).sum())


def train_svm(
    train_x: np.ndarray,
    train_y: np.ndarray,
    lam: float = 1e-4,
    epochs: int = 10,
    seed: int = 0,
    average: bool = False,
) -> SvmModel:
    """Six one-vs-rest SVMs trained jointly with the 1/(lam*t) step schedule.

    Every class sees the same shuffled example order, so a single seed
    fixes the whole model. The bias terms take plain subgradient steps
    and are not regularized. With ``average`` the returned weights are
    the mean of the iterates from the second half of training, which
    smooths the noisy tail of the 1/(lam*t) schedule.
    """
    if lam <= 0:
        raise ValueError(f"regularization must be positive, got {lam}")
    x = np.asarray(train_x, dtype=np.float64)
    y = np.asarray(train_y, dtype=np.int64)
    n, dim = x.shape
    y_signs = np.where(_one_hot(y) > 0, 1.0, -1.0)  # n x 6
    weights = np.zeros((N_CLASSES, dim))
    biases = np.zeros(N_CLASSES)
    rng = np.random.default_rng(seed)
    history = []
    total = epochs * n
    tail_start = total // 2
    w_sum = np.zeros_like(weights)
    b_sum = np.zeros_like(biases)
    averaged = 0
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            margins = y_signs[i] * (weights @ x[i] + biases)
            violated = margins < 1.0
            weights *= 1.0 - eta * lam
            if violated.any():
                weights[violated] += eta * np.outer(y_signs[i][violated], x[i])
                biases[violated] += eta * y_signs[i][violated]
            if average and t > tail_start:
                w_sum += weights
                b_sum += biases
                averaged += 1
        history.append(svm_objective(weights, biases, lam, x, y_signs))
    if average and averaged:
        weights = w_sum / averaged
        biases = b_sum / averaged
        history.append(svm_objective(weights, biases, lam, x, y_signs))
    return SvmModel(weights, biases, lam, epochs, seed, history)


def svm_scores(model: SvmModel, x: np.ndarray) -> np.ndarray:
    x = _check_dim(x, model.weights.shape[1])
    return model.weights @ x + model.biases


def svm_predict(model: SvmModel, x: np.ndarray) -> str:
    return LABELS[int(np.argmax(svm_scores(model, x)))]
