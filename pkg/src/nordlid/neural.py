"""From-scratch MLP and 1-D convolutional text classifiers.

Both networks are trained by plain mini-batch SGD on categorical
cross-entropy, in float64, with explicitly seeded initialization and
shuffling so training is bit-reproducible. The backward passes are
written out by hand and are checked against finite differences in the
test suite.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .corpus import LABEL_INDEX, LABELS, Sentence
from .errors import DimensionMismatch, LengthMismatch, SequenceTooShort
from .features import build_ngram_vocab, extract_char_ngrams

N_CLASSES = len(LABELS)


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, np.asarray(z, dtype=np.float64))


def softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cce_loss(pred: np.ndarray, y: int | np.ndarray) -> float:
    """-ln pred[y], averaged over a batch; predictions clamped at 1e-12."""
    pred = np.asarray(pred, dtype=np.float64)
    if pred.ndim == 1:
        return float(-np.log(max(pred[y], 1e-12)))
    picked = np.clip(pred[np.arange(pred.shape[0]), y], 1e-12, None)
    return float(-np.log(picked).mean())


def mse_loss(pred: np.ndarray, target: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise LengthMismatch(f"shapes {pred.shape} and {target.shape} differ")
    return float(((pred - target) ** 2).mean())


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 5
    batch_size: int = 32
    seed: int = 42
    max_len: int = 128

    def __post_init__(self):
        if min(self.learning_rate, self.epochs, self.batch_size, self.max_len) <= 0:
            raise ValueError("all training config fields must be positive")


def _one_hot(y: np.ndarray) -> np.ndarray:
    out = np.zeros((len(y), N_CLASSES))
    out[np.arange(len(y)), y] = 1.0
    return out


def _xavier(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


# ---------------------------------------------------------------------------
# Multilayer perceptron
# ---------------------------------------------------------------------------


@dataclass
class MlpModel:
    """Dense layers with ReLU hidden activations and a softmax output."""

    weights: list[np.ndarray]  # per layer, shape (out, in)
    biases: list[np.ndarray]

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]


def init_mlp(layer_sizes: Sequence[int], seed: int) -> MlpModel:
    if len(layer_sizes) < 3:
        raise ValueError("need input, at least one hidden, and output layer")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(_xavier(rng, fan_in, fan_out, (fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases)


def mlp_forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = np.atleast_2d(x)
    if h.shape[1] != model.weights[0].shape[1]:
        raise DimensionMismatch(model.weights[0].shape[1], h.shape[1])
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        h = relu(h @ w.T + b)
    posterior = softmax(h @ model.weights[-1].T + model.biases[-1])
    return posterior[0] if squeeze else posterior


def mlp_loss(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    return cce_loss(mlp_forward(model, x), y)


def mlp_grads(
    model: MlpModel, x: np.ndarray, y: np.ndarray
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean batch loss plus gradients for every weight matrix and bias."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64)
    activations = [x]
    pre_acts = []
    h = x
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        z = h @ w.T + b
        pre_acts.append(z)
        h = relu(z)
        activations.append(h)
    logits = h @ model.weights[-1].T + model.biases[-1]
    posterior = softmax(logits)
    loss = cce_loss(posterior, y)

    n = x.shape[0]
    delta = (posterior - _one_hot(y)) / n
    w_grads = [np.zeros_like(w) for w in model.weights]
    b_grads = [np.zeros_like(b) for b in model.biases]
    for layer in reversed(range(len(model.weights))):
        w_grads[layer] = delta.T @ activations[layer]
        b_grads[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ model.weights[layer]) * (pre_acts[layer - 1] > 0)
    return loss, w_grads, b_grads


def mlp_train(
    train_x: np.ndarray,
    train_y: np.ndarray,
    hidden: Sequence[int] = (128,),
    cfg: TrainConfig = TrainConfig(),
) -> MlpModel:
    train_x = np.asarray(train_x, dtype=np.float64)
    train_y = np.asarray(train_y, dtype=np.int64)
    layer_sizes = [train_x.shape[1], *hidden, N_CLASSES]
    model = init_mlp(layer_sizes, cfg.seed)
    rng = np.random.default_rng(cfg.seed + 1)
    n = len(train_y)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            _, w_grads, b_grads = mlp_grads(model, train_x[batch], train_y[batch])
            for layer in range(len(model.weights)):
                model.weights[layer] -= cfg.learning_rate * w_grads[layer]
                model.biases[layer] -= cfg.learning_rate * b_grads[layer]
    return model


# ---------------------------------------------------------------------------
# 1-D convolutional classifier over character n-gram sequences
# ---------------------------------------------------------------------------

PAD_INDEX = 0


@dataclass
class CnnModel:
    """Embed token sequence, convolve, ReLU, global max pool, dense softmax.

    Token index 0 is reserved for padding; real tokens are 1-based.
    """

    gram: int
    vocab: dict[str, int]  # ngram -> 0-based index; stored ids are index + 1
    embeddings: np.ndarray  # (V+1) x e, row 0 = pad
    filters: np.ndarray  # F x h x e
    conv_bias: np.ndarray  # F
    dense_w: np.ndarray  # F x 6
    dense_b: np.ndarray  # 6
    max_len: int


def init_cnn(
    gram: int,
    vocab: dict[str, int],
    kernel: int = 3,
    filters: int = 64,
    embed_dim: int = 16,
    max_len: int = 128,
    seed: int = 42,
) -> CnnModel:
    if kernel < 1 or kernel > max_len:
        raise ValueError(f"kernel width must lie in 1..{max_len}, got {kernel}")
    rng = np.random.default_rng(seed)
    embeddings = rng.uniform(-0.1, 0.1, size=(len(vocab) + 1, embed_dim))
    conv = _xavier(rng, kernel * embed_dim, filters, (filters, kernel, embed_dim))
    dense = _xavier(rng, filters, N_CLASSES, (filters, N_CLASSES))
    return CnnModel(
        gram,
        dict(vocab),
        embeddings,
        conv,
        np.zeros(filters),
        dense,
        np.zeros(N_CLASSES),
        max_len,
    )


def cnn_encode(model: CnnModel, text: str) -> np.ndarray:
    """Map cleaned text to a padded/truncated sequence of token ids."""
    ids = [
        model.vocab[gram] + 1
        for gram in extract_char_ngrams(text, model.gram)
        if gram in model.vocab
    ]
    if not ids:
        raise SequenceTooShort(f"no in-vocabulary tokens of order {model.gram}")
    ids = ids[: model.max_len]
    padded = np.full(model.max_len, PAD_INDEX, dtype=np.int64)
    padded[: len(ids)] = ids
    return padded


def _cnn_batch_forward(model: CnnModel, ids: np.ndarray) -> dict:
    if ids.max(initial=0) >= model.embeddings.shape[0]:
        raise DimensionMismatch(model.embeddings.shape[0], int(ids.max()))
    emb = model.embeddings[ids]  # B x L x e
    n_batch, seq_len, _ = emb.shape
    width = model.filters.shape[1]
    positions = seq_len - width + 1
    windows = np.stack(
        [emb[:, t : t + width, :] for t in range(positions)], axis=1
    )  # B x P x h x e
    pre = (
        np.tensordot(windows, model.filters, axes=([2, 3], [1, 2])) + model.conv_bias
    )  # B x P x F
    act = np.maximum(0.0, pre)
    pooled = act.max(axis=1)
    pool_arg = act.argmax(axis=1)
    logits = pooled @ model.dense_w + model.dense_b
    posterior = softmax(logits)
    return {
        "emb": emb,
        "windows": windows,
        "pre": pre,
        "act": act,
        "pooled": pooled,
        "pool_arg": pool_arg,
        "posterior": posterior,
    }


def cnn_forward(model: CnnModel, ids: np.ndarray) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    squeeze = ids.ndim == 1
    cache = _cnn_batch_forward(model, np.atleast_2d(ids))
    posterior = cache["posterior"]
    return posterior[0] if squeeze else posterior


def cnn_conv_activations(model: CnnModel, ids: np.ndarray) -> np.ndarray:
    """Post-ReLU convolution stage, shape (L - h + 1) x F."""
    cache = _cnn_batch_forward(model, np.atleast_2d(np.asarray(ids, dtype=np.int64)))
    return cache["act"][0]


def cnn_loss(model: CnnModel, ids: np.ndarray, y: np.ndarray) -> float:
    return cce_loss(cnn_forward(model, ids), y)


def cnn_grads(model: CnnModel, ids: np.ndarray, y: np.ndarray) -> tuple[float, dict]:
    """Mean batch loss and gradients for every parameter array."""
    ids = np.atleast_2d(np.asarray(ids, dtype=np.int64))
    y = np.asarray(y, dtype=np.int64)
    cache = _cnn_batch_forward(model, ids)
    n_batch, positions, n_filters = cache["pre"].shape
    width = model.filters.shape[1]
    loss = cce_loss(cache["posterior"], y)

    dlogits = (cache["posterior"] - _one_hot(y)) / n_batch
    grads = {
        "dense_w": cache["pooled"].T @ dlogits,
        "dense_b": dlogits.sum(axis=0),
        "conv_bias": None,
        "filters": None,
        "embeddings": np.zeros_like(model.embeddings),
    }
    dpooled = dlogits @ model.dense_w.T  # B x F
    dact = np.zeros_like(cache["act"])
    rows = np.arange(n_batch)[:, None]
    cols = np.arange(n_filters)[None, :]
    dact[rows, cache["pool_arg"], cols] = dpooled
    dpre = dact * (cache["pre"] > 0)
    grads["filters"] = np.tensordot(dpre, cache["windows"], axes=([0, 1], [0, 1]))
    grads["conv_bias"] = dpre.sum(axis=(0, 1))
    dwindows = np.tensordot(dpre, model.filters, axes=([2], [0]))  # B x P x h x e
    demb = np.zeros_like(cache["emb"])
    for t in range(positions):
        demb[:, t : t + width, :] += dwindows[:, t]
    np.add.at(
        grads["embeddings"],
        ids.ravel(),
        demb.reshape(-1, model.embeddings.shape[1]),
    )
    return loss, grads


def cnn_train(
    train: Iterable[Sentence],
    cfg: TrainConfig = TrainConfig(learning_rate=0.05),
    gram: int = 2,
    kernel: int = 3,
    filters: int = 64,
    embed_dim: int = 16,
    vocab_cap: int | None = None,
) -> CnnModel:
    train = list(train)
    vocab = build_ngram_vocab(train, gram, cap=vocab_cap).entries
    model = init_cnn(
        gram, vocab, kernel, filters, embed_dim, cfg.max_len, cfg.seed
    )
    ids = np.stack([cnn_encode(model, s.text) for s in train])
    labels = np.array([LABEL_INDEX[s.label] for s in train], dtype=np.int64)
    rng = np.random.default_rng(cfg.seed + 1)
    n = len(train)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            _, grads = cnn_grads(model, ids[batch], labels[batch])
            model.embeddings -= cfg.learning_rate * grads["embeddings"]
            model.filters -= cfg.learning_rate * grads["filters"]
            model.conv_bias -= cfg.learning_rate * grads["conv_bias"]
            model.dense_w -= cfg.learning_rate * grads["dense_w"]
            model.dense_b -= cfg.learning_rate * grads["dense_b"]
    return model


def cnn_accuracy(model: CnnModel, test: Iterable[Sentence]) -> float:
    test = list(test)
    ids = np.stack([cnn_encode(model, s.text) for s in test])
    labels = np.array([LABEL_INDEX[s.label] for s in test], dtype=np.int64)
    predicted = cnn_forward(model, ids).argmax(axis=1)
    return float((predicted == labels).mean())


@dataclass
class SweepResult:
    """Test accuracy per (gram order, kernel width) pair."""

    entries: dict[tuple[int, int], float] = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["gram,kernel,accuracy"]
        for (gram, kernel), accuracy in sorted(self.entries.items()):
            lines.append(f"{gram},{kernel},{accuracy:.17g}")
        return "\n".join(lines) + "\n"


def kernel_size_sweep(
    train: Iterable[Sentence],
    test: Iterable[Sentence],
    gram_orders: Sequence[int] = (1, 2, 3),
    kernels: Sequence[int] = tuple(range(1, 12)),
    cfg: TrainConfig = TrainConfig(learning_rate=0.05),
    filters: int = 64,
    embed_dim: int = 16,
) -> SweepResult:
    """Train one CNN per (gram, kernel) pair and record test accuracy."""
    train = list(train)
    test = list(test)
    result = SweepResult()
    for gram in gram_orders:
        for kernel in kernels:
            model = cnn_train(
                train, cfg, gram=gram, kernel=kernel, filters=filters,
                embed_dim=embed_dim,
            )
            result.entries[(gram, kernel)] = cnn_accuracy(model, test)
    return result
