"""Versioned model container: save and load every trained model kind.

File layout: a first line holding the magic "NDSL1", then one JSON
document. Parameter arrays are embedded as base64 of little-endian
raw bytes, so a save/load round trip reproduces predictions bit for
bit. The feature pipeline (vocabulary or embedding) travels inside
the same file.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classifiers, embeddings, neural
from .corpus import LABELS, clean_sentence
from .errors import IncompatibleSpec, ModelFormatError
from .features import NgramVocabulary, WordVocabulary, vectorize, vectorize_bow

MAGIC = "NDSL1"

VECTOR_FEATURES = ("char1", "char2", "char3", "bow", "cbow", "skipgram")
#: CNN consumes token sequences of these orders; others consume vectors.
MODEL_FEATURES = {
    "knn": VECTOR_FEATURES,
    "logreg": VECTOR_FEATURES,
    "nb": ("char1", "char2", "char3", "bow"),  # needs non-negative counts
    "svm": VECTOR_FEATURES,
    "mlp": VECTOR_FEATURES,
    "cnn": ("char1", "char2", "char3"),
    "fasttext": ("bow", "char1_5"),
}


def _enc(array: np.ndarray) -> dict:
    arr = np.ascontiguousarray(array)
    code = "<i8" if arr.dtype.kind in "iu" else "<f8"
    arr = arr.astype(code)
    return {
        "shape": list(arr.shape),
        "dtype": code,
        "data": base64.b64encode(arr.tobytes()).decode("ascii"),
    }


def _dec(obj: dict) -> np.ndarray:
    data = base64.b64decode(obj["data"])
    return np.frombuffer(data, dtype=obj["dtype"]).reshape(obj["shape"]).copy()


@dataclass
class QueryEmbedding:
    """Composed per-word vectors, the query-time face of an EmbeddingMatrix."""

    mode: str
    dim: int
    words: list[str]
    word_index: dict[str, int]
    composed: np.ndarray

    @classmethod
    def from_matrix(cls, emb: embeddings.EmbeddingMatrix) -> "QueryEmbedding":
        return cls(emb.mode, emb.dim, list(emb.words), dict(emb.word_index),
                   emb.composed.copy())


@dataclass
class VectorFeature:
    """Text -> dense vector transform bundled with vector classifiers."""

    type: str
    normalize: bool = True
    ngram_vocab: NgramVocabulary | None = None
    word_vocab: WordVocabulary | None = None
    embedding: QueryEmbedding | None = None

    @property
    def dim(self) -> int:
        if self.ngram_vocab is not None:
            return self.ngram_vocab.size
        if self.word_vocab is not None:
            return self.word_vocab.size
        return self.embedding.dim

    def transform(self, text: str) -> np.ndarray:
        if self.ngram_vocab is not None:
            return vectorize(text, self.ngram_vocab, self.normalize).to_dense()
        if self.word_vocab is not None:
            return vectorize_bow(text, self.word_vocab, self.normalize).to_dense()
        return embeddings.sentence_embedding(text, self.embedding)


@dataclass
class PipelineModel:
    """A trained classifier plus whatever it needs to map text to inputs."""

    kind: str
    seed: int
    model: object
    feature: VectorFeature | None = None

    def predict(self, raw_text: str) -> str:
        text = clean_sentence(raw_text)
        if self.kind == "cnn":
            ids = neural.cnn_encode(self.model, text)
            return LABELS[int(np.argmax(neural.cnn_forward(self.model, ids)))]
        if self.kind == "fasttext":
            return embeddings.predict_fasttext(self.model, text)[0]
        x = self.feature.transform(text)
        if self.kind == "knn":
            return classifiers.knn_predict(self.model, x)
        if self.kind == "logreg":
            return classifiers.logreg_predict(self.model, x)[0]
        if self.kind == "nb":
            return classifiers.nb_predict(self.model, x)[0]
        if self.kind == "svm":
            return classifiers.svm_predict(self.model, x)
        if self.kind == "mlp":
            return LABELS[int(np.argmax(neural.mlp_forward(self.model, x)))]
        raise ModelFormatError(f"unknown model kind {self.kind!r}")


def check_compatibility(kind: str, feature_type: str) -> None:
    allowed = MODEL_FEATURES.get(kind)
    if allowed is None:
        raise IncompatibleSpec(f"unknown model kind {kind!r}")
    if feature_type not in allowed:
        raise IncompatibleSpec(
            f"model {kind!r} cannot use features {feature_type!r}; "
            f"allowed: {', '.join(allowed)}"
        )


def _feature_payload(feature: VectorFeature | None) -> dict | None:
    if feature is None:
        return None
    payload = {"type": feature.type, "normalize": feature.normalize}
    if feature.ngram_vocab is not None:
        ordered = sorted(feature.ngram_vocab.entries, key=feature.ngram_vocab.entries.get)
        payload["ngram_n"] = feature.ngram_vocab.n
        payload["vocab"] = ordered
    elif feature.word_vocab is not None:
        ordered = sorted(feature.word_vocab.entries, key=feature.word_vocab.entries.get)
        payload["vocab"] = ordered
    else:
        payload["embedding"] = {
            "mode": feature.embedding.mode,
            "dim": feature.embedding.dim,
            "words": feature.embedding.words,
            "composed": _enc(feature.embedding.composed),
        }
    return payload


def _feature_from_payload(payload: dict | None) -> VectorFeature | None:
    if payload is None:
        return None
    kind = payload["type"]
    if "ngram_n" in payload:
        vocab = NgramVocabulary(
            payload["ngram_n"], {g: i for i, g in enumerate(payload["vocab"])}
        )
        return VectorFeature(kind, payload["normalize"], ngram_vocab=vocab)
    if "vocab" in payload:
        vocab = WordVocabulary(
            {w: rank for rank, w in enumerate(payload["vocab"], start=1)}
        )
        return VectorFeature(kind, payload["normalize"], word_vocab=vocab)
    emb = payload["embedding"]
    query = QueryEmbedding(
        emb["mode"], emb["dim"], list(emb["words"]),
        {w: i for i, w in enumerate(emb["words"])}, _dec(emb["composed"]),
    )
    return VectorFeature(kind, payload["normalize"], embedding=query)


def _params_payload(kind: str, model: object) -> dict:
    if kind == "knn":
        return {"k": model.k, "vectors": _enc(model.vectors), "labels": _enc(model.labels)}
    if kind == "logreg":
        return {
            "theta": _enc(model.theta),
            "learning_rate": model.learning_rate,
            "epochs": model.epochs,
        }
    if kind == "nb":
        return {
            "log_priors": _enc(model.log_priors),
            "log_likelihoods": _enc(model.log_likelihoods),
            "alpha": model.alpha,
        }
    if kind == "svm":
        return {
            "weights": _enc(model.weights),
            "biases": _enc(model.biases),
            "lam": model.lam,
            "epochs": model.epochs,
            "seed": model.seed,
        }
    if kind == "mlp":
        return {
            "weights": [_enc(w) for w in model.weights],
            "biases": [_enc(b) for b in model.biases],
        }
    if kind == "cnn":
        ordered = sorted(model.vocab, key=model.vocab.get)
        return {
            "gram": model.gram,
            "vocab": ordered,
            "embeddings": _enc(model.embeddings),
            "filters": _enc(model.filters),
            "conv_bias": _enc(model.conv_bias),
            "dense_w": _enc(model.dense_w),
            "dense_b": _enc(model.dense_b),
            "max_len": model.max_len,
        }
    if kind == "fasttext":
        return {
            "feature_mode": model.feature_mode,
            "ngram_min": model.ngram_min,
            "ngram_max": model.ngram_max,
            "features": model.features,
            "input_vectors": _enc(model.input_vectors),
            "output_weights": _enc(model.output_weights),
            "output_bias": _enc(model.output_bias),
        }
    raise ModelFormatError(f"cannot serialize model kind {kind!r}")


def _model_from_params(kind: str, params: dict) -> object:
    if kind == "knn":
        return classifiers.KnnModel(params["k"], _dec(params["vectors"]), _dec(params["labels"]))
    if kind == "logreg":
        return classifiers.LogRegModel(
            _dec(params["theta"]), params["learning_rate"], params["epochs"]
        )
    if kind == "nb":
        return classifiers.NbModel(
            _dec(params["log_priors"]), _dec(params["log_likelihoods"]), params["alpha"]
        )
    if kind == "svm":
        return classifiers.SvmModel(
            _dec(params["weights"]), _dec(params["biases"]),
            params["lam"], params["epochs"], params["seed"],
        )
    if kind == "mlp":
        return neural.MlpModel(
            [_dec(w) for w in params["weights"]],
            [_dec(b) for b in params["biases"]],
        )
    if kind == "cnn":
        vocab = {g: i for i, g in enumerate(params["vocab"])}
        return neural.CnnModel(
            params["gram"], vocab, _dec(params["embeddings"]),
            _dec(params["filters"]), _dec(params["conv_bias"]),
            _dec(params["dense_w"]), _dec(params["dense_b"]), params["max_len"],
        )
    if kind == "fasttext":
        features = list(params["features"])
        return embeddings.FastTextClassifier(
            params["feature_mode"], params["ngram_min"], params["ngram_max"],
            features, {f: i for i, f in enumerate(features)},
            _dec(params["input_vectors"]), _dec(params["output_weights"]),
            _dec(params["output_bias"]),
        )
    raise ModelFormatError(f"cannot load model kind {kind!r}")


def save_model(pipeline: PipelineModel, path: str | Path) -> None:
    payload = {
        "kind": pipeline.kind,
        "seed": pipeline.seed,
        "labels": list(LABELS),
        "feature": _feature_payload(pipeline.feature),
        "params": _params_payload(pipeline.kind, pipeline.model),
    }
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    Path(path).write_text(f"{MAGIC}\n{body}\n", encoding="utf-8", newline="\n")


def load_model(path: str | Path) -> PipelineModel:
    raw = Path(path).read_text(encoding="utf-8")
    first, _, rest = raw.partition("\n")
    if first != MAGIC:
        raise ModelFormatError(f"{path}: not a {MAGIC} model file")
    try:
        payload = json.loads(rest)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: corrupt model payload") from exc
    if payload.get("labels") != list(LABELS):
        raise ModelFormatError(f"{path}: label set does not match this build")
    feature = _feature_from_payload(payload["feature"])
    model = _model_from_params(payload["kind"], payload["params"])
    return PipelineModel(payload["kind"], payload["seed"], model, feature)
