"""Character n-gram and word count features over cleaned text."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import ALPHABET, LABEL_INDEX, LABELS, Sentence

#: char -> 0..39, in the canonical alphabet order.
CHARSET_INDEX = {ch: i for i, ch in enumerate(ALPHABET)}


def extract_char_ngrams(text: str, n: int) -> list[str]:
    """All width-n windows of ``text`` (spaces included), left to right."""
    if n < 1:
        raise ValueError(f"gram order must be >= 1, got {n}")
    return [text[i : i + n] for i in range(len(text) - n + 1)]


def word_tokenize(text: str) -> list[str]:
    """Split cleaned text on spaces, dropping empty tokens."""
    return [w for w in text.split(" ") if w]


@dataclass(frozen=True)
class NgramVocabulary:
    """Dense n-gram -> index map, ordered by descending corpus frequency.

    Frequency ties are broken lexicographically so construction is a pure
    function of the corpus.
    """

    n: int
    entries: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class WordVocabulary:
    """Word -> rank map (rank 1 = most frequent; ties lexicographic)."""

    entries: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.entries)

    def index(self, word: str) -> int | None:
        """0-based vector index for a word, or None if out of vocabulary."""
        rank = self.entries.get(word)
        return None if rank is None else rank - 1


@dataclass(frozen=True)
class FeatureVector:
    """Sparse count (or frequency) vector over a vocabulary."""

    dim: int
    entries: dict[int, float]

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        for index, value in self.entries.items():
            dense[index] = value
        return dense


def _ranked(counts: Counter, cap: int | None) -> list[str]:
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if cap is not None:
        ranked = ranked[:cap]
    return [token for token, _ in ranked]


def build_ngram_vocab(
    corpus: Iterable[Sentence], n: int, cap: int | None = None
) -> NgramVocabulary:
    counts: Counter = Counter()
    for sentence in corpus:
        counts.update(extract_char_ngrams(sentence.text, n))
    tokens = _ranked(counts, cap)
    return NgramVocabulary(n, {gram: i for i, gram in enumerate(tokens)})


def build_word_vocab(
    corpus: Iterable[Sentence], cap: int | None = None
) -> WordVocabulary:
    counts: Counter = Counter()
    for sentence in corpus:
        counts.update(word_tokenize(sentence.text))
    tokens = _ranked(counts, cap)
    return WordVocabulary({word: rank for rank, word in enumerate(tokens, start=1)})


def _sparse_counts(
    indices: Iterable[int], dim: int, normalize: bool
) -> FeatureVector:
    counts: Counter = Counter(indices)
    if normalize and counts:
        total = sum(counts.values())
        entries = {i: c / total for i, c in counts.items()}
    else:
        entries = {i: float(c) for i, c in counts.items()}
    return FeatureVector(dim, entries)


def vectorize(
    text: str, vocab: NgramVocabulary, normalize: bool = False
) -> FeatureVector:
    """Count in-vocabulary n-grams of ``text``; OOV n-grams are ignored."""
    hits = (
        vocab.entries[gram]
        for gram in extract_char_ngrams(text, vocab.n)
        if gram in vocab.entries
    )
    return _sparse_counts(hits, vocab.size, normalize)


def vectorize_bow(
    text: str, vocab: WordVocabulary, normalize: bool = False
) -> FeatureVector:
    """Bag-of-words counts of in-vocabulary tokens."""
    hits = (
        vocab.entries[word] - 1
        for word in word_tokenize(text)
        if word in vocab.entries
    )
    return _sparse_counts(hits, vocab.size, normalize)


@dataclass(frozen=True)
class CharProfile:
    """Per-label character counts over the 40-char alphabet.

    ``raw[k, c]`` counts character c in label k's sentences. ``normalized``
    divides each character's count by that character's total across labels
    (columns with zero total stay zero).
    """

    raw: np.ndarray
    normalized: np.ndarray


def char_frequency_profile(pools: dict[str, list[Sentence]]) -> CharProfile:
    raw = np.zeros((len(LABELS), len(ALPHABET)))
    for k, code in enumerate(LABELS):
        for sentence in pools.get(code, []):
            for ch in sentence.text:
                raw[k, CHARSET_INDEX[ch]] += 1
    totals = raw.sum(axis=0)
    normalized = np.divide(
        raw, totals, out=np.zeros_like(raw), where=totals > 0
    )
    return CharProfile(raw, normalized)


def save_vocab_tsv(tokens_in_index_order: list[str], path: str | Path) -> None:
    """Write ``<token>\\t<index>`` rows, index-ascending."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for index, token in enumerate(tokens_in_index_order):
            fh.write(f"{token}\t{index}\n")


def load_vocab_tokens(path: str | Path) -> list[str]:
    """Read back the token column of a vocabulary TSV, in index order."""
    tokens = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        token, index = line.split("\t")
        assert int(index) == len(tokens), "vocabulary file indices must ascend"
        tokens.append(token)
    return tokens


def count_matrix(
    sentences: Iterable[Sentence],
    vocab: NgramVocabulary | WordVocabulary,
    normalize: bool = False,
) -> np.ndarray:
    """Dense design matrix (one row per sentence) for classifier training."""
    if isinstance(vocab, NgramVocabulary):
        rows = [vectorize(s.text, vocab, normalize) for s in sentences]
    else:
        rows = [vectorize_bow(s.text, vocab, normalize) for s in sentences]
    out = np.zeros((len(rows), vocab.size))
    for r, fv in enumerate(rows):
        for index, value in fv.entries.items():
            out[r, index] = value
    return out


def label_indices(sentences: Iterable[Sentence]) -> np.ndarray:
    return np.array([LABEL_INDEX[s.label] for s in sentences], dtype=np.int64)
