"""Seeded synthetic six-language corpus built from character Markov chains.

Each artificial language is a first-order chain over the 40-character
alphabet, restricted to a realistic per-language character inventory
(e.g. only the Icelandic chain may emit the thorn). Languages come in
related groups that share most of their transition mass, mirroring how
the real Danish/Bokmål/Nynorsk and Faroese/Icelandic pairs confuse
classifiers. Two "genres" are available: an encyclopedic one with long
sentences and a conversational one with short sentences, a larger
shared-transition component, and more language-neutral filler words
(the analogue of names and foreign vocabulary).

Everything is a pure function of the seeds, so corpora are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import ALPHABET, LABELS, Sentence

_SPACE = ALPHABET.index(" ")
_LETTERS = list(range(26))


def _indices(extra: str) -> list[int]:
    return _LETTERS + [ALPHABET.index(c) for c in extra]

_CHARSETS = {
    "dk": _indices("æøåé"),
    "nb": _indices("æøåé"),
    "nn": _indices("æøåé"),
    "sv": _indices("äöåé"),
    "fo": _indices("áðíóúýæø"),
    "is": _indices("áðéíóúýþæö"),
}

#: Languages inside a group share one base chain and differ only in a
#: handful of boosted transitions (plus their character inventories),
#: mirroring how the real pairs differ in a few spellings.
_GROUP_OF = {"dk": "scandi", "nb": "scandi", "nn": "scandi",
             "fo": "insular", "is": "insular", "sv": "sv"}
#: (boosted transition pairs, boost factor) per language.
_DISTINCT_PAIRS = {
    "dk": (22, 6.0), "nb": (22, 6.0), "nn": (26, 6.0),
    "fo": (22, 6.0), "is": (22, 6.0), "sv": (20, 6.0),
}

#: Probability of drawing each of the two shared topic chains. Sibling
#: languages skew toward opposite topics, so per-class bigram marginals
#: mix topical and linguistic signal the way encyclopedic corpora do.
_TOPIC_PROFILE = {
    "dk": (0.75, 0.25), "nb": (0.25, 0.75), "nn": (0.5, 0.5),
    "fo": (0.7, 0.3), "is": (0.3, 0.7), "sv": (0.5, 0.5),
}


@dataclass(frozen=True)
class SynthConfig:
    chain_seed: int = 7
    repeat_prob: float = 0.3  # chance a word repeats an earlier word (burstiness)
    topic_prob: float = 0.45  # chance a word comes from the sentence's topic chain
    shared_mix: dict = None  # genre -> weight of the genre-shared chain
    noise_prob: dict = None  # genre -> probability a word is neutral filler
    length_range: dict = None  # genre -> (min, max) target sentence chars

    def __post_init__(self):
        object.__setattr__(self, "shared_mix", self.shared_mix or {"wiki": 0.10, "chat": 0.28})
        object.__setattr__(self, "noise_prob", self.noise_prob or {"wiki": 0.18, "chat": 0.30})
        object.__setattr__(
            self, "length_range", self.length_range or {"wiki": (40, 180), "chat": (15, 70)}
        )


def _random_chain(rng: np.random.Generator, allowed: list[int]) -> np.ndarray:
    """Row-stochastic 40x40 chain supported on ``allowed`` plus the space."""
    size = len(ALPHABET)
    chain = np.zeros((size, size))
    support = sorted(set(allowed) | {_SPACE})
    for row in support:
        chain[row, support] = rng.gamma(0.3, size=len(support))
    chain[:, _SPACE] *= 3.0  # keep word lengths short-ish
    chain[_SPACE, _SPACE] = 0.0
    return _normalize_rows(chain)


def _normalize_rows(chain: np.ndarray) -> np.ndarray:
    sums = chain.sum(axis=1, keepdims=True)
    return np.divide(chain, sums, out=np.zeros_like(chain), where=sums > 0)


def _mix(primary: np.ndarray, secondary: np.ndarray, weight: float) -> np.ndarray:
    mixed = (1.0 - weight) * primary + weight * secondary
    mixed[_SPACE, _SPACE] = 0.0
    return _normalize_rows(mixed)


def _distinguish(
    rng: np.random.Generator, base: np.ndarray, allowed: list[int],
    n_pairs: int, boost: float,
) -> np.ndarray:
    """Boost a few transitions of a shared base chain for one language.

    The result agrees with the base everywhere except the boosted pairs,
    so sibling languages differ in a sparse, learnable set of bigrams.
    """
    chain = base.copy()
    support = sorted(set(allowed) | {_SPACE})
    # Characters this language has but the group base lacks need both
    # outgoing rows and incoming column mass, or they would never occur.
    extra = [c for c in support if chain[c].sum() == 0]
    for char in extra:
        chain[char, support] = rng.gamma(0.3, size=len(support))
        chain[char] /= chain[char].sum()
        incoming = rng.gamma(0.15, size=len(support)) * 0.05
        chain[support, char] = np.maximum(chain[support, char], incoming)
    rows = rng.choice([c for c in support if c != _SPACE], size=n_pairs)
    cols = rng.choice(support, size=n_pairs)
    chain[rows, cols] *= boost
    chain[_SPACE, _SPACE] = 0.0
    return _normalize_rows(chain)


def build_chains(cfg: SynthConfig = SynthConfig()) -> dict[str, dict[str, np.ndarray]]:
    """Per-genre, per-language transition matrices, plus the filler chain."""
    rng = np.random.default_rng(cfg.chain_seed)
    group_support = {
        "scandi": _CHARSETS["dk"],
        "insular": sorted(set(_CHARSETS["fo"]) & set(_CHARSETS["is"])),
        "sv": _CHARSETS["sv"],
    }
    group_chains = {name: _random_chain(rng, support) for name, support in group_support.items()}
    languages = {}
    for code in LABELS:
        n_pairs, boost = _DISTINCT_PAIRS[code]
        languages[code] = _distinguish(
            rng, group_chains[_GROUP_OF[code]], _CHARSETS[code], n_pairs, boost
        )
    shared = {genre: _random_chain(rng, _LETTERS) for genre in ("wiki", "chat")}
    noise = _random_chain(rng, _LETTERS)
    topics = [_random_chain(rng, _LETTERS) for _ in range(2)]
    chains: dict[str, dict[str, np.ndarray]] = {}
    for genre in ("wiki", "chat"):
        chains[genre] = {
            code: _mix(languages[code], shared[genre], cfg.shared_mix[genre])
            for code in LABELS
        }
        chains[genre]["_noise"] = noise
        chains[genre]["_topics"] = topics
    return chains


def _sample_word(
    rng: np.random.Generator, cumulative: np.ndarray, max_word: int = 14
) -> list[int]:
    indices = [int(np.searchsorted(cumulative[_SPACE], rng.random()))]
    while len(indices) < max_word:
        nxt = int(np.searchsorted(cumulative[indices[-1]], rng.random()))
        if nxt == _SPACE:
            break
        indices.append(nxt)
    return indices


def _sample_sentence(
    rng: np.random.Generator,
    lang_cumulative: np.ndarray,
    topic_cumulative: np.ndarray,
    noise_cumulative: np.ndarray,
    noise_prob: float,
    topic_prob: float,
    repeat_prob: float,
    target_length: int,
) -> str:
    words: list[str] = []
    length = 0
    while length < target_length:
        if words and rng.random() < repeat_prob:
            word = words[int(rng.integers(len(words)))]  # bursty repetition
        else:
            roll = rng.random()
            if roll < noise_prob:
                source = noise_cumulative
            elif roll < noise_prob + topic_prob:
                source = topic_cumulative
            else:
                source = lang_cumulative
            word = "".join(ALPHABET[i] for i in _sample_word(rng, source))
        words.append(word)
        length += len(word) + 1
    return " ".join(words)


def generate_pools(
    n_per_class: int,
    genre: str = "wiki",
    seed: int = 0,
    cfg: SynthConfig = SynthConfig(),
) -> dict[str, list[Sentence]]:
    """Generate ``n_per_class`` sentences per language for one genre."""
    chains = build_chains(cfg)[genre]
    noise_cumulative = np.cumsum(chains["_noise"], axis=1)
    topic_cumulatives = [np.cumsum(t, axis=1) for t in chains["_topics"]]
    low, high = cfg.length_range[genre]
    rng = np.random.default_rng(seed)
    pools: dict[str, list[Sentence]] = {}
    for code in LABELS:
        cumulative = np.cumsum(chains[code], axis=1)
        topic_weights = _TOPIC_PROFILE[code]
        sentences = []
        for _ in range(n_per_class):
            target = int(rng.integers(low, high + 1))
            topic = int(rng.random() > topic_weights[0])
            text = _sample_sentence(
                rng, cumulative, topic_cumulatives[topic], noise_cumulative,
                cfg.noise_prob[genre], cfg.topic_prob, cfg.repeat_prob, target,
            )
            sentences.append(Sentence(text, code))
        pools[code] = sentences
    return pools
