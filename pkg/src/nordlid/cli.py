"""Batch command-line frontend for the whole pipeline.

Subcommands: ``corpus clean|split|tatoeba``, ``train``, ``predict``,
``eval``, ``reduce``, ``sweep``, ``profile``. Every command is
reproducible: identical inputs, flags, and seed give identical output
bytes. Exit codes: 0 success, 2 input error, 3 configuration error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

import numpy as np

from . import classifiers, embeddings, evaluation, neural, reduce
from .corpus import (
    ALPHABET,
    DEFAULT_ABBREVIATIONS,
    LABELS,
    Dataset,
    ingest_raw_dir,
    ingest_tatoeba,
    load_abbreviations,
    load_dataset_tsv,
    pools_from_dataset,
    save_dataset_tsv,
    stratified_sample,
    train_test_split,
)
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    EmptyVocabulary,
    IncompatibleSpec,
    InsufficientData,
    InvalidRatio,
    InvalidUtf8,
    MalformedRow,
    MissingLabelFile,
    ModelFormatError,
    NegativeCount,
    NordlidError,
    PerplexityInfeasible,
    PredictionError,
    SequenceTooShort,
    TooFewPoints,
)
from .features import (
    build_ngram_vocab,
    build_word_vocab,
    char_frequency_profile,
    count_matrix,
    label_indices,
)
from .modelio import (
    PipelineModel,
    QueryEmbedding,
    VectorFeature,
    check_compatibility,
    load_model,
    save_model,
)

INPUT_ERRORS = (
    MissingLabelFile,
    InvalidUtf8,
    MalformedRow,
    InsufficientData,
    ModelFormatError,
    PredictionError,
    SequenceTooShort,
    TooFewPoints,
    FileNotFoundError,
)
CONFIG_ERRORS = (
    IncompatibleSpec,
    InvalidRatio,
    EmptyVocabulary,
    DimensionMismatch,
    NegativeCount,
    PerplexityInfeasible,
    ValueError,
)
NUMERICAL_ERRORS = (ConvergenceFailure,)


def _print_counts(dataset: Dataset) -> None:
    for code, count in dataset.per_class_count.items():
        print(f"{code}\t{count}")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


# ---------------------------------------------------------------------------
# corpus subcommands
# ---------------------------------------------------------------------------


def cmd_corpus_clean(args) -> int:
    abbreviations = (
        load_abbreviations(args.abbreviations)
        if args.abbreviations
        else DEFAULT_ABBREVIATIONS
    )
    pools = ingest_raw_dir(args.raw_dir, abbreviations)
    if args.per_class is not None:
        dataset = stratified_sample(pools, args.per_class, args.seed)
    else:
        sentences = [s for code in LABELS for s in pools[code]]
        dataset = Dataset(tuple(sentences), seed=args.seed)
    save_dataset_tsv(dataset, args.out)
    _print_counts(dataset)
    return 0


def cmd_corpus_split(args) -> int:
    dataset = load_dataset_tsv(args.input)
    train, test = train_test_split(dataset, args.ratio, args.seed)
    save_dataset_tsv(train, args.train_out)
    save_dataset_tsv(test, args.test_out)
    print(f"train\t{len(train)}")
    print(f"test\t{len(test)}")
    return 0


def cmd_corpus_tatoeba(args) -> int:
    pools, skipped = ingest_tatoeba(args.input)
    sentences = [s for code in LABELS for s in pools[code]]
    dataset = Dataset(tuple(sentences))
    save_dataset_tsv(dataset, args.out)
    _print_counts(dataset)
    print(f"skipped\t{skipped}")
    return 0


# ---------------------------------------------------------------------------
# train / predict / eval
# ---------------------------------------------------------------------------

_NGRAM_FEATURES = {"char1": 1, "char2": 2, "char3": 3}


def _build_vector_feature(args, dataset: Dataset, model_kind: str) -> VectorFeature:
    normalize = model_kind != "nb" and not args.raw_counts
    if args.features in _NGRAM_FEATURES:
        vocab = build_ngram_vocab(dataset, _NGRAM_FEATURES[args.features], cap=args.cap)
        return VectorFeature(args.features, normalize, ngram_vocab=vocab)
    if args.features == "bow":
        vocab = build_word_vocab(dataset, cap=args.cap)
        return VectorFeature(args.features, normalize, word_vocab=vocab)
    cfg = embeddings.EmbeddingConfig(
        mode=args.features,
        dim=args.dim,
        window=args.window,
        negatives=args.negatives,
        epochs=args.embed_epochs,
        learning_rate=args.embed_lr,
        seed=args.seed,
    )
    trainer = embeddings.train_cbow if args.features == "cbow" else embeddings.train_skipgram
    matrix = trainer(dataset, cfg)
    return VectorFeature(args.features, False, embedding=QueryEmbedding.from_matrix(matrix))


def _design_matrix(feature: VectorFeature, dataset: Dataset) -> np.ndarray:
    if feature.ngram_vocab is not None:
        return count_matrix(dataset, feature.ngram_vocab, feature.normalize)
    if feature.word_vocab is not None:
        return count_matrix(dataset, feature.word_vocab, feature.normalize)
    return np.stack([feature.transform(s.text) for s in dataset])


def cmd_train(args) -> int:
    check_compatibility(args.model, args.features)
    dataset = load_dataset_tsv(args.train)
    if args.model == "cnn":
        cfg = neural.TrainConfig(
            args.lr if args.lr is not None else 0.05,
            args.epochs if args.epochs is not None else 5,
            args.batch_size,
            args.seed,
            args.max_len,
        )
        model = neural.cnn_train(
            dataset.sentences,
            cfg,
            gram=_NGRAM_FEATURES[args.features],
            kernel=args.kernel,
            filters=args.filters,
            embed_dim=args.embed_dim,
            vocab_cap=args.cap,
        )
        pipeline = PipelineModel("cnn", args.seed, model)
    elif args.model == "fasttext":
        cfg = embeddings.SupervisedConfig(
            dim=args.dim,
            epochs=args.epochs if args.epochs is not None else 5,
            learning_rate=args.lr if args.lr is not None else 0.1,
            seed=args.seed,
        )
        mode = "words" if args.features == "bow" else "char_ngrams"
        model = embeddings.train_fasttext_supervised(dataset, cfg, feature_mode=mode)
        pipeline = PipelineModel("fasttext", args.seed, model)
    else:
        feature = _build_vector_feature(args, dataset, args.model)
        x = _design_matrix(feature, dataset)
        y = label_indices(dataset)
        if args.model == "knn":
            model = classifiers.train_knn(x, y, k=args.k)
        elif args.model == "logreg":
            model = classifiers.train_logreg(
                x, y,
                learning_rate=args.lr if args.lr is not None else 0.5,
                epochs=args.epochs if args.epochs is not None else 500,
            )
        elif args.model == "nb":
            model = classifiers.train_nb(x, y, alpha=args.alpha)
        elif args.model == "svm":
            model = classifiers.train_svm(
                x, y,
                lam=args.lam,
                epochs=args.epochs if args.epochs is not None else 10,
                seed=args.seed,
            )
        else:  # mlp
            cfg = neural.TrainConfig(
                args.lr if args.lr is not None else 0.1,
                args.epochs if args.epochs is not None else 10,
                args.batch_size,
                args.seed,
                args.max_len,
            )
            model = neural.mlp_train(x, y, hidden=(args.hidden,), cfg=cfg)
        pipeline = PipelineModel(args.model, args.seed, model, feature)
    save_model(pipeline, args.out)
    print(f"trained {args.model} on {len(dataset)} sentences -> {args.out}")
    return 0


def cmd_predict(args) -> int:
    pipeline = load_model(args.model_file)
    if args.input == "-":
        lines = sys.stdin.read().splitlines()
    else:
        lines = Path(args.input).read_text(encoding="utf-8").splitlines()
    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8", newline="\n")
    try:
        for line in lines:
            out.write(pipeline.predict(line) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cached_predictions(pipeline: PipelineModel, dataset: Dataset) -> list[str]:
    predictions = []
    for index, sentence in enumerate(dataset):
        try:
            predictions.append(pipeline.predict(sentence.text))
        except Exception as exc:
            raise PredictionError(index) from exc
    return predictions


def cmd_eval(args) -> int:
    pipeline = load_model(args.model_file)
    dataset = load_dataset_tsv(args.test)
    predictions = _cached_predictions(pipeline, dataset)
    replay = iter(predictions)
    report = evaluation.evaluate(
        lambda _: next(replay), dataset,
        dataset_id=str(args.test), model_id=str(args.model_file),
    )
    replay = iter(predictions)
    lengths = evaluation.length_failure_analysis(lambda _: next(replay), dataset)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "confusion.csv").write_text(
        evaluation.confusion_csv(report, iso_codes=args.iso_codes),
        encoding="utf-8", newline="\n",
    )
    (out_dir / "report.txt").write_text(
        evaluation.report_text(report, lengths, iso_codes=args.iso_codes),
        encoding="utf-8", newline="\n",
    )
    print(f"accuracy\t{_fmt(report.accuracy)}")
    return 0


# ---------------------------------------------------------------------------
# reduce / sweep / profile
# ---------------------------------------------------------------------------


def cmd_reduce(args) -> int:
    dataset = load_dataset_tsv(args.input)
    sentences = list(dataset)
    if args.max_points is not None and len(sentences) > args.max_points:
        rng = random.Random(args.seed)
        sentences = rng.sample(sentences, args.max_points)
    subset = Dataset(tuple(sentences), seed=args.seed)
    feature = _build_vector_feature(args, subset, "reduce")
    x = _design_matrix(feature, subset)
    if args.method == "pca":
        coords = reduce.pca_project(x, m=2)
    else:
        affinities, _ = reduce.tsne_affinities(x, perplexity=args.perplexity)
        coords = reduce.tsne_optimize(
            affinities, iterations=args.iterations, seed=args.seed
        ).positions
    labels = [s.label for s in subset]
    Path(args.out).write_text(
        reduce.format_projection(labels, coords), encoding="utf-8", newline="\n"
    )
    print(f"projected {len(labels)} points -> {args.out}")
    return 0


def cmd_sweep(args) -> int:
    train = load_dataset_tsv(args.train)
    test = load_dataset_tsv(args.test)
    cfg = neural.TrainConfig(
        args.lr if args.lr is not None else 0.05,
        args.epochs if args.epochs is not None else 5,
        args.batch_size,
        args.seed,
        args.max_len,
    )
    grams = [int(g) for g in args.grams.split(",")]
    kernels = [int(k) for k in args.kernels.split(",")]
    result = neural.kernel_size_sweep(
        train.sentences, test.sentences, grams, kernels, cfg,
        filters=args.filters, embed_dim=args.embed_dim,
    )
    Path(args.out).write_text(result.to_csv(), encoding="utf-8", newline="\n")
    for (gram, kernel), accuracy in sorted(result.entries.items()):
        print(f"gram={gram}\tkernel={kernel}\taccuracy={_fmt(accuracy)}")
    return 0


def cmd_profile(args) -> int:
    dataset = load_dataset_tsv(args.input)
    profile = char_frequency_profile(pools_from_dataset(dataset))
    table = profile.normalized if args.normalized else profile.raw
    lines = ["char," + ",".join(LABELS)]
    for c, ch in enumerate(ALPHABET):
        name = "<space>" if ch == " " else ch
        values = ",".join(
            _fmt(table[k, c]) if args.normalized else str(int(table[k, c]))
            for k in range(len(LABELS))
        )
        lines.append(f"{name},{values}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    print(f"profiled {len(dataset)} sentences -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--lr", type=float, default=None, help="learning rate (per-model default)")
    p.add_argument("--epochs", type=int, default=None, help="epochs (per-model default)")
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--cap", type=int, default=None, help="vocabulary cap (top-K by frequency)")
    p.add_argument("--k", type=int, default=3, help="KNN neighbor count")
    p.add_argument("--alpha", type=float, default=1.0, help="NB Laplace smoothing")
    p.add_argument("--lam", type=float, default=1e-4, help="SVM regularization")
    p.add_argument("--hidden", type=int, default=128, help="MLP hidden width")
    p.add_argument("--kernel", type=int, default=3, help="CNN filter width")
    p.add_argument("--filters", type=int, default=64, help="CNN filter count")
    p.add_argument("--embed-dim", type=int, default=16, help="CNN embedding size")
    p.add_argument("--max-len", type=int, default=128, help="CNN max token sequence length")
    p.add_argument("--dim", type=int, default=100, help="embedding dimension (cbow/skipgram/fasttext)")
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--embed-epochs", type=int, default=5)
    p.add_argument("--embed-lr", type=float, default=0.05)
    p.add_argument("--raw-counts", action="store_true", help="skip L1 normalization of count features")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nordlid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = sub.add_parser("corpus", help="dataset preparation")
    corpus_sub = corpus.add_subparsers(dest="corpus_command", required=True)

    clean = corpus_sub.add_parser("clean", help="ingest raw per-language text files")
    clean.add_argument("--raw-dir", required=True)
    clean.add_argument("--out", required=True)
    clean.add_argument("--per-class", type=int, default=None)
    clean.add_argument("--seed", type=int, default=42)
    clean.add_argument("--abbreviations", default=None)
    clean.set_defaults(func=cmd_corpus_clean)

    split = corpus_sub.add_parser("split", help="stratified train/test split")
    split.add_argument("--input", required=True)
    split.add_argument("--train-out", required=True)
    split.add_argument("--test-out", required=True)
    split.add_argument("--ratio", type=float, default=0.8)
    split.add_argument("--seed", type=int, default=42)
    split.set_defaults(func=cmd_corpus_split)

    tatoeba = corpus_sub.add_parser("tatoeba", help="ingest a Tatoeba-style TSV")
    tatoeba.add_argument("--input", required=True)
    tatoeba.add_argument("--out", required=True)
    tatoeba.set_defaults(func=cmd_corpus_tatoeba)

    train = sub.add_parser("train", help="train a classifier")
    train.add_argument("--model", required=True,
                       choices=["knn", "logreg", "nb", "svm", "mlp", "cnn", "fasttext"])
    train.add_argument("--features", required=True,
                       choices=["char1", "char2", "char3", "bow", "cbow", "skipgram", "char1_5"])
    train.add_argument("--train", required=True)
    train.add_argument("--out", required=True)
    _add_train_flags(train)
    train.set_defaults(func=cmd_train)

    predict = sub.add_parser("predict", help="one label per input line")
    predict.add_argument("--model-file", required=True)
    predict.add_argument("--input", default="-", help="file path or - for stdin")
    predict.add_argument("--out", default="-", help="file path or - for stdout")
    predict.set_defaults(func=cmd_predict)

    evalp = sub.add_parser("eval", help="confusion matrix and report")
    evalp.add_argument("--model-file", required=True)
    evalp.add_argument("--test", required=True)
    evalp.add_argument("--out-dir", required=True)
    evalp.add_argument("--iso-codes", action="store_true",
                       help="emit ISO 639-1 codes in reports (dk -> da)")
    evalp.set_defaults(func=cmd_eval)

    reducep = sub.add_parser("reduce", help="2-D projection of a dataset")
    reducep.add_argument("--method", required=True, choices=["pca", "tsne"])
    reducep.add_argument("--input", required=True)
    reducep.add_argument("--out", required=True)
    reducep.add_argument("--max-points", type=int, default=1000)
    reducep.add_argument("--perplexity", type=float, default=30.0)
    reducep.add_argument("--iterations", type=int, default=1000)
    reducep.add_argument("--features", default="char2",
                         choices=["char1", "char2", "char3", "bow", "cbow", "skipgram"])
    _add_train_flags(reducep)
    reducep.set_defaults(func=cmd_reduce)

    sweep = sub.add_parser("sweep", help="CNN kernel-size sweep")
    sweep.add_argument("--train", required=True)
    sweep.add_argument("--test", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--grams", default="1,2,3")
    sweep.add_argument("--kernels", default="1,2,3,4,5,6,7,8,9,10,11")
    sweep.add_argument("--seed", type=int, default=42)
    sweep.add_argument("--lr", type=float, default=None)
    sweep.add_argument("--epochs", type=int, default=None)
    sweep.add_argument("--batch-size", type=int, default=32)
    sweep.add_argument("--filters", type=int, default=64)
    sweep.add_argument("--embed-dim", type=int, default=16)
    sweep.add_argument("--max-len", type=int, default=128)
    sweep.set_defaults(func=cmd_sweep)

    profile = sub.add_parser("profile", help="per-language character frequencies")
    profile.add_argument("--input", required=True)
    profile.add_argument("--out", required=True)
    profile.add_argument("--normalized", action="store_true")
    profile.set_defaults(func=cmd_profile)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NordlidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
