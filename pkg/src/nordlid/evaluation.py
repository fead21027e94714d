"""Accuracy, confusion matrices, length statistics, and cross-domain deltas."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .corpus import ISO_CODES, LABEL_INDEX, LABELS, Dataset
from .errors import PredictionError

PredictFn = Callable[[str], str]


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    confusion: np.ndarray  # 6x6 ints; rows true label, columns predicted
    precision: dict[str, float]
    recall: dict[str, float]
    dataset_id: str = ""
    model_id: str = ""

    @property
    def total(self) -> int:
        return int(self.confusion.sum())


@dataclass(frozen=True)
class GroupStats:
    mean: float
    std: float  # population standard deviation
    count: int


@dataclass(frozen=True)
class LengthStats:
    """Sentence-length statistics split by prediction correctness.

    A group with no members is reported as None rather than NaN.
    """

    correct: GroupStats | None
    misclassified: GroupStats | None


def _group_stats(lengths: list[int]) -> GroupStats | None:
    if not lengths:
        return None
    arr = np.array(lengths, dtype=np.float64)
    return GroupStats(float(arr.mean()), float(arr.std()), len(lengths))


def evaluate(
    predict_fn: PredictFn,
    test: Dataset,
    dataset_id: str = "",
    model_id: str = "",
) -> EvalReport:
    """Predict every sentence once and tabulate the confusion matrix."""
    confusion = np.zeros((len(LABELS), len(LABELS)), dtype=np.int64)
    for index, sentence in enumerate(test):
        try:
            predicted = predict_fn(sentence.text)
        except Exception as exc:
            raise PredictionError(index) from exc
        confusion[LABEL_INDEX[sentence.label], LABEL_INDEX[predicted]] += 1
    total = int(confusion.sum())
    accuracy = float(np.trace(confusion)) / total if total else 0.0
    row_sums = confusion.sum(axis=1)
    col_sums = confusion.sum(axis=0)
    diag = np.diag(confusion)
    precision = {
        code: float(diag[k]) / col_sums[k] if col_sums[k] else 0.0
        for k, code in enumerate(LABELS)
    }
    recall = {
        code: float(diag[k]) / row_sums[k] if row_sums[k] else 0.0
        for k, code in enumerate(LABELS)
    }
    return EvalReport(accuracy, confusion, precision, recall, dataset_id, model_id)


def length_failure_analysis(predict_fn: PredictFn, test: Dataset) -> LengthStats:
    """Mean/std of cleaned-character length for correct vs wrong predictions."""
    correct: list[int] = []
    wrong: list[int] = []
    for index, sentence in enumerate(test):
        try:
            predicted = predict_fn(sentence.text)
        except Exception as exc:
            raise PredictionError(index) from exc
        (correct if predicted == sentence.label else wrong).append(sentence.length)
    return LengthStats(_group_stats(correct), _group_stats(wrong))


def cross_domain_eval(
    predict_fn: PredictFn,
    in_domain_test: Dataset,
    out_domain_test: Dataset,
    model_id: str = "",
) -> tuple[EvalReport, EvalReport, float]:
    """Evaluate on both domains; the delta is in-domain minus out-of-domain."""
    in_report = evaluate(predict_fn, in_domain_test, "in-domain", model_id)
    out_report = evaluate(predict_fn, out_domain_test, "out-of-domain", model_id)
    return in_report, out_report, in_report.accuracy - out_report.accuracy


def confusion_csv(report: EvalReport, iso_codes: bool = False) -> str:
    """CSV with header ``true\\pred,dk,sv,nn,nb,fo,is`` and six count rows."""
    names = [ISO_CODES[c] for c in LABELS] if iso_codes else list(LABELS)
    lines = ["true\\pred," + ",".join(names)]
    for k, name in enumerate(names):
        lines.append(name + "," + ",".join(str(int(v)) for v in report.confusion[k]))
    return "\n".join(lines) + "\n"


def report_text(
    report: EvalReport,
    lengths: LengthStats | None = None,
    iso_codes: bool = False,
) -> str:
    """Human-readable report block; floats carry 17 significant digits."""

    def name(code: str) -> str:
        return ISO_CODES[code] if iso_codes else code

    lines = [
        f"model: {report.model_id}",
        f"dataset: {report.dataset_id}",
        f"sentences: {report.total}",
        f"accuracy: {report.accuracy:.17g}",
    ]
    for code in LABELS:
        lines.append(
            f"{name(code)}: precision={report.precision[code]:.17g} "
            f"recall={report.recall[code]:.17g}"
        )
    if lengths is not None:
        for tag, group in (("correct", lengths.correct), ("misclassified", lengths.misclassified)):
            if group is None:
                lines.append(f"length[{tag}]: absent")
            else:
                lines.append(
                    f"length[{tag}]: mean={group.mean:.17g} "
                    f"std={group.std:.17g} count={group.count}"
                )
    lines.append("note: std is the population standard deviation")
    return "\n".join(lines) + "\n"
