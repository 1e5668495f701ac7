"""Classification evaluation: accuracy, confusion matrices, one-vs-rest
precision-recall curves and average precision.

Class order everywhere is the manifest's lexicographic vocabulary order;
figures published elsewhere may number classes differently.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from stylesearch.errors import ContractError


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # rows = true class, columns = predicted class
    labels: list

    @property
    def n_classes(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())

    def accuracy(self) -> float:
        if self.total == 0:
            raise ContractError("confusion matrix is empty")
        return float(np.trace(self.counts)) / self.total


@dataclass
class PRCurve:
    recalls: np.ndarray
    precisions: np.ndarray
    thresholds: np.ndarray
    average_precision: float


def confusion(truth, predicted, n_classes, labels=None) -> ConfusionMatrix:
    truth = np.asarray(truth, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if truth.shape != predicted.shape or truth.ndim != 1:
        raise ContractError(
            f"truth and predictions must be equal-length 1-d, got {truth.shape} and {predicted.shape}"
        )
    if truth.size and (truth.min() < 0 or truth.max() >= n_classes
                       or predicted.min() < 0 or predicted.max() >= n_classes):
        raise ContractError(f"class index out of range for n_classes={n_classes}")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (truth, predicted), 1)
    if labels is None:
        labels = [str(i) for i in range(n_classes)]
    return ConfusionMatrix(counts, list(labels))


def normalize_rows(matrix) -> np.ndarray:
    """Each row divided by its sum; all-zero rows stay zero."""
    matrix = np.asarray(matrix, dtype=np.float64)
    sums = matrix.sum(axis=1, keepdims=True)
    return np.divide(matrix, sums, out=np.zeros_like(matrix, dtype=np.float64), where=sums != 0)


def accuracy(truth, predicted) -> float:
    truth = np.asarray(truth)
    predicted = np.asarray(predicted)
    if truth.size == 0:
        raise ContractError("accuracy of an empty sample is undefined")
    if truth.shape != predicted.shape:
        raise ContractError(f"length mismatch: {truth.shape} vs {predicted.shape}")
    return float(np.mean(truth == predicted))


def pr_curve(scores, truth) -> PRCurve:
    """One-vs-rest precision-recall curve for one class.

    Thresholds sweep the distinct scores in descending order; at each
    threshold every sample scoring >= it counts as predicted-positive.
    Average precision is the step-wise area sum((r_i - r_{i-1}) * p_i).
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    if scores.shape != truth.shape or scores.ndim != 1:
        raise ContractError(f"scores/truth must be equal-length 1-d, got {scores.shape} vs {truth.shape}")
    positives = int(np.sum(truth == 1))
    if positives == 0:
        raise ContractError("precision-recall needs at least one positive sample")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_truth = (truth[order] == 1).astype(np.int64)
    tp = np.cumsum(sorted_truth)
    predicted_pos = np.arange(1, len(scores) + 1)
    # keep only the last index of each run of equal scores: that is the
    # point where every sample >= threshold has been included
    distinct = np.nonzero(np.diff(sorted_scores, append=-np.inf))[0]
    precisions = tp[distinct] / predicted_pos[distinct]
    recalls = tp[distinct] / positives
    thresholds = sorted_scores[distinct]
    prev = np.concatenate([[0.0], recalls[:-1]])
    ap = float(np.sum((recalls - prev) * precisions))
    return PRCurve(recalls, precisions, thresholds, ap)


def evaluation_report(truth, predicted, labels, per_class_scores=None) -> dict:
    """JSON-ready report: accuracy, normalized confusion matrix, and (when
    probability scores are supplied) per-class average precision."""
    n = len(labels)
    matrix = confusion(truth, predicted, n, labels)
    report = {
        "n_samples": matrix.total,
        "accuracy": matrix.accuracy(),
        "classes": list(labels),
        "confusion_counts": matrix.counts.tolist(),
        "confusion_normalized": normalize_rows(matrix.counts).tolist(),
    }
    if per_class_scores is not None:
        truth_arr = np.asarray(truth)
        ap = {}
        for i, label in enumerate(labels):
            binary = (truth_arr == i).astype(int)
            if binary.sum() == 0:
                ap[label] = None
                continue
            ap[label] = pr_curve(np.asarray(per_class_scores)[:, i], binary).average_precision
        report["average_precision"] = ap
    return report


def save_report(report: dict, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=1)


def write_matrix_csv(matrix, labels, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(labels))
        for label, row in zip(labels, np.asarray(matrix).tolist()):
            writer.writerow([label] + row)


def format_matrix_grid(matrix, labels, cell_width=None) -> str:
    """Aligned text grid of a (normalized) confusion matrix."""
    labels = list(labels)
    if not labels:
        return ""
    matrix = np.asarray(matrix, dtype=np.float64)
    name_width = max(len(l) for l in labels)
    cells = [[f"{v:.2f}" for v in row] for row in matrix]
    width = cell_width or max([len(c) for row in cells for c in row] + [len(l) for l in labels])
    lines = [" " * name_width + " " + " ".join(l.rjust(width) for l in labels)]
    for label, row in zip(labels, cells):
        lines.append(label.rjust(name_width) + " " + " ".join(c.rjust(width) for c in row))
    return "\n".join(lines)
