"""Confusion matrices, accuracy metrics, model selection and bulk tagging."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Sample

UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: list[str]
    counts: np.ndarray  # rows gold, columns predicted

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def error_pairs(self) -> list[tuple[str, str, int]]:
        """Off-diagonal (gold, predicted, count) triples, most frequent first."""
        pairs = [
            (self.classes[g], self.classes[p], int(self.counts[g, p]))
            for g in range(len(self.classes))
            for p in range(len(self.classes))
            if g != p and self.counts[g, p] > 0
        ]
        return sorted(pairs, key=lambda t: (-t[2], t[0], t[1]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gold\\predicted", *self.classes])
        for c, row in zip(self.classes, self.counts):
            w.writerow([c, *row.tolist()])
        return buf.getvalue()


def confusion_matrix(gold: Sequence, pred: Sequence, classes: Iterable | None = None) -> ConfusionMatrix:
    """Counts over the sorted union of observed labels and ``classes``."""
    if len(gold) != len(pred):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(pred)} predicted labels")
    gold = [str(g) for g in gold]
    pred = [str(p) for p in pred]
    labels = sorted(set(gold) | set(pred) | {str(c) for c in classes or ()})
    index = {c: i for i, c in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(labels, counts)


@dataclass(frozen=True)
class MetricsReport:
    overall_accuracy: float
    avg_class_accuracy: float
    per_class_accuracy: dict[str, float]
    n_correct: int
    n_total: int
    averaged_classes: list[str] = field(default_factory=list)

    def table(self) -> str:
        lines = [f"{'class':<10} {'acc %':>7}"]
        for c, a in self.per_class_accuracy.items():
            mark = "" if c in self.averaged_classes else "  (not averaged)"
            lines.append(f"{c:<10} {100 * a:>7.2f}{mark}")
        lines.append(f"{'overall':<10} {100 * self.overall_accuracy:>7.2f}  ({self.n_correct}/{self.n_total})")
        lines.append(f"{'avg class':<10} {100 * self.avg_class_accuracy:>7.2f}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "overall_accuracy": self.overall_accuracy,
            "avg_class_accuracy": self.avg_class_accuracy,
            "per_class_accuracy": self.per_class_accuracy,
            "n_correct": self.n_correct,
            "n_total": self.n_total,
            "averaged_classes": self.averaged_classes,
        }


def metrics(cm: ConfusionMatrix, classes: Iterable | None = None) -> MetricsReport:
    """Overall accuracy and per-class recall.

    Both figures run over classes with at least one gold sample. Passing
    ``classes`` (usually the model's label set) further restricts them: gold
    samples of a class the model never saw are reported per class but left
    out of the overall and average figures.
    """
    if cm.total < 1:
        raise ValueError("empty confusion matrix")
    rows = cm.row_sums()
    diag = np.diag(cm.counts)
    allowed = None if classes is None else {str(c) for c in classes}
    per_class, averaged = {}, []
    n_correct = n_total = 0
    for i, c in enumerate(cm.classes):
        if rows[i] == 0:
            continue
        per_class[c] = float(diag[i] / rows[i])
        if allowed is None or c in allowed:
            averaged.append(c)
            n_correct += int(diag[i])
            n_total += int(rows[i])
    if n_total == 0:
        raise ValueError("no gold samples belong to the evaluated classes")
    avg = float(np.mean([per_class[c] for c in averaged]))
    return MetricsReport(n_correct / n_total, avg, per_class, n_correct, n_total, averaged)


def evaluate(model, samples: Sequence[Sample]) -> tuple[ConfusionMatrix, MetricsReport]:
    pred = model.predict_labels(model.featurize([s.text for s in samples]))
    cm = confusion_matrix([s.tag.value for s in samples], pred, model.classes)
    return cm, metrics(cm, model.classes)


def select_best(candidates: Sequence[tuple[str, object]], valid: Sequence[Sample]) -> str:
    """Id of the candidate with the best validation accuracy (earliest on ties)."""
    if not candidates:
        raise ValueError("no candidate models")
    if not valid:
        raise ValueError("empty validation set")
    best_id, best_acc = None, -1.0
    for model_id, model in candidates:
        acc = evaluate(model, valid)[1].overall_accuracy
        if acc > best_acc:
            best_id, best_acc = model_id, acc
    return best_id


@dataclass
class BulkReport:
    counts: dict[str, int]
    mean_confidence: float
    records: list[tuple[str, str, float]] = field(repr=False)

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def percentages(self) -> dict[str, float]:
        if not self.records:
            return {c: 0.0 for c in self.counts}
        return {c: 100.0 * n / self.total for c, n in self.counts.items()}

    def share(self, labels: Iterable[str]) -> float:
        """Combined percentage of the given labels."""
        pct = self.percentages
        return sum(pct.get(l, 0.0) for l in labels)

    def summary(self) -> str:
        pct = self.percentages
        lines = [f"{c:<10} {n:>8} {pct[c]:>7.2f}%" for c, n in self.counts.items()]
        lines.append(f"lines {self.total}, mean confidence {self.mean_confidence:.4f}")
        return "\n".join(lines)


def bulk_classify(model, lines: Sequence[str], min_confidence: float | None = None,
                  batch_size: int = 4096) -> BulkReport:
    """Tag every line; below ``min_confidence`` the label becomes UNKNOWN."""
    records = []
    for start in range(0, len(lines), batch_size):
        batch = list(lines[start : start + batch_size])
        for text, p in zip(batch, model.predict_texts(batch)):
            label = p.label
            if min_confidence is not None and p.confidence < min_confidence:
                label = UNKNOWN
            records.append((text, label, p.confidence))
    tally = Counter(r[1] for r in records)
    labels = list(model.classes) + ([UNKNOWN] if tally.get(UNKNOWN) else [])
    counts = {c: tally.get(c, 0) for c in labels}
    mean_conf = float(np.mean([r[2] for r in records])) if records else 0.0
    return BulkReport(counts, mean_conf, records)


def accuracy_range(per_model: Mapping[str, Mapping[str, float]]) -> dict[str, tuple[float, float, float]]:
    """Per class: (best, worst, best - worst) over models."""
    if not per_model:
        raise ValueError("need at least one model")
    classes: list[str] = []
    for accs in per_model.values():
        for c in accs:
            if c not in classes:
                classes.append(c)
    out = {}
    for c in classes:
        vals = [accs[c] for accs in per_model.values() if c in accs]
        out[c] = (max(vals), min(vals), max(vals) - min(vals))
    return out


def evaluation_document(model_id: str, feature_config, report: MetricsReport, cm: ConfusionMatrix) -> str:
    """One machine-readable JSON document per evaluation."""
    return json.dumps(
        {
            "model_id": model_id,
            "features": feature_config,
            "metrics": report.to_dict(),
            "confusion": {"classes": cm.classes, "counts": cm.counts.tolist()},
            "error_pairs": [list(p) for p in cm.error_pairs()],
        },
        ensure_ascii=False,
        indent=2,
    )
