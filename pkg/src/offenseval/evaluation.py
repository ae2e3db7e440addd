"""Accuracy, per-class precision/recall/F1, macro-F1 and confusion matrices."""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple
    counts: np.ndarray  # [gold, predicted]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class MetricsReport:
    classes: tuple
    accuracy: float
    precision: dict
    recall: dict
    f1: dict
    macro_f1: float
    support: dict

    def table(self) -> str:
        width = max(8, *(len(c) for c in self.classes))
        lines = [f"{'class':<{width}}  precision  recall  f1      support"]
        for c in self.classes:
            lines.append(f"{c:<{width}}  {self.precision[c]:9.4f}  {self.recall[c]:6.4f}"
                         f"  {self.f1[c]:6.4f}  {self.support[c]:7d}")
        lines.append(f"{'accuracy':<{width}}  {self.accuracy:.4f}")
        lines.append(f"{'macro-F1':<{width}}  {self.macro_f1:.4f}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("class,precision,recall,f1,support\n")
        for c in self.classes:
            buf.write(f"{c},{self.precision[c]!r},{self.recall[c]!r},{self.f1[c]!r},{self.support[c]}\n")
        buf.write(f"accuracy,,,{self.accuracy!r},{sum(self.support.values())}\n")
        buf.write(f"macro_f1,,,{self.macro_f1!r},{sum(self.support.values())}\n")
        return buf.getvalue()


def confusion(gold, pred, classes) -> ConfusionMatrix:
    gold, pred = list(gold), list(pred)
    if len(gold) != len(pred):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(pred)} predicted")
    classes = tuple(classes)
    pos = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(gold, pred):
        if g not in pos or p not in pos:
            bad = g if g not in pos else p
            raise ValueError(f"unknown label {bad!r}; expected one of {classes}")
        counts[pos[g], pos[p]] += 1
    return ConfusionMatrix(classes, counts)


def _ratio(num, den):
    return num / den if den else 0.0


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Scores from a confusion matrix; any zero denominator gives 0."""
    total = cm.total
    if total == 0:
        raise ValueError("cannot score an empty confusion matrix")
    precision, recall, f1, support = {}, {}, {}, {}
    exact = Fraction(0)
    for i, c in enumerate(cm.classes):
        tp = int(cm.counts[i, i])
        predicted = int(cm.counts[:, i].sum())
        actual = int(cm.counts[i, :].sum())
        precision[c], recall[c] = _ratio(tp, predicted), _ratio(tp, actual)
        # 2PR / (P + R) == 2TP / (predicted + actual); rationals keep macro-F1 exactly rounded
        f = Fraction(2 * tp, predicted + actual) if tp else Fraction(0)
        exact += f
        f1[c] = float(f)
        support[c] = actual
    macro = float(exact / len(cm.classes))
    accuracy = int(np.trace(cm.counts)) / total
    return MetricsReport(cm.classes, accuracy, precision, recall, f1, macro, support)


def evaluate(gold, pred, classes) -> MetricsReport:
    return metrics(confusion(gold, pred, classes))
