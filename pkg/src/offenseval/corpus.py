"""OLID-format data loading, per-task views, splits and random-draw balancing."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .rng import SplitMix64

TASK_LABELS = {
    "A": ("NOT", "OFF"),
    "B": ("UNT", "TIN"),
    "C": ("IND", "GRP", "OTH"),
}
OLID_COLUMNS = ("id", "tweet", "subtask_a", "subtask_b", "subtask_c")
ABSENT = "NULL"


class CorpusError(ValueError):
    """Raised for malformed or inconsistent data files."""


@dataclass(frozen=True)
class Example:
    id: str
    text: str
    label_a: str
    label_b: Optional[str] = None
    label_c: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise CorpusError("example id must be nonempty")
        if self.label_a not in TASK_LABELS["A"]:
            raise CorpusError(f"{self.id}: unknown subtask_a label {self.label_a!r}")
        if self.label_b is not None:
            if self.label_b not in TASK_LABELS["B"]:
                raise CorpusError(f"{self.id}: unknown subtask_b label {self.label_b!r}")
            if self.label_a != "OFF":
                raise CorpusError(f"{self.id}: subtask_b label on a NOT example")
        if self.label_c is not None:
            if self.label_c not in TASK_LABELS["C"]:
                raise CorpusError(f"{self.id}: unknown subtask_c label {self.label_c!r}")
            if self.label_b != "TIN":
                raise CorpusError(f"{self.id}: subtask_c label without TIN")

    def label(self, task: str) -> Optional[str]:
        return {"A": self.label_a, "B": self.label_b, "C": self.label_c}[task]


@dataclass(frozen=True)
class Dataset:
    examples: tuple
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        seen = set()
        for ex in self.examples:
            if ex.id in seen:
                raise CorpusError(f"duplicate id {ex.id!r} in {self.source or 'dataset'}")
            seen.add(ex.id)

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)


@dataclass(frozen=True)
class TaskView:
    task: str
    pairs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.task not in TASK_LABELS:
            raise ValueError(f"unknown task {self.task!r}")
        object.__setattr__(self, "pairs", tuple(self.pairs))
        allowed = TASK_LABELS[self.task]
        for _, label in self.pairs:
            if label not in allowed:
                raise CorpusError(f"label {label!r} not valid for task {self.task}")

    @property
    def texts(self) -> list[str]:
        return [t for t, _ in self.pairs]

    @property
    def labels(self) -> list[str]:
        return [y for _, y in self.pairs]

    @property
    def classes(self) -> tuple:
        return TASK_LABELS[self.task]

    def __len__(self):
        return len(self.pairs)


def _read_rows(path):
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such data file: {path}")
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorpusError(f"{path}: missing header line")
    header = lines[0].rstrip("\r").split("\t")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        if not line:
            continue
        rows.append((lineno, line.split("\t")))
    return header, rows


def load_olid_tsv(path) -> Dataset:
    """Load an OLID training-style TSV (``id tweet subtask_a subtask_b subtask_c``)."""
    _, rows = _read_rows(path)
    examples = []
    for lineno, cols in rows:
        if len(cols) != len(OLID_COLUMNS):
            raise CorpusError(f"{path}:{lineno}: expected 5 columns, got {len(cols)}")
        id_, text, a, b, c = cols
        examples.append(Example(
            id=id_,
            text=text,
            label_a=a,
            label_b=None if b == ABSENT else b,
            label_c=None if c == ABSENT else c,
        ))
    return Dataset(examples, source=str(path))


def load_tweets_tsv(path) -> list[tuple[str, str]]:
    """Read ``(id, tweet)`` pairs from any TSV whose header names both columns.

    Works for the OLID training file and the official test files
    (``id<TAB>tweet``).
    """
    header, rows = _read_rows(path)
    try:
        id_col, text_col = header.index("id"), header.index("tweet")
    except ValueError:
        raise CorpusError(f"{path}: header must contain 'id' and 'tweet' columns") from None
    out = []
    for lineno, cols in rows:
        if len(cols) != len(header):
            raise CorpusError(f"{path}:{lineno}: expected {len(header)} columns, got {len(cols)}")
        out.append((cols[id_col], cols[text_col]))
    return out


def read_label_csv(path) -> list[tuple[str, str]]:
    """Read an ``id,label`` CSV without header; duplicate ids are an error."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such label file: {path}")
    out, seen = [], set()
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise CorpusError(f"{path}:{lineno}: expected 'id,label'")
            id_, label = row[0].strip(), row[1].strip()
            if id_ in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate id {id_!r}")
            seen.add(id_)
            out.append((id_, label))
    return out


def write_label_csv(path, pairs) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for id_, label in pairs:
            fh.write(f"{id_},{label}\n")


def split_train_val(d: Dataset, ratio: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle, then the first ``floor(ratio * n)`` examples form the first split."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    n = len(d)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    order = list(range(n))
    SplitMix64(seed).shuffle(order)
    cut = int(Fraction(ratio).limit_denominator(10**9) * n)
    ex = d.examples
    first = Dataset([ex[i] for i in order[:cut]], source=f"{d.source}[split1]")
    second = Dataset([ex[i] for i in order[cut:]], source=f"{d.source}[split2]")
    return first, second


def task_view(d: Dataset, task: str) -> TaskView:
    if task not in TASK_LABELS:
        raise ValueError(f"unknown task {task!r}")
    pairs = [(ex.text, ex.label(task)) for ex in d if ex.label(task) is not None]
    return TaskView(task, pairs)


def random_draw_balance(v: TaskView, seed: int) -> TaskView:
    """Undersample every class to the size of the smallest one.

    Draw order: one generator seeded with ``seed`` shuffles each class's
    example positions in label-set order, keeps the first ``m`` of each,
    then shuffles the concatenation.
    """
    by_class = {c: [] for c in v.classes}
    for i, (_, label) in enumerate(v.pairs):
        by_class[label].append(i)
    empty = [c for c, idx in by_class.items() if not idx]
    if empty:
        raise CorpusError(f"task {v.task}: no examples of class(es) {', '.join(empty)}")
    m = min(len(idx) for idx in by_class.values())
    rng = SplitMix64(seed)
    kept = []
    for c in v.classes:
        idx = by_class[c]
        rng.shuffle(idx)
        kept.extend(idx[:m])
    rng.shuffle(kept)
    return TaskView(v.task, [v.pairs[i] for i in kept])
