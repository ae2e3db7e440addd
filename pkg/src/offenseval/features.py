"""Vocabularies and document featurization: counts, TF-IDF and padded index sequences."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

PAD = 0
UNK = 1
DENSE = "dense_count"
SEQUENCE = "sequence"


@dataclass(frozen=True)
class Vocabulary:
    """Frequency-ranked token index.

    In ``sequence`` mode indices 0 and 1 are reserved for PAD and UNK and
    tokens start at 2.
    """

    ordered_tokens: tuple
    frequencies: tuple
    max_size: Optional[int]
    mode: str = DENSE

    def __post_init__(self):
        if self.mode not in (DENSE, SEQUENCE):
            raise ValueError(f"unknown vocabulary mode {self.mode!r}")
        offset = 2 if self.mode == SEQUENCE else 0
        object.__setattr__(self, "ordered_tokens", tuple(self.ordered_tokens))
        object.__setattr__(self, "frequencies", tuple(self.frequencies))
        object.__setattr__(self, "index_of",
                           {t: i + offset for i, t in enumerate(self.ordered_tokens)})

    def __len__(self):
        return len(self.ordered_tokens)

    @property
    def dim(self) -> int:
        """Feature dimension (dense) or embedding-table rows (sequence)."""
        return len(self.ordered_tokens) + (2 if self.mode == SEQUENCE else 0)


@dataclass(frozen=True)
class SparseVector:
    """Sparse document vector; ``indices`` strictly increasing."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


@dataclass(frozen=True)
class TfidfModel:
    idf: np.ndarray
    document_count: int


@dataclass(frozen=True)
class EncodedSequence:
    indices: np.ndarray
    true_length: int


def build_vocabulary(docs, max_size: Optional[int] = None, mode: str = DENSE) -> Vocabulary:
    """Keep the ``max_size`` most frequent tokens, ties broken alphabetically.

    ``max_size=None`` keeps every token.
    """
    if max_size is not None and max_size < 1:
        raise ValueError("max_size must be >= 1")
    freq = Counter()
    for doc in docs:
        freq.update(doc)
    if not freq:
        raise ValueError("cannot build a vocabulary from a corpus with no tokens")
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    if max_size is not None:
        ranked = ranked[:max_size]
    return Vocabulary(tuple(t for t, _ in ranked), tuple(c for _, c in ranked), max_size, mode)


def bow_vectorize(doc, v: Vocabulary, binary: bool = False) -> SparseVector:
    if v.mode != DENSE:
        raise ValueError("bag-of-words needs a dense_count vocabulary")
    counts = Counter(v.index_of[t] for t in doc if t in v.index_of)
    idx = np.array(sorted(counts), dtype=np.int64)
    vals = np.array([1 if binary else counts[i] for i in idx], dtype=np.int64)
    return SparseVector(idx, vals, v.dim)


def tfidf_fit(docs: Sequence[SparseVector], n_docs: Optional[int] = None) -> TfidfModel:
    """Smoothed idf: ``ln((1 + n) / (1 + df)) + 1``."""
    n = len(docs) if n_docs is None else n_docs
    if n < 1:
        raise ValueError("n_docs must be >= 1")
    if not docs:
        raise ValueError("tfidf_fit needs at least one document to fix the dimension")
    dim = docs[0].dim
    df = np.zeros(dim, dtype=np.int64)
    for d in docs:
        if d.dim != dim:
            raise ValueError(f"dimension mismatch: {d.dim} vs {dim}")
        df[d.indices[d.values > 0]] += 1
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    return TfidfModel(idf, n)


def tfidf_transform(doc: SparseVector, m: TfidfModel) -> SparseVector:
    if doc.dim != len(m.idf):
        raise ValueError(f"dimension mismatch: {doc.dim} vs {len(m.idf)}")
    w = doc.values * m.idf[doc.indices]
    norm = math.sqrt(float(np.dot(w, w)))
    if norm > 0:
        w = w / norm
    return SparseVector(doc.indices, w.astype(np.float64), doc.dim)


def to_csr(vectors: Sequence[SparseVector], dim: Optional[int] = None) -> sp.csr_matrix:
    """Stack sparse vectors into a float64 CSR matrix."""
    if dim is None:
        if not vectors:
            raise ValueError("dimension unknown for an empty list")
        dim = vectors[0].dim
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        if v.dim != dim:
            raise ValueError(f"dimension mismatch: {v.dim} vs {dim}")
        indptr[i + 1] = indptr[i] + len(v.indices)
    if vectors:
        indices = np.concatenate([v.indices for v in vectors]).astype(np.int64)
        data = np.concatenate([np.asarray(v.values, dtype=np.float64) for v in vectors])
    else:
        indices, data = np.zeros(0, np.int64), np.zeros(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def word2idx_encode(doc, v: Vocabulary, max_len: int) -> EncodedSequence:
    """Index, truncate to ``max_len`` (keep prefix), then post-pad with PAD."""
    if v.mode != SEQUENCE:
        raise ValueError("word2idx needs a sequence-mode vocabulary")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    ids = [v.index_of.get(t, UNK) for t in doc[:max_len]]
    out = np.zeros(max_len, dtype=np.int64)
    out[:len(ids)] = ids
    return EncodedSequence(out, len(ids))


def encode_batch(docs, v: Vocabulary, max_len: int) -> tuple[np.ndarray, np.ndarray]:
    """Encode many documents into an ``(n, max_len)`` id matrix and a length vector."""
    ids = np.zeros((len(docs), max_len), dtype=np.int64)
    lengths = np.zeros(len(docs), dtype=np.int64)
    for i, doc in enumerate(docs):
        enc = word2idx_encode(doc, v, max_len)
        ids[i] = enc.indices
        lengths[i] = enc.true_length
    return ids, lengths


def corpus_max_len(docs) -> int:
    if len(docs) == 0:
        raise ValueError("empty corpus")
    return max(len(d) for d in docs)


def dump_vocabulary(v: Vocabulary) -> str:
    """``rank token frequency`` lines, rank starting at 1."""
    return "".join(f"{r} {t} {f}\n"
                   for r, (t, f) in enumerate(zip(v.ordered_tokens, v.frequencies), start=1))


def dump_sparse(ids, vectors: Sequence[SparseVector]) -> str:
    """``doc_id index:value ...`` lines; integral values are written without a decimal point."""
    lines = []
    for doc_id, vec in zip(ids, vectors):
        parts = [str(doc_id)]
        for i, x in zip(vec.indices, vec.values):
            x = x.item()
            parts.append(f"{i}:{x}" if isinstance(x, int) else f"{i}:{x!r}")
        lines.append(" ".join(parts) + "\n")
    return "".join(lines)
