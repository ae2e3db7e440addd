"""End-to-end training and prediction: data -> cleaning -> features -> model."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import numpy as np

from . import corpus, features, linear
from .evaluation import MetricsReport, evaluate
from .neural import model as nm
from .textprep import AbbreviationLexicon, CleanConfig, load_stopwords, preprocess_corpus

log = logging.getLogger(__name__)

LINEAR_MODELS = ("lr", "nb", "sgd")
NEURAL_MODELS = nm.ARCHS
FEATURES = ("bow", "tfidf", "seq")
VAL_RATIO = 0.9


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything that determines a training run. ``None`` means "use the documented default"."""

    task: str = "A"
    model: str = "lr"
    features: Optional[str] = None  # seq for neural models, bow otherwise
    balance: bool = False
    binary_features: bool = False
    seed: int = 0
    train_path: Optional[str] = None
    val_path: Optional[str] = None
    model_out: Optional[str] = None
    history_out: Optional[str] = None
    vocab_union: Optional[str] = None
    lexicon_path: Optional[str] = None
    stopwords_path: Optional[str] = None
    vocab_size: Optional[int] = None  # 2500 for sequences, unlimited for bow/tfidf
    max_len: Optional[int] = None  # longest training document
    clean: dict = field(default_factory=lambda: CleanConfig().to_dict())
    # linear models
    l2_lambda: Optional[float] = None  # 1e-4 linear, 1e-5 neural
    learning_rate: Optional[float] = None
    max_epochs: int = 500
    tol: float = 1e-6
    alpha: float = 1.0
    # neural models
    epochs: Optional[int] = None  # per-architecture/task defaults
    batch_size: int = 32
    optimizer: str = "adam"
    dropout_p: float = 0.5
    patience: Optional[int] = 2
    emb_dim: Optional[int] = None
    hidden: int = 100
    n_filters: int = 100
    window: int = 3

    def resolved(self) -> "RunConfig":
        """Validate and fill model-dependent defaults."""
        if self.task not in corpus.TASK_LABELS:
            raise ConfigError(f"unknown task {self.task!r}")
        if self.model not in LINEAR_MODELS + NEURAL_MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        neural = self.model in NEURAL_MODELS
        feats = self.features or ("seq" if neural else "bow")
        if feats not in FEATURES:
            raise ConfigError(f"unknown feature type {feats!r}")
        if neural and feats != "seq":
            raise ConfigError(f"model {self.model} needs --features seq, not {feats}")
        if not neural and feats == "seq":
            raise ConfigError(f"model {self.model} needs --features bow or tfidf")
        if self.vocab_union and neural:
            raise ConfigError("--vocab-union applies to bow/tfidf features only")
        CleanConfig.from_dict(self.clean)
        out = RunConfig(**asdict(self))
        out.features = feats
        if out.vocab_size is None and feats == "seq":
            out.vocab_size = 2500
        if out.vocab_size is not None and out.vocab_size < 1:
            out.vocab_size = None
        if out.l2_lambda is None:
            out.l2_lambda = 1e-5 if neural else 1e-4
        if out.learning_rate is None:
            out.learning_rate = 1e-3 if neural else (0.01 if self.model == "sgd" else 0.1)
        if neural and out.epochs is None:
            out.epochs = nm.default_epochs(self.model, self.task)
        if out.patience is not None and out.patience < 1:
            out.patience = None
        return out

    def fit_config(self) -> linear.FitConfig:
        return linear.FitConfig(self.l2_lambda, self.learning_rate, self.max_epochs, self.tol,
                                seed=self.seed)

    def train_config(self) -> nm.TrainConfig:
        return nm.TrainConfig(
            epochs=self.epochs, batch_size=self.batch_size, learning_rate=self.learning_rate,
            optimizer=self.optimizer, l2_lambda=self.l2_lambda, dropout_p=self.dropout_p,
            patience=self.patience, seed=self.seed, emb_dim=self.emb_dim, hidden=self.hidden,
            n_filters=self.n_filters, window=self.window)


@dataclass
class Featurizer:
    kind: str
    vocabulary: features.Vocabulary
    binary: bool = False
    tfidf: Optional[features.TfidfModel] = None
    max_len: Optional[int] = None

    def sparse(self, docs):
        vecs = [features.bow_vectorize(d, self.vocabulary, self.binary) for d in docs]
        if self.kind == "tfidf":
            vecs = [features.tfidf_transform(v, self.tfidf) for v in vecs]
        return features.to_csr(vecs, self.vocabulary.dim)

    def sequences(self, docs):
        return features.encode_batch(docs, self.vocabulary, self.max_len)


@dataclass
class TrainedPipeline:
    """A self-contained fitted classifier: preprocessing, features and model."""

    config: RunConfig
    clean: CleanConfig
    lexicon: AbbreviationLexicon
    stopwords: Optional[frozenset]
    featurizer: Featurizer
    model: Any
    classes: tuple

    def tokenize(self, texts):
        return preprocess_corpus(texts, self.clean, self.lexicon, self.stopwords)

    def predict_docs(self, docs) -> list:
        if isinstance(self.model, nm.Network):
            ids, lengths = self.featurizer.sequences(docs)
            return nm.predict_labels(self.model, ids, lengths)
        X = self.featurizer.sparse(docs)
        if isinstance(self.model, linear.NaiveBayesModel):
            return linear.nb_predict(self.model, X)
        return linear.linear_predict(self.model, X)

    def predict(self, texts) -> list:
        return self.predict_docs(self.tokenize(texts))


@dataclass
class TrainResult:
    pipeline: TrainedPipeline
    report: MetricsReport
    report_split: str  # "validation" or "train"
    history: Optional[nm.TrainHistory] = None


def _preprocessing(cfg: RunConfig):
    clean = CleanConfig.from_dict(cfg.clean)
    lex = (AbbreviationLexicon.load(cfg.lexicon_path) if cfg.lexicon_path
           else AbbreviationLexicon.default())
    stop = None
    if clean.remove_stopwords:
        stop = load_stopwords(cfg.stopwords_path)
    return clean, lex, stop


def train(cfg: RunConfig) -> TrainResult:
    cfg = cfg.resolved()
    if not cfg.train_path:
        raise ConfigError("a training data path is required")
    clean, lex, stop = _preprocessing(cfg)
    data = corpus.load_olid_tsv(cfg.train_path)
    val_data = corpus.load_olid_tsv(cfg.val_path) if cfg.val_path else None
    neural = cfg.model in NEURAL_MODELS
    if neural and val_data is None:
        data, val_data = corpus.split_train_val(data, VAL_RATIO, cfg.seed)
    view = corpus.task_view(data, cfg.task)
    if cfg.balance:
        view = corpus.random_draw_balance(view, cfg.seed)
    classes = corpus.TASK_LABELS[cfg.task]
    docs = preprocess_corpus(view.texts, clean, lex, stop)
    val_view = corpus.task_view(val_data, cfg.task) if val_data is not None else None
    val_docs = preprocess_corpus(val_view.texts, clean, lex, stop) if val_view else None
    log.info("task %s: %d training documents", cfg.task, len(docs))

    history = None
    if neural:
        vocab = features.build_vocabulary(docs, cfg.vocab_size, features.SEQUENCE)
        max_len = cfg.max_len or features.corpus_max_len(docs)
        if cfg.model == "cnn":
            max_len = max(max_len, cfg.window)
        feat = Featurizer("seq", vocab, max_len=max_len)
        code = {c: i for i, c in enumerate(classes)}
        tr = (*feat.sequences(docs), np.array([code[y] for y in view.labels]))
        va = (*feat.sequences(val_docs), np.array([code[y] for y in val_view.labels]))
        model, history = nm.train_model(cfg.model, tr, va, cfg.train_config(), classes,
                                        max_len=max_len, n_rows=vocab.dim)
    else:
        vocab_docs = docs
        if cfg.vocab_union:
            extra = [t for _, t in corpus.load_tweets_tsv(cfg.vocab_union)]
            vocab_docs = docs + preprocess_corpus(extra, clean, lex, stop)
        vocab = features.build_vocabulary(vocab_docs, cfg.vocab_size, features.DENSE)
        feat = Featurizer(cfg.features, vocab, binary=cfg.binary_features)
        if cfg.features == "tfidf":
            counts = [features.bow_vectorize(d, vocab, cfg.binary_features) for d in docs]
            feat.tfidf = features.tfidf_fit(counts)
        X = feat.sparse(docs)
        if cfg.model == "lr":
            model = linear.lr_fit(X, view.labels, cfg.fit_config(), classes)
        elif cfg.model == "sgd":
            model = linear.hinge_sgd_fit(X, view.labels, cfg.fit_config(), classes)
        else:
            model = linear.nb_fit(X, view.labels, cfg.alpha, classes)

    pipe = TrainedPipeline(cfg, clean, lex, stop, feat, model, classes)
    if val_view is not None and len(val_view):
        report = evaluate(val_view.labels, pipe.predict_docs(val_docs), classes)
        split = "validation"
    else:
        report = evaluate(view.labels, pipe.predict_docs(docs), classes)
        split = "train"
    return TrainResult(pipe, report, split, history)
