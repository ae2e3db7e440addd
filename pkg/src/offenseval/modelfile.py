"""Versioned JSON model files.

Layout (keys sorted, UTF-8, one line)::

    {"format": "offenseval-model", "format_version": 1,
     "config": {...RunConfig...},
     "preprocessing": {"clean": {...}, "lexicon": {...}, "stopwords": [...] | null},
     "vocabulary": {"mode", "max_size", "tokens", "frequencies"},
     "features": {"kind", "binary", "max_len", "idf": ARRAY | null, "document_count"},
     "model": {"kind", "classes", "arrays": {name: ARRAY}, ...}}

An ARRAY is ``{"dtype", "shape", "data"}`` with ``data`` the row-major values
as space-separated C99 hex floats (``float.hex``), so every bit survives the
round trip.
"""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from . import features, linear
from .neural.model import Network
from .pipeline import Featurizer, RunConfig, TrainedPipeline
from .textprep import AbbreviationLexicon, CleanConfig

FORMAT = "offenseval-model"
FORMAT_VERSION = 1


class ModelFileError(ValueError):
    pass


def encode_array(a: np.ndarray) -> dict:
    a = np.asarray(a)
    flat = a.astype(np.float64).ravel().tolist()
    return {"dtype": a.dtype.name, "shape": list(a.shape), "data": " ".join(map(float.hex, flat))}


def decode_array(d: dict) -> np.ndarray:
    data = d["data"].split() if d["data"] else []
    return np.array([float.fromhex(x) for x in data], dtype=np.float64).astype(
        d["dtype"]).reshape(d["shape"])


def _model_section(model) -> dict:
    if isinstance(model, Network):
        return {"kind": model.arch, "classes": list(model.classes), "max_len": model.max_len,
                "window": model.window,
                "arrays": {k: encode_array(v) for k, v in model.params.items()}}
    if isinstance(model, linear.NaiveBayesModel):
        return {"kind": "nb", "classes": list(model.classes), "alpha": model.alpha,
                "arrays": {"log_prior": encode_array(model.log_prior),
                           "log_likelihood": encode_array(model.log_likelihood)}}
    return {"kind": "sgd" if model.kind == linear.HINGE else "lr", "classes": list(model.classes),
            "arrays": {"weights": encode_array(model.weights), "bias": encode_array(model.bias)}}


def _load_model(sec: dict):
    kind, classes = sec["kind"], tuple(sec["classes"])
    arrays = {k: decode_array(v) for k, v in sec["arrays"].items()}
    if kind in ("lstm", "bilstm", "cnn"):
        return Network(kind, classes, arrays, sec["max_len"], sec["window"])
    if kind == "nb":
        return linear.NaiveBayesModel(arrays["log_prior"], arrays["log_likelihood"],
                                      sec["alpha"], classes)
    if kind in ("lr", "sgd"):
        return linear.LinearModel(arrays["weights"], arrays["bias"], classes,
                                  linear.HINGE if kind == "sgd" else linear.LOGISTIC)
    raise ModelFileError(f"unknown model kind {kind!r}")


def dumps(pipe: TrainedPipeline) -> str:
    feat = pipe.featurizer
    v = feat.vocabulary
    doc = {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        # output locations are not part of the model
        "config": {**asdict(pipe.config), "model_out": None, "history_out": None},
        "preprocessing": {
            "clean": pipe.clean.to_dict(),
            "lexicon": dict(sorted(pipe.lexicon.entries.items())),
            "stopwords": sorted(pipe.stopwords) if pipe.stopwords is not None else None,
        },
        "vocabulary": {"mode": v.mode, "max_size": v.max_size,
                       "tokens": list(v.ordered_tokens), "frequencies": list(v.frequencies)},
        "features": {
            "kind": feat.kind, "binary": feat.binary, "max_len": feat.max_len,
            "idf": encode_array(feat.tfidf.idf) if feat.tfidf else None,
            "document_count": feat.tfidf.document_count if feat.tfidf else None,
        },
        "model": _model_section(pipe.model),
    }
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"


def loads(text: str) -> TrainedPipeline:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"not a model file: {exc}") from None
    if doc.get("format") != FORMAT:
        raise ModelFileError("not an offenseval model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ModelFileError(f"unsupported model file version {doc.get('format_version')!r} "
                             f"(expected {FORMAT_VERSION})")
    pre = doc["preprocessing"]
    vs = doc["vocabulary"]
    vocab = features.Vocabulary(tuple(vs["tokens"]), tuple(vs["frequencies"]),
                                vs["max_size"], vs["mode"])
    fs = doc["features"]
    tfidf = (features.TfidfModel(decode_array(fs["idf"]), fs["document_count"])
             if fs["idf"] is not None else None)
    feat = Featurizer(fs["kind"], vocab, fs["binary"], tfidf, fs["max_len"])
    model = _load_model(doc["model"])
    stop = frozenset(pre["stopwords"]) if pre["stopwords"] is not None else None
    return TrainedPipeline(RunConfig(**doc["config"]), CleanConfig.from_dict(pre["clean"]),
                           AbbreviationLexicon(pre["lexicon"]), stop, feat, model,
                           tuple(doc["model"]["classes"]))


def save(pipe: TrainedPipeline, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(pipe))


def load(path) -> TrainedPipeline:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
